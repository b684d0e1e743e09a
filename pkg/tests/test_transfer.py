"""Tests for candidate pooling and few-shot origin selection."""

import itertools

import numpy as np
import pytest

from src.agent import PPOConfig, TrainTrace, init_policy
from src.archive import ArchiveConfig, Elite, LineageRecord, UnstructuredArchive
from src.gridworld import standard_spec
from src.transfer import (
    ProbeResult,
    SelectionConfig,
    choose_origin,
    farthest_point,
    few_shot_select,
    horizon_sr,
    min_pairwise_distance,
    pool_candidates,
    record_lineage,
)
from src.utils.errors import ConfigurationError, InsufficientDataError, StaleDescriptorError


def make_elite(eid, z, fitness=0.5, tag='A', params=None):
    return Elite(eid, params or {'w': np.zeros(2)}, fitness, 0.5, np.asarray(z, dtype=float), 0.05,
                 None, LineageRecord((tag,)), 0, source_tag=tag)


def make_archive(tag, elites, version=0):
    archive = UnstructuredArchive(tag, ArchiveConfig(), version)
    archive.elites = list(elites)
    return archive


def probe(final, recoverability, cid='c'):
    return ProbeResult(cid, 'A', ['A'], 0.0, [(0, 0.0)], final, recoverability)


class TestPooling:
    def test_small_union_is_returned_whole(self):
        archives = [make_archive('A', [make_elite('A-1', [0])]), make_archive('B', [make_elite('B-1', [1], tag='B')])]
        pool = pool_candidates(archives, 8)
        assert {e.elite_id for e in pool} == {'A-1', 'B-1'}

    def test_extremes_before_midpoint(self):
        elites = [make_elite('m', [0.5]), make_elite('lo', [0.0]), make_elite('hi', [1.0])]
        chosen = {e.elite_id for e in farthest_point(elites, 2)}
        assert chosen == {'lo', 'hi'}

    def test_seeded_by_fitness(self):
        elites = [make_elite('a', [0.0], 0.1), make_elite('b', [0.5], 0.9), make_elite('c', [1.0], 0.2)]
        assert farthest_point(elites, 2)[0].elite_id == 'b'

    def test_fitness_tie_goes_to_earlier_tag(self):
        elites = [make_elite('C-1', [0.0], tag='C'), make_elite('A-1', [1.0], tag='A')]
        assert farthest_point(elites, 1)[0].elite_id == 'A-1'

    def test_duplicates_not_chosen_before_distinct(self):
        elites = [make_elite('a', [0.0], 0.9), make_elite('b', [0.0], 0.8), make_elite('c', [0.3], 0.1)]
        chosen = [e.elite_id for e in farthest_point(elites, 2)]
        assert chosen == ['a', 'c']

    @pytest.mark.parametrize('seed', range(20))
    def test_half_optimal_dispersion(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 11))
        k = int(rng.integers(2, n))
        elites = [make_elite(f"e{i}", rng.random(3), rng.random()) for i in range(n)]
        greedy = min_pairwise_distance(farthest_point(elites, k))
        optimum = max(min_pairwise_distance(list(c)) for c in itertools.combinations(elites, k))
        assert greedy >= 0.5 * optimum - 1e-12

    def test_empty_union(self):
        with pytest.raises(InsufficientDataError):
            pool_candidates([make_archive('A', [])], 8)

    def test_version_mismatch(self):
        with pytest.raises(StaleDescriptorError):
            pool_candidates([make_archive('A', [make_elite('A-1', [0])], version=1)], 8, version=2)

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        elites = [make_elite(f"e{i}", rng.random(2), rng.random()) for i in range(30)]
        first = [e.elite_id for e in farthest_point(elites, 8)]
        assert first == [e.elite_id for e in farthest_point(list(reversed(elites)), 8)]


class TestChooseOrigin:
    def test_single_candidate(self):
        assert choose_origin([probe(0.0, -1.0)], 0.05) == 0

    def test_two_stage_rule(self):
        probes = [probe(0.90, 0.1), probe(0.88, 0.3), probe(0.60, 0.9)]
        assert choose_origin(probes, 0.05) == 1

    def test_all_zero_takes_first(self):
        assert choose_origin([probe(0.0, 0.0) for _ in range(4)], 0.05) == 0

    def test_recoverability_tie_prefers_final(self):
        assert choose_origin([probe(0.86, 0.2), probe(0.90, 0.2)], 0.05) == 1

    def test_empty(self):
        with pytest.raises(InsufficientDataError):
            choose_origin([], 0.05)


class TestHorizon:
    def test_last_checkpoint_within_half(self):
        trace = TrainTrace([(0, 0.0, 0.0), (4000, 0.2, 0.1), (8000, 0.4, 0.2), (12000, 0.6, 0.3), (20000, 0.9, 0.5)])
        assert horizon_sr(trace, 20000) == pytest.approx(0.4)

    def test_config_validation(self):
        with pytest.raises(ConfigurationError):
            SelectionConfig(k_pool=0).validate()
        with pytest.raises(ConfigurationError):
            SelectionConfig(margin=-0.1).validate()


class TestFewShotSelect:
    def test_probes_leave_candidates_untouched(self):
        spec = standard_spec('A', seed=5, variant='small')
        rng = np.random.default_rng(0)
        pool = [make_elite(f"A-{i}", [i], params=init_policy(rng, hidden=(16, 16))) for i in range(2)]
        before = [{k: v.copy() for k, v in e.params.items()} for e in pool]
        config = SelectionConfig(zero_shot_episodes=2, probe_steps=128, probe_eval_every=64, probe_eval_episodes=2)
        ppo = PPOConfig(horizon=64, n_envs=2, minibatch_size=32, epochs=1, hidden=(16, 16))
        result = few_shot_select(pool, spec, "A'", config, ppo, seed=0, threads=2)

        assert len(result.probes) == 2
        assert sum(p.chosen for p in result.probes) == 1
        assert result.chosen.elite_id in {'A-0', 'A-1'}
        assert result.env_steps > 0
        for probe_result in result.probes:
            steps = [s for s, _ in probe_result.trace]
            assert steps == sorted(steps) and steps[0] == 0
            assert 0.0 <= probe_result.final_sr <= 1.0
        for elite, saved in zip(pool, before):
            assert all(np.array_equal(elite.params[k], saved[k]) for k in saved)

        again = few_shot_select(pool, spec, "A'", config, ppo, seed=0, threads=1)
        assert again.chosen.elite_id == result.chosen.elite_id
        assert [p.final_sr for p in again.probes] == [p.final_sr for p in result.probes]

        event = result.probes[0].to_event("A'")
        assert event['kind'] == 'probe' and event['target_tag'] == "A'"

    def test_empty_pool(self):
        with pytest.raises(InsufficientDataError):
            few_shot_select([], standard_spec('A', 0, 'small'), 'A', SelectionConfig(), PPOConfig(), seed=0)


class TestLineage:
    def test_chosen_origin_gains_target(self):
        lineage = record_lineage(LineageRecord(('A', 'B')), 'C')
        assert lineage.to_list() == ['A', 'B', 'C'] and lineage.depth == 3
