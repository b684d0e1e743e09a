"""Tests for the elite container, variation operators, illumination and snapshots."""

import itertools
import os

import numpy as np
import pytest

from src.agent import init_policy
from src.archive import (
    ArchiveConfig,
    Elite,
    InjectionPool,
    LineageRecord,
    UnstructuredArchive,
    competence_gate,
    illuminate,
    inherit_lineage,
    injection_scores,
    load_archive,
    mutate,
    record_lineage,
    reembed,
    save_archive,
    save_stale_snapshot,
    select_parent,
)
from src.embedder import EmbedderConfig, Normalizer, init_embedding_state
from src.gridworld import standard_spec
from src.utils.errors import MalformedTagError, StaleDescriptorError, UsageError


def make_elite(eid, z, fitness, version=0, sigma=0.05, params=None, lineage=('A',)):
    return Elite(eid, params or {'w': np.zeros(3)}, fitness, 1.0, np.asarray(z, dtype=float),
                 sigma, None, LineageRecord(tuple(lineage)), version, source_tag='A')


def small_archive(**overrides):
    return UnstructuredArchive('A', ArchiveConfig(**overrides), version=0)


def small_state(seed=0):
    config = EmbedderConfig(step_hidden=8, gru_hidden=8, proj_hidden=8)
    state = init_embedding_state(seed, config)
    state.normalizer = Normalizer.identity()
    return state


def tiny_archive_config(**overrides):
    base = dict(iterations=4, eval_episodes=2, sketch_episodes=2, target_size=4, capacity=6, d_min=0.01)
    base.update(overrides)
    return ArchiveConfig(**base)


class TestInsert:
    def test_empty_archive_inserts(self):
        archive = small_archive()
        assert archive.try_insert(make_elite('A-1', [0, 0], 0.1)).outcome == 'inserted'
        assert len(archive) == 1

    def test_replace_when_fitter(self):
        archive = small_archive()
        archive.try_insert(make_elite('A-1', [0, 0], 0.5))
        archive.try_insert(make_elite('A-2', [1, 0], 0.2))
        result = archive.try_insert(make_elite('A-3', [0.05, 0], 0.6))
        assert result.outcome == 'replaced'
        assert result.old.elite_id == 'A-1'
        assert sorted(e.elite_id for e in archive) == ['A-2', 'A-3']

    def test_reject_when_weaker(self):
        archive = small_archive()
        archive.try_insert(make_elite('A-1', [0, 0], 0.5))
        archive.try_insert(make_elite('A-2', [1, 0], 0.2))
        assert archive.try_insert(make_elite('A-3', [0.05, 0], 0.4)).outcome == 'rejected'
        assert len(archive) == 2

    def test_capacity_eviction(self):
        archive = small_archive(target_size=2, capacity=3)
        for i, fit in enumerate([0.3, 0.1, 0.5]):
            archive.try_insert(make_elite(f"A-{i}", [i, 0], fit))
        result = archive.try_insert(make_elite('A-9', [10, 0], 0.2))
        assert result.outcome == 'inserted'
        assert [e.elite_id for e in result.evicted] == ['A-1']
        assert archive.try_insert(make_elite('A-10', [20, 0], 0.05)).outcome == 'rejected'
        assert len(archive) == 3

    def test_version_mismatch(self):
        archive = small_archive()
        with pytest.raises(StaleDescriptorError):
            archive.try_insert(make_elite('A-1', [0, 0], 0.1, version=1))

    def test_spacing_holds_after_every_insert(self):
        rng = np.random.default_rng(0)
        archive = small_archive(target_size=20, capacity=30, d_min=0.2)
        for i in range(300):
            archive.try_insert(make_elite(f"A-{i}", rng.random(2), rng.random()))
            assert len(archive) <= 30
            assert archive.min_pairwise_distance() >= archive.d_min

    def test_random_operations_keep_spacing_and_capacity(self):
        rng = np.random.default_rng(42)
        archive = small_archive()
        capacity = archive.config.capacity
        assert capacity == 384
        repacks = 0
        for i in range(10_000):
            op = rng.random()
            if op < 0.85:
                archive.try_insert(make_elite(f"A-{i}", rng.normal(size=8), rng.random()))
            elif op < 0.95:
                archive.adapt_dmin()
            else:
                archive.repack()
                repacks += 1
                assert archive.min_pairwise_distance() >= archive.d_min
            assert len(archive) <= capacity
        assert repacks > 0

    def test_forced_insert_ignores_fitness(self):
        archive = small_archive()
        archive.try_insert(make_elite('A-1', [0, 0], 0.9))
        assert archive.try_insert(make_elite('A-2', [0.01, 0], 0.1), force=True).outcome == 'replaced'


class TestSpacing:
    def test_at_target_unchanged(self):
        archive = small_archive(target_size=2, capacity=3)
        archive.elites = [make_elite('a', [0], 0), make_elite('b', [1], 0)]
        assert archive.adapt_dmin() == pytest.approx(0.10)

    def test_above_target_grows(self):
        archive = small_archive(target_size=2, capacity=3)
        archive.elites = [make_elite(str(i), [i], 0) for i in range(3)]
        assert archive.adapt_dmin() == pytest.approx(0.105)

    def test_below_target_shrinks(self):
        archive = small_archive(target_size=10, capacity=12)
        archive.elites = [make_elite('a', [0], 0)]
        assert archive.adapt_dmin() == pytest.approx(0.099)

    def test_clamped_at_upper_bound(self):
        archive = small_archive(target_size=2, capacity=3, d_min=10.0)
        archive.elites = [make_elite(str(i), [i], 0) for i in range(3)]
        assert archive.adapt_dmin() == 10.0


class TestRepack:
    def test_keeps_fitter_of_close_pair(self):
        archive = small_archive()
        archive.elites = [make_elite('a', [0, 0], 0.6), make_elite('b', [0.05, 0], 0.7)]
        archive.repack()
        assert [e.elite_id for e in archive] == ['b']

    def test_valid_archive_unchanged_and_idempotent(self):
        archive = small_archive()
        archive.elites = [make_elite('a', [0, 0], 0.6), make_elite('b', [1, 0], 0.7)]
        assert archive.repack() == 0
        assert {e.elite_id for e in archive} == {'a', 'b'}
        rng = np.random.default_rng(1)
        archive.elites = [make_elite(f"x{i}", rng.random(2), rng.random()) for i in range(40)]
        archive.d_min = 0.25
        archive.repack()
        once = [e.elite_id for e in archive]
        archive.repack()
        assert [e.elite_id for e in archive] == once

    @pytest.mark.parametrize('seed', range(10))
    def test_greedy_output_is_feasible_and_maximal(self, seed):
        rng = np.random.default_rng(seed)
        elites = [make_elite(f"e{i}", rng.random(2) * 0.4, rng.random()) for i in range(8)]
        archive = small_archive(d_min=0.15)
        archive.elites = list(elites)
        archive.repack()
        kept = {e.elite_id for e in archive}
        assert archive.min_pairwise_distance() >= 0.15
        for elite in elites:
            if elite.elite_id in kept:
                continue
            blockers = [k for k in archive if np.linalg.norm(k.descriptor - elite.descriptor) < 0.15]
            assert blockers and all(k.fitness >= elite.fitness for k in blockers)
        feasible_sizes = [
            r for r in range(1, 9)
            for combo in itertools.combinations(elites, r)
            if all(np.linalg.norm(a.descriptor - b.descriptor) >= 0.15
                   for a, b in itertools.combinations(combo, 2))
        ]
        assert len(archive) <= max(feasible_sizes)


class TestVariation:
    def test_sigma_bounds(self):
        rng = np.random.default_rng(0)
        for sigma in (1e-3, 0.05, 1.0):
            parent = make_elite('p', [0], 0, sigma=sigma)
            for _ in range(200):
                _, child_sigma = mutate(parent, rng)
                assert 1e-3 <= child_sigma <= 1.0

    def test_mutation_step_size(self):
        parent = make_elite('p', [0], 0, params={'a': np.ones((4, 5)), 'b': np.zeros(5)})
        rng = np.random.default_rng(1)
        ratios = []
        for _ in range(10_000):
            child, sigma = mutate(parent, rng)
            sq = sum(np.sum((child[k] - parent.params[k]) ** 2) for k in child)
            ratios.append(sq / (sigma ** 2 * 25))
        assert np.mean(ratios) == pytest.approx(1.0, rel=0.05)

    def test_mutation_deterministic(self):
        parent = make_elite('p', [0], 0)
        a = mutate(parent, np.random.default_rng(5))
        b = mutate(parent, np.random.default_rng(5))
        assert a[1] == b[1] and np.array_equal(a[0]['w'], b[0]['w'])

    def test_injection_score_examples(self):
        archive_z = np.zeros((1, 2))
        first = make_elite('c1', [0.9, 0], 0.0)
        second = make_elite('c2', [0.0, 0], 1.0)
        scores = injection_scores(archive_z, [first, second], 0.5)
        assert scores == pytest.approx([0.9, 0.5])
        assert 0.4 + 0.5 * 0.8 == pytest.approx(0.8)

    def test_pool_ignored_without_injection(self):
        archive = small_archive()
        archive.try_insert(make_elite('A-1', [0, 0], 0.5))
        pool = InjectionPool([make_elite('B-1', [5, 5], 1.0)])
        rng = np.random.default_rng(0)
        for _ in range(50):
            parent, injected = select_parent(archive, pool, 0.0, rng)
            assert parent.elite_id == 'A-1' and not injected

    def test_pool_used_when_always_injecting(self):
        archive = small_archive()
        archive.try_insert(make_elite('A-1', [0, 0], 0.5))
        pool = InjectionPool([make_elite('B-1', [0.9, 0], 0.0), make_elite('B-2', [0.0, 0], 1.0)])
        parent, injected = select_parent(archive, pool, 1.0, np.random.default_rng(0))
        assert injected and parent.elite_id == 'B-1'

    def test_empty_pool_falls_back(self):
        archive = small_archive()
        archive.try_insert(make_elite('A-1', [0, 0], 0.5))
        parent, injected = select_parent(archive, InjectionPool([]), 1.0, np.random.default_rng(0))
        assert parent.elite_id == 'A-1' and not injected

    def test_empty_archive(self):
        with pytest.raises(UsageError):
            select_parent(small_archive(), None, 0.0, np.random.default_rng(0))


class TestLineage:
    def test_append_rules(self):
        assert record_lineage(LineageRecord(), 'A').to_list() == ['A']
        assert record_lineage(LineageRecord(('A', 'B')), 'C').to_list() == ['A', 'B', 'C']
        assert record_lineage(LineageRecord(('A',)), "A'").to_list() == ['A', 'A']

    def test_inheritance(self):
        assert inherit_lineage(LineageRecord(('A', 'B')), 'B').to_list() == ['A', 'B']
        assert inherit_lineage(LineageRecord(('A',)), "B'").to_list() == ['A', 'B']

    def test_malformed_tag(self):
        with pytest.raises(MalformedTagError):
            record_lineage(LineageRecord(), 'F')

    def test_competence_gate(self):
        config = ArchiveConfig()
        assert competence_gate(0.04, config) == pytest.approx(0.05)
        assert competence_gate(0.8, config) == pytest.approx(0.4)


@pytest.fixture(scope='module')
def illuminated():
    spec = standard_spec('A', seed=3, variant='small')
    params = init_policy(np.random.default_rng(0), hidden=(16, 16))
    state = small_state()
    result = illuminate(spec, params, state, 'A', tiny_archive_config(gate_floor=0.0, gate_ratio=0.0), seed=1)
    return spec, params, state, result


class TestIlluminate:
    def test_zero_budget_keeps_only_base(self):
        spec = standard_spec('B', seed=2, variant='small')
        params = init_policy(np.random.default_rng(1), hidden=(16, 16))
        result = illuminate(spec, params, small_state(), 'B', tiny_archive_config(), seed=0, iterations=0)
        assert len(result.archive) == 1
        assert result.archive.elites[0].elite_id == result.base_elite.elite_id
        assert result.base_elite.lineage.to_list() == ['B']
        assert np.array_equal(result.archive.z_ref, result.base_elite.descriptor)

    def test_structure_of_seeded_run(self, illuminated):
        _, params, _, result = illuminated
        archive = result.archive
        assert 1 <= len(archive) <= archive.config.capacity
        assert all(e.sr >= result.gate for e in archive if e.elite_id != result.base_elite.elite_id)
        assert all(e.lineage.last == 'A' for e in archive)
        assert archive.stats['evaluations'] == 4
        assert result.base_elite.params is not params
        for elite in archive:
            if elite.sketch_complete:
                assert elite.fitness == pytest.approx(elite.sketch.mean_return)

    def test_gate_blocks_incompetent_offspring(self):
        spec = standard_spec('A', seed=3, variant='small')
        params = init_policy(np.random.default_rng(0), hidden=(16, 16))
        config = tiny_archive_config(gate_floor=1.01)
        result = illuminate(spec, params, small_state(), 'A', config, seed=1)
        assert len(result.archive) == 1
        assert result.archive.stats['gated'] == 4

    def test_requires_normalizer(self):
        state = small_state()
        state.normalizer = None
        with pytest.raises(UsageError):
            illuminate(standard_spec('A', 0, 'small'), init_policy(np.random.default_rng(0), hidden=(16, 16)),
                       state, 'A', tiny_archive_config(), seed=0)

    def test_deterministic(self):
        spec = standard_spec('A', seed=3, variant='small')
        params = init_policy(np.random.default_rng(0), hidden=(16, 16))
        config = tiny_archive_config(gate_floor=0.0, gate_ratio=0.0)
        a = illuminate(spec, params, small_state(), 'A', config, seed=1).archive
        b = illuminate(spec, params, small_state(), 'A', config, seed=1).archive
        assert [e.elite_id for e in a] == [e.elite_id for e in b]
        assert all(np.array_equal(x.descriptor, y.descriptor) for x, y in zip(a, b))


class TestReembed:
    def test_same_state_is_a_fixed_point(self, illuminated):
        _, _, state, result = illuminated
        archive = load_copy(result.archive)
        before = {e.elite_id: e.descriptor.copy() for e in archive}
        reembed(archive, state)
        for elite in archive:
            assert np.allclose(elite.descriptor, before[elite.elite_id], atol=1e-9)
        once = {e.elite_id: e.descriptor.copy() for e in archive}
        reembed(archive, state)
        for elite in archive:
            assert np.allclose(elite.descriptor, once[elite.elite_id], atol=1e-12)

    def test_version_stamp(self, illuminated):
        _, _, state, result = illuminated
        archive = load_copy(result.archive)
        newer = state.copy()
        newer.version = 4
        reembed(archive, newer)
        assert archive.version == 4
        assert all(e.version == 4 for e in archive)

    def test_older_state_is_rejected(self, illuminated):
        _, _, state, result = illuminated
        archive = load_copy(result.archive)
        archive.version = 5
        with pytest.raises(StaleDescriptorError):
            reembed(archive, state)

    def test_missing_sketches(self):
        state = small_state()
        archive = small_archive()
        sketch_source = illuminate(standard_spec('A', 3, 'small'), init_policy(np.random.default_rng(0), hidden=(16, 16)),
                                   state, 'A', tiny_archive_config(), seed=1, iterations=0).base_elite.sketch
        for i in range(4):
            elite = make_elite(f"A-{i}", [i, 0], 0.1 * i)
            elite.sketch = sketch_source if i else None
            archive.elites.append(elite)
        report = reembed(archive, state)
        assert report.dropped == 1 and len(archive) == 3

        archive.elites[0].sketch = None
        archive.elites[1].sketch = None
        calls = []
        report = reembed(archive, state, reevaluate=lambda e: calls.append(e.elite_id) or sketch_source)
        assert report.reevaluated == 2 and len(calls) == 2
        assert len(archive) == 3


def load_copy(archive):
    clone = UnstructuredArchive(archive.base_tag, archive.config, archive.version)
    clone.d_min = archive.d_min
    clone.base_sketch = archive.base_sketch
    clone.z_ref = None if archive.z_ref is None else archive.z_ref.copy()
    clone.elites = [
        Elite(e.elite_id, e.params, e.fitness, e.sr, e.descriptor.copy(), e.sigma, e.sketch,
              e.lineage, e.version, e.source_tag, e.parent_id, e.sketch_complete)
        for e in archive
    ]
    return clone


class TestSnapshots:
    def test_round_trip(self, tmp_path, illuminated):
        _, _, _, result = illuminated
        archive = result.archive
        save_archive(str(tmp_path), archive)
        loaded = load_archive(os.path.join(str(tmp_path), 'archives', 'A'))
        assert [e.elite_id for e in loaded] == [e.elite_id for e in archive]
        assert loaded.d_min == archive.d_min
        assert np.array_equal(loaded.z_ref, archive.z_ref)
        for a, b in zip(archive, loaded):
            assert np.array_equal(a.descriptor, b.descriptor)
            assert all(np.array_equal(a.params[k], b.params[k]) for k in a.params)
            assert b.lineage == a.lineage
        assert loaded.base_sketch is not None

    def test_missing_sketch_file_loads_as_none(self, tmp_path, illuminated):
        _, _, _, result = illuminated
        save_archive(str(tmp_path), result.archive)
        directory = os.path.join(str(tmp_path), 'archives', 'A')
        first = result.archive.elites[0].elite_id
        os.remove(os.path.join(directory, 'sketches', f"{first}.jsonl"))
        loaded = load_archive(directory)
        assert loaded.elites[0].sketch is None

    def test_stale_snapshot(self, tmp_path, illuminated):
        _, _, _, result = illuminated
        path = save_stale_snapshot(str(tmp_path), result.archive)
        assert path.endswith(f"stale-v{result.archive.version}.json")
        directory = os.path.join(str(tmp_path), 'archives', 'A')
        stale = load_archive(directory, os.path.basename(path),
                             os.path.join(directory, f"stale-v{result.archive.version}"))
        assert len(stale) == len(result.archive)
