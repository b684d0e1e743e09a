"""Tests for the episode banks, boundary maintenance and drift diagnostics."""

import math
import os

import numpy as np
import pytest

from src.archive import ArchiveConfig, Elite, LineageRecord, UnstructuredArchive
from src.embedder import EmbedderConfig, init_embedding_state, mean_descriptors, normalize
from src.gridworld import Episode, EpisodeSet
from src.maintenance import (
    AnchorBank,
    Banks,
    MaintenanceConfig,
    ReplayBank,
    boundary_maintenance,
    bootstrap_normalizer,
    drift_metrics,
    sample_refit_bank,
)
from src.utils.errors import ConfigurationError, EmptyEpisodeError, ShapeError


def make_set(rng, successes, total, offset=0.0, tag='A'):
    episodes = [
        Episode(rng.random((int(rng.integers(3, 8)), 11)) + offset, 0.9 if i < successes else 0.0, i < successes)
        for i in range(total)
    ]
    return EpisodeSet(episodes, tag)


def filled_banks(n_sets, seed=0, success_every=2):
    rng = np.random.default_rng(seed)
    banks = Banks(replay=ReplayBank(rng=np.random.default_rng(seed)))
    for k in range(n_sets):
        good = k % success_every == 0
        banks.store_episode_set(make_set(rng, 3 if good else 0, 3, offset=0.1 * k))
    return banks


def embedder_config(steps=2):
    return EmbedderConfig(steps=steps, batch_size=8, min_anchor_rows=2, step_hidden=4, gru_hidden=4, proj_hidden=4)


def small_state(seed=0):
    return init_embedding_state(seed, embedder_config())


def sketched_archive(state, seed=1, n=5):
    rng = np.random.default_rng(seed)
    archive = UnstructuredArchive('A', ArchiveConfig(d_min=1e-3), version=state.version)
    for i in range(n):
        sketch = make_set(rng, 1, 2, offset=0.5 * i)
        archive.elites.append(Elite(f"A-{i:05d}", {'w': np.full(3, float(i))}, 0.1 * i, 0.5, np.full(8, float(i)),
                                    0.05, sketch, LineageRecord(('A',)), state.version, source_tag='A'))
    archive.base_sketch = archive.elites[0].sketch
    return archive


class TestBanks:
    def test_threshold_boundary(self):
        rng = np.random.default_rng(0)
        banks = Banks()
        assert not banks.store_episode_set(make_set(rng, 49, 100))
        assert banks.store_episode_set(make_set(rng, 50, 100))
        assert len(banks.replay) == 2 and len(banks.anchors) == 1

    def test_anchor_fifo(self):
        rng = np.random.default_rng(0)
        bank = AnchorBank(capacity=3)
        sets = [make_set(rng, 1, 1, tag=str(i)) for i in range(5)]
        for s in sets:
            bank.admit(s)
        assert [s.tag for s in bank.sets] == ['2', '3', '4']
        assert bank.stats['evicted'] == 2
        assert all(s.mean_sr >= 0.5 for s in bank.sets)

    def test_empty_set_rejected(self):
        with pytest.raises(EmptyEpisodeError):
            Banks().store_episode_set(EpisodeSet([], 'A'))

    def test_reservoir_is_uniform(self):
        rng = np.random.default_rng(0)
        items = [EpisodeSet([Episode(np.zeros((1, 11)), 0.0, False)], str(i)) for i in range(100)]
        counts = np.zeros(100)
        for _ in range(2000):
            bank = ReplayBank(capacity=10, rng=rng)
            for item in items:
                bank.add(item)
            for kept in bank.sets:
                counts[int(kept.tag)] += 1
        assert counts.sum() == 2000 * 10
        assert np.all(np.abs(counts - 200) < 70)

    def test_union_counts_shared_sets_once(self):
        banks = filled_banks(10)
        assert len(banks) == 10


class TestRefitBank:
    def test_size_and_anchor_share(self):
        banks = filled_banks(30)
        bank = sample_refit_bank(banks, 12, 0.33, np.random.default_rng(0))
        assert len(bank) == 12
        assert len({id(s) for s in bank}) == 12
        anchor_ids = {id(s) for s in banks.anchors.sets}
        assert sum(id(s) in anchor_ids for s in bank) >= 4

    def test_small_bank_uses_everything(self):
        banks = filled_banks(5)
        assert len(sample_refit_bank(banks, 256, 0.33, np.random.default_rng(0))) == 5


class TestDrift:
    def test_identical(self):
        z = np.random.default_rng(0).normal(size=(4, 8))
        assert drift_metrics(z, z) == pytest.approx((0.0, 1.0))

    def test_scaled(self):
        z = np.random.default_rng(1).normal(size=(5, 8))
        l2, cos = drift_metrics(z, 2 * z)
        assert cos == pytest.approx(1.0)
        assert l2 == pytest.approx(np.linalg.norm(z, axis=1).mean())

    def test_orthogonal_units(self):
        l2, cos = drift_metrics(np.eye(8)[:4], np.eye(8)[4:])
        assert cos == pytest.approx(0.0)
        assert l2 == pytest.approx(math.sqrt(2))

    def test_zero_vectors(self):
        zero, unit = np.zeros((1, 8)), np.eye(8)[:1]
        assert drift_metrics(zero, zero)[1] == 1.0
        assert drift_metrics(zero, unit)[1] == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            drift_metrics(np.zeros((2, 8)), np.zeros((3, 8)))


class TestBoundaryMaintenance:
    def test_below_minimum_is_a_no_op(self):
        state = small_state()
        state.normalizer = None
        archive = sketched_archive(state)
        before = [e.descriptor.copy() for e in archive]
        new_state, _, report = boundary_maintenance(state, filled_banks(31), [archive], MaintenanceConfig(),
                                                    embedder_config(), np.random.default_rng(0))
        assert new_state is state and not report.performed
        assert report.version == 0 and report.drift_l2 is None
        assert all(np.array_equal(a, e.descriptor) for a, e in zip(before, archive))

    def test_no_archives(self):
        state = small_state()
        new_state, archives, report = boundary_maintenance(state, filled_banks(32), [], MaintenanceConfig(),
                                                           embedder_config(), np.random.default_rng(0))
        assert report.performed and report.reembedded_archives == 0
        assert new_state.version == 1 and state.version == 0
        assert new_state.normalizer is not None and archives == []

    def test_frozen_encoder_has_no_drift(self):
        state = small_state()
        new_state, _, report = boundary_maintenance(state, filled_banks(40), [], MaintenanceConfig(),
                                                    embedder_config(), np.random.default_rng(0), steps=0)
        assert report.drift_l2 == pytest.approx(0.0, abs=1e-12)
        assert report.drift_cos == pytest.approx(1.0)
        assert all(np.array_equal(new_state.encoder[k], state.encoder[k]) for k in state.encoder)

    def test_archives_follow_the_new_geometry(self, tmp_path):
        state = small_state()
        archive = sketched_archive(state)
        new_state, _, report = boundary_maintenance(state, filled_banks(40), [archive], MaintenanceConfig(),
                                                    embedder_config(steps=3), np.random.default_rng(0),
                                                    root=str(tmp_path))
        assert report.performed and report.version == 1
        assert archive.version == new_state.version == 1
        expected = normalize(mean_descriptors(new_state.encoder, [e.sketch for e in archive], new_state.t_max),
                             new_state.normalizer)
        for elite, row in zip(archive, expected):
            assert elite.version == 1
            assert np.allclose(elite.descriptor, row, atol=1e-9)
        assert archive.min_pairwise_distance() >= archive.d_min
        assert os.path.exists(os.path.join(str(tmp_path), 'archives', 'A', 'stale-v0.json'))

    def test_versions_increase_only_when_performed(self):
        state = small_state()
        config = MaintenanceConfig()
        versions = [state.version]
        for n_sets in (10, 40, 20, 40):
            state, _, _ = boundary_maintenance(state, filled_banks(n_sets), [], config, embedder_config(steps=1),
                                               np.random.default_rng(n_sets))
            versions.append(state.version)
        assert versions == [0, 0, 1, 1, 2]

    def test_disabled(self):
        state = small_state()
        _, _, report = boundary_maintenance(state, filled_banks(40), [], MaintenanceConfig(enabled=False),
                                            embedder_config(), np.random.default_rng(0))
        assert not report.performed


class TestBootstrap:
    def test_identity_when_bank_too_small(self):
        state = bootstrap_normalizer(small_state(), filled_banks(1), MaintenanceConfig(), np.random.default_rng(0))
        assert np.array_equal(state.normalizer.mu, np.zeros(8))
        assert np.array_equal(state.normalizer.sigma, np.ones(8))
        assert state.version == 0

    def test_fitted_without_version_bump(self):
        state = bootstrap_normalizer(small_state(), filled_banks(6), MaintenanceConfig(), np.random.default_rng(0))
        assert state.normalizer.fit_size == 6
        assert state.version == 0

    def test_existing_normalizer_kept(self):
        state = bootstrap_normalizer(small_state(), filled_banks(6), MaintenanceConfig(), np.random.default_rng(0))
        normalizer = state.normalizer
        assert bootstrap_normalizer(state, filled_banks(20), MaintenanceConfig(),
                                    np.random.default_rng(1)).normalizer is normalizer


class TestConfig:
    def test_validation(self):
        with pytest.raises(ConfigurationError):
            MaintenanceConfig(min_bank_sets=1).validate()
        with pytest.raises(ConfigurationError):
            MaintenanceConfig(refit_anchor_fraction=1.5).validate()
        assert MaintenanceConfig.from_dict(MaintenanceConfig().to_dict()) == MaintenanceConfig()
