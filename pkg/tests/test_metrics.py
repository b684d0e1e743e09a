"""Tests for retention metrics, basin analysis, geometry, lineage and exports."""

import math

import numpy as np
import pandas as pd
import pytest

from src.archive import ArchiveConfig, Elite, LineageRecord, UnstructuredArchive
from src.metrics import (
    RunLog,
    RunMetrics,
    TransferSample,
    VisitRecord,
    aggregate_methods,
    basin_analysis,
    compute_threshold,
    count_rows,
    geometry,
    is_non_adjacent,
    lineage_matrices,
    mean_ci,
    metrics_rows,
    novelty_norm,
    qd_bins,
    retention_metrics,
    summarize_run,
    summary_text,
    ttt,
    write_table,
)
from src.utils.errors import ConfigurationError, InsufficientDataError, StaleDescriptorError


def make_log(post, end, tags=None, method='telapa', seed=0):
    tags = tags or ['ABCDE'[i] for i in range(len(post))]
    log = RunLog(method, seed)
    for tag, p, e in zip(tags, post, end):
        log.add_visit(VisitRecord(tag, p, e, [(0, 0.0), (10_000, p)], budget=20_000))
    return log


def sample(cid, f, y, z, source='A', target='B'):
    return TransferSample(source, target, cid, f, y, list(z))


def archive_of(tag, points, version=0):
    archive = UnstructuredArchive(tag, ArchiveConfig(), version)
    archive.elites = [
        Elite(f"{tag}-{i}", {'w': np.zeros(1)}, 0.0, 0.0, np.asarray(p, dtype=float), 0.05, None,
              LineageRecord((tag,)), version, source_tag=tag)
        for i, p in enumerate(points)
    ]
    return archive


class TestThreshold:
    def test_examples(self):
        assert compute_threshold('A', [0.8]).tau == pytest.approx(0.72)
        assert compute_threshold('A', [0.8]).source == 'scratch-calibrated'
        floor = compute_threshold('A', [0.05])
        assert floor.tau == pytest.approx(0.1) and floor.source == 'fallback'
        assert compute_threshold('A', [1.0, 1.0]).tau == pytest.approx(0.9)

    def test_empty_runs_fall_back(self):
        threshold = compute_threshold('A', [], tau_min=0.2)
        assert threshold.tau == 0.2 and threshold.source == 'fallback'

    def test_invalid_floor(self):
        with pytest.raises(ConfigurationError):
            compute_threshold('A', [0.5], tau_min=1.0)


class TestTTT:
    def test_first_crossing(self):
        assert ttt([(10_000, 0.2), (20_000, 0.8)], 0.72, 50_000) == 20_000

    def test_unreached(self):
        assert ttt([(10_000, 0.2)], 0.72, 50_000) == 50_000

    def test_first_checkpoint(self):
        assert ttt([(0, 0.9), (10_000, 0.95)], 0.72, 50_000) == 0

    def test_monotone_in_threshold(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            curve = list(zip(range(0, 100_000, 10_000), rng.random(10)))
            values = [ttt(curve, tau, 100_000) for tau in np.linspace(0, 1, 21)]
            assert values == sorted(values)


def brute_force(log, thresholds):
    diffs, eligible, covered, retained = [], [], 0, 0
    for v in log.visits:
        tau = thresholds[v.base]
        diffs.append(v.sr_end - v.sr_post)
        if v.sr_post >= tau:
            covered += 1
            eligible.append((v.sr_end - v.sr_post) / max(v.sr_post, 1e-8))
        if v.sr_end >= tau:
            retained += 1
    n = len(log.visits)
    return sum(diffs) / n, covered / n, (sum(eligible) / len(eligible) if eligible else None), retained / n


class TestRetention:
    def test_hand_example(self):
        log = make_log([1.0, 0.8], [0.9, 0.8])
        bwt, coverage, nbwt, tr = retention_metrics(log, {'A': 0.5, 'B': 0.5})
        assert bwt == pytest.approx(-0.05)
        assert coverage == 1.0 and tr == 1.0
        assert nbwt == pytest.approx(-0.05)

    def test_no_task_reached(self):
        _, coverage, nbwt, _ = retention_metrics(make_log([0.1, 0.2], [0.1, 0.2]), {'A': 0.5, 'B': 0.5})
        assert coverage == 0.0 and nbwt is None

    def test_no_forgetting(self):
        bwt, _, nbwt, _ = retention_metrics(make_log([0.7, 0.9], [0.7, 0.9]), {'A': 0.5, 'B': 0.5})
        assert bwt == 0.0 and nbwt == 0.0

    def test_matches_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            n = int(rng.integers(1, 10))
            tags = [str(rng.choice(list('ABCDE'))) + ("'" if rng.random() < 0.5 else '') for _ in range(n)]
            log = make_log(rng.random(n).tolist(), rng.random(n).tolist(), tags)
            thresholds = {t: float(rng.uniform(0.1, 1.0)) for t in 'ABCDE'}
            got = retention_metrics(log, thresholds)
            want = brute_force(log, thresholds)
            for a, b in zip(got, want):
                if b is None:
                    assert a is None
                else:
                    assert a == pytest.approx(b, abs=1e-12)

    def test_missing_end(self):
        log = make_log([0.5], [0.5])
        log.visits[0].sr_end = None
        with pytest.raises(ConfigurationError):
            retention_metrics(log)

    def test_summary_columns(self):
        log = make_log([0.8, 0.1, 0.9], [0.7, 0.1, 0.9], tags=['A', 'B', "A'"])
        run = summarize_run(log, {'A': 0.5, 'B': 0.5})
        assert run.mean_sr == pytest.approx(0.6)
        assert run.ttt == pytest.approx((0.01 + 0.02 + 0.01) / 3)
        assert run.ttt_revisit == pytest.approx(0.01)

    def test_runlog_round_trip(self, tmp_path):
        log = make_log([0.8, 0.3], [0.6, 0.2])
        log.transfer_samples.append(sample('A-1', 0.5, 0.2, [0.0, 1.0]))
        path = log.save(str(tmp_path / 'runlog.json'))
        loaded = RunLog.load(path)
        assert loaded.to_dict() == log.to_dict()


class TestBasin:
    def test_single_sample(self):
        stats = basin_analysis([sample('c1', 0.5, 0.5, [0, 0])])
        assert stats.delta_good == 0 and stats.delta_local == 0 and stats.span == 0

    def test_good_set_excludes_weak_source(self):
        samples = [sample('c1', 1.0, 0.4, [0, 0]), sample('c2', 0.95, 0.7, [1, 0]), sample('c3', 0.5, 0.9, [2, 0])]
        stats = basin_analysis(samples, gamma=0.9)
        assert stats.source_best == 'c1' and stats.good_size == 2
        assert stats.delta_good == pytest.approx(0.3)

    def test_collocated_good_set(self):
        samples = [sample('c1', 1.0, 0.4, [0, 0]), sample('c2', 0.99, 0.5, [0, 0]), sample('c3', 0.1, 0.9, [3, 0])]
        assert basin_analysis(samples).span == 0.0

    def test_all_zero_fitness(self):
        samples = [sample(f"c{i}", 0.0, 0.1 * i, [i, 0]) for i in range(4)]
        assert basin_analysis(samples).good_size == 4

    def test_properties(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = int(rng.integers(1, 12))
            samples = [sample(f"c{i:02d}", rng.random(), rng.random(), rng.normal(size=3)) for i in range(n)]
            stats = basin_analysis(samples, gamma=float(rng.uniform(0.1, 1.0)), tau_rank=float(rng.uniform(0.05, 1.0)))
            assert stats.delta_local <= stats.delta_good + 1e-15
            assert stats.delta_local >= 0.0
            assert 0.0 <= stats.span <= 1.0

    def test_errors(self):
        with pytest.raises(InsufficientDataError):
            basin_analysis([])
        with pytest.raises(ConfigurationError):
            basin_analysis([sample('c1', 1, 1, [0])], gamma=0.0)


class TestNovelty:
    def test_two_elites(self):
        assert novelty_norm(np.array([[0.0], [2.0]])) == pytest.approx([1.0, 1.0])

    def test_colinear(self):
        assert novelty_norm(np.array([[0.0], [1.0], [3.0]])) == pytest.approx([1.0, 1.0, 2.0])

    def test_duplicates(self):
        assert novelty_norm(np.array([[0.0], [0.0], [5.0]]))[:2] == pytest.approx([0.0, 0.0])

    def test_singleton(self):
        with pytest.raises(InsufficientDataError):
            novelty_norm(np.zeros((1, 8)))


class TestGeometry:
    def test_identical_archives(self):
        geo = geometry([archive_of('A', [[0, 0], [1, 1]]), archive_of('B', [[0, 0], [1, 1]])])
        assert np.allclose(geo.separation, 0.0)

    def test_singletons(self):
        geo = geometry([archive_of('A', [[0.0]]), archive_of('B', [[1.0]])])
        assert geo.separation[0, 1] == pytest.approx(1e8)
        assert geo.radii.tolist() == [0.0, 0.0]

    def test_symmetry_and_translation(self):
        rng = np.random.default_rng(0)
        points = [rng.normal(size=(5, 3)) for _ in range(3)]
        shift = rng.normal(size=3)
        geo = geometry([archive_of(t, p) for t, p in zip('ABC', points)])
        moved = geometry([archive_of(t, p + shift) for t, p in zip('ABC', points)])
        assert np.allclose(geo.separation, geo.separation.T)
        assert np.allclose(geo.separation, moved.separation)
        assert np.all(np.diag(geo.separation) == 0)

    def test_nearest_attachment(self):
        geo = geometry([archive_of('A', [[0.0]]), archive_of('B', [[1.0]]), archive_of('C', [[5.0]])])
        assert [row['nearest'] for row in geo.nearest()] == ['B', 'A', 'B']

    def test_version_mismatch(self):
        with pytest.raises(StaleDescriptorError):
            geometry([archive_of('A', [[0.0]]), archive_of('B', [[1.0]], version=1)])

    def test_qd_bins_count_everything(self):
        rng = np.random.default_rng(0)
        rows = qd_bins(rng.random(50), rng.random(50), bins=5)
        assert sum(r['count'] for r in rows) == 50


class TestLineage:
    def test_overlapping_visit_counts(self):
        report = lineage_matrices([
            {'target_tag': 'E', 'source_tag': 'C', 'lineage': ['A', 'B', 'C'], 'final_sr': 0.5},
            {'target_tag': 'E', 'source_tag': 'B', 'lineage': ['B'], 'final_sr': 0.2},
        ])
        assert report.immediate == {'C': {'E': 1}, 'B': {'E': 1}}
        assert report.visits == {'A': {'E': 1}, 'B': {'E': 2}, 'C': {'E': 1}}

    def test_adjacency(self):
        assert not is_non_adjacent(['A', 'B'])
        assert is_non_adjacent(['A', 'C'])

    def test_untagged_row(self):
        report = lineage_matrices([{'target_tag': "B'", 'source_tag': '', 'lineage': [], 'final_sr': 0.0}])
        assert report.immediate == {'untagged': {'B': 1}}
        assert report.visits == {'untagged': {'B': 1}}

    def test_groups(self):
        report = lineage_matrices([
            {'target_tag': 'C', 'source_tag': 'A', 'lineage': ['A'], 'final_sr': 0.1},
            {'target_tag': 'C', 'source_tag': 'B', 'lineage': ['A', 'C', 'B'], 'final_sr': 0.9},
        ])
        groups = report.groups['C']
        assert groups['breadth'] == ([0.9], [0.1])
        assert groups['membership'] == ([0.9], [0.1])
        assert groups['adjacency'] == ([0.9], [0.1])


class TestExport:
    def test_mean_ci(self):
        assert mean_ci([]) == (None, None)
        assert mean_ci([0.5]) == (0.5, 0.0)
        mean, half = mean_ci([0.0, 1.0])
        assert mean == 0.5 and half == pytest.approx(1.96 * math.sqrt(0.5) / math.sqrt(2))

    def test_metrics_csv(self, tmp_path):
        runs = [RunMetrics('telapa', s, 0.5, 0.1, None, -0.1, 0.5, None, 0.5) for s in range(2)]
        path = write_table(str(tmp_path / 'metrics.csv'), metrics_rows(runs))
        frame = pd.read_csv(path)
        assert list(frame.columns) == ['method', 'seed', 'mean_sr', 'ttt', 'bwt', 'coverage', 'nbwt', 'tr']
        assert len(frame) == 2
        first = open(path, encoding='utf-8').read()
        write_table(path, metrics_rows(runs))
        assert open(path, encoding='utf-8').read() == first

    def test_summary_text(self):
        runs = [RunMetrics('scratch', s, 0.2 * s, 0.3, 0.2, 0.0, 0.5, None, 0.5) for s in range(3)]
        text = summary_text(aggregate_methods(runs))
        assert 'scratch' in text and 'n/a' in text

    def test_count_rows(self):
        rows = count_rows({'B': {'E': 2}, 'A': {'E': 1}})
        assert rows == [{'source': 'A', 'target': 'E', 'count': 1}, {'source': 'B', 'target': 'E', 'count': 2}]
