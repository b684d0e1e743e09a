"""
Analysis tables of finished runs.
"""

import json
import logging
import os
from collections import defaultdict
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Sequence

import numpy as np

from .config import MetricsConfig, RunConfig
from .eventlog import RUNLOG_FILE, read_events, read_manifest
from ..archive import UnstructuredArchive, load_archive
from ..archive.snapshot import MANIFEST
from ..metrics import (
    RunLog,
    RunMetrics,
    TaskThreshold,
    aggregate_methods,
    basin_analysis,
    basin_rows,
    count_rows,
    geometry,
    geometry_rows,
    group_rows,
    lineage_matrices,
    metrics_rows,
    novelty_norm,
    qd_bins,
    summarize_run,
    summary_text,
    write_table,
)
from ..metrics.export import METRIC_COLUMNS
from ..utils.errors import ArtifactError, InsufficientDataError
from ..utils.storage import ArtifactIndex, read_json, write_json

logger = logging.getLogger(__name__)

Thresholds = Dict[str, TaskThreshold]

REPORT_FILES = (
    'metrics.csv',
    'basin.csv',
    'geometry.csv',
    'lineage_immediate.csv',
    'lineage_visits.csv',
    'lineage_groups.csv',
    'latents.csv',
    'qd_bins.csv',
    'revisit_sr.csv',
    'summary.txt',
)


class LoadedRun(NamedTuple):
    run_dir: str
    log: RunLog
    metrics: MetricsConfig
    archives: List[UnstructuredArchive]


def load_run(run_dir: str) -> LoadedRun:
    """
    Read a run's log, analysis settings and final archives.

    Raises:
        ArtifactError: If the run log or manifest is missing
    """
    log = RunLog.load(os.path.join(run_dir, RUNLOG_FILE))
    manifest = read_manifest(run_dir)
    metrics = RunConfig.from_dict(json.loads(manifest['config'])).metrics
    archives = []
    root = os.path.join(run_dir, 'archives')
    if os.path.isdir(root):
        for tag in sorted(os.listdir(root)):
            directory = os.path.join(root, tag)
            if os.path.exists(os.path.join(directory, MANIFEST)):
                archives.append(load_archive(directory))
    return LoadedRun(run_dir, log, metrics, archives)


def save_thresholds(path: str, thresholds: Thresholds) -> str:
    return write_json(path, {tag: {'tau': t.tau, 'source': t.source} for tag, t in sorted(thresholds.items())})


def load_thresholds(path: str) -> Thresholds:
    data = read_json(path)
    return {tag: TaskThreshold(tag, float(v['tau']), v.get('source', 'fallback')) for tag, v in data.items()}


def _tagged(run: LoadedRun, rows: Sequence[Mapping[str, Any]]) -> List[Dict[str, Any]]:
    return [{'method': run.log.method, 'seed': run.log.seed, **row} for row in rows]


def revisit_rows(runs: Sequence[LoadedRun]) -> List[Dict[str, Any]]:
    """Mean SR_post of each revisited base tag per method."""
    grouped: Dict[tuple, List[float]] = defaultdict(list)
    for run in runs:
        for visit in run.log.visits:
            if visit.revisit:
                grouped[(run.log.method, visit.base)].append(visit.sr_post)
    return [
        {'method': method, 'tag': tag, 'runs': len(values), 'mean_sr_post': float(np.mean(values))}
        for (method, tag), values in sorted(grouped.items())
    ]


def basin_table(run: LoadedRun) -> List[Dict[str, Any]]:
    pairs = defaultdict(list)
    for sample in run.log.transfer_samples:
        pairs[(sample.source, sample.target)].append(sample)
    stats = [
        basin_analysis(samples, run.metrics.gamma, run.metrics.tau_rank)
        for _, samples in sorted(pairs.items())
    ]
    return _tagged(run, basin_rows(stats))


def geometry_table(run: LoadedRun) -> List[Dict[str, Any]]:
    archives = [a for a in run.archives if len(a)]
    if not archives:
        return []
    return _tagged(run, geometry_rows(geometry(archives)))


def latent_rows(run: LoadedRun) -> List[Dict[str, Any]]:
    rows = []
    for archive in run.archives:
        for elite in archive.elites:
            row = {'tag': archive.base_tag, 'elite_id': elite.elite_id, 'version': archive.version,
                   'fitness': elite.fitness, 'sr': elite.sr, 'source_tag': elite.source_tag}
            row.update({f"z{i}": float(v) for i, v in enumerate(elite.descriptor)})
            rows.append(row)
    return _tagged(run, rows)


def qd_rows(run: LoadedRun) -> List[Dict[str, Any]]:
    rows = []
    for archive in run.archives:
        try:
            novelty = novelty_norm(archive.descriptors())
        except InsufficientDataError as e:
            logger.debug(f"[{archive.base_tag}] No density bins: {e}")
            continue
        fitness = [e.fitness for e in archive.elites]
        rows.extend({'tag': archive.base_tag, **row} for row in qd_bins(fitness, novelty, run.metrics.qd_bins))
    return _tagged(run, rows)


def lineage_tables(runs: Sequence[LoadedRun]) -> Dict[str, List[Dict[str, Any]]]:
    """Lineage counts and group splits of every probed candidate, per method."""
    probes: Dict[str, List[Dict[str, Any]]] = defaultdict(list)
    for run in runs:
        probes[run.log.method].extend(read_events(run.run_dir, 'probe'))
    tables: Dict[str, List[Dict[str, Any]]] = {'immediate': [], 'visits': [], 'groups': []}
    for method, records in sorted(probes.items()):
        if not records:
            continue
        report = lineage_matrices(records)
        tables['immediate'].extend({'method': method, **r} for r in count_rows(report.immediate))
        tables['visits'].extend({'method': method, **r} for r in count_rows(report.visits))
        tables['groups'].extend({'method': method, **r} for r in group_rows(report))
    return tables


def _threshold_lines(thresholds: Optional[Thresholds], tau_min: float) -> str:
    if not thresholds:
        return f"Thresholds: fallback tau_min={tau_min} for every task"
    return "Thresholds: " + ", ".join(f"{tag}={t.tau:.3f} ({t.source})" for tag, t in sorted(thresholds.items()))


def emit_report(run_dirs: Sequence[str], out_dir: str, thresholds: Optional[Thresholds] = None,
                failures: Sequence[Mapping[str, Any]] = ()) -> Dict[str, str]:
    """
    Write every analysis table for a set of finished runs.

    Args:
        run_dirs: Run directories, each with a run log and manifest
        out_dir: Destination of the CSVs and ``summary.txt``
        thresholds: Per-task success thresholds; the fallback floor when None
        failures: Failed runs to flag in the summary

    Returns:
        Mapping from file name to written path

    Raises:
        ArtifactError: If a run log is missing (the message names the path)
    """
    runs = [load_run(d) for d in run_dirs]
    if not runs:
        raise ArtifactError("No completed runs to report", out_dir)
    tau_min = runs[0].metrics.tau_min
    summaries: List[RunMetrics] = [summarize_run(r.log, thresholds, r.metrics.tau_min) for r in runs]

    paths = {}

    def table(name: str, rows: Sequence[Mapping[str, Any]], columns: Optional[Sequence[str]] = None) -> None:
        paths[name] = write_table(os.path.join(out_dir, name), rows, columns)

    table('metrics.csv', metrics_rows(summaries), METRIC_COLUMNS)
    table('basin.csv', [row for r in runs for row in basin_table(r)])
    table('geometry.csv', [row for r in runs for row in geometry_table(r)])
    lineage = lineage_tables(runs)
    table('lineage_immediate.csv', lineage['immediate'])
    table('lineage_visits.csv', lineage['visits'])
    table('lineage_groups.csv', lineage['groups'])
    table('latents.csv', [row for r in runs for row in latent_rows(r)])
    table('qd_bins.csv', [row for r in runs for row in qd_rows(r)])
    table('revisit_sr.csv', revisit_rows(runs))

    text = [summary_text(aggregate_methods(summaries)), '', _threshold_lines(thresholds, tau_min)]
    if failures:
        text.append('')
        text.append("Failed runs (excluded):")
        text.extend(f"  {f['method']} seed {f['seed']}: {f.get('error')}" for f in failures)
    path = os.path.join(out_dir, 'summary.txt')
    try:
        with open(path, 'w', encoding='utf-8') as f:
            f.write('\n'.join(text) + '\n')
    except OSError as e:
        raise ArtifactError(f"Cannot write summary ({e})", path) from e
    paths['summary.txt'] = path
    index = ArtifactIndex(out_dir)
    for name, written in sorted(paths.items()):
        index.register(os.path.relpath(written, out_dir), 'text' if name.endswith('.txt') else 'table',
                       runs=len(runs))
    logger.info(f"Report for {len(runs)} runs written to {out_dir}")
    return paths


def analyze_run(run_dir: str, out_dir: Optional[str] = None,
                thresholds: Optional[Thresholds] = None) -> Dict[str, str]:
    """Report on a single run, by default under ``<run_dir>/analysis``."""
    return emit_report([run_dir], out_dir or os.path.join(run_dir, 'analysis'), thresholds)
