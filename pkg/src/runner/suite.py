"""
Multi-method, multi-seed suites.
"""

import logging
import os
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, NamedTuple, Optional, Sequence

from .config import RunConfig
from .eventlog import RUNLOG_FILE
from .report import Thresholds, emit_report, save_thresholds
from .sequence import run_directory, run_sequence
from ..metrics import RunLog, compute_threshold
from ..utils.errors import ArtifactError
from ..utils.storage import read_json, write_json

logger = logging.getLogger(__name__)

SUITE_FILE = 'suite.json'
THRESHOLDS_FILE = 'thresholds.json'
REPORT_DIR = 'report'


class SuiteResult(NamedTuple):
    results: List[Dict[str, Any]]
    thresholds: Optional[Thresholds]
    report: Dict[str, str]

    @property
    def failed(self) -> List[Dict[str, Any]]:
        return [r for r in self.results if not r['success']]


def calibrate_thresholds(scratch_dirs: Sequence[str], tau_min: float) -> Thresholds:
    """
    Per-task thresholds from the best SR each scratch run reached on the
    task's visits.
    """
    best: Dict[str, List[float]] = defaultdict(list)
    for run_dir in scratch_dirs:
        log = RunLog.load(os.path.join(run_dir, RUNLOG_FILE))
        per_task: Dict[str, float] = {}
        for visit in log.visits:
            peak = max([sr for _, sr in visit.curve] + [visit.sr_post])
            per_task[visit.base] = max(per_task.get(visit.base, 0.0), peak)
        for tag, value in per_task.items():
            best[tag].append(value)
    return {tag: compute_threshold(tag, values, tau_min) for tag, values in sorted(best.items())}


def _run_one(config: RunConfig, output_dir: str) -> Dict[str, Any]:
    result = {'method': config.method, 'seed': config.seed,
              'run_dir': run_directory(output_dir, config.method, config.seed)}
    try:
        artifacts = run_sequence(config, output_dir)
        return {**result, 'success': True, 'error': None, 'budget': artifacts.budget}
    except Exception as e:  # pylint: disable=broad-except
        logger.error(f"{config.method} seed {config.seed} failed: {e}")
        return {**result, 'success': False, 'error': f"{type(e).__name__}: {e}"}


def run_suite(methods: Sequence[str], seeds: Sequence[int], config: RunConfig, output_dir: str,
              threads: int = 1) -> SuiteResult:
    """
    Run every (method, seed) pair and report over the successful ones.

    Runs execute on a thread pool of ``threads`` workers; results keep
    submission order. A failed run is recorded and excluded from the
    aggregate, never retried.

    Args:
        methods: Method names
        seeds: Seeds shared by all methods
        config: Base configuration; method and seed are overridden per run
        output_dir: Suite directory
        threads: Worker cap

    Returns:
        SuiteResult with per-run results, thresholds and report paths
    """
    configs = [config.with_overrides(method=m, seed=int(s)) for m in methods for s in seeds]
    logger.info(f"Suite: {len(methods)} methods x {len(seeds)} seeds on {max(1, threads)} threads")
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        futures = [pool.submit(_run_one, c, output_dir) for c in configs]
        results = [f.result() for f in futures]
    write_json(os.path.join(output_dir, SUITE_FILE), {'config': config.to_dict(), 'results': results})
    return _report(output_dir, results, config.metrics.tau_min)


def _report(output_dir: str, results: List[Dict[str, Any]], tau_min: float) -> SuiteResult:
    succeeded = [r for r in results if r['success']]
    failed = [r for r in results if not r['success']]
    if failed:
        logger.warning(f"{len(failed)} of {len(results)} runs failed and are excluded")
    scratch = [r['run_dir'] for r in succeeded if r['method'] == 'scratch']
    thresholds = calibrate_thresholds(scratch, tau_min) if scratch else None
    if thresholds:
        save_thresholds(os.path.join(output_dir, THRESHOLDS_FILE), thresholds)
    if not succeeded:
        raise ArtifactError("Every run of the suite failed", output_dir)
    paths = emit_report([r['run_dir'] for r in succeeded], os.path.join(output_dir, REPORT_DIR),
                        thresholds, failed)
    return SuiteResult(results, thresholds, paths)


def report_suite(suite_dir: str) -> SuiteResult:
    """
    Re-emit the report of a finished suite from its stored results.

    Raises:
        ArtifactError: If the suite record is missing
    """
    suite = read_json(os.path.join(suite_dir, SUITE_FILE))
    results = suite['results']
    tau_min = RunConfig.from_dict(suite['config']).metrics.tau_min
    return _report(suite_dir, results, tau_min)
