"""
Threshold calibration, time-to-threshold and retention metrics.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .runlog import FALLBACK, SCRATCH_CALIBRATED, RunLog, TaskThreshold
from ..utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

TAU_MIN = 0.10
THRESHOLD_FRACTION = 0.9
NBWT_EPS = 1e-8
STEPS_PER_UNIT = 1_000_000

Thresholds = Mapping[str, Union[TaskThreshold, float]]


@dataclass
class RunMetrics:
    """Headline columns for one (method, seed) run. TTT values are in millions of steps."""

    method: str
    seed: int
    mean_sr: float
    ttt: float
    ttt_revisit: Optional[float]
    bwt: float
    coverage: float
    nbwt: Optional[float]
    tr: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def compute_threshold(tag: str, best_srs: Sequence[float], tau_min: float = TAU_MIN) -> TaskThreshold:
    """
    ``max(0.9 * mean best SR, tau_min)`` from the scratch runs of a task.

    The source is ``fallback`` when there are no scratch runs or the floor
    binds.
    """
    if not 0.0 < tau_min < 1.0:
        raise ConfigurationError(f"tau_min must lie in (0, 1), got {tau_min}")
    if len(best_srs) == 0:
        return TaskThreshold(tag, tau_min, FALLBACK)
    calibrated = THRESHOLD_FRACTION * float(np.mean(best_srs))
    if calibrated <= tau_min:
        return TaskThreshold(tag, tau_min, FALLBACK)
    return TaskThreshold(tag, calibrated, SCRATCH_CALIBRATED)


def threshold_of(thresholds: Optional[Thresholds], base: str, tau_min: float = TAU_MIN) -> float:
    if not thresholds or base not in thresholds:
        return tau_min
    value = thresholds[base]
    return value.tau if isinstance(value, TaskThreshold) else float(value)


def ttt(curve: Sequence[Tuple[int, float]], tau: float, budget: int) -> float:
    """First checkpoint step with SR >= ``tau``; the full budget when never reached."""
    for steps, sr in curve:
        if sr >= tau:
            return float(steps)
    return float(budget)


def retention_metrics(log: RunLog, thresholds: Optional[Thresholds] = None,
                      tau_min: float = TAU_MIN) -> Tuple[float, float, Optional[float], float]:
    """
    BWT, Coverage, nBWT and TR over every completed visit.

    Returns:
        (BWT, Coverage, nBWT or None when no visit reached its threshold, TR)

    Raises:
        ConfigurationError: If a visit lacks its end-of-sequence SR
    """
    visits = log.visits
    if not visits:
        raise ConfigurationError("Retention metrics need at least one visit")
    post = np.array([v.sr_post for v in visits])
    if any(v.sr_end is None for v in visits):
        raise ConfigurationError("Every visit needs an end-of-sequence SR")
    end = np.array([v.sr_end for v in visits])
    tau = np.array([threshold_of(thresholds, v.base, tau_min) for v in visits])

    bwt = float(np.mean(end - post))
    reached = post >= tau
    coverage = float(np.mean(reached))
    nbwt = None
    if reached.any():
        nbwt = float(np.mean((end[reached] - post[reached]) / np.maximum(post[reached], NBWT_EPS)))
    tr = float(np.mean(end >= tau))
    return bwt, coverage, nbwt, tr


def summarize_run(log: RunLog, thresholds: Optional[Thresholds] = None,
                  tau_min: float = TAU_MIN) -> RunMetrics:
    """Table columns for one run; TTT averaged over all visits and over revisits."""
    bwt, coverage, nbwt, tr = retention_metrics(log, thresholds, tau_min)
    times = [ttt(v.curve, threshold_of(thresholds, v.base, tau_min), v.budget) / STEPS_PER_UNIT
             for v in log.visits]
    revisit_times = [t for t, v in zip(times, log.visits) if v.revisit]
    return RunMetrics(
        method=log.method,
        seed=log.seed,
        mean_sr=float(np.mean([v.sr_post for v in log.visits])),
        ttt=float(np.mean(times)),
        ttt_revisit=float(np.mean(revisit_times)) if revisit_times else None,
        bwt=bwt,
        coverage=coverage,
        nbwt=nbwt,
        tr=tr,
    )


def mean_ci(values: Sequence[Optional[float]]) -> Tuple[Optional[float], Optional[float]]:
    """Mean and normal-approximation 95% half width, skipping missing values."""
    data = [float(v) for v in values if v is not None and not math.isnan(v)]
    if not data:
        return None, None
    if len(data) == 1:
        return data[0], 0.0
    return float(np.mean(data)), float(1.96 * np.std(data, ddof=1) / math.sqrt(len(data)))
