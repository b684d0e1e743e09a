"""
Boundary maintenance of the shared latent space.

Between tasks the encoder is trained on the banks, the normalizer is refit,
and every archive is snapshotted, re-embedded and repacked under the new
version. Drift is measured on the anchor sets.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .banks import ANCHOR_CAPACITY, ANCHOR_THRESHOLD, REPLAY_CAPACITY, AnchorBank, Banks, ReplayBank
from .drift import drift_metrics
from ..archive import UnstructuredArchive, reembed, save_stale_snapshot
from ..archive.illumination import Reevaluator
from ..embedder import (
    EmbedderConfig,
    EmbeddingState,
    Normalizer,
    boundary_train,
    fit_normalizer,
    mean_descriptors,
)
from ..embedder.encoder import latent_dim_of
from ..gridworld import EpisodeSet
from ..utils.errors import ConfigurationError, InsufficientDataError

logger = logging.getLogger(__name__)


@dataclass
class MaintenanceConfig:
    """Bank sizes, the maintenance trigger and the normalizer refit bank."""

    enabled: bool = True
    min_bank_sets: int = 32
    anchor_capacity: int = ANCHOR_CAPACITY
    replay_capacity: int = REPLAY_CAPACITY
    anchor_threshold: float = ANCHOR_THRESHOLD
    refit_bank_size: int = 256
    refit_anchor_fraction: float = 0.33
    reevaluate_episodes: int = 10

    def validate(self) -> 'MaintenanceConfig':
        if self.min_bank_sets < 2:
            raise ConfigurationError("Maintenance needs a minimum bank of at least 2 sets")
        if self.anchor_capacity < 1 or self.replay_capacity < 1:
            raise ConfigurationError("Bank capacities must be positive")
        if not 0.0 <= self.anchor_threshold <= 1.0:
            raise ConfigurationError("Anchor SR threshold must lie in [0, 1]")
        if self.refit_bank_size < 2 or not 0.0 <= self.refit_anchor_fraction <= 1.0:
            raise ConfigurationError("Refit bank needs size >= 2 and an anchor fraction in [0, 1]")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'MaintenanceConfig':
        return cls(**data).validate()

    def make_banks(self, rng: np.random.Generator) -> Banks:
        return Banks(AnchorBank(self.anchor_capacity, self.anchor_threshold),
                     ReplayBank(self.replay_capacity, rng))


@dataclass
class MaintenanceReport:
    performed: bool
    version: int
    bank_size: int
    drift_l2: Optional[float] = None
    drift_cos: Optional[float] = None
    reembedded_archives: int = 0
    reevaluated: int = 0
    dropped: int = 0
    repacked: int = 0
    train_loss: Optional[float] = None

    def to_event(self) -> Dict[str, Any]:
        return {'kind': 'maintenance', **asdict(self)}


def sample_refit_bank(banks: Banks, size: int, anchor_fraction: float,
                      rng: np.random.Generator) -> List[EpisodeSet]:
    """
    Draw ``min(size, available)`` distinct sets, about ``anchor_fraction`` of
    them anchors, without replacement.
    """
    union = banks.union()
    n = min(size, len(union))
    anchors = banks.anchors.sets
    n_anchor = min(int(round(anchor_fraction * n)), len(anchors))
    picked = [anchors[i] for i in sorted(rng.choice(len(anchors), size=n_anchor, replace=False))] if n_anchor else []
    taken = {id(s) for s in picked}
    others = [s for s in banks.replay.sets if id(s) not in taken]
    n_other = min(n - n_anchor, len(others))
    if n_other:
        picked += [others[i] for i in sorted(rng.choice(len(others), size=n_other, replace=False))]
        taken.update(id(s) for s in picked)
    if len(picked) < n:
        rest = [s for s in union if id(s) not in taken]
        picked += rest[:n - len(picked)]
    return picked


def bootstrap_normalizer(state: EmbeddingState, banks: Banks, config: MaintenanceConfig,
                         rng: np.random.Generator) -> EmbeddingState:
    """
    Give ``state`` a normalizer before the first maintenance has run.

    The embedding version is left as is. With fewer than 2 usable sets an
    identity normalizer is installed.
    """
    if state.normalizer is not None:
        return state
    bank = sample_refit_bank(banks, config.refit_bank_size, config.refit_anchor_fraction, rng)
    try:
        state.normalizer = fit_normalizer(state.encoder, bank, 0, state.t_max)
    except InsufficientDataError:
        logger.warning(f"Only {len(bank)} banked sets; using an identity normalizer")
        state.normalizer = Normalizer.identity(latent_dim_of(state.encoder))
    return state


def _finite_rows(rows: np.ndarray) -> np.ndarray:
    return np.all(np.isfinite(rows), axis=1)


def boundary_maintenance(state: EmbeddingState,
                         banks: Banks,
                         archives: Sequence[UnstructuredArchive],
                         config: MaintenanceConfig,
                         embedder_config: EmbedderConfig,
                         rng: np.random.Generator,
                         root: Optional[str] = None,
                         reevaluators: Optional[Mapping[str, Reevaluator]] = None,
                         steps: Optional[int] = None) -> Tuple[EmbeddingState, Sequence[UnstructuredArchive],
                                                               MaintenanceReport]:
    """
    Run one boundary-maintenance pass.

    Below ``min_bank_sets`` banked sets nothing changes. Otherwise the
    encoder is trained, the version bumped, the normalizer refit, and every
    archive snapshotted (when ``root`` is given), re-embedded and repacked.

    Args:
        state: Current embedding state (left untouched)
        banks: Anchor and replay banks
        archives: Archives to carry to the new version, updated in place
        config: Maintenance settings
        embedder_config: Boundary-training settings
        rng: Generator for training batches and the refit bank
        root: Run directory for stale snapshots
        reevaluators: Per-tag callbacks rebuilding lost sketches
        steps: Overrides the training step count

    Returns:
        (new state, archives, MaintenanceReport)
    """
    bank_size = len(banks)
    if not config.enabled or bank_size < config.min_bank_sets:
        logger.info(f"Maintenance skipped: {bank_size} banked sets (< {config.min_bank_sets})")
        return state, archives, MaintenanceReport(False, state.version, bank_size)

    anchors = banks.anchors.sets
    trained = boundary_train(state.encoder, anchors, banks.replay.sets, embedder_config, rng, steps)
    new_state = EmbeddingState(trained.encoder, None, state.version + 1, state.t_max)

    refit_bank = sample_refit_bank(banks, config.refit_bank_size, config.refit_anchor_fraction, rng)
    previous = state.normalizer.version if state.normalizer is not None else 0
    try:
        new_state.normalizer = fit_normalizer(new_state.encoder, refit_bank, previous, state.t_max)
    except InsufficientDataError as e:
        logger.warning(f"Maintenance abandoned, normalizer refit failed: {e}")
        return state, archives, MaintenanceReport(False, state.version, bank_size)

    reevaluated = dropped = repacked = 0
    reevaluators = reevaluators or {}
    for archive in archives:
        if root is not None:
            save_stale_snapshot(root, archive)
        report = reembed(archive, new_state, reevaluators.get(archive.base_tag))
        reevaluated += report.reevaluated
        dropped += report.dropped
        repacked += archive.repack()

    drift_l2 = drift_cos = None
    if anchors:
        old_z = mean_descriptors(state.encoder, anchors, state.t_max)
        new_z = mean_descriptors(new_state.encoder, anchors, state.t_max)
        keep = _finite_rows(old_z) & _finite_rows(new_z)
        if keep.any():
            drift_l2, drift_cos = drift_metrics(old_z[keep], new_z[keep])

    report = MaintenanceReport(
        performed=True,
        version=new_state.version,
        bank_size=bank_size,
        drift_l2=drift_l2,
        drift_cos=drift_cos,
        reembedded_archives=len(archives),
        reevaluated=reevaluated,
        dropped=dropped,
        repacked=repacked,
        train_loss=trained.losses[-1] if trained.losses else None,
    )
    logger.info(
        f"Maintenance v{state.version} -> v{new_state.version}: {len(archives)} archives re-embedded, "
        f"drift L2={drift_l2 if drift_l2 is not None else float('nan'):.4f}"
    )
    return new_state, archives, report
