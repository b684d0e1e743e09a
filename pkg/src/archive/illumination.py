"""
Task-local MAP-Elites illumination and re-embedding under a new geometry.
"""

import logging
from typing import Callable, List, NamedTuple, Optional

import numpy as np

from .container import ArchiveConfig, REJECTED, UnstructuredArchive
from .elite import Elite, LineageRecord, inherit_lineage
from .variation import InjectionPool, mutate, select_parent
from ..agent import make_policy
from ..embedder import EmbeddingState, mean_descriptors, normalize
from ..gridworld import EpisodeSet, Evaluation, TaskSpec, evaluate_policy
from ..neural import copy_tree
from ..neural.layers import ParamTree
from ..utils.errors import StaleDescriptorError, UsageError
from ..utils.seeding import derive_seed
from ..utils.tags import base_tag

logger = logging.getLogger(__name__)

Reevaluator = Callable[[Elite], EpisodeSet]


class IlluminationResult(NamedTuple):
    archive: UnstructuredArchive
    base_elite: Elite
    gate: float
    env_steps: int


class ReembedReport(NamedTuple):
    reembedded: int
    reevaluated: int
    dropped: int


def competence_gate(base_sr: float, config: ArchiveConfig) -> float:
    return max(config.gate_floor, config.gate_ratio * base_sr)


def build_elite(archive: UnstructuredArchive, params: ParamTree, evaluation: Evaluation,
                state: EmbeddingState, sigma: float, lineage: LineageRecord,
                parent_id: Optional[str] = None) -> Elite:
    config = archive.config
    sketch = evaluation.episodes.head(config.sketch_episodes)
    return Elite(
        elite_id=archive.next_id(),
        params=params,
        fitness=evaluation.mean_reward,
        sr=evaluation.sr,
        descriptor=state.descriptor(evaluation.episodes),
        sigma=sigma,
        sketch=sketch,
        lineage=lineage,
        version=state.version,
        source_tag=archive.base_tag,
        parent_id=parent_id,
        sketch_complete=len(sketch) == len(evaluation.episodes),
    )


def illuminate(spec: TaskSpec,
               base_params: ParamTree,
               state: EmbeddingState,
               tag: str,
               config: ArchiveConfig,
               seed: int,
               base_lineage: Optional[LineageRecord] = None,
               pool: Optional[InjectionPool] = None,
               initial: Optional[UnstructuredArchive] = None,
               iterations: Optional[int] = None) -> IlluminationResult:
    """
    Build or refresh the archive of task ``tag`` around a trained policy.

    The base policy is evaluated and inserted first (forced when refreshing
    an existing archive). Each iteration selects a parent, mutates it,
    evaluates the offspring, gates it on competence and offers it to the
    archive, adapting ``d_min`` whenever the archive changed.

    Args:
        spec: Task the archive belongs to
        base_params: Trained policy (left untouched)
        state: Embedding state with a fitted normalizer
        tag: Task tag, primes allowed
        config: Archive settings
        seed: Run seed
        base_lineage: Lineage of the base policy; ``[tag]`` when None
        pool: Optional cross-archive injection pool
        initial: Existing archive to refresh on a revisit
        iterations: Overrides ``config.iterations``

    Returns:
        IlluminationResult

    Raises:
        UsageError: If the embedding state has no normalizer
        StaleDescriptorError: If ``initial`` is at another embedding version
    """
    if state.normalizer is None:
        raise UsageError("Illumination needs a fitted normalizer")
    family = base_tag(tag)
    budget = config.iterations if iterations is None else int(iterations)
    rng_seed = derive_seed(seed, 'illuminate', tag)
    rng = np.random.default_rng(rng_seed)
    env_steps = 0

    base_eval = evaluate_policy(make_policy(base_params), spec, config.eval_episodes,
                                seed=derive_seed(seed, 'illuminate-base', tag), tag=family)
    env_steps += base_eval.env_steps

    if initial is not None:
        if initial.version != state.version:
            raise StaleDescriptorError(state.version, initial.version)
        archive = initial
    else:
        archive = UnstructuredArchive(family, config, state.version)
    lineage = base_lineage if base_lineage is not None else LineageRecord((family,))
    base = build_elite(archive, copy_tree(base_params), base_eval, state, config.sigma0, lineage)
    archive.try_insert(base, force=initial is not None)
    archive.z_ref = base.descriptor.copy()
    archive.base_elite_id = base.elite_id
    archive.base_sketch = base.sketch
    gate = competence_gate(base.sr, config)

    for i in range(budget):
        parent, injected = select_parent(archive, pool, config.injection_prob, rng)
        child_params, sigma = mutate(parent, rng, config.sigma_lr, config.sigma_low, config.sigma_high)
        evaluation = evaluate_policy(make_policy(child_params), spec, config.eval_episodes,
                                     seed=derive_seed(seed, 'illuminate-eval', tag, i), tag=family)
        env_steps += evaluation.env_steps
        archive.stats['evaluations'] += 1
        if evaluation.sr < gate:
            archive.stats['gated'] += 1
            continue
        child = build_elite(archive, child_params, evaluation, state, sigma,
                            inherit_lineage(parent.lineage, family), parent.elite_id)
        if injected:
            logger.debug(f"[{family}] Offspring {child.elite_id} from injected parent {parent.elite_id}")
        if archive.try_insert(child).outcome != REJECTED:
            archive.adapt_dmin()

    logger.info(
        f"[{family}] Illumination finished: {len(archive)} elites, d_min={archive.d_min:.4f}, "
        f"gate={gate:.3f}, {env_steps} env steps"
    )
    return IlluminationResult(archive, base, gate, env_steps)


def reembed(archive: UnstructuredArchive, state: EmbeddingState,
            reevaluate: Optional[Reevaluator] = None) -> ReembedReport:
    """
    Recompute every descriptor from the stored sketches under ``state``.

    When more than ``reevaluate_fraction`` of the elites lack a sketch and a
    ``reevaluate`` callback is given, those elites are re-evaluated to rebuild
    their sketches; otherwise they are dropped.

    Raises:
        StaleDescriptorError: If ``state`` is older than the archive
        UsageError: If ``state`` has no normalizer
    """
    if state.version < archive.version:
        raise StaleDescriptorError(archive.version, state.version)
    if state.normalizer is None:
        raise UsageError("Re-embedding needs a fitted normalizer")

    missing = [e for e in archive.elites if e.sketch is None]
    reevaluated = dropped = 0
    if missing:
        fraction = len(missing) / len(archive.elites)
        if fraction > archive.config.reevaluate_fraction and reevaluate is not None:
            for elite in missing:
                elite.sketch = reevaluate(elite).head(archive.config.sketch_episodes)
                reevaluated += 1
        else:
            archive.elites = [e for e in archive.elites if e.sketch is not None]
            dropped = len(missing)
            logger.warning(f"[{archive.base_tag}] Dropped {dropped} elites without trajectory sketches")

    sketches: List[EpisodeSet] = [e.sketch for e in archive.elites]
    if archive.base_sketch is not None:
        sketches.append(archive.base_sketch)
    if sketches:
        z = normalize(mean_descriptors(state.encoder, sketches, state.t_max), state.normalizer)
        for elite, row in zip(archive.elites, z):
            elite.descriptor = row
            elite.version = state.version
        if archive.base_sketch is not None:
            archive.z_ref = z[-1]
    archive.version = state.version
    logger.info(f"[{archive.base_tag}] Re-embedded {len(archive.elites)} elites at version {state.version}")
    return ReembedReport(len(archive.elites), reevaluated, dropped)


def native_reevaluator(spec: TaskSpec, episodes: int, seed: int) -> Reevaluator:
    """Callback that re-runs an elite on its own task for ``reembed``."""

    def run(elite: Elite) -> EpisodeSet:
        evaluation = evaluate_policy(make_policy(elite.params), spec, episodes,
                                     seed=derive_seed(seed, 'reevaluate', elite.elite_id),
                                     tag=elite.source_tag)
        return evaluation.episodes

    return run
