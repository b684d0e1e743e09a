"""
Few-shot origin selection: probe each pooled candidate with a short PPO run
on the target task and keep a near-best candidate that recovers fastest.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, List, Mapping, NamedTuple, Sequence, Tuple

from ..agent import PPOConfig, TrainTrace, make_policy, train_task
from ..archive import Elite
from ..gridworld import TaskSpec, evaluate_policy
from ..utils.errors import ConfigurationError, InsufficientDataError
from ..utils.seeding import derive_seed
from ..utils.tags import base_tag

logger = logging.getLogger(__name__)


@dataclass
class SelectionConfig:
    """Pool size and probe settings."""

    enabled: bool = True
    k_pool: int = 8
    zero_shot_episodes: int = 20
    probe_steps: int = 20_000
    probe_eval_every: int = 4_000
    probe_eval_episodes: int = 10
    margin: float = 0.05
    horizon_fraction: float = 0.5

    def validate(self) -> 'SelectionConfig':
        if self.k_pool < 1:
            raise ConfigurationError(f"K_pool must be at least 1, got {self.k_pool}")
        if self.margin < 0:
            raise ConfigurationError("Near-best margin must be non-negative")
        if self.zero_shot_episodes < 1 or self.probe_eval_episodes < 1:
            raise ConfigurationError("Probe episode counts must be positive")
        if self.probe_steps < 0 or self.probe_eval_every < 1:
            raise ConfigurationError("Probe budget must be non-negative with a positive checkpoint period")
        if not 0.0 < self.horizon_fraction <= 1.0:
            raise ConfigurationError("Recoverability horizon must lie in (0, 1]")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'SelectionConfig':
        return cls(**data).validate()


@dataclass
class ProbeResult:
    candidate_id: str
    source_tag: str
    lineage: List[str]
    zero_shot_sr: float
    trace: List[Tuple[int, float]]
    final_sr: float
    recoverability: float
    env_steps: int = 0
    chosen: bool = False

    def to_event(self, target_tag: str) -> Dict[str, Any]:
        return {
            'kind': 'probe',
            'target_tag': target_tag,
            'candidate_id': self.candidate_id,
            'source_tag': self.source_tag,
            'lineage': list(self.lineage),
            'zero_shot_sr': self.zero_shot_sr,
            'final_sr': self.final_sr,
            'recoverability': self.recoverability,
            'trace': [list(point) for point in self.trace],
            'chosen': self.chosen,
        }


class SelectionResult(NamedTuple):
    chosen: Elite
    probes: List[ProbeResult]
    env_steps: int


def horizon_sr(trace: TrainTrace, budget: int, fraction: float = 0.5) -> float:
    """SR at the last checkpoint within ``fraction`` of the probe budget."""
    limit = fraction * budget
    within = [sr for steps, sr, _ in trace.checkpoints if steps <= limit]
    return within[-1] if within else trace.checkpoints[0][1]


def choose_origin(probes: Sequence[ProbeResult], margin: float) -> int:
    """
    Index of the chosen probe.

    Candidates within ``margin`` of the best final SR are kept; the highest
    recoverability wins, then the higher final SR, then pool order.
    """
    if not probes:
        raise InsufficientDataError("No probes to choose from")
    best_final = max(p.final_sr for p in probes)
    kept = [i for i, p in enumerate(probes) if p.final_sr >= best_final - margin]
    return min(kept, key=lambda i: (-probes[i].recoverability, -probes[i].final_sr, i))


def probe_candidate(candidate: Elite, spec: TaskSpec, target_tag: str, config: SelectionConfig,
                    ppo_config: PPOConfig, seed: int) -> ProbeResult:
    """
    Zero-shot evaluation and a fresh-optimizer PPO probe of one candidate.

    The candidate's parameters are copied by ``train_task``; nothing on the
    elite is modified.
    """
    family = base_tag(target_tag)
    zero = evaluate_policy(make_policy(candidate.params), spec, config.zero_shot_episodes,
                           seed=derive_seed(seed, 'zero-shot', target_tag, candidate.elite_id), tag=family)
    probe_config = replace(ppo_config, total_steps=config.probe_steps,
                           eval_every=config.probe_eval_every, eval_episodes=config.probe_eval_episodes)
    result = train_task(spec, candidate.params, probe_config, derive_seed(seed, 'probe', candidate.elite_id),
                        family, phase='probe')
    recoverability = horizon_sr(result.trace, config.probe_steps, config.horizon_fraction) - zero.sr
    logger.debug(
        f"[{target_tag}] Probe {candidate.elite_id}: zero-shot={zero.sr:.3f} "
        f"final={result.trace.final_sr:.3f} recoverability={recoverability:+.3f}"
    )
    return ProbeResult(
        candidate_id=candidate.elite_id,
        source_tag=candidate.source_tag,
        lineage=candidate.lineage.to_list(),
        zero_shot_sr=zero.sr,
        trace=[(steps, sr) for steps, sr, _ in result.trace.checkpoints],
        final_sr=result.trace.final_sr,
        recoverability=recoverability,
        env_steps=zero.env_steps + result.env_steps + result.eval_steps,
    )


def few_shot_select(pool: Sequence[Elite], spec: TaskSpec, target_tag: str, config: SelectionConfig,
                    ppo_config: PPOConfig, seed: int, threads: int = 1) -> SelectionResult:
    """
    Probe every pooled candidate on the target task and pick the origin.

    Probes run concurrently on up to ``threads`` workers; results are read
    back in pool order.

    Args:
        pool: Candidates from ``pool_candidates``
        spec: Target task
        target_tag: Target tag (primes allowed)
        config: Selection settings
        ppo_config: PPO settings the probe budget is applied to
        seed: Run seed
        threads: Worker cap

    Returns:
        SelectionResult(chosen elite, probe results, env steps spent)

    Raises:
        InsufficientDataError: If the pool is empty
    """
    config.validate()
    if not pool:
        raise InsufficientDataError("Cannot select an origin from an empty pool")
    with ThreadPoolExecutor(max_workers=max(1, min(threads, len(pool)))) as executor:
        futures = [executor.submit(probe_candidate, c, spec, target_tag, config, ppo_config, seed) for c in pool]
        probes = [f.result() for f in futures]

    index = choose_origin(probes, config.margin)
    probes[index].chosen = True
    chosen = pool[index]
    logger.info(
        f"[{target_tag}] Selected origin {chosen.elite_id} from {chosen.source_tag} "
        f"(final SR={probes[index].final_sr:.3f}, recoverability={probes[index].recoverability:+.3f})"
    )
    return SelectionResult(chosen, probes, sum(p.env_steps for p in probes))
