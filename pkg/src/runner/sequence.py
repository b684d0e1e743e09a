"""
Per-task loop of one (method, seed) run.

For the archive methods each visit selects an origin from the prior
archives, trains, illuminates (or refreshes) the task archive and runs
boundary maintenance. The single-model baselines only differ in how the
next task's starting parameters are produced.
"""

import logging
import os
from typing import Dict, NamedTuple, Optional, Tuple

from .config import RunConfig
from .curriculum import make_curriculum
from .eventlog import RUNLOG_FILE, BudgetMeter, EventLog, write_manifest
from ..agent import init_policy, make_policy, shrink_and_perturb, train_task
from ..archive import (
    InjectionPool,
    LineageRecord,
    UnstructuredArchive,
    archive_dir,
    illuminate,
    load_archive,
    native_reevaluator,
    save_archive,
)
from ..embedder import EmbeddingState, init_embedding_state, load_embedding_state, save_embedding_state, state_path
from ..gridworld import TaskSpec, evaluate_policy, standard_spec
from ..maintenance import boundary_maintenance, bootstrap_normalizer
from ..metrics import RunLog, TransferSample, VisitRecord
from ..neural import load_params, save_params
from ..neural.layers import ParamTree
from ..transfer import few_shot_select, pool_candidates, record_lineage
from ..utils.errors import ArtifactError
from ..utils.formatter import progress_formatter
from ..utils.seeding import derive_rng, derive_seed
from ..utils.tags import base_tag

logger = logging.getLogger(__name__)

POLICY_DIR = 'policies'


class RunArtifacts(NamedTuple):
    run_dir: str
    events: str
    manifest: str
    runlog: str
    budget: Dict[str, int]


def run_directory(output_dir: str, method: str, seed: int) -> str:
    return os.path.join(output_dir, method, f"seed-{seed}")


def policy_path(run_dir: str, tag: str) -> str:
    return os.path.join(run_dir, POLICY_DIR, base_tag(tag))


class SequenceRunner:
    """
    Runs a curriculum for one method and seed, writing every artifact under
    ``run_dir``.
    """

    def __init__(self, config: RunConfig, run_dir: str, threads: int = 1):
        self.config = config.validate()
        self.run_dir = run_dir
        self.threads = max(1, threads)
        self.curriculum = make_curriculum(config.curriculum, config.custom_curriculum)
        self.seed = int(config.seed)
        self.task_seed = self.seed if config.task.task_seed is None else int(config.task.task_seed)

        self.log = RunLog(config.method, self.seed)
        self.meter = BudgetMeter()
        self.events: Optional[EventLog] = None

        self.archives: Dict[str, UnstructuredArchive] = {}
        self.policies: Dict[str, ParamTree] = {}
        self.model: Optional[ParamTree] = None
        self.optimizer = None
        self.theta0: Optional[ParamTree] = None

        self.state: Optional[EmbeddingState] = None
        self.banks = None
        self.maintenance_rng = derive_rng(self.seed, 'maintenance')
        if config.uses_archives:
            self.state = init_embedding_state(self.seed, config.embedder)
            self.banks = config.maintenance.make_banks(derive_rng(self.seed, 'replay'))

        self.stats = {'visits': 0, 'selections': 0, 'maintenance': 0}

    def task_spec(self, tag: str) -> TaskSpec:
        base = base_tag(tag)
        return standard_spec(base, derive_seed(self.task_seed, 'task', base), self.config.task.variant,
                             self.config.task.max_steps)

    def fresh_policy(self, index: int) -> ParamTree:
        return init_policy(derive_rng(self.seed, 'policy-init', index), hidden=self.config.ppo.hidden)

    # Starting points

    def _archive_origin(self, index: int, tag: str, spec: TaskSpec) -> Tuple[ParamTree, Optional[str], LineageRecord]:
        base = base_tag(tag)
        if not self.archives:
            return self.fresh_policy(index), None, LineageRecord((base,))
        self._sample_transfer(tag, spec)
        pool = pool_candidates(self.archives.values(), self.config.selection.k_pool, self.state.version)
        if not self.config.selection.enabled:
            chosen = pool[0]
        else:
            result = few_shot_select(pool, spec, tag, self.config.selection, self.config.ppo, self.seed, self.threads)
            self.meter.add('probe', result.env_steps)
            for probe in result.probes:
                self.events.write(probe.to_event(tag))
            chosen = result.chosen
        self.stats['selections'] += 1
        lineage = record_lineage(chosen.lineage, base)
        self.events.emit('selection', task_tag=tag, chosen_id=chosen.elite_id, source_tag=chosen.source_tag,
                         lineage=lineage.to_list(), pool=[e.elite_id for e in pool])
        return chosen.params, chosen.elite_id, lineage

    def _sample_transfer(self, tag: str, spec: TaskSpec) -> None:
        """Zero-shot samples of every other archive on the target for basin analysis."""
        budget = self.config.metrics.basin_samples
        target = base_tag(tag)
        if budget == 0:
            return
        rng = derive_rng(self.seed, 'basin', tag)
        for source, archive in sorted(self.archives.items()):
            if source == target or not len(archive):
                continue
            elites = sorted(archive.elites, key=lambda e: e.elite_id)
            if len(elites) > budget:
                elites = [elites[i] for i in sorted(rng.choice(len(elites), size=budget, replace=False))]
            for elite in elites:
                evaluation = evaluate_policy(make_policy(elite.params), spec, self.config.metrics.basin_episodes,
                                             seed=derive_seed(self.seed, 'basin-eval', tag, elite.elite_id),
                                             tag=target)
                self.meter.add('evaluation', evaluation.env_steps)
                self.log.transfer_samples.append(TransferSample(
                    source, target, elite.elite_id, elite.fitness, evaluation.sr, elite.descriptor.tolist()))

    def starting_point(self, index: int, tag: str, spec: TaskSpec):
        """
        Parameters, optimizer state, origin id and lineage for the next visit.
        """
        method = self.config.method
        base = base_tag(tag)
        if self.config.uses_archives:
            params, origin, lineage = self._archive_origin(index, tag, spec)
            return params, None, origin, lineage
        lineage = LineageRecord((base,))
        if method == 'scratch':
            return self.fresh_policy(index), None, None, lineage
        if method == 'scratch_reuse':
            if base in self.policies:
                return self.policies[base], None, base, lineage
            return self.fresh_policy(index), None, None, lineage
        if self.model is None:
            self.model = self.fresh_policy(0)
            self.theta0 = self.model
            return self.model, None, None, lineage
        if method == 'shrink_perturb':
            baselines = self.config.baselines
            shrunk = shrink_and_perturb(self.model, baselines.shrink_alpha, baselines.perturb_scale,
                                        derive_rng(self.seed, 'shrink-perturb', index))
            return shrunk, None, None, lineage
        if method == 'finetune':
            return self.model, self.optimizer, None, lineage
        return self.model, None, None, lineage

    # Visit

    def visit(self, index: int, tag: str) -> VisitRecord:
        spec = self.task_spec(tag)
        base = base_tag(tag)
        logger.info(progress_formatter.format_step(index + 1, len(self.curriculum), f"{self.config.method} on {tag}"))
        self.events.emit('task_start', index=index, task_tag=tag, method=self.config.method)
        params, optimizer, origin, lineage = self.starting_point(index, tag, spec)

        def on_checkpoint(phase: str, env_steps: int, sr: float, mean_reward: float) -> None:
            self.events.emit('train_checkpoint', phase=phase, task_tag=tag, env_steps=env_steps, sr=sr,
                             mean_reward=mean_reward)

        l2_anchor = self.theta0 if self.config.method == 'l2init' else None
        result = train_task(
            spec, params, self.config.ppo, self.seed, tag,
            banks_hook=self.banks.store_episode_set if self.banks is not None else None,
            checkpoint_hook=on_checkpoint,
            optimizer=optimizer,
            l2_anchor=l2_anchor,
            l2_lambda=self.config.baselines.l2_lambda if l2_anchor is not None else 0.0,
        )
        self.meter.add('training', result.env_steps)
        self.meter.add('evaluation', result.eval_steps)

        if self.config.uses_archives or self.config.method == 'scratch_reuse':
            self.policies[base] = result.params
        else:
            self.model, self.optimizer = result.params, result.optimizer
        save_params(policy_path(self.run_dir, base), result.params, {'tag': tag, 'method': self.config.method})

        if self.config.uses_archives:
            self.illuminate_visit(tag, spec, result.params, lineage)
            self.maintain()

        record = VisitRecord(tag, result.trace.final_sr, None,
                             [(steps, sr) for steps, sr, _ in result.trace.checkpoints],
                             self.config.ppo.total_steps, origin)
        self.log.add_visit(record)
        self.stats['visits'] += 1
        logger.info(f"{progress_formatter.format_progress_bar(self.stats['visits'], len(self.curriculum))} "
                    f"{tag} SR={record.sr_post:.3f}, {progress_formatter.format_steps(self.meter.total)} env steps")
        self.events.emit('visit_end', task_tag=tag, sr_post=record.sr_post, env_steps=result.env_steps,
                         origin=origin)
        return record

    def illuminate_visit(self, tag: str, spec: TaskSpec, params: ParamTree, lineage: LineageRecord) -> None:
        base = base_tag(tag)
        bootstrap_normalizer(self.state, self.banks, self.config.maintenance, self.maintenance_rng)
        pool = None
        cfg = self.config.archive
        if cfg.injection_prob > 0:
            others = [e for b, a in sorted(self.archives.items()) if b != base for e in a.elites]
            pool = InjectionPool(others, cfg.injection_lambda, cfg.injection_subset)
        refreshed = base in self.archives
        result = illuminate(spec, params, self.state, tag, cfg, self.seed, lineage, pool, self.archives.get(base))
        self.archives[base] = result.archive
        self.meter.add('illumination', result.env_steps)
        save_archive(self.run_dir, result.archive)
        self.events.emit('archive', task_tag=tag, gate=result.gate, base_elite=result.base_elite.elite_id,
                         refreshed=refreshed, env_steps=result.env_steps, **result.archive.summary())

    def maintain(self) -> None:
        if self.config.method != 'telapa':
            return
        reevaluators = {
            base: native_reevaluator(self.task_spec(base), self.config.archive.sketch_episodes, self.seed)
            for base in self.archives
        }
        self.state, _, report = boundary_maintenance(
            self.state, self.banks, list(self.archives.values()), self.config.maintenance,
            self.config.embedder, self.maintenance_rng, root=self.run_dir, reevaluators=reevaluators,
        )
        self.events.write(report.to_event())
        if report.performed:
            self.stats['maintenance'] += 1
            save_embedding_state(self.run_dir, self.state)
            for archive in self.archives.values():
                save_archive(self.run_dir, archive)

    # Sequence end

    def deployed_policy(self, base: str) -> ParamTree:
        if base in self.policies:
            return self.policies[base]
        return self.model

    def final_evaluation(self) -> None:
        episodes = self.config.metrics.end_eval_episodes
        for base in self.log.base_tags():
            evaluation = evaluate_policy(make_policy(self.deployed_policy(base)), self.task_spec(base), episodes,
                                         seed=derive_seed(self.seed, 'final-eval', base), tag=base)
            self.meter.add('evaluation', evaluation.env_steps)
            self.log.set_end(base, evaluation.sr)
            self.events.emit('final_eval', task_tag=base, sr_end=evaluation.sr, mean_reward=evaluation.mean_reward)

    def run(self) -> RunArtifacts:
        """
        Execute the curriculum.

        Raises:
            TelapaError: Re-raised after an ``error`` event and a failed manifest
        """
        os.makedirs(self.run_dir, exist_ok=True)
        serialized, digest = self.config.serialize(), self.config.config_hash()
        write_manifest(self.run_dir, serialized, digest, self.config.method, self.seed, self.meter)
        logger.info(f"Run {self.config.method} seed {self.seed}: {len(self.curriculum)} visits -> {self.run_dir}")
        self.events = EventLog(self.run_dir)
        try:
            for index, tag in enumerate(self.curriculum):
                self.visit(index, tag)
            self.final_evaluation()
        except Exception as e:
            logger.error(f"Run {self.config.method} seed {self.seed} failed: {e}")
            self.events.emit('error', error=str(e), error_type=type(e).__name__, visits=self.stats['visits'])
            self.events.close()
            write_manifest(self.run_dir, serialized, digest, self.config.method, self.seed, self.meter,
                           status='failed', extra={'error': str(e)})
            raise
        self.events.close()

        runlog = self.log.save(os.path.join(self.run_dir, RUNLOG_FILE))
        if self.state is not None:
            save_embedding_state(self.run_dir, self.state)
        manifest = write_manifest(self.run_dir, serialized, digest, self.config.method, self.seed, self.meter,
                                  status='complete', extra={'stats': dict(self.stats)})
        logger.info(f"Run {self.config.method} seed {self.seed} complete: {self.meter.total} env steps")
        return RunArtifacts(self.run_dir, self.events.path, manifest, runlog, self.meter.to_dict())


def run_sequence(config: RunConfig, output_dir: str, threads: int = 1,
                 run_dir: Optional[str] = None) -> RunArtifacts:
    """
    Run one (method, seed) sequence under ``output_dir/<method>/seed-<n>``.

    Args:
        config: Validated run configuration
        output_dir: Root of all runs
        threads: Worker cap for candidate probes
        run_dir: Explicit run directory

    Returns:
        RunArtifacts
    """
    run_dir = run_dir or run_directory(output_dir, config.method, config.seed)
    return SequenceRunner(config, run_dir, threads).run()


def illuminate_task(run_dir: str, tag: str, config: RunConfig) -> UnstructuredArchive:
    """
    Rebuild the archive of ``tag`` from a finished run's stored policy and
    latest embedding state.

    Raises:
        ArtifactError: If the run lacks the policy or an embedding state
    """
    base = base_tag(tag)
    params = load_params(policy_path(run_dir, base))
    state = _latest_state(run_dir)
    if state.normalizer is None:
        raise ArtifactError("Embedding state has no normalizer", run_dir)
    runner = SequenceRunner(config, run_dir)
    initial = None
    manifest = os.path.join(archive_dir(run_dir, base), 'archive.json')
    if os.path.exists(manifest):
        initial = load_archive(archive_dir(run_dir, base))
        if initial.version != state.version:
            initial = None
    lineage = LineageRecord((base,))
    if initial is not None and initial.get(initial.base_elite_id) is not None:
        lineage = initial.get(initial.base_elite_id).lineage
    result = illuminate(runner.task_spec(base), params, state, tag, config.archive, config.seed, lineage,
                        initial=initial)
    save_archive(run_dir, result.archive)
    return result.archive


def _latest_state(run_dir: str) -> EmbeddingState:
    directory = os.path.join(run_dir, 'embedding')
    try:
        versions = sorted(int(name[len('state-v'):-len('.tlpb')]) for name in os.listdir(directory)
                          if name.startswith('state-v') and name.endswith('.tlpb'))
    except FileNotFoundError as e:
        raise ArtifactError("Run has no embedding state", directory) from e
    if not versions:
        raise ArtifactError("Run has no embedding state", directory)
    return load_embedding_state(state_path(run_dir, versions[-1]))
