"""Tests for PPO training, the exploration bonus and baseline transforms."""

import numpy as np
import pytest

from src.agent import (
    EpisodicCounter,
    PPOConfig,
    RolloutBatch,
    compute_gae,
    init_policy,
    intrinsic_bonus,
    l2init_penalty,
    make_policy,
    ppo_update,
    shrink_and_perturb,
    train_task,
)
from src.agent.policy import values_of
from src.gridworld import OBS_DIM, evaluate_policy, standard_spec
from src.neural import init_optimizer
from src.utils.errors import ConfigurationError, InsufficientDataError, ShapeError


def tiny_config(**overrides):
    base = dict(total_steps=256, horizon=64, n_envs=2, minibatch_size=32, epochs=1,
                eval_every=100, eval_episodes=2, hidden=(16, 16))
    base.update(overrides)
    return PPOConfig(**base).validate()


def random_batch(rng, params, n=32, advantages=None):
    obs = rng.random((n, OBS_DIM))
    actions = rng.integers(7, size=n)
    values = values_of(params, obs)
    adv = np.zeros(n) if advantages is None else advantages
    return RolloutBatch(obs, actions, np.full(n, np.log(1 / 7)), values, adv, values + adv)


class TestIntrinsic:
    def test_first_visit_returns_beta(self):
        counter = EpisodicCounter()
        counter.increment('s')
        assert intrinsic_bonus(counter, 's', 0.005) == pytest.approx(0.005)

    def test_fourth_visit(self):
        counter = EpisodicCounter()
        for _ in range(4):
            counter.increment('s')
        assert intrinsic_bonus(counter, 's', 0.005) == pytest.approx(0.0025)

    def test_zero_beta(self):
        counter = EpisodicCounter()
        counter.increment('s')
        assert intrinsic_bonus(counter, 's', 0.0) == 0.0

    def test_reset_clears_counts(self):
        counter = EpisodicCounter()
        for _ in range(3):
            counter.increment('s')
        counter.reset()
        counter.increment('s')
        assert intrinsic_bonus(counter, 's', 0.005) == pytest.approx(0.005)


class TestBaselines:
    def test_l2init_zero_at_init(self):
        params = {'w': np.arange(3.0)}
        assert l2init_penalty(params, params, 0.1) == 0.0

    def test_l2init_scalar(self):
        assert l2init_penalty({'w': np.array(2.0)}, {'w': np.array(1.0)}, 0.1) == pytest.approx(0.1)
        assert l2init_penalty({'w': np.array(2.0)}, {'w': np.array(1.0)}, 0.0) == 0.0

    def test_l2init_shape_mismatch(self):
        with pytest.raises(ShapeError):
            l2init_penalty({'w': np.zeros(2)}, {'w': np.zeros(3)})

    def test_shrink_identity_and_zero(self):
        params = {'w': np.array([1.0, -2.0])}
        assert np.array_equal(shrink_and_perturb(params, 1.0, 0.0)['w'], params['w'])
        assert np.array_equal(shrink_and_perturb(params, 0.0, 0.0)['w'], np.zeros(2))

    def test_shrink_rejects_alpha_above_one(self):
        with pytest.raises(ConfigurationError):
            shrink_and_perturb({'w': np.zeros(1)}, 1.5, 0.0)

    def test_shrink_is_pure(self):
        params = {'w': np.ones(4)}
        a = shrink_and_perturb(params, 0.9, 1e-3, np.random.default_rng(3))
        b = shrink_and_perturb(params, 0.9, 1e-3, np.random.default_rng(3))
        assert np.array_equal(a['w'], b['w'])
        assert np.array_equal(params['w'], np.ones(4))

    def test_expected_squared_norm(self):
        params = {'a': np.array([1.0, -2.0, 0.5]), 'b': np.array([[3.0, 1.0]])}
        alpha, noise = 0.9, 0.3
        rng = np.random.default_rng(0)
        norms = [
            sum(np.sum(v ** 2) for v in shrink_and_perturb(params, alpha, noise, rng).values())
            for _ in range(10_000)
        ]
        expected = alpha ** 2 * (1 + 4 + 0.25 + 9 + 1) + noise ** 2 * 5
        assert np.mean(norms) == pytest.approx(expected, rel=0.05)


class TestPPO:
    def test_gae_undiscounted(self):
        rewards = np.array([[0.0], [0.0], [1.0]])
        dones = np.array([[0.0], [0.0], [1.0]])
        adv, ret = compute_gae(rewards, np.zeros((3, 1)), dones, np.zeros(1), 1.0, 1.0)
        assert np.allclose(adv[:, 0], [1.0, 1.0, 1.0])
        assert np.allclose(ret, adv)

    def test_gae_stops_at_episode_boundary(self):
        rewards = np.array([[1.0], [0.0]])
        dones = np.array([[1.0], [0.0]])
        adv, _ = compute_gae(rewards, np.zeros((2, 1)), dones, np.array([5.0]), 0.5, 1.0)
        assert adv[0, 0] == pytest.approx(1.0)
        assert adv[1, 0] == pytest.approx(2.5)

    def test_zero_advantage_leaves_actor(self):
        rng = np.random.default_rng(1)
        config = tiny_config(entropy_coef=0.0)
        params = init_policy(rng, hidden=(16, 16))
        batch = random_batch(rng, params)
        update = ppo_update(params, batch, config, init_optimizer(params), rng)
        for name in params:
            if name.startswith('actor.'):
                assert np.array_equal(update.params[name], params[name])

    def test_matching_value_targets_leave_critic(self):
        rng = np.random.default_rng(2)
        config = tiny_config(entropy_coef=0.0, value_coef=0.5)
        params = init_policy(rng, hidden=(16, 16))
        batch = random_batch(rng, params, advantages=rng.normal(size=32))
        batch = batch._replace(returns=batch.values)
        update = ppo_update(params, batch, config, init_optimizer(params), rng)
        for name in params:
            if name.startswith('critic.'):
                assert np.array_equal(update.params[name], params[name])

    def test_empty_batch(self):
        rng = np.random.default_rng(0)
        params = init_policy(rng, hidden=(16, 16))
        empty = RolloutBatch(np.zeros((0, OBS_DIM)), np.zeros(0, dtype=int), np.zeros(0),
                             np.zeros(0), np.zeros(0), np.zeros(0))
        with pytest.raises(InsufficientDataError):
            ppo_update(params, empty, tiny_config(), init_optimizer(params), rng)

    def test_invalid_config(self):
        with pytest.raises(ConfigurationError):
            PPOConfig(clip_eps=1.5).validate()
        with pytest.raises(ConfigurationError):
            PPOConfig(gamma=0.0).validate()


class TestTrainTask:
    def test_zero_budget_returns_initial_params(self):
        spec = standard_spec('A', seed=1, variant='small')
        params = init_policy(np.random.default_rng(0), hidden=(16, 16))
        seen = []
        result = train_task(spec, params, tiny_config(total_steps=0), seed=3, tag='A',
                            banks_hook=seen.append)
        for name in params:
            assert np.array_equal(result.params[name], params[name])
        assert result.trace.steps == [0]
        assert len(seen) == 1 and result.env_steps == 0

    def test_trace_structure_and_budget(self):
        spec = standard_spec('B', seed=2, variant='small')
        params = init_policy(np.random.default_rng(1), hidden=(16, 16))
        config = tiny_config()
        result = train_task(spec, params, config, seed=4, tag='B')
        steps = result.trace.steps
        assert steps[0] == 0
        assert all(b > a for a, b in zip(steps, steps[1:]))
        assert config.total_steps <= steps[-1] <= config.total_steps + config.horizon
        assert len(result.episode_sets) == len(steps)
        assert all(0.0 <= sr <= 1.0 for sr in result.trace.srs)

    def test_deterministic(self):
        spec = standard_spec('A', seed=7, variant='small')
        params = init_policy(np.random.default_rng(5), hidden=(16, 16))
        config = tiny_config(total_steps=128, intrinsic_enabled=True)
        a = train_task(spec, params, config, seed=9, tag='A')
        b = train_task(spec, params, config, seed=9, tag='A')
        for name in params:
            assert np.array_equal(a.params[name], b.params[name])
        assert a.trace.checkpoints == b.trace.checkpoints

    def test_evaluation_ignores_intrinsic_setting(self):
        spec = standard_spec('A', seed=7, variant='small')
        params = init_policy(np.random.default_rng(5), hidden=(16, 16))
        plain = evaluate_policy(make_policy(params), spec, 3, seed=1)
        again = evaluate_policy(make_policy(params), spec, 3, seed=1)
        assert plain.sr == again.sr
        assert [e.ret for e in plain.episodes] == [e.ret for e in again.episodes]


@pytest.mark.slow
def test_small_a_variant_is_learned():
    spec = standard_spec('A', seed=0, variant='small')
    params = init_policy(np.random.default_rng(0))
    config = PPOConfig(total_steps=200_000, eval_every=50_000)
    result = train_task(spec, params, config, seed=0, tag='A')
    final = evaluate_policy(make_policy(result.params), spec, 50, seed=123)
    assert final.sr >= 0.8
