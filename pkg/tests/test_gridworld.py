"""Tests for gridworld tasks, dynamics, features and evaluation."""

import numpy as np
import pytest

from src.gridworld import (
    Action,
    Cell,
    Episode,
    EpisodeSet,
    FEATURE_DIM,
    Flag,
    GridState,
    OBS_DIM,
    TaskSpec,
    evaluate_policy,
    features,
    generate_layout,
    load_episodes,
    make_task,
    observe,
    random_policy,
    save_episodes,
    standard_spec,
    step,
    success_reward,
)
from src.utils.errors import ConfigurationError, EmptyEpisodeError, UsageError


def blank_state(family='A', width=5, height=5, pos=(0, 0), direction=0, mission=0):
    grid = np.zeros((height, width), dtype=np.int8)
    return GridState(family=family, grid=grid, agent_pos=pos, agent_dir=direction, mission=mission)


def count_cells(state, cell):
    return int(np.sum(state.grid == cell))


class TestTaskSpec:
    def test_rejects_small_grid(self):
        with pytest.raises(ConfigurationError):
            TaskSpec('A', 3, 8, 100).validate()

    def test_rejects_short_horizon(self):
        with pytest.raises(ConfigurationError):
            TaskSpec('A', 8, 8, 63).validate()

    def test_rejects_unknown_family(self):
        with pytest.raises(ConfigurationError):
            standard_spec('F')

    def test_standard_sizes(self):
        spec = standard_spec('D')
        assert (spec.width, spec.height, spec.max_steps) == (10, 6, 240)

    def test_small_variant_halves(self):
        spec = standard_spec('E', variant='small')
        assert (spec.width, spec.height) == (6, 4)
        assert spec.max_steps == 4 * 12 * 6 // 2
        assert spec.max_steps >= spec.width * spec.height


class TestLayouts:
    def test_same_spec_gives_identical_state(self):
        spec = standard_spec('A', seed=1)
        assert make_task(spec).initial_state().same_as(make_task(spec).initial_state())

    def test_different_seeds_differ(self):
        states = {generate_layout(standard_spec('B', seed=s)).grid.tobytes() for s in range(10)}
        assert len(states) > 1

    @pytest.mark.parametrize('seed', range(5))
    def test_family_c_small_inventory(self, seed):
        state = generate_layout(standard_spec('C', seed=seed, variant='small'))
        assert count_cells(state, Cell.KEY) == 1
        assert count_cells(state, Cell.DOOR_LOCKED) == 1
        assert count_cells(state, Cell.GOAL) == 1

    @pytest.mark.parametrize('seed', range(5))
    def test_family_d_blocker_in_front_of_door(self, seed):
        state = generate_layout(standard_spec('D', seed=seed))
        ys, xs = np.nonzero(state.grid == Cell.DOOR_LOCKED)
        assert state.grid[ys[0], xs[0] - 1] == Cell.BLOCKER
        assert count_cells(state, Cell.BOX) == 1
        assert count_cells(state, Cell.BALL) == 1
        assert state.agent_pos[0] < xs[0]

    def test_family_e_hides_key_in_box(self):
        state = generate_layout(standard_spec('E', seed=3))
        assert count_cells(state, Cell.KEY) == 0
        x, y = state.hidden_key
        assert state.grid[y, x] == Cell.BOX

    @pytest.mark.parametrize('family', ['A', 'B', 'C', 'D', 'E'])
    def test_agent_not_on_wall(self, family):
        for seed in range(5):
            state = generate_layout(standard_spec(family, seed=seed))
            x, y = state.agent_pos
            assert state.grid[y, x] == Cell.EMPTY


class TestStep:
    def test_forward_into_wall(self):
        spec = TaskSpec('A', 5, 5, 100)
        state = blank_state(direction=2)
        nxt, reward, done = step(state, Action.FORWARD, spec)
        assert nxt.agent_pos == (0, 0)
        assert nxt.step_count == 1
        assert reward == 0.0 and not done

    def test_step_does_not_mutate_input(self):
        spec = TaskSpec('A', 5, 5, 100)
        state = blank_state()
        step(state, Action.FORWARD, spec)
        assert state.agent_pos == (0, 0) and state.step_count == 0

    def test_success_reward_value(self):
        assert success_reward(10, 100) == pytest.approx(0.91)

    def test_go_to_object_success(self):
        spec = TaskSpec('A', 5, 5, 100)
        state = blank_state(mission=0)
        state.grid[0, 1] = Cell.BALL
        state.step_count = 9
        nxt, reward, done = step(state, Action.DONE, spec)
        assert done and nxt.success
        assert reward == pytest.approx(1 - 0.9 * 10 / 100)

    def test_wrong_done_is_noop(self):
        spec = TaskSpec('A', 5, 5, 100)
        state = blank_state(mission=1)
        state.grid[0, 1] = Cell.BALL
        nxt, reward, done = step(state, Action.DONE, spec)
        assert not done and reward == 0.0

    def test_timeout(self):
        spec = TaskSpec('A', 4, 4, 16)
        state = blank_state(width=4, height=4)
        state.step_count = 15
        nxt, reward, done = step(state, Action.LEFT, spec)
        assert done and reward == 0.0 and not nxt.success

    def test_step_after_done(self):
        spec = TaskSpec('A', 4, 4, 16)
        state = blank_state(width=4, height=4)
        state.done = True
        with pytest.raises(UsageError):
            step(state, Action.LEFT, spec)

    def test_unlock_door_with_key(self):
        spec = TaskSpec('C', 5, 5, 100)
        state = blank_state(family='C', mission=2)
        state.grid[0, 1] = Cell.KEY
        state.grid[:, 2] = Cell.WALL
        state.grid[0, 2] = Cell.DOOR_LOCKED
        state.grid[0, 4] = Cell.GOAL
        for action in (Action.PICKUP, Action.FORWARD, Action.TOGGLE):
            state, _, _ = step(state, action, spec)
        assert state.grid[0, 2] == Cell.DOOR_OPEN
        assert state.flags[Flag.HAS_KEY] == 1 and state.flags[Flag.DOOR_OPEN] == 1
        assert state.carried == Cell.KEY
        for _ in range(3):
            state, reward, done = step(state, Action.FORWARD, spec)
        assert done and state.success and reward > 0

    def test_delivery(self):
        spec = TaskSpec('B', 5, 5, 100)
        state = blank_state(family='B', mission=1)
        state.grid[0, 1] = Cell.BOX
        state.grid[0, 2] = Cell.GOAL
        state, _, _ = step(state, Action.PICKUP, spec)
        state, _, _ = step(state, Action.FORWARD, spec)
        state, reward, done = step(state, Action.FORWARD, spec)
        assert done and state.flags[Flag.DELIVERED] == 1 and reward > 0

    def test_hidden_key_toggle(self):
        spec = TaskSpec('E', 6, 5, 100)
        state = blank_state(family='E', width=6)
        state.grid[0, 1] = Cell.BOX
        state.hidden_key = (1, 0)
        state, _, _ = step(state, Action.TOGGLE, spec)
        assert state.grid[0, 1] == Cell.KEY
        assert state.flags[Flag.BOX_TOGGLED] == 1

    def test_flags_are_sticky(self):
        spec = standard_spec('D', seed=4, variant='small')
        rng = np.random.default_rng(0)
        for episode in range(20):
            state = generate_layout(spec.with_seed(episode))
            previous = state.flags.copy()
            while not state.done:
                state, _, _ = step(state, int(rng.integers(7)), spec)
                assert np.all(state.flags >= previous)
                previous = state.flags.copy()


class TestFeatures:
    def test_origin(self):
        spec = TaskSpec('A', 8, 8, 256)
        feat = features(blank_state(width=8, height=8), 0, spec)
        assert np.array_equal(feat[:5], np.zeros(5))

    def test_direction_and_position_extremes(self):
        spec = TaskSpec('A', 8, 8, 256)
        state = blank_state(width=8, height=8, pos=(7, 0), direction=3)
        feat = features(state, 6, spec)
        assert feat[0] == 1.0 and feat[2] == 1.0 and feat[4] == 1.0

    def test_range_over_random_rollouts(self):
        rng = np.random.default_rng(1)
        count = 0
        for family in 'ABCDE':
            spec = standard_spec(family, variant='small')
            for seed in range(40):
                state = generate_layout(spec.with_seed(seed))
                while not state.done:
                    action = int(rng.integers(7))
                    state, _, _ = step(state, action, spec)
                    feat = features(state, action, spec)
                    assert feat.shape == (FEATURE_DIM,)
                    assert np.all((feat[:5] >= 0) & (feat[:5] <= 1))
                    assert set(np.unique(feat[5:])) <= {0.0, 1.0}
                    count += 1
        assert count > 10_000


class TestObservation:
    def test_dimension_and_one_hot(self):
        state = generate_layout(standard_spec('C', seed=2))
        obs = observe(state)
        assert obs.shape == (OBS_DIM,) == (263,)
        cells = obs[:250].reshape(25, 10)
        assert np.all(cells.sum(axis=1) == 1.0)
        assert obs[250:254].sum() == 1 and obs[254:259].sum() == 1 and obs[259:].sum() == 1

    def test_out_of_bounds_reads_as_wall(self):
        state = blank_state(pos=(0, 0), direction=3)
        cells = observe(state)[:250].reshape(25, 10)
        # Every cell ahead of an agent facing up from row 0 is outside the grid.
        assert np.all(cells[:20, Cell.WALL] == 1.0)


class TestEvaluation:
    def test_success_rate_counts_positive_returns(self):
        episodes = [
            Episode(np.zeros((3, FEATURE_DIM)), 0.91, True),
            Episode(np.zeros((5, FEATURE_DIM)), 0.0, False),
            Episode(np.zeros((2, FEATURE_DIM)), 0.5, True),
        ]
        assert EpisodeSet(episodes, 'A').mean_sr == pytest.approx(2 / 3)

    def test_empty_set_rejected(self):
        with pytest.raises(EmptyEpisodeError):
            EpisodeSet([], 'A')

    def test_deterministic(self):
        spec = standard_spec('A', seed=5, variant='small')
        first = evaluate_policy(random_policy, spec, 4, seed=9)
        second = evaluate_policy(random_policy, spec, 4, seed=9)
        for a, b in zip(first.episodes, second.episodes):
            assert np.array_equal(a.features, b.features)
            assert a.ret == b.ret
        assert first.sr == second.sr

    def test_always_done_policy_fails_on_c(self):
        spec = standard_spec('C', variant='small')
        result = evaluate_policy(lambda obs, rng: np.full(len(obs), 6), spec, 3, seed=0)
        assert result.sr == 0.0 and result.mean_reward == 0.0
        assert all(e.length == spec.max_steps for e in result.episodes)

    def test_jsonl_round_trip(self, tmp_path):
        spec = standard_spec('B', seed=2, variant='small')
        result = evaluate_policy(random_policy, spec, 2, seed=1, tag="B'")
        path = str(tmp_path / 'episodes.jsonl')
        save_episodes(path, result.episodes)
        loaded = load_episodes(path)
        assert loaded.tag == "B'"
        assert np.array_equal(loaded[0].features, result.episodes[0].features)
