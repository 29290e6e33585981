import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aifpong.aif1 import Aif1Agent
from aifpong.env import Action, Feedback, Observation
from aifpong.harness import preset, run_trial
from aifpong.model import GenerativeModel
from aifpong.prob import entropy, softmax


def random_model(rng, dims=(38, 8, 8)):
    m = GenerativeModel(dims=dims)
    for c in m.b_counts:
        c[:] = rng.gamma(0.5, size=c.shape) + 1e-3
    for c in m.c_counts:
        c[:] = rng.gamma(0.5, size=c.shape) + 1e-3
    return m


def test_fresh_model_zero_efe_and_uniform_policy():
    agent = Aif1Agent()
    obs = Observation(20, 3, 4)
    np.testing.assert_allclose(agent.efe(obs), 0.0, atol=1e-12)
    np.testing.assert_allclose(agent.action_distribution(obs), 1 / 3, atol=1e-12)


def test_one_hot_preference_at_predicted_successor():
    m = GenerativeModel(b_init=1e-16, c_init=1e-16)
    obs = (5, 2, 3)
    m.update_b(obs, Action.UP, (4, 3, 4))
    m.update_b(obs, Action.DOWN, (4, 1, 2))
    m.update_b(obs, Action.STAY, (4, 3, 3))
    m.update_c((4, 3, 4), Feedback.HIT)
    G = Aif1Agent(m).efe(obs)
    assert G[Action.UP] == pytest.approx(0.0, abs=1e-12)
    assert np.all(G[1:] > 1.0)


def test_two_state_toy_matches_hand_computation():
    # only the first factor carries information; the others have a single state
    m = GenerativeModel(dims=(2, 1, 1), n_actions=2)
    m.b_counts[0][0] = [[3.0, 1.0], [1.0, 1.0]]  # from state 0: [0.75, 0.25]
    m.b_counts[0][1] = [[1.0, 1.0], [1.0, 1.0]]  # from state 0: uniform
    m.c_counts[0][:] = [1.0, 3.0]
    G = Aif1Agent(m).efe((0, 0, 0))
    g0 = 0.75 * np.log(0.75 / 0.25) + 0.25 * np.log(0.25 / 0.75)
    g1 = 0.5 * np.log(0.5 / 0.25) + 0.5 * np.log(0.5 / 0.75)
    assert g0 == pytest.approx(0.5 * np.log(3))
    np.testing.assert_allclose(G, [g0, g1], atol=1e-12)


def test_infinite_precision_argmin_with_ties():
    rng = np.random.default_rng(0)
    m = GenerativeModel(b_init=1e-16, c_init=1e-16)
    obs = (10, 4, 4)
    m.update_b(obs, Action.UP, (9, 5, 5))
    m.update_b(obs, Action.DOWN, (9, 5, 5))
    m.update_c((9, 5, 5), Feedback.HIT)
    agent = Aif1Agent(m, precision=np.inf)
    G = agent.efe(obs)
    assert G[0] == G[1] < G[2]
    assert all(agent.act(obs, rng) is Action.UP for _ in range(20))


def test_learn_before_act_raises():
    with pytest.raises(RuntimeError):
        Aif1Agent().learn(Observation(1, 1, 1), Feedback.NONE)


def test_invalid_precision():
    with pytest.raises(ValueError):
        Aif1Agent(precision=0)


def test_two_steps_update_two_columns_per_modality():
    rng = np.random.default_rng(2)
    agent = Aif1Agent()
    before = [c.copy() for c in agent.model.b_counts]
    path = [Observation(20, 3, 3), Observation(19, 4, 4), Observation(18, 5, 4)]
    for a, b in zip(path, path[1:]):
        agent.act(a, rng)
        agent.learn(b, Feedback.NONE)
    for c0, c1 in zip(before, agent.model.b_counts):
        changed = np.argwhere(c1 != c0)
        assert len(changed) == 2 and (c1 - c0).sum() == 2.0
    for c in agent.model.c_counts:
        np.testing.assert_array_equal(c, 1.0)


def test_action_sampling_frequencies():
    rng = np.random.default_rng(11)
    agent = Aif1Agent(random_model(rng))
    obs = Observation(12, 5, 2)
    q = agent.action_distribution(obs)
    n = 10_000
    counts = np.bincount([agent.act(obs, rng) for _ in range(n)], minlength=3)
    assert np.all(np.abs(counts - n * q) <= 3 * np.sqrt(n * q * (1 - q)) + 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-50, 50))
def test_efe_nonnegative_and_shift_invariant(seed, shift):
    rng = np.random.default_rng(seed)
    agent = Aif1Agent(random_model(rng, dims=(6, 4, 3)))
    obs = tuple(int(rng.integers(d)) for d in (6, 4, 3))
    G = agent.efe(obs)
    assert np.all(G >= -1e-12)
    np.testing.assert_allclose(softmax(-(G + shift)), softmax(-G), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_uniform_preference_gives_entropy_gap(seed):
    rng = np.random.default_rng(seed)
    dims = (6, 4, 3)
    m = random_model(rng, dims)
    for c in m.c_counts:
        c[:] = 1.0
    agent = Aif1Agent(m)
    obs = tuple(int(rng.integers(d)) for d in dims)
    for u in range(3):
        gap = sum(np.log(d) - entropy(m.predict_factor(k, u, obs[k])) for k, d in enumerate(dims))
        assert agent.efe_one_step(obs, u) == pytest.approx(gap, abs=1e-10)


def test_transition_entropy_falls_over_a_trial():
    result = run_trial(preset("AIF-1", trials=1, episodes_per_trial=70), seed=0)
    _, te = result.trace("TE_B")
    assert te[-1] < te[0]
