from __future__ import annotations

import numpy as np
import pytest

from cmdp_core.envs import EnvRunner, TabularEnv
from cmdp_core.types import RejectedInputError, Transition
from helpers import ExactCritics, make_trajectory, tabular_softmax
from tabular_oracle.instances import random_cmdp
from trc_optimizer.retrace import advantages, retrace_targets


class LinearCritics:
    """V(s) = 0.1 s, V_C(s) = 0.2 s, S_C(s) = 0.3 s sobre el estado escalar [t]."""

    def value(self, states):
        return 0.1 * np.atleast_2d(states)[:, 0]

    def cost_value(self, states):
        return 0.2 * np.atleast_2d(states)[:, 0]

    def square_value(self, states):
        return 0.3 * np.atleast_2d(states)[:, 0]


class FixedPolicy:
    def __init__(self, probs):
        self.probs = np.asarray(probs, dtype=float)

    def log_prob(self, states, actions, theta=None):
        return np.log(self.probs[: len(np.atleast_2d(states))])


R = [1.0, 0.5, 2.0, 0.0]
C = [0.0, 1.0, 0.5, 0.25]
GAMMA = 0.9


def test_zero_trace_gives_one_step_targets():
    traj = make_trajectory(R, C, truncated=True)
    tg = retrace_targets([traj], LinearCritics(), FixedPolicy([1.0] * 4), 0.0, GAMMA)
    nxt = np.arange(1, 5, dtype=float)
    np.testing.assert_allclose(tg.V, np.array(R) + GAMMA * 0.1 * nxt)
    np.testing.assert_allclose(tg.V_C, np.array(C) + GAMMA * 0.2 * nxt)
    c = np.array(C)
    np.testing.assert_allclose(tg.V_S, c ** 2 + 2 * GAMMA * c * 0.2 * nxt + GAMMA ** 2 * 0.3 * nxt)


def test_full_trace_on_policy_gives_discounted_return_with_bootstrap():
    traj = make_trajectory(R, C, truncated=True)
    tg = retrace_targets([traj], LinearCritics(), FixedPolicy([1.0] * 4), 1.0, GAMMA)
    boot = 0.1 * 4.0
    expected = [sum(GAMMA ** (k - t) * R[k] for k in range(t, 4)) + GAMMA ** (4 - t) * boot for t in range(4)]
    np.testing.assert_allclose(tg.V, expected)


def test_terminal_step_has_no_bootstrap():
    traj = make_trajectory(R, C, terminal_last=True)
    tg = retrace_targets([traj], LinearCritics(), FixedPolicy([1.0] * 4), 1.0, GAMMA)
    assert tg.V[-1] == R[-1]
    assert tg.V_C[-1] == C[-1]
    assert tg.V_S[-1] == C[-1] ** 2
    assert tg.V[0] == pytest.approx(sum(GAMMA ** k * R[k] for k in range(4)))


def test_ratios_are_truncated_at_one():
    traj = make_trajectory(R, C, probs=[0.5, 0.5, 0.5, 0.5])
    tg = retrace_targets([traj], LinearCritics(), FixedPolicy([1.0, 0.25, 0.5, 0.9]), 0.9, GAMMA)
    np.testing.assert_allclose(tg.rho, [1.0, 0.5, 1.0, 1.0])


def test_trace_uses_next_step_ratio():
    # rho_1 = 0 corta la traza: V_0 queda en el target de un paso
    traj = make_trajectory(R, C, probs=[0.5] * 4, truncated=True)
    tg = retrace_targets([traj], LinearCritics(), FixedPolicy([0.5, 1e-300, 0.5, 0.5]), 1.0, GAMMA)
    assert tg.V[0] == pytest.approx(R[0] + GAMMA * 0.1)
    assert tg.V[1] != pytest.approx(R[1] + GAMMA * 0.2)


def test_advantages_subtract_predictions():
    traj = make_trajectory(R, C, truncated=True)
    tg = retrace_targets([traj], LinearCritics(), FixedPolicy([1.0] * 4), 0.5, GAMMA)
    adv = advantages(tg)
    np.testing.assert_allclose(adv.A, tg.V - 0.1 * np.arange(4))
    np.testing.assert_allclose(adv.A_S, tg.V_S - 0.3 * np.arange(4))


def test_invalid_inputs_are_rejected():
    traj = make_trajectory(R, C)
    for lam in (-0.1, 1.5):
        with pytest.raises(RejectedInputError):
            retrace_targets([traj], LinearCritics(), FixedPolicy([1.0] * 4), lam, GAMMA)
    with pytest.raises(RejectedInputError):
        retrace_targets([], LinearCritics(), FixedPolicy([1.0]), 0.5, GAMMA)
    with pytest.raises(RejectedInputError):
        Transition(state=np.zeros(1), action=0, behavior_prob=float("nan"), reward=0.0, cost=0.0,
                   next_state=np.zeros(1), terminal=False, step=0)


def test_on_policy_targets_are_unbiased_with_exact_critics(rng):
    m = random_cmdp(rng, gammas=(0.8,), n_states=4, n_actions=3)
    policy = tabular_softmax(4, 3, rng)
    env = TabularEnv(m, max_episode_steps=100)
    res = EnvRunner(env, seed=3).collect(policy, 40_000, rng)
    critics = ExactCritics(m, policy.tabular(4))

    # medias por estado en bloques de episodios independientes
    blocks = np.array_split(np.arange(len(res.trajectories)), 20)
    per_block = []
    for b in blocks:
        trajs = [res.trajectories[i] for i in b]
        tg = retrace_targets(trajs, critics, policy, 0.5, m.gamma)
        s = np.concatenate([np.argmax(t.states(), axis=1) for t in trajs])
        per_block.append([[tg.V[s == k].mean(), tg.V_C[s == k].mean(), tg.V_S[s == k].mean()]
                          for k in range(4)])
    per_block = np.array(per_block)  # [bloque, estado, señal]
    mean = per_block.mean(axis=0)
    se = per_block.std(axis=0, ddof=1) / np.sqrt(len(blocks))
    exact = np.stack([critics.q.V, critics.q.V_C, critics.q.S_C], axis=1)
    assert np.all(np.abs(mean - exact) <= 4.5 * se + 1e-6)
