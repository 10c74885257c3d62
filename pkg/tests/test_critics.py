from __future__ import annotations

import numpy as np
import pytest

from cmdp_core.envs import EnvRunner, TabularEnv
from diff_engine.autodiff import numerical_grad, relative_error
from diff_engine.critics import CRITIC_NAMES, CriticSet
from diff_engine.optim import Adam
from helpers import tabular_softmax
from tabular_oracle.exact import exact_quantities
from tabular_oracle.types import TabularCMDP
from trc_optimizer.critics_update import update_critics
from trc_optimizer.retrace import retrace_targets
from trc_optimizer.types import NumericalAbort, RetraceTargets


def _targets(states) -> RetraceTargets:
    s = np.atleast_2d(states)
    v, vc, vs = np.sin(s[:, 0]) + s[:, 1], 2.0 + 0.3 * s[:, 2], 5.0 + s[:, 0] ** 2
    z = np.zeros(s.shape[0])
    return RetraceTargets(V=v, V_C=vc, V_S=vs, rho=np.ones(s.shape[0]), trace_decay=0.9, V_pred=z, V_C_pred=z, S_C_pred=z)


def _optimizers(critics: CriticSet, lr: float) -> dict[str, Adam]:
    return {name: Adam(net.n_params, lr=lr) for name, net in critics.nets.items()}


@pytest.mark.parametrize("name", CRITIC_NAMES)
def test_mse_gradient_matches_finite_differences(rng, name):
    critics = CriticSet.init(3, (6,), rng)
    states = rng.normal(size=(10, 3))
    targets = rng.uniform(0.0, 2.0, size=10)
    theta0 = critics.nets[name].get_flat()
    for _ in range(10):
        theta = theta0 + 0.2 * rng.normal(size=theta0.size)
        _, g = critics.mse_and_grad(name, states, targets, theta)
        num = numerical_grad(lambda t: critics.mse_and_grad(name, states, targets, t)[0], theta)
        assert relative_error(g, num) <= 1e-4


def test_square_critic_is_nonnegative(rng):
    critics = CriticSet.init(3, (4,), rng)
    theta = critics.nets["S_C"].get_flat()
    critics.nets["S_C"].set_flat(theta - 50.0)
    assert np.all(critics.square_value(rng.normal(size=(20, 3))) >= 0.0)


def test_zero_gradient_when_targets_equal_outputs(rng):
    critics = CriticSet.init(3, (4,), rng)
    states = rng.normal(size=(7, 3))
    for name in CRITIC_NAMES:
        loss, g = critics.mse_and_grad(name, states, critics.predict(name, states))
        assert loss == 0.0
        np.testing.assert_array_equal(g, 0.0)


def test_update_critics_reduces_losses(rng):
    critics = CriticSet.init(3, (16,), rng)
    states = rng.normal(size=(64, 3))
    report = update_critics(states, _targets(states), critics, _optimizers(critics, 1e-2), rounds=200)
    for name in CRITIC_NAMES:
        assert len(report.losses[name]) == 200
        assert report.final(name) < 0.5 * report.losses[name][0]


def test_non_finite_targets_abort(rng):
    critics = CriticSet.init(3, (4,), rng)
    states = rng.normal(size=(5, 3))
    targets = _targets(states)
    bad = RetraceTargets(V=np.full(5, np.nan), V_C=targets.V_C, V_S=targets.V_S, rho=targets.rho,
                         trace_decay=0.9, V_pred=targets.V_pred, V_C_pred=targets.V_C_pred,
                         S_C_pred=targets.S_C_pred)
    with pytest.raises(NumericalAbort):
        update_critics(states, bad, critics, _optimizers(critics, 1e-3), rounds=1)


def test_tabular_critics_converge_to_exact_values(rng):
    """Ciclo determinista: los targets retrace en el punto fijo son exactamente V, V_C y S_C."""
    nS, nA = 4, 2
    P = np.zeros((nS, nA, nS))
    for s in range(nS):
        P[s, :, (s + 1) % nS] = 1.0
    r = np.array([1.0, 0.0, 0.5, 0.2])
    c = np.array([0.0, 0.5, 0.1, 0.3])
    m = TabularCMDP(P=P, R=np.broadcast_to(r[:, None, None], P.shape).copy(),
                    C=np.broadcast_to(c[:, None, None], P.shape).copy(), rho=np.full(nS, 0.25), gamma=0.8)
    policy = tabular_softmax(nS, nA, rng)
    res = EnvRunner(TabularEnv(m, max_episode_steps=50), seed=0).collect(policy, 1000, rng)
    states = np.concatenate([t.states() for t in res.trajectories])

    critics = CriticSet.init(nS, (), rng)
    for lr, outer, rounds in ((0.05, 20, 150), (0.002, 5, 200)):
        opts = _optimizers(critics, lr)
        for _ in range(outer):
            tg = retrace_targets(res.trajectories, critics, policy, 0.9, m.gamma)
            update_critics(states, tg, critics, opts, rounds=rounds)

    q = exact_quantities(m, policy.tabular(nS))
    eye = np.eye(nS)
    np.testing.assert_allclose(critics.value(eye), q.V, atol=1e-2)
    np.testing.assert_allclose(critics.cost_value(eye), q.V_C, atol=1e-2)
    np.testing.assert_allclose(critics.square_value(eye), q.S_C, atol=1e-2)
