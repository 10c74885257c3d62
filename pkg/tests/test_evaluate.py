from __future__ import annotations

import numpy as np
import pytest

from cmdp_core.envs import make_env
from diff_engine.policies import GaussianPolicy
from harness.evaluate import evaluate_policy
from harness.format import format_eval_report
from helpers import tabular_softmax
from tabular_oracle.exact import exact_J


def _within(values, target: float, n_se: float = 4.0) -> bool:
    a = np.asarray(values, dtype=float)
    se = a.std(ddof=1) / np.sqrt(a.size)
    return abs(a.mean() - target) <= n_se * se + 1e-3


def test_stochastic_tabular_evaluation_matches_oracle(rng):
    # 0.9^100 deja el sesgo por truncamiento muy por debajo del error estándar
    env = make_env("tabular:4", max_episode_steps=100)
    nS, nA = env.cmdp.nS, env.cmdp.nA
    policy = tabular_softmax(nS, nA, rng)
    exact = exact_J(env.cmdp, policy.tabular(nS))

    rep = evaluate_policy(policy, env, 400, seed=7, stochastic=True, gamma=env.cmdp.gamma)
    assert len(rep.discounted_returns) == len(rep.discounted_costs) == 400
    assert _within(rep.discounted_returns, exact["J"])
    assert _within(rep.discounted_costs, exact["J_C"])
    assert rep.discounted_cost[0] == pytest.approx(np.mean(rep.discounted_costs))


def test_mean_action_evaluation_is_seeded(rng):
    env = make_env("tabular:4", max_episode_steps=30)
    policy = tabular_softmax(env.cmdp.nS, env.cmdp.nA, rng)
    a = evaluate_policy(policy, env, 3, seed=2)
    b = evaluate_policy(policy, env, 3, seed=2)
    assert a.discounted_returns == b.discounted_returns
    assert a.discounted_costs == b.discounted_costs
    with pytest.raises(ValueError):
        evaluate_policy(policy, env, 0)


@pytest.mark.parametrize("stochastic", [False, True])
def test_pointnav_evaluation_of_untrained_policy(rng, stochastic):
    env = make_env("pointnav", max_episode_steps=30)
    policy = GaussianPolicy.init(18, 2, (8,), rng)
    policy.set_flat(np.zeros(policy.n_params))

    rep = evaluate_policy(policy, env, 2, seed=1, stochastic=stochastic)
    assert len(rep.episodes) == 2
    assert all(e.length == 30 for e in rep.episodes)
    for mean, std in (rep.reward, rep.cv, rep.cv_normalized, rep.score, rep.discounted_return, rep.discounted_cost):
        assert np.isfinite(mean) and np.isfinite(std)
    assert 0.0 <= rep.cv_normalized[0] <= 1.0
    assert "coste descontado" in format_eval_report(rep)
