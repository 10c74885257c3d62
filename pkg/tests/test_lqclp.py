from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.optimize import minimize, minimize_scalar

from cmdp_core.types import RejectedInputError
from trc_optimizer.lqclp import line_search, recovery_step, solve_lqclp, trust_region_step
from trc_optimizer.types import LineSearchPoint

EXACT = dict(cg_iters=200, cg_tol=1e-28)


def _identity(v):
    return v


def _random_problem(rng, n):
    A = rng.normal(size=(n, n))
    H = A @ A.T / n + np.eye(n)
    return H, rng.normal(size=n), rng.normal(size=n)


def _dual_optimum(H, g, b, c, delta):
    """min_{nu >= 0} sqrt(2 delta Q(nu)) - nu c, con Q(nu) = (g - nu b)^T H^-1 (g - nu b)."""
    Hg, Hb = np.linalg.solve(H, g), np.linalg.solve(H, b)
    q, r, s = g @ Hg, g @ Hb, b @ Hb

    def dual(nu):
        return math.sqrt(2.0 * delta * max(q - 2.0 * nu * r + nu * nu * s, 0.0)) - nu * c

    hi = 10.0 * (abs(r) + math.sqrt(q * s)) / s + 10.0
    res = minimize_scalar(dual, bounds=(0.0, hi), method="bounded", options={"xatol": 1e-12})
    return min(res.fun, dual(0.0))


# -----------------------------
# Ejemplos
# -----------------------------

def test_inactive_constraint_takes_the_trust_region_step():
    sol = solve_lqclp(np.array([1.0, 0.0]), np.array([0.0, 1.0]), _identity, 0.5, 0.0)
    np.testing.assert_allclose(sol.step, [1.0, 0.0])
    assert sol.nu == 0.0 and sol.feasible and not sol.recovery
    assert sol.predicted == pytest.approx(1.0)


def test_empty_feasible_region_triggers_recovery():
    sol = solve_lqclp(np.array([1.0, 0.0]), np.array([0.0, 2.0]), _identity, 0.5, 5.0)
    assert sol.recovery and not sol.feasible
    np.testing.assert_allclose(sol.step, [0.0, -1.0])
    assert math.isnan(sol.nu)


def test_recovery_step_example():
    sol = recovery_step(np.array([0.0, 2.0]), _identity, 0.5)
    np.testing.assert_allclose(sol.step, [0.0, -1.0])
    assert 0.5 * sol.step @ sol.step == pytest.approx(0.5)


def test_recovery_with_zero_constraint_gradient_raises_alarm(caplog):
    sol = solve_lqclp(np.array([1.0, 0.0]), np.zeros(2), _identity, 0.5, 1.0)
    assert sol.recovery and sol.alarm
    np.testing.assert_array_equal(sol.step, 0.0)
    assert "vanished" in caplog.text


def test_zero_objective_gradient_inside_feasible_region():
    sol = solve_lqclp(np.zeros(2), np.array([0.0, 1.0]), _identity, 0.5, -1.0)
    np.testing.assert_array_equal(sol.step, 0.0)
    assert not sol.recovery


def test_trust_region_step_fills_the_ball(rng):
    H, g, _ = _random_problem(rng, 6)
    sol = trust_region_step(g, lambda v: H @ v, 0.01, **EXACT)
    assert 0.5 * sol.step @ H @ sol.step == pytest.approx(0.01, rel=1e-8)
    np.testing.assert_allclose(sol.step, math.sqrt(2 * 0.01 / (g @ np.linalg.solve(H, g))) * np.linalg.solve(H, g))


def test_nonpositive_trust_region_is_rejected():
    with pytest.raises(RejectedInputError):
        solve_lqclp(np.ones(2), np.ones(2), _identity, 0.0, -1.0)
    with pytest.raises(RejectedInputError):
        trust_region_step(np.ones(2), _identity, -1e-3)


def test_both_constraints_active_on_the_boundary():
    g, b = np.array([1.0, 1.0]), np.array([1.0, 0.0])
    sol = solve_lqclp(g, b, _identity, 0.5, 0.0)
    # óptimo: x1 = 0 y |x| = 1
    np.testing.assert_allclose(sol.step, [0.0, 1.0], atol=1e-12)
    assert sol.nu == pytest.approx(1.0)
    assert sol.lam == pytest.approx(1.0)


# -----------------------------
# Contra el dual resuelto numéricamente
# -----------------------------

@pytest.mark.parametrize("n", [2, 3, 5, 10, 25, 50])
def test_matches_dual_optimum(rng, n):
    delta = 0.01
    for _ in range(5):
        H, g, b = _random_problem(rng, n)
        reach = math.sqrt(2.0 * delta * (b @ np.linalg.solve(H, b)))
        c = rng.uniform(-1.5 * reach, 0.9 * reach)
        sol = solve_lqclp(g, b, lambda v: H @ v, delta, c, **EXACT)
        assert not sol.recovery
        x = sol.step
        assert b @ x + c <= 1e-8
        assert 0.5 * x @ H @ x <= delta * (1 + 1e-8)
        best = _dual_optimum(H, g, b, c, delta)
        assert g @ x == pytest.approx(best, rel=1e-4, abs=1e-10)


@pytest.mark.parametrize("n", [2, 4])
def test_matches_slsqp(rng, n):
    delta = 0.05
    H, g, b = _random_problem(rng, n)
    c = 0.2 * math.sqrt(2.0 * delta * (b @ np.linalg.solve(H, b)))
    res = minimize(
        lambda x: -g @ x, np.zeros(n), jac=lambda x: -g, method="SLSQP",
        constraints=[{"type": "ineq", "fun": lambda x: -(b @ x + c), "jac": lambda x: -b},
                     {"type": "ineq", "fun": lambda x: delta - 0.5 * x @ H @ x, "jac": lambda x: -H @ x}],
        options={"ftol": 1e-14, "maxiter": 500},
    )
    sol = solve_lqclp(g, b, lambda v: H @ v, delta, c, **EXACT)
    assert g @ sol.step == pytest.approx(-res.fun, rel=1e-4)


# -----------------------------
# Búsqueda lineal
# -----------------------------

def _evaluator(objective, cvar, kl):
    def evaluate(theta):
        return LineSearchPoint(objective=objective(theta), cvar=cvar(theta), kl=kl(theta))
    return evaluate


def test_line_search_accepts_full_step():
    ev = _evaluator(lambda t: t[0], lambda t: 0.0, lambda t: 0.5 * t @ t)
    step = np.array([0.1, 0.0])
    res = line_search(np.zeros(2), step, ev, initial=ev(np.zeros(2)), delta_eff=0.005, threshold=1.0)
    assert res.accepted and res.step_length == 1.0 and res.backtracks == 0
    np.testing.assert_array_equal(res.theta, step)


def test_line_search_halves_until_kl_fits():
    ev = _evaluator(lambda t: t[0], lambda t: 0.0, lambda t: 0.5 * t @ t)
    step = np.array([1.0, 0.0])
    res = line_search(np.zeros(2), step, ev, initial=ev(np.zeros(2)), delta_eff=0.01, threshold=1.0)
    # 0.5 frac^2 <= 0.011 -> frac = 1/8
    assert res.step_length == 0.125 and res.backtracks == 3
    assert res.point.kl <= 1.1 * 0.01


def test_line_search_rejects_and_keeps_parameters():
    ev = _evaluator(lambda t: -t[0], lambda t: 0.0, lambda t: 0.0)
    theta_old = np.array([0.3, -0.2])
    res = line_search(theta_old, np.array([1.0, 0.0]), ev, initial=ev(theta_old), delta_eff=0.01,
                      threshold=1.0, max_steps=10)
    assert not res.accepted
    assert res.backtracks == 10 and res.step_length == 0.0
    np.testing.assert_array_equal(res.theta, theta_old)


def test_line_search_cost_condition():
    # dentro del umbral: el candidato debe quedarse dentro
    ev = _evaluator(lambda t: t[0], lambda t: t[0], lambda t: 0.0)
    res = line_search(np.zeros(1), np.array([4.0]), ev, initial=ev(np.zeros(1)), delta_eff=1.0, threshold=1.0)
    assert res.step_length == 0.25
    # fuera del umbral: basta con bajar el CVaR
    ev = _evaluator(lambda t: 0.0, lambda t: 5.0 - t[0], lambda t: 0.0)
    res = line_search(np.zeros(1), np.array([1.0]), ev, initial=ev(np.zeros(1)), delta_eff=1.0, threshold=1.0,
                      recovery=True)
    assert res.accepted and res.step_length == 1.0
    # sin umbral no hay condición de coste
    ev = _evaluator(lambda t: t[0], lambda t: 100.0 * t[0], lambda t: 0.0)
    res = line_search(np.zeros(1), np.array([1.0]), ev, initial=ev(np.zeros(1)), delta_eff=1.0, threshold=None)
    assert res.step_length == 1.0


def test_solve_records_line_search():
    ev = _evaluator(lambda t: t[0], lambda t: t[1], lambda t: 0.5 * t @ t)
    sol = solve_lqclp(np.array([1.0, 0.0]), np.array([0.0, 1.0]), _identity, 0.5, -1.0,
                      evaluate=ev, theta_old=np.zeros(2), threshold=1.0)
    assert sol.accepted and sol.step_length == 1.0
    assert sol.actual == pytest.approx(1.0)
    assert sol.kl == pytest.approx(0.5)
    with pytest.raises(RejectedInputError):
        solve_lqclp(np.ones(2), np.ones(2), _identity, 0.5, -1.0, evaluate=ev)
