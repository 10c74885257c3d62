"""
Subproblema LQCLP del paso de política:

    max_x  g^T x   s.a.  b^T x + c <= 0,   1/2 x^T H x <= delta

resuelto por su dual analítico en (lambda, nu) con q = g^T H^-1 g, r = g^T H^-1 b, s = b^T H^-1 b.
Los productos H^-1 v salen del gradiente conjugado sobre el producto hessiano-vector.
"""

from __future__ import annotations

import logging
import math
from typing import Callable

import numpy as np

from cmdp_core.types import RejectedInputError
from constants import CG_ITERS, CG_TOL, KL_TOLERANCE, LINE_SEARCH_STEPS
from diff_engine.linalg import conjugate_gradient
from trc_optimizer.types import LineSearchPoint, LineSearchResult, LqclpSolution

log = logging.getLogger(__name__)

_EPS = 1e-12

Hvp = Callable[[np.ndarray], np.ndarray]


def _trust_region_step(Hg: np.ndarray, q: float, delta: float) -> tuple[np.ndarray, float]:
    lam = math.sqrt(q / (2.0 * delta))
    return Hg / lam, lam


def trust_region_step(g: np.ndarray, hvp: Hvp, delta_eff: float, *, cg_iters: int = CG_ITERS,
                      cg_tol: float = CG_TOL) -> LqclpSolution:
    """Paso sin restricción de coste: sqrt(2 delta / g^T H^-1 g) H^-1 g."""
    if delta_eff <= 0.0:
        raise RejectedInputError(f"effective trust region must be > 0, got {delta_eff}")
    Hg = conjugate_gradient(hvp, g, cg_iters, cg_tol).x
    q = float(g @ Hg)
    if q <= _EPS:
        return LqclpSolution(step=np.zeros_like(g), lam=0.0, nu=0.0, feasible=True)
    x, lam = _trust_region_step(Hg, q, delta_eff)
    return LqclpSolution(step=x, lam=lam, nu=0.0, feasible=True, predicted=float(g @ x))


def recovery_step(b: np.ndarray, hvp: Hvp, delta_eff: float, *, Hb: np.ndarray | None = None,
                  cg_iters: int = CG_ITERS, cg_tol: float = CG_TOL) -> LqclpSolution:
    """
    Solo se reduce la restricción: x = -sqrt(2 delta / b^T H^-1 b) H^-1 b.
    Con b = 0 no hay dirección de descenso: paso nulo y alarma.
    """
    if delta_eff <= 0.0:
        raise RejectedInputError(f"effective trust region must be > 0, got {delta_eff}")
    if Hb is None:
        Hb = conjugate_gradient(hvp, b, cg_iters, cg_tol).x
    s = float(b @ Hb)
    if s <= _EPS:
        log.warning("recovery requested but the constraint gradient vanished; no step taken")
        return LqclpSolution(step=np.zeros_like(b), lam=0.0, nu=0.0, feasible=False, recovery=True, alarm=True)
    x = -math.sqrt(2.0 * delta_eff / s) * Hb
    return LqclpSolution(step=x, lam=0.0, nu=math.nan, feasible=False, recovery=True, predicted=float(b @ x))


def solve_lqclp(g: np.ndarray, b: np.ndarray, hvp: Hvp, delta_eff: float, c_slack: float, *,
                cg_iters: int = CG_ITERS, cg_tol: float = CG_TOL,
                evaluate: Callable[[np.ndarray], LineSearchPoint] | None = None,
                theta_old: np.ndarray | None = None, threshold: float | None = None,
                line_search_steps: int = LINE_SEARCH_STEPS, kl_tolerance: float = KL_TOLERANCE) -> LqclpSolution:
    """
    Dirección del paso por el dual. Casos:
      - región factible vacía (c - sqrt(2 delta s) > 0): paso de recuperación;
      - paso de trust region puro factible: nu = 0;
      - si no, las dos restricciones activas: lambda = sqrt(A / B), nu = (r + lambda c) / s,
        con A = q - r^2/s y B = 2 delta - c^2/s.
    Si se pasa `evaluate` (y theta_old) se hace además la búsqueda lineal.
    """
    if delta_eff <= 0.0:
        raise RejectedInputError(f"effective trust region must be > 0, got {delta_eff}")
    g = np.asarray(g, dtype=float)
    b = np.asarray(b, dtype=float)
    c = float(c_slack)

    Hg = conjugate_gradient(hvp, g, cg_iters, cg_tol).x
    Hb = conjugate_gradient(hvp, b, cg_iters, cg_tol).x
    q, r, s = float(g @ Hg), float(g @ Hb), float(b @ Hb)

    sol = _dual_step(g, b, Hg, Hb, q, r, s, c, delta_eff)
    if sol is None or not np.all(np.isfinite(sol.step)):
        if sol is not None:
            log.warning("dual solve produced a non-finite step; falling back to recovery")
        sol = recovery_step(b, hvp, delta_eff, Hb=Hb)

    if evaluate is not None:
        if theta_old is None:
            raise RejectedInputError("line search needs theta_old")
        initial = evaluate(theta_old)
        res = line_search(theta_old, sol.step, evaluate, initial=initial, delta_eff=delta_eff,
                          threshold=threshold, recovery=sol.recovery, max_steps=line_search_steps,
                          kl_tolerance=kl_tolerance)
        record_line_search(sol, res, initial)
    return sol


def record_line_search(sol: LqclpSolution, res: LineSearchResult, initial: LineSearchPoint) -> LqclpSolution:
    """Copia el resultado de la búsqueda lineal en la solución (mejora real medida incluida)."""
    sol.step_length = res.step_length
    sol.backtracks = res.backtracks
    sol.accepted = res.accepted
    sol.kl = res.point.kl
    sol.actual = (res.point.cvar - initial.cvar) if sol.recovery else (res.point.objective - initial.objective)
    return sol


def _dual_step(g, b, Hg, Hb, q, r, s, c, delta) -> LqclpSolution | None:
    """None -> hay que recuperar."""
    if s <= _EPS:
        if c > 0.0:
            return None
        return _objective_only(g, Hg, q, delta)

    if c > 0.0 and c - math.sqrt(2.0 * delta * s) > 0.0:
        return None

    if q <= _EPS:
        # sin señal del objetivo: nada que hacer si ya se cumple la restricción
        return None if c > 0.0 else LqclpSolution(step=np.zeros_like(g), lam=0.0, nu=0.0, feasible=True)

    x_tr, lam_tr = _trust_region_step(Hg, q, delta)
    if float(b @ x_tr) + c <= 0.0:
        return LqclpSolution(step=x_tr, lam=lam_tr, nu=0.0, feasible=True, predicted=float(g @ x_tr))

    A = max(q - r * r / s, 0.0)
    B = 2.0 * delta - c * c / s
    if B <= _EPS:
        # la región factible se reduce a un punto en la frontera de la bola
        return None

    lam = math.sqrt(A / B)
    if lam <= _EPS:
        x = -(c / s) * Hb
        nu = math.nan
    else:
        # x = H^-1 (g - nu b) / lambda reescrito con la parte H-ortogonal a H^-1 b
        x = (Hg - (r / s) * Hb) / lam - (c / s) * Hb
        nu = max(0.0, (r + lam * c) / s)
    return LqclpSolution(step=x, lam=lam, nu=nu, feasible=True, predicted=float(g @ x))


def _objective_only(g, Hg, q, delta) -> LqclpSolution:
    if q <= _EPS:
        return LqclpSolution(step=np.zeros_like(g), lam=0.0, nu=0.0, feasible=True)
    x, lam = _trust_region_step(Hg, q, delta)
    return LqclpSolution(step=x, lam=lam, nu=0.0, feasible=True, predicted=float(g @ x))


def line_search(theta_old: np.ndarray, step: np.ndarray, evaluate: Callable[[np.ndarray], LineSearchPoint], *,
                initial: LineSearchPoint, delta_eff: float, threshold: float | None, recovery: bool = False,
                max_steps: int = LINE_SEARCH_STEPS, kl_tolerance: float = KL_TOLERANCE) -> LineSearchResult:
    """
    Búsqueda hacia atrás (1, 1/2, 1/4, ...). Se acepta el primer theta con
      - KL medida <= kl_tolerance * delta_eff,
      - objetivo >= inicial (salvo en recuperación),
      - CVaR aproximado <= threshold, o menor que el inicial si se partía de fuera.
    threshold=None quita la condición de coste. Si nada se acepta, theta_old sin cambios.
    """
    start_feasible = threshold is None or initial.cvar <= threshold
    frac = 1.0
    for k in range(max_steps):
        theta = theta_old + frac * step
        pt = evaluate(theta)
        ok_kl = pt.kl <= kl_tolerance * delta_eff
        ok_obj = recovery or pt.objective >= initial.objective
        if threshold is None:
            ok_cost = True
        elif start_feasible:
            ok_cost = pt.cvar <= threshold
        else:
            ok_cost = pt.cvar < initial.cvar
        if ok_kl and ok_obj and ok_cost:
            return LineSearchResult(theta=theta, step_length=frac, backtracks=k, accepted=True, point=pt)
        frac *= 0.5

    log.info("line search rejected all %d candidate steps", max_steps)
    return LineSearchResult(theta=theta_old.copy(), step_length=0.0, backtracks=max_steps, accepted=False,
                            point=initial)
