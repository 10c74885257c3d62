from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from cmdp_core.buffer import BatchSample
from cmdp_core.types import Trajectory
from diff_engine.critics import CriticSet
from diff_engine.mlp import NonFiniteError
from trc_optimizer.config import UpdateSettings
from trc_optimizer.lqclp import line_search, record_line_search, solve_lqclp, trust_region_step
from trc_optimizer.onpolicy import estimate_onpolicy_J
from trc_optimizer.retrace import advantages, retrace_targets
from trc_optimizer.surrogates import approx_cvar, cvar_grad, surrogate_values
from trc_optimizer.trust_region import kl_hvp, trust_region_state
from trc_optimizer.types import (LineSearchPoint, LqclpSolution, NumericalAbort, PolicyBatch, RetraceTargets,
                                 UpdateDiagnostics)

log = logging.getLogger(__name__)

_MIN_BUDGET = 1e-12


@dataclass(frozen=True)
class PolicyUpdateResult:
    theta: np.ndarray
    diagnostics: UpdateDiagnostics
    targets: RetraceTargets  # calculados con pi_old
    solution: LqclpSolution | None


def as_on_policy(trajectories: Sequence[Trajectory], policy, theta: np.ndarray) -> list[Trajectory]:
    """Sustituye las probabilidades guardadas por las de pi_theta (ratios pi/pi)."""
    out = []
    for traj in trajectories:
        if len(traj) == 0:
            continue
        probs = np.exp(policy.log_prob(traj.states(), traj.actions(), theta))
        probs = np.maximum(probs, np.finfo(float).tiny)
        out.append(Trajectory([replace(t, behavior_prob=float(p)) for t, p in zip(traj, probs)],
                              truncated=traj.truncated))
    return out


def policy_update(policy, critics: CriticSet, batch: BatchSample, rollout: Sequence[Trajectory],
                  settings: UpdateSettings) -> PolicyUpdateResult:
    """
    Un paso de política: J_C, J_S del rollout -> retrace con pi_old -> ventajas -> g, b, c_slack
    -> delta_old -> LQCLP (o recuperación) -> búsqueda lineal -> escritura de theta.
    """
    gamma = settings.gamma
    cfg = settings.cvar
    theta_old = policy.get_flat()

    J = estimate_onpolicy_J(rollout, critics, gamma)

    segments = list(batch.trajectories)
    if settings.mode == "onpolicy_surrogate":
        segments = as_on_policy(segments, policy, theta_old)
    segments = [tr for tr in segments if len(tr)]

    targets = retrace_targets(segments, critics, policy, settings.trace_decay, gamma, theta_old)
    states = np.concatenate([tr.states() for tr in segments])
    actions = np.concatenate([tr.actions() for tr in segments])
    mu = np.concatenate([tr.behavior_probs() for tr in segments])
    pb = PolicyBatch.uniform(states, actions, mu, advantages(targets))

    try:
        est = cvar_grad(policy, pb, theta_old, J.J_C, J.J_S, cfg)
        tr = trust_region_state(policy, states, actions, mu, settings.delta, theta_old)
    except NonFiniteError as e:
        raise NumericalAbort(str(e)) from e

    delta_eff = tr.effective
    old_stats = policy.stats(states, theta_old)

    def evaluate(theta: np.ndarray) -> LineSearchPoint:
        obj, jc, js = surrogate_values(policy, pb, theta, est.ratios, J.J_C, J.J_S, gamma)
        return LineSearchPoint(objective=obj, cvar=approx_cvar(jc, js, cfg), kl=policy.kl(states, old_stats, theta))

    sol: LqclpSolution | None = None
    theta_new = theta_old

    if delta_eff <= _MIN_BUDGET:
        log.info("trust region exhausted (delta_old=%.3g); policy kept", tr.delta_old)
    else:
        hvp = kl_hvp(policy, states, theta_old, settings.damping)
        try:
            if settings.mode == "unconstrained":
                sol = trust_region_step(est.g, hvp, delta_eff, cg_iters=settings.cg_iters, cg_tol=settings.cg_tol)
                initial = evaluate(theta_old)
                res = line_search(theta_old, sol.step, evaluate, initial=initial, delta_eff=delta_eff,
                                  threshold=None, max_steps=settings.line_search_steps,
                                  kl_tolerance=settings.kl_tolerance)
                record_line_search(sol, res, initial)
            else:
                sol = solve_lqclp(est.g, est.b, hvp, delta_eff, est.c_slack,
                                  cg_iters=settings.cg_iters, cg_tol=settings.cg_tol,
                                  evaluate=evaluate, theta_old=theta_old, threshold=cfg.threshold,
                                  line_search_steps=settings.line_search_steps,
                                  kl_tolerance=settings.kl_tolerance)
        except NonFiniteError as e:
            raise NumericalAbort(str(e)) from e
        if sol.accepted:
            theta_new = theta_old + sol.step_length * sol.step

    accepted = bool(sol and sol.accepted)

    if not np.all(np.isfinite(theta_new)):
        raise NumericalAbort("non-finite policy parameters after update")
    policy.set_flat(theta_new)

    diag = UpdateDiagnostics(
        J_C=J.J_C, J_S=J.J_S, approx_cvar=est.approx_cvar, c_slack=est.c_slack,
        m_hat=tr.m_hat, delta_old=tr.delta_old, delta_eff=delta_eff,
        kl=sol.kl if accepted else 0.0,
        lam=sol.lam if sol else 0.0, nu=sol.nu if sol else 0.0,
        recovery=bool(sol and sol.recovery), accepted=accepted, backtracks=sol.backtracks if sol else 0,
        sigma_floored=est.sigma_floored, objective=(sol.actual if accepted and not sol.recovery else 0.0),
    )
    log.debug("policy update: c_slack=%.4g delta_old=%.3g kl=%.3g recovery=%s accepted=%s",
              diag.c_slack, diag.delta_old, diag.kl, diag.recovery, diag.accepted)
    return PolicyUpdateResult(theta=theta_new, diagnostics=diag, targets=targets, solution=sol)
