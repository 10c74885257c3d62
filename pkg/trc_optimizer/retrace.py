from __future__ import annotations

from typing import Sequence

import numpy as np

from cmdp_core.types import RejectedInputError, Trajectory
from trc_optimizer.onpolicy import ValueFunctions
from trc_optimizer.types import Advantages, RetraceTargets


def _segment_targets(traj: Trajectory, critics: ValueFunctions, log_pi: np.ndarray,
                     lam: float, gamma: float) -> tuple[np.ndarray, ...]:
    mu = traj.behavior_probs()
    if not (np.all(np.isfinite(mu)) and np.all(mu > 0.0)):
        raise RejectedInputError("retrace needs positive behavior probabilities on every step")

    states = traj.states()
    next_states = traj.next_states()
    r = traj.rewards()
    c = traj.costs()
    done = traj.terminals()
    rho = np.minimum(1.0, np.exp(log_pi - np.log(mu)))

    v, v_c, s_c = critics.value(states), critics.cost_value(states), critics.square_value(states)
    live = ~done
    v_next = np.where(live, critics.value(next_states), 0.0)
    vc_next = np.where(live, critics.cost_value(next_states), 0.0)
    sc_next = np.where(live, critics.square_value(next_states), 0.0)

    n = len(traj)
    tv = np.zeros(n)
    tc = np.zeros(n)
    ts = np.zeros(n)
    g2 = gamma * gamma

    # recursión hacia atrás; el último paso solo hace bootstrap con los críticos
    for t in range(n - 1, -1, -1):
        tv[t] = r[t] + gamma * v_next[t]
        tc[t] = c[t] + gamma * vc_next[t]
        ts[t] = c[t] * c[t] + 2.0 * gamma * c[t] * vc_next[t] + g2 * sc_next[t]
        if t + 1 < n and live[t]:
            trace = lam * rho[t + 1]
            tv[t] += gamma * trace * (tv[t + 1] - v_next[t])
            tc[t] += gamma * trace * (tc[t + 1] - vc_next[t])
            ts[t] += g2 * trace * (ts[t + 1] - sc_next[t])

    return tv, tc, ts, rho, v, v_c, s_c


def retrace_targets(trajectories: Sequence[Trajectory], critics: ValueFunctions, policy, lam: float,
                    gamma: float, theta: np.ndarray | None = None) -> RetraceTargets:
    """
    Targets retrace para V, V_C y S_C con ratios truncados min(1, pi/mu):
      V_t   = r_t + g V(s') + g lam rho_{t+1} (V_{t+1} - V(s'))
      V_S,t = c_t^2 + 2 g c_t V_C(s') + g^2 S_C(s') + g^2 lam rho_{t+1} (V_S,{t+1} - S_C(s'))
    `policy` se evalúa en theta (por defecto sus parámetros actuales).
    """
    if not 0.0 <= lam <= 1.0:
        raise RejectedInputError(f"trace decay must be in [0, 1], got {lam}")
    parts = []
    for traj in trajectories:
        if len(traj) == 0:
            continue
        log_pi = policy.log_prob(traj.states(), traj.actions(), theta)
        parts.append(_segment_targets(traj, critics, log_pi, lam, gamma))
    if not parts:
        raise RejectedInputError("retrace_targets needs at least one non-empty trajectory")

    tv, tc, ts, rho, v, v_c, s_c = (np.concatenate(col) for col in zip(*parts))
    if not (np.all(np.isfinite(tv)) and np.all(np.isfinite(tc)) and np.all(np.isfinite(ts))):
        raise RejectedInputError("non-finite retrace targets")
    return RetraceTargets(V=tv, V_C=tc, V_S=ts, rho=rho, trace_decay=lam, V_pred=v, V_C_pred=v_c, S_C_pred=s_c)


def advantages(targets: RetraceTargets) -> Advantages:
    """Â = target retrace - predicción del crítico en s_t, para las tres señales."""
    return Advantages(
        A=targets.V - targets.V_pred,
        A_C=targets.V_C - targets.V_C_pred,
        A_S=targets.V_S - targets.S_C_pred,
    )
