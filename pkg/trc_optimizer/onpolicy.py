from __future__ import annotations

import logging
from typing import Protocol, Sequence

import numpy as np

from cmdp_core.types import RejectedInputError, Trajectory
from trc_optimizer.types import OnPolicyJ

log = logging.getLogger(__name__)


class ValueFunctions(Protocol):
    def value(self, states) -> np.ndarray: ...
    def cost_value(self, states) -> np.ndarray: ...
    def square_value(self, states) -> np.ndarray: ...


def estimate_onpolicy_J(rollout: Sequence[Trajectory], critics: ValueFunctions, gamma: float) -> OnPolicyJ:
    """
    J_C y J_S del rollout de la política actual, usando la forma con distribuciones de estados:
      J_C = 1/(1-gamma)   * media ponderada con gamma^t     de c_t
      J_S = 1/(1-gamma^2) * media ponderada con gamma^(2t)  de c_t^2 + 2 gamma c_t V_C(s_{t+1})
    t es el índice del paso dentro del episodio; V_C(s') = 0 tras un estado terminal.
    """
    segments = [tr for tr in rollout if len(tr)]
    if not segments:
        raise RejectedInputError("estimate_onpolicy_J needs a non-empty rollout")

    costs = np.concatenate([tr.costs() for tr in segments])
    steps = np.concatenate([tr.steps() for tr in segments])
    terminal = np.concatenate([tr.terminals() for tr in segments])
    next_states = np.concatenate([tr.next_states() for tr in segments])

    w1 = gamma ** steps.astype(float)
    w2 = w1 * w1
    v_next = np.where(terminal, 0.0, critics.cost_value(next_states))

    J_C = float(np.sum(w1 * costs) / np.sum(w1)) / (1.0 - gamma)
    sq = costs * costs + 2.0 * gamma * costs * v_next
    J_S = float(np.sum(w2 * sq) / np.sum(w2)) / (1.0 - gamma * gamma)
    log.debug("on-policy J_C=%.6g J_S=%.6g over %d steps", J_C, J_S, costs.size)
    return OnPolicyJ(J_C=J_C, J_S=J_S)
