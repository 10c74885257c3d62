from __future__ import annotations

import logging

import numpy as np

from constants import CRITIC_ROUNDS
from diff_engine.critics import CRITIC_NAMES, CriticSet
from diff_engine.mlp import NonFiniteError
from diff_engine.optim import Adam
from trc_optimizer.types import CriticUpdateReport, NumericalAbort, RetraceTargets

log = logging.getLogger(__name__)


def target_for(name: str, targets: RetraceTargets) -> np.ndarray:
    return {"V": targets.V, "V_C": targets.V_C, "S_C": targets.V_S}[name]


def update_critics(states: np.ndarray, targets: RetraceTargets, critics: CriticSet, optimizers: dict[str, Adam],
                   rounds: int = CRITIC_ROUNDS) -> CriticUpdateReport:
    """
    `rounds` pasos de Adam por red sobre el MSE a targets fijos (calculados antes con
    los críticos congelados).
    """
    report = CriticUpdateReport(losses={name: [] for name in CRITIC_NAMES})
    for _ in range(rounds):
        for name in CRITIC_NAMES:
            net = critics.nets[name]
            try:
                loss, grad = critics.mse_and_grad(name, states, target_for(name, targets))
            except NonFiniteError as e:
                raise NumericalAbort(f"critic {name}: {e}") from e
            theta = optimizers[name].step(net.get_flat(), grad)
            if not np.all(np.isfinite(theta)):
                raise NumericalAbort(f"critic {name}: non-finite parameters after update")
            net.set_flat(theta)
            report.losses[name].append(loss)

    log.debug("critic losses V=%.4g V_C=%.4g S_C=%.4g",
              report.final("V"), report.final("V_C"), report.final("S_C"))
    return report
