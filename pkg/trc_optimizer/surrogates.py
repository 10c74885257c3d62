from __future__ import annotations

import logging
import math

import numpy as np

from constants import RATIO_MAX, RATIO_MIN, VARIANCE_FLOOR
from tabular_oracle.cvar import gaussian_cvar
from trc_optimizer.config import CVaRConfig
from trc_optimizer.types import PolicyBatch, SurrogateEstimates

log = logging.getLogger(__name__)


# Surrogates centrados: el término con los ratios de theta_old se resta, así que en theta_old
# valen exactamente J_C(pi), J_S(pi) (y 0 para el objetivo). Los gradientes no cambian.


def ratios(policy, batch: PolicyBatch, theta: np.ndarray | None = None) -> np.ndarray:
    return np.exp(policy.log_prob(batch.states, batch.actions, theta) - np.log(batch.behavior_probs))


def surrogate_values(policy, batch: PolicyBatch, theta: np.ndarray, ratios_old: np.ndarray,
                     J_C: float, J_S: float, gamma: float) -> tuple[float, float, float]:
    """(objetivo, J_C^{mu,pi}(theta), J_S^{mu,pi}(theta)) evaluados en el batch."""
    shift = ratios(policy, batch, theta) - ratios_old
    a = batch.adv
    objective = float(np.sum(batch.weight_c * shift * a.A)) / (1.0 - gamma)
    jc = J_C + float(np.sum(batch.weight_c * shift * a.A_C)) / (1.0 - gamma)
    js = J_S + float(np.sum(batch.weight_s * shift * a.A_S)) / (1.0 - gamma * gamma)
    return objective, jc, js


def _ratio_grad(policy, batch: PolicyBatch, theta: np.ndarray, rho: np.ndarray, weights: np.ndarray,
                adv: np.ndarray) -> np.ndarray:
    # d(pi/mu) = (pi/mu) d log pi; ratios recortados solo aquí
    clipped = np.clip(rho, RATIO_MIN, RATIO_MAX)
    return policy.log_prob_grad(batch.states, batch.actions, weights * clipped * adv, theta)


def objective_grad(policy, batch: PolicyBatch, theta: np.ndarray, gamma: float,
                   rho: np.ndarray | None = None) -> np.ndarray:
    rho = ratios(policy, batch, theta) if rho is None else rho
    return _ratio_grad(policy, batch, theta, rho, batch.weight_c, batch.adv.A) / (1.0 - gamma)


def cost_surrogate_grads(policy, batch: PolicyBatch, theta: np.ndarray, gamma: float,
                         rho: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Gradientes de J_C^{mu,pi} y J_S^{mu,pi} respecto a theta."""
    rho = ratios(policy, batch, theta) if rho is None else rho
    g_c = _ratio_grad(policy, batch, theta, rho, batch.weight_c, batch.adv.A_C) / (1.0 - gamma)
    g_s = _ratio_grad(policy, batch, theta, rho, batch.weight_s, batch.adv.A_S) / (1.0 - gamma * gamma)
    return g_c, g_s


def approx_cvar(J_C: float, J_S: float, cfg: CVaRConfig) -> float:
    return gaussian_cvar(J_C, J_S, cfg.alpha, variance_floor=VARIANCE_FLOOR)


def cvar_grad(policy, batch: PolicyBatch, theta: np.ndarray, J_C: float, J_S: float,
              cfg: CVaRConfig) -> SurrogateEstimates:
    """
    Gradientes del surrogate del objetivo (g) y del CVaR aproximado (b) en theta = theta_old:
      b = dJ_C + k_alpha (dJ_S - 2 J_C dJ_C) / (2 sigma),   sigma = sqrt(max(J_S - J_C^2, floor))
    Si la varianza está en el suelo, el término de la raíz no aporta gradiente.
    """
    rho = ratios(policy, batch, theta)
    g = objective_grad(policy, batch, theta, cfg.gamma, rho)
    g_c, g_s = cost_surrogate_grads(policy, batch, theta, cfg.gamma, rho)

    var = J_S - J_C * J_C
    floored = var <= VARIANCE_FLOOR
    sigma = math.sqrt(max(var, VARIANCE_FLOOR))
    if cfg.k == 0.0:
        b = g_c
    elif floored:
        log.warning("cost variance %.3g at floor: CVaR square-root term has no gradient", var)
        b = g_c
    else:
        b = g_c + cfg.k * (g_s - 2.0 * J_C * g_c) / (2.0 * sigma)

    cvar = approx_cvar(J_C, J_S, cfg)
    return SurrogateEstimates(
        J_C=J_C, J_S=J_S, ratios=rho, g=g, b=b,
        approx_cvar=cvar, c_slack=cvar - cfg.threshold,
        sigma=sigma, sigma_floored=bool(floored and cfg.k != 0.0),
    )
