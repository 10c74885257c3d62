from __future__ import annotations

import logging
import math
from typing import Callable

import numpy as np

from cmdp_core.types import RejectedInputError
from constants import DAMPING
from trc_optimizer.types import TrustRegionState

log = logging.getLogger(__name__)


def compute_delta_old(m_hat: float, delta: float) -> float:
    """
    delta_old = sqrt(m (delta + m/4)) - m/2, escrito como m delta / (sqrt(m (delta + m/4)) + m/2)
    para que no cancele con m grande. m < 0 (ruido de Monte Carlo) se trata como 0.
    """
    if delta <= 0.0:
        raise RejectedInputError(f"delta must be > 0, got {delta}")
    m = max(float(m_hat), 0.0)
    if m == 0.0:
        return 0.0
    return m * delta / (math.sqrt(m * (delta + 0.25 * m)) + 0.5 * m)


def behavior_kl(policy, states, actions, behavior_probs, theta: np.ndarray | None = None) -> tuple[float, bool]:
    """Estimación de D_KL(mu || pi) con las densidades guardadas: media de log mu - log pi."""
    log_pi = policy.log_prob(states, actions, theta)
    m = float(np.mean(np.log(np.asarray(behavior_probs, dtype=float)) - log_pi))
    if m < 0.0:
        log.debug("negative behavior KL estimate %.3g clamped to 0", m)
        return 0.0, True
    return m, False


def trust_region_state(policy, states, actions, behavior_probs, delta: float,
                       theta: np.ndarray | None = None) -> TrustRegionState:
    m, clamped = behavior_kl(policy, states, actions, behavior_probs, theta)
    return TrustRegionState(delta=delta, m_hat=m, delta_old=compute_delta_old(m, delta), m_clamped=clamped)


def mean_kl(policy, states, old_stats, theta: np.ndarray | None = None) -> float:
    """Media en el batch de D_KL(pi_old(.|s) || pi_theta(.|s)); pi_old queda fija."""
    return policy.kl(states, old_stats, theta)


def kl_hvp(policy, states, theta_old: np.ndarray, damping: float = DAMPING) -> Callable[[np.ndarray], np.ndarray]:
    """v -> H v + damping v, con H el hessiano de mean_kl en theta_old."""
    def hvp(v: np.ndarray) -> np.ndarray:
        return policy.fisher_vector_product(states, v, theta_old) + damping * v
    return hvp
