from __future__ import annotations

import logging
import math

import numpy as np
from scipy.optimize import brentq
from scipy.stats import norm

from tabular_oracle.types import OracleInputError

log = logging.getLogger(__name__)


# alpha es la masa de la cola: alpha pequeño = más aversión al riesgo, alpha = 1 -> esperanza


def cvar_factor(alpha: float) -> float:
    """k_alpha = phi(Phi^-1(alpha)) / alpha, con k_1 = 0 exactamente."""
    if not 0.0 < alpha <= 1.0:
        raise OracleInputError(f"alpha must be in (0, 1], got {alpha}")
    if alpha == 1.0:
        return 0.0
    return float(norm.pdf(norm.ppf(alpha)) / alpha)


def gaussian_cvar(J_C: float, J_S: float, alpha: float, *, variance_floor: float = 0.0) -> float:
    """
    CVaR del coste bajo la hipótesis gaussiana: J_C + k_alpha * sqrt(J_S - J_C^2).
    Varianzas negativas (ruido numérico o críticos aprendidos) se recortan a variance_floor.
    """
    k = cvar_factor(alpha)
    var = J_S - J_C * J_C
    if var < variance_floor:
        var = variance_floor
    return J_C + k * math.sqrt(var) if k else J_C


def empirical_cvar(samples, alpha: float) -> float:
    """
    CVaR empírico con masa de cola alpha: min_nu nu + E[(X - nu)+] / alpha, que sobre la
    distribución empírica es la media del peor alpha-fraccional de las muestras.
    """
    if not 0.0 < alpha <= 1.0:
        raise OracleInputError(f"alpha must be in (0, 1], got {alpha}")
    x = np.sort(np.asarray(samples, dtype=float).ravel())[::-1]
    n = x.size
    if n == 0:
        raise OracleInputError("empirical_cvar needs at least one sample")
    if n < 1.0 / alpha - 1e-9:
        raise OracleInputError(f"need at least 1/alpha = {1.0 / alpha:.1f} samples, got {n}")

    tail = alpha * n
    whole = int(math.floor(tail + 1e-12))
    frac = tail - whole
    total = x[:whole].sum()
    if frac > 1e-12 and whole < n:
        total += frac * x[whole]
    return float(total / tail)


def risk_level_for(confidence: float) -> float:
    """
    Resuelve f(alpha) = Phi^-1(confidence) con f(x) = phi(Phi^-1(x)) / x.
    Regla para fijar alpha: risk_level_for(0.95) ~ 0.125.
    """
    if not 0.5 < confidence < 1.0:
        raise OracleInputError(f"confidence must be in (0.5, 1), got {confidence}")
    target = float(norm.ppf(confidence))
    return float(brentq(lambda a: cvar_factor(a) - target, 1e-9, 1.0 - 1e-12, xtol=1e-14))
