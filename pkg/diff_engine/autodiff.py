"""
Gradientes sobre vectores de parámetros planos.

Una pérdida diferenciable es un callable theta -> (valor, gradiente) que hace su propio
pase inverso (Mlp.backward). `grad` comprueba el resultado; `numerical_grad` es el oráculo
de diferencias centrales contra el que se validan todas las pérdidas.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from diff_engine.mlp import NonFiniteError

ValueAndGrad = Callable[[np.ndarray], tuple[float, np.ndarray]]


def grad(loss: ValueAndGrad, theta: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    value, g = loss(theta)
    g = np.asarray(g, dtype=float)
    if g.shape != theta.shape:
        raise ValueError(f"gradient shape {g.shape} does not match parameters {theta.shape}")
    if not np.isfinite(value) or not np.all(np.isfinite(g)):
        raise NonFiniteError("non-finite loss or gradient")
    return g


def numerical_grad(f: Callable[[np.ndarray], float], theta: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Diferencias centrales (f(theta + h e_i) - f(theta - h e_i)) / 2h, coordenada a coordenada."""
    theta = np.asarray(theta, dtype=float)
    out = np.zeros_like(theta)
    for i in range(theta.size):
        e = np.zeros_like(theta)
        e[i] = h
        out[i] = (f(theta + e) - f(theta - e)) / (2.0 * h)
    return out


def relative_error(a: np.ndarray, b: np.ndarray, floor: float = 1e-12) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), floor))
