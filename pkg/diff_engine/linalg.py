from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from constants import CG_ITERS, CG_TOL
from diff_engine.mlp import NonFiniteError


@dataclass
class CGResult:
    x: np.ndarray
    iterations: int
    residuals: list[float] = field(default_factory=list)  # ||b - Hx|| tras cada iteración


def conjugate_gradient(hvp: Callable[[np.ndarray], np.ndarray], b: np.ndarray,
                       iters: int = CG_ITERS, tol: float = CG_TOL) -> CGResult:
    """
    Resuelve H x = b con H simétrica definida positiva dada solo como producto H v.
    Para cuando ||r||^2 < tol o tras `iters` iteraciones.
    """
    b = np.asarray(b, dtype=float)
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rr = float(r @ r)
    residuals: list[float] = []
    it = 0

    while it < iters and rr >= tol:
        Hp = hvp(p)
        pHp = float(p @ Hp)
        if not np.isfinite(pHp):
            raise NonFiniteError("non-finite curvature in conjugate gradient")
        if pHp <= 0.0:
            break
        step = rr / pHp
        x = x + step * p
        r = r - step * Hp
        rr_new = float(r @ r)
        it += 1
        residuals.append(float(np.sqrt(rr_new)))
        p = r + (rr_new / rr) * p
        rr = rr_new

    if not np.all(np.isfinite(x)):
        raise NonFiniteError("non-finite solution in conjugate gradient")
    return CGResult(x=x, iterations=it, residuals=residuals)
