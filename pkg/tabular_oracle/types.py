from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class OracleInputError(ValueError):
    pass


_ATOL = 1e-10


@dataclass(frozen=True)
class TabularCMDP:
    """CMDP finito: P, R, C con forma [s, a, s'], rho sobre estados y descuento gamma."""
    P: np.ndarray
    R: np.ndarray
    C: np.ndarray
    rho: np.ndarray
    gamma: float

    def __post_init__(self):
        if self.P.ndim != 3 or self.P.shape[0] != self.P.shape[2]:
            raise OracleInputError(f"P must have shape [nS, nA, nS], got {self.P.shape}")
        if self.R.shape != self.P.shape or self.C.shape != self.P.shape:
            raise OracleInputError("R and C must have the same shape as P")
        if np.any(self.P < 0) or not np.allclose(self.P.sum(axis=2), 1.0, atol=_ATOL):
            raise OracleInputError("rows of P must be distributions")
        if self.rho.shape != (self.nS,) or np.any(self.rho < 0) or abs(self.rho.sum() - 1.0) > _ATOL:
            raise OracleInputError("rho must be a distribution over states")
        if np.any(self.C < 0):
            raise OracleInputError("costs must be nonnegative")
        if not 0.0 < self.gamma < 1.0:
            raise OracleInputError(f"gamma must be in (0, 1), got {self.gamma}")

    @property
    def nS(self) -> int:
        return self.P.shape[0]

    @property
    def nA(self) -> int:
        return self.P.shape[1]


@dataclass(frozen=True)
class TabularPolicy:
    pi: np.ndarray  # [s, a]

    def __post_init__(self):
        if self.pi.ndim != 2 or np.any(self.pi < 0) or not np.allclose(self.pi.sum(axis=1), 1.0, atol=_ATOL):
            raise OracleInputError("policy rows must be distributions")

    @property
    def nS(self) -> int:
        return self.pi.shape[0]

    @property
    def nA(self) -> int:
        return self.pi.shape[1]

    def floored(self, floor: float) -> TabularPolicy:
        """Suelo por acción y renormalización, para usarla como política de comportamiento."""
        p = np.maximum(self.pi, floor)
        return TabularPolicy(p / p.sum(axis=1, keepdims=True))


@dataclass(frozen=True)
class ExactQuantities:
    V: np.ndarray
    Q: np.ndarray
    A: np.ndarray
    V_C: np.ndarray
    Q_C: np.ndarray
    A_C: np.ndarray
    S_C: np.ndarray  # S_C(s)
    SQ_C: np.ndarray  # S_C(s, a)
    A_S: np.ndarray
    d: np.ndarray
    d2: np.ndarray
    J: float
    J_C: float
    J_S: float


@dataclass(frozen=True)
class Epsilons:
    eps_R: float
    eps_C: float
    eps_S: float
    eps_cvar: float  # inf si el CVaR aproximado no es positivo


@dataclass(frozen=True)
class BoundCheck:
    name: str
    lhs: float
    rhs: float
    defined: bool = True  # False si no se cumple la precondición (p.ej. CVaR aproximado <= 0)

    @property
    def gap(self) -> float:
        return self.rhs - self.lhs

    def holds(self, tol: float = 1e-9) -> bool:
        return (not self.defined) or self.gap >= -tol
