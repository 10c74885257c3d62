from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class NumericalAbort(RuntimeError):
    """Pérdida o parámetros no finitos: se aborta el epoch y se vuelve al último checkpoint."""
    pass


# -----------------------------
# Targets y batches
# -----------------------------

@dataclass(frozen=True)
class RetraceTargets:
    """Targets por paso concatenados en el orden del batch, con las predicciones usadas."""
    V: np.ndarray
    V_C: np.ndarray
    V_S: np.ndarray
    rho: np.ndarray  # min(1, pi/mu) en cada paso
    trace_decay: float
    V_pred: np.ndarray  # V(s_t)
    V_C_pred: np.ndarray  # V_C(s_t)
    S_C_pred: np.ndarray  # S_C(s_t)

    def __len__(self) -> int:
        return self.V.shape[0]


@dataclass(frozen=True)
class Advantages:
    A: np.ndarray
    A_C: np.ndarray
    A_S: np.ndarray


@dataclass(frozen=True)
class PolicyBatch:
    """
    Muestras (s, a, mu(a|s), ventajas) con pesos por muestra. En entrenamiento los pesos son 1/n;
    en el oráculo tabular son d_mu(s) mu(a|s) y d2_mu(s) mu(a|s), con lo que las medias del batch
    son las esperanzas exactas.
    """
    states: np.ndarray
    actions: np.ndarray
    behavior_probs: np.ndarray
    adv: Advantages
    weight_c: np.ndarray
    weight_s: np.ndarray

    def __len__(self) -> int:
        return self.states.shape[0]

    @classmethod
    def uniform(cls, states, actions, behavior_probs, adv: Advantages) -> PolicyBatch:
        n = np.asarray(states).shape[0]
        w = np.full(n, 1.0 / n)
        return cls(np.asarray(states, dtype=float), np.asarray(actions), np.asarray(behavior_probs, dtype=float),
                   adv, w, w.copy())


@dataclass(frozen=True)
class OnPolicyJ:
    J_C: float
    J_S: float


@dataclass(frozen=True)
class SurrogateEstimates:
    J_C: float
    J_S: float
    ratios: np.ndarray  # pi_theta / mu en el batch (sin recortar)
    g: np.ndarray
    b: np.ndarray
    approx_cvar: float
    c_slack: float
    sigma: float
    sigma_floored: bool = False


@dataclass(frozen=True)
class TrustRegionState:
    delta: float
    m_hat: float
    delta_old: float
    m_clamped: bool = False  # m_hat negativo por ruido y recortado a 0

    @property
    def effective(self) -> float:
        return self.delta - self.delta_old


@dataclass
class LqclpSolution:
    step: np.ndarray
    lam: float
    nu: float  # NaN cuando el multiplicador no está definido (recuperación)
    feasible: bool
    recovery: bool = False
    alarm: bool = False  # recuperación con gradiente de restricción nulo
    predicted: float = 0.0  # g^T x (o b^T x en recuperación)
    step_length: float = 0.0
    backtracks: int = 0
    accepted: bool = False
    actual: float = 0.0
    kl: float = 0.0


@dataclass(frozen=True)
class LineSearchPoint:
    objective: float
    cvar: float
    kl: float


@dataclass(frozen=True)
class LineSearchResult:
    theta: np.ndarray
    step_length: float
    backtracks: int
    accepted: bool
    point: LineSearchPoint


@dataclass
class CriticUpdateReport:
    losses: dict[str, list[float]] = field(default_factory=dict)  # por red, una por ronda

    def final(self, name: str) -> float:
        values = self.losses.get(name, [])
        return values[-1] if values else float("nan")


@dataclass(frozen=True)
class UpdateDiagnostics:
    J_C: float
    J_S: float
    approx_cvar: float
    c_slack: float
    m_hat: float
    delta_old: float
    delta_eff: float
    kl: float
    lam: float
    nu: float
    recovery: bool
    accepted: bool
    backtracks: int
    sigma_floored: bool
    objective: float
