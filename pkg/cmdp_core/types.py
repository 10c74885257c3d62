from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np


class RejectedInputError(ValueError):
    pass


# -----------------------------
# Experiencia
# -----------------------------

@dataclass(frozen=True)
class Transition:
    """
    Un paso (s_t, a_t, prob_t, r_t, c_t, s_{t+1}).
    behavior_prob es la densidad (o masa, en tabular) de la acción bajo la política que la muestreó.
    `step` es el índice t dentro del episodio (para los pesos gamma^t).
    """
    state: np.ndarray
    action: np.ndarray | int
    behavior_prob: float
    reward: float
    cost: float
    next_state: np.ndarray
    terminal: bool = False
    step: int = 0

    def __post_init__(self):
        if not self.cost >= 0.0:
            raise RejectedInputError(f"cost must be >= 0, got {self.cost!r}")
        if not self.behavior_prob > 0.0:
            raise RejectedInputError(f"behavior_prob must be > 0, got {self.behavior_prob!r}")


@dataclass
class Trajectory:
    """
    Segmento contiguo de un episodio. `truncated` indica que el segmento termina sin estado terminal
    (límite de pasos o corte de la recogida), de modo que los targets se hacen bootstrap con el crítico.
    """
    transitions: list[Transition] = field(default_factory=list)
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.transitions)

    def __iter__(self):
        return iter(self.transitions)

    @property
    def terminated(self) -> bool:
        return bool(self.transitions) and self.transitions[-1].terminal

    def tail(self, n: int) -> Trajectory:
        """Últimos n pasos, conservando el flag de truncado."""
        return Trajectory(self.transitions[len(self.transitions) - n:], truncated=self.truncated)

    def check_contiguous(self, atol: float = 0.0) -> bool:
        for prev, nxt in zip(self.transitions[:-1], self.transitions[1:]):
            if prev.terminal:
                return False
            if not np.allclose(np.asarray(prev.next_state), np.asarray(nxt.state), atol=atol, rtol=0.0):
                return False
        return True

    # columnas en numpy, lo que consumen retrace y los estimadores
    def states(self) -> np.ndarray:
        return np.stack([np.asarray(t.state, dtype=float) for t in self.transitions])

    def next_states(self) -> np.ndarray:
        return np.stack([np.asarray(t.next_state, dtype=float) for t in self.transitions])

    def actions(self) -> np.ndarray:
        return np.stack([np.asarray(t.action) for t in self.transitions])

    def rewards(self) -> np.ndarray:
        return np.array([t.reward for t in self.transitions], dtype=float)

    def costs(self) -> np.ndarray:
        return np.array([t.cost for t in self.transitions], dtype=float)

    def behavior_probs(self) -> np.ndarray:
        return np.array([t.behavior_prob for t in self.transitions], dtype=float)

    def terminals(self) -> np.ndarray:
        return np.array([t.terminal for t in self.transitions], dtype=bool)

    def steps(self) -> np.ndarray:
        return np.array([t.step for t in self.transitions], dtype=int)


# -----------------------------
# Costes y métricas
# -----------------------------

CostConvention = Literal["distance", "angle"]


@dataclass(frozen=True)
class CostFunctionSpec:
    k: float  # pendiente
    b: float  # offset
    convention: CostConvention = "distance"  # distance: sigmoid(k(b - x)); angle: sigmoid(k(|x| - b))


@dataclass(frozen=True)
class CostReturn:
    value: float
    empty: bool = False
    bootstrapped: bool = False  # el episodio se cortó por límite de pasos


@dataclass(frozen=True)
class EpisodeMetrics:
    reward_sum: float
    cv_count: int
    length: int
    cost_rate: float  # cv_count / length
    score: float  # reward_sum / (1 + cv_count)
