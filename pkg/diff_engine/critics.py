from __future__ import annotations

from typing import Literal, Sequence

import numpy as np
from scipy.special import expit

from cmdp_core.types import RejectedInputError
from diff_engine.mlp import Mlp, NonFiniteError

CriticName = Literal["V", "V_C", "S_C"]
CRITIC_NAMES: tuple[CriticName, ...] = ("V", "V_C", "S_C")


def softplus(z: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, z)


class CriticSet:
    """
    Las tres redes de valor: V (recompensa), V_C (coste) y S_C (cuadrado del coste).
    S_C pasa por softplus para que su salida sea >= 0.
    """

    def __init__(self, V: Mlp, V_C: Mlp, S_C: Mlp):
        for net in (V, V_C, S_C):
            if net.n_out != 1:
                raise RejectedInputError("critic networks must have a scalar output")
        self.nets: dict[CriticName, Mlp] = {"V": V, "V_C": V_C, "S_C": S_C}

    @classmethod
    def init(cls, obs_dim: int, hidden: Sequence[int], rng: np.random.Generator) -> CriticSet:
        sizes = (obs_dim, *hidden, 1)
        return cls(*(Mlp.init(sizes, rng) for _ in CRITIC_NAMES))

    def predict(self, name: CriticName, states, theta: np.ndarray | None = None) -> np.ndarray:
        z = self.nets[name].forward(np.atleast_2d(states), theta)[:, 0]
        return softplus(z) if name == "S_C" else z

    def value(self, states) -> np.ndarray:
        return self.predict("V", states)

    def cost_value(self, states) -> np.ndarray:
        return self.predict("V_C", states)

    def square_value(self, states) -> np.ndarray:
        return self.predict("S_C", states)

    def mse_and_grad(self, name: CriticName, states, targets, theta: np.ndarray | None = None
                     ) -> tuple[float, np.ndarray]:
        """Pérdida mean((f(s) - y)^2) y su gradiente respecto a los parámetros de la red."""
        net = self.nets[name]
        states = np.atleast_2d(states)
        targets = np.asarray(targets, dtype=float)
        z, memory = net.forward_cached(states, theta)
        z = z[:, 0]
        pred = softplus(z) if name == "S_C" else z
        err = pred - targets
        loss = float(np.mean(err * err))
        if not np.isfinite(loss):
            raise NonFiniteError(f"non-finite {name} loss")

        dpred = 2.0 * err / states.shape[0]
        dz = dpred * expit(z) if name == "S_C" else dpred
        grad, _ = net.backward(memory, dz[:, None], theta)
        return loss, grad

    def get_flat(self) -> dict[str, np.ndarray]:
        return {name: net.get_flat() for name, net in self.nets.items()}

    def set_flat(self, params: dict[str, np.ndarray]) -> None:
        for name, net in self.nets.items():
            net.set_flat(params[name])
