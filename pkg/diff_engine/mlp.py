from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from cmdp_core.types import RejectedInputError


class NonFiniteError(FloatingPointError):
    """Valor no finito en una capa (layer=None si no viene de una red concreta)."""

    def __init__(self, message: str, layer: int | None = None):
        super().__init__(message if layer is None else f"{message} (layer {layer})")
        self.layer = layer


@dataclass(frozen=True)
class LayerSlot:
    w: slice
    b: slice
    shape: tuple[int, int]  # (out, in)


def _layout(sizes: Sequence[int]) -> tuple[list[LayerSlot], int]:
    slots: list[LayerSlot] = []
    off = 0
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        w = slice(off, off + n_in * n_out)
        off += n_in * n_out
        b = slice(off, off + n_out)
        off += n_out
        slots.append(LayerSlot(w=w, b=b, shape=(n_out, n_in)))
    return slots, off


class Mlp:
    """
    Perceptrón multicapa con ReLU en las capas ocultas y salida lineal.
    Los pesos viven en un único vector plano; `layout` fija dónde está cada W (out, in) y cada b.
    Todas las operaciones aceptan un theta explícito para evaluar la red en otros parámetros
    sin tocar los suyos.
    """

    def __init__(self, sizes: Sequence[int], params: np.ndarray | None = None):
        if len(sizes) < 2 or any(int(s) <= 0 for s in sizes):
            raise RejectedInputError(f"bad layer sizes {sizes!r}")
        self.sizes = tuple(int(s) for s in sizes)
        self.layout, self.n_params = _layout(self.sizes)
        self.params = np.zeros(self.n_params) if params is None else self._checked(params).copy()

    @classmethod
    def init(cls, sizes: Sequence[int], rng: np.random.Generator, *, out_scale: float = 1.0) -> Mlp:
        """Pesos He-normales, sesgos a cero; la última capa se escala por out_scale."""
        net = cls(sizes)
        theta = np.zeros(net.n_params)
        for i, slot in enumerate(net.layout):
            n_out, n_in = slot.shape
            w = rng.normal(0.0, np.sqrt(2.0 / n_in), size=(n_out, n_in))
            if i == len(net.layout) - 1:
                w *= out_scale
            theta[slot.w] = w.ravel()
        net.params = theta
        return net

    @property
    def n_in(self) -> int:
        return self.sizes[0]

    @property
    def n_out(self) -> int:
        return self.sizes[-1]

    # -----------------------------
    # Parámetros planos
    # -----------------------------

    def _checked(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_params,):
            raise RejectedInputError(f"expected {self.n_params} parameters, got shape {theta.shape}")
        return theta

    def get_flat(self) -> np.ndarray:
        return self.params.copy()

    def set_flat(self, theta: np.ndarray) -> None:
        self.params = self._checked(theta).copy()

    def weights(self, theta: np.ndarray | None = None) -> list[tuple[np.ndarray, np.ndarray]]:
        theta = self.params if theta is None else self._checked(theta)
        return [(theta[s.w].reshape(s.shape), theta[s.b]) for s in self.layout]

    def _inputs(self, x) -> tuple[np.ndarray, bool]:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        x2 = x[None, :] if single else x
        if x2.ndim != 2 or x2.shape[1] != self.n_in:
            raise RejectedInputError(f"input dimension {x.shape} does not match {self.n_in}")
        return x2, single

    # -----------------------------
    # Evaluación y derivadas
    # -----------------------------

    def forward(self, x, theta: np.ndarray | None = None) -> np.ndarray:
        out, _ = self.forward_cached(x, theta)
        return out

    def forward_cached(self, x, theta: np.ndarray | None = None):
        """Salida y memoria (entrada, preactivación) de cada capa para el backward."""
        a, single = self._inputs(x)
        cache: list[tuple[np.ndarray, np.ndarray]] = []
        layers = self.weights(theta)
        last = len(layers) - 1
        for i, (W, b) in enumerate(layers):
            z = a @ W.T + b
            if not np.all(np.isfinite(z)):
                raise NonFiniteError("non-finite activation", layer=i)
            cache.append((a, z))
            a = np.maximum(z, 0.0) if i < last else z
        return (a[0] if single else a), (cache, single)

    def backward(self, memory, dout, theta: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
        """
        Modo inverso: dado dL/dsalida devuelve (dL/dtheta plano, dL/dx).
        Con un batch los gradientes de parámetros se suman sobre las filas.
        """
        cache, single = memory
        dy = np.asarray(dout, dtype=float)
        dy = dy[None, :] if single else dy
        layers = self.weights(theta)
        grad = np.zeros(self.n_params)
        last = len(layers) - 1

        for i in range(last, -1, -1):
            W, _ = layers[i]
            a_in, z = cache[i]
            dz = dy if i == last else dy * (z > 0.0)
            dW = dz.T @ a_in
            db = dz.sum(axis=0)
            if not (np.all(np.isfinite(dW)) and np.all(np.isfinite(db))):
                raise NonFiniteError("non-finite gradient", layer=i)
            grad[self.layout[i].w] = dW.ravel()
            grad[self.layout[i].b] = db
            dy = dz @ W

        return grad, (dy[0] if single else dy)

    def jvp(self, x, v: np.ndarray, theta: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Modo directo: (salida, derivada direccional de la salida a lo largo de v en theta)."""
        a, single = self._inputs(x)
        v = self._checked(v)
        da = np.zeros_like(a)
        layers = self.weights(theta)
        last = len(layers) - 1
        for i, (W, b) in enumerate(layers):
            slot = self.layout[i]
            dW = v[slot.w].reshape(slot.shape)
            z = a @ W.T + b
            dz = da @ W.T + a @ dW.T + v[slot.b]
            if not np.all(np.isfinite(dz)):
                raise NonFiniteError("non-finite tangent", layer=i)
            if i < last:
                mask = z > 0.0
                a, da = np.where(mask, z, 0.0), np.where(mask, dz, 0.0)
            else:
                a, da = z, dz
        return (a[0], da[0]) if single else (a, da)
