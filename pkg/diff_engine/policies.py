from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import log_softmax

from cmdp_core.types import RejectedInputError
from constants import LOG_STD_MAX, LOG_STD_MIN
from diff_engine.mlp import Mlp, NonFiniteError
from tabular_oracle.types import TabularPolicy

_LOG_2PI = math.log(2.0 * math.pi)


class GaussianStats(NamedTuple):
    mean: np.ndarray  # [n, act_dim]
    log_std: np.ndarray  # [act_dim], ya recortado


class CategoricalStats(NamedTuple):
    log_probs: np.ndarray  # [n, n_actions]

    @property
    def probs(self) -> np.ndarray:
        return np.exp(self.log_probs)


# =====================================================
# Gaussiana diagonal
# =====================================================

class GaussianPolicy:
    """
    pi(a|s) = N(mean_net(s), diag(exp(log_std))^2) con log_std independiente del estado.
    theta = [parámetros de mean_net, log_std]. Las acciones se guardan sin recortar;
    el recorte a [low, high] lo hace el entorno, y las densidades son las de la gaussiana
    sin recortar.
    """

    def __init__(self, net: Mlp, log_std: np.ndarray, *, low: float = -1.0, high: float = 1.0):
        self.net = net
        self.log_std = np.asarray(log_std, dtype=float).copy()
        if self.log_std.shape != (net.n_out,):
            raise RejectedInputError("log_std must have one entry per action dimension")
        self.low = low
        self.high = high

    @classmethod
    def init(cls, obs_dim: int, act_dim: int, hidden: Sequence[int], rng: np.random.Generator,
             *, init_log_std: float = -0.5, out_scale: float = 0.01) -> GaussianPolicy:
        net = Mlp.init((obs_dim, *hidden, act_dim), rng, out_scale=out_scale)
        return cls(net, np.full(act_dim, init_log_std))

    @property
    def act_dim(self) -> int:
        return self.net.n_out

    @property
    def n_params(self) -> int:
        return self.net.n_params + self.act_dim

    def get_flat(self) -> np.ndarray:
        return np.concatenate([self.net.get_flat(), self.log_std])

    def set_flat(self, theta: np.ndarray) -> None:
        theta = self._checked(theta)
        self.net.set_flat(theta[: self.net.n_params])
        self.log_std = theta[self.net.n_params:].copy()

    def _checked(self, theta) -> np.ndarray:
        if theta is None:
            return self.get_flat()
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_params,):
            raise RejectedInputError(f"expected {self.n_params} parameters, got shape {theta.shape}")
        return theta

    def _split(self, theta) -> tuple[np.ndarray, np.ndarray]:
        theta = self._checked(theta)
        return theta[: self.net.n_params], theta[self.net.n_params:]

    # -----------------------------
    # Distribución
    # -----------------------------

    def stats(self, states, theta=None) -> GaussianStats:
        w, raw = self._split(theta)
        mean = self.net.forward(np.atleast_2d(states), w)
        return GaussianStats(mean=mean, log_std=np.clip(raw, LOG_STD_MIN, LOG_STD_MAX))

    def _std_mask(self, theta) -> np.ndarray:
        _, raw = self._split(theta)
        return ((raw >= LOG_STD_MIN) & (raw <= LOG_STD_MAX)).astype(float)

    @staticmethod
    def log_density(stats: GaussianStats, actions) -> np.ndarray:
        a = np.atleast_2d(np.asarray(actions, dtype=float))
        z = (a - stats.mean) * np.exp(-stats.log_std)
        d = stats.mean.shape[1]
        return -0.5 * np.sum(z * z, axis=1) - np.sum(stats.log_std) - 0.5 * d * _LOG_2PI

    def log_prob(self, states, actions, theta=None) -> np.ndarray:
        return self.log_density(self.stats(states, theta), actions)

    def log_prob_grad(self, states, actions, weights, theta=None) -> np.ndarray:
        """sum_i w_i * d log pi(a_i|s_i) / d theta."""
        w_net, raw = self._split(theta)
        states = np.atleast_2d(states)
        a = np.atleast_2d(np.asarray(actions, dtype=float))
        weights = np.asarray(weights, dtype=float)
        mean, memory = self.net.forward_cached(states, w_net)
        log_std = np.clip(raw, LOG_STD_MIN, LOG_STD_MAX)
        inv_var = np.exp(-2.0 * log_std)
        diff = a - mean

        g_net, _ = self.net.backward(memory, weights[:, None] * diff * inv_var, w_net)
        g_std = (weights[:, None] * (diff * diff * inv_var - 1.0)).sum(axis=0) * self._std_mask(theta)
        return np.concatenate([g_net, g_std])

    @staticmethod
    def kl_per_state(old: GaussianStats, new: GaussianStats) -> np.ndarray:
        """KL(old || new) en forma cerrada, una entrada por estado."""
        var_old = np.exp(2.0 * old.log_std)
        var_new = np.exp(2.0 * new.log_std)
        diff = old.mean - new.mean
        terms = new.log_std - old.log_std + (var_old + diff * diff) / (2.0 * var_new) - 0.5
        return terms.sum(axis=1)

    def kl(self, states, old: GaussianStats, theta=None) -> float:
        return float(np.mean(self.kl_per_state(old, self.stats(states, theta))))

    def kl_grad(self, states, old: GaussianStats, theta=None) -> np.ndarray:
        w_net, raw = self._split(theta)
        states = np.atleast_2d(states)
        n = states.shape[0]
        mean, memory = self.net.forward_cached(states, w_net)
        log_std = np.clip(raw, LOG_STD_MIN, LOG_STD_MAX)
        var_new = np.exp(2.0 * log_std)
        diff = mean - old.mean

        g_net, _ = self.net.backward(memory, diff / var_new / n, w_net)
        spread = (np.exp(2.0 * old.log_std) + diff * diff) / var_new
        g_std = (1.0 - spread).mean(axis=0) * self._std_mask(theta)
        return np.concatenate([g_net, g_std])

    def fisher_vector_product(self, states, v: np.ndarray, theta=None) -> np.ndarray:
        """
        Hessiano de la KL media en theta (= Fisher media) por v, vía J^T F J:
        tangente directa de la media, F_mean = 1/sigma^2, vuelta en modo inverso.
        El bloque de log_std tiene Fisher 2 por dimensión.
        """
        w_net, raw = self._split(theta)
        v = self._checked(v)
        states = np.atleast_2d(states)
        n = states.shape[0]
        v_net, v_std = v[: self.net.n_params], v[self.net.n_params:]

        _, d_mean = self.net.jvp(states, v_net, w_net)
        _, memory = self.net.forward_cached(states, w_net)
        inv_var = np.exp(-2.0 * np.clip(raw, LOG_STD_MIN, LOG_STD_MAX))
        hv_net, _ = self.net.backward(memory, d_mean * inv_var / n, w_net)
        hv_std = 2.0 * v_std * self._std_mask(theta)
        out = np.concatenate([hv_net, hv_std])
        if not np.all(np.isfinite(out)):
            raise NonFiniteError("non-finite Fisher-vector product")
        return out

    # -----------------------------
    # Actuar
    # -----------------------------

    def sample(self, state, rng: np.random.Generator) -> tuple[np.ndarray, float]:
        st = self.stats(state)
        mean, std = st.mean[0], np.exp(st.log_std)
        a = mean + std * rng.standard_normal(self.act_dim)
        return a, float(np.exp(self.log_density(st, a)[0]))

    def act(self, state) -> tuple[np.ndarray, float]:
        """Acción determinista (la media), recortada a los límites de la acción."""
        st = self.stats(state)
        mean = st.mean[0]
        return np.clip(mean, self.low, self.high), float(np.exp(self.log_density(st, mean)[0]))


# =====================================================
# Categórica (softmax sobre logits)
# =====================================================

class CategoricalPolicy:
    """
    pi(a|s) = softmax(logits_net(s))[a]. Sin capas ocultas y con observaciones one-hot es la
    parametrización softmax tabular exacta.
    """

    def __init__(self, net: Mlp):
        self.net = net

    @classmethod
    def init(cls, obs_dim: int, n_actions: int, hidden: Sequence[int], rng: np.random.Generator,
             *, out_scale: float = 0.01) -> CategoricalPolicy:
        return cls(Mlp.init((obs_dim, *hidden, n_actions), rng, out_scale=out_scale))

    @property
    def n_actions(self) -> int:
        return self.net.n_out

    @property
    def n_params(self) -> int:
        return self.net.n_params

    def get_flat(self) -> np.ndarray:
        return self.net.get_flat()

    def set_flat(self, theta: np.ndarray) -> None:
        self.net.set_flat(theta)

    def stats(self, states, theta=None) -> CategoricalStats:
        logits = self.net.forward(np.atleast_2d(states), theta)
        return CategoricalStats(log_probs=log_softmax(logits, axis=1))

    @staticmethod
    def _index(actions) -> np.ndarray:
        return np.asarray(actions).reshape(-1).astype(int)

    def log_prob(self, states, actions, theta=None) -> np.ndarray:
        lp = self.stats(states, theta).log_probs
        return lp[np.arange(lp.shape[0]), self._index(actions)]

    def log_prob_grad(self, states, actions, weights, theta=None) -> np.ndarray:
        logits, memory = self.net.forward_cached(np.atleast_2d(states), theta)
        p = np.exp(log_softmax(logits, axis=1))
        onehot = np.zeros_like(p)
        onehot[np.arange(p.shape[0]), self._index(actions)] = 1.0
        dout = np.asarray(weights, dtype=float)[:, None] * (onehot - p)
        g, _ = self.net.backward(memory, dout, theta)
        return g

    @staticmethod
    def kl_per_state(old: CategoricalStats, new: CategoricalStats) -> np.ndarray:
        return np.sum(old.probs * (old.log_probs - new.log_probs), axis=1)

    def kl(self, states, old: CategoricalStats, theta=None) -> float:
        return float(np.mean(self.kl_per_state(old, self.stats(states, theta))))

    def kl_grad(self, states, old: CategoricalStats, theta=None) -> np.ndarray:
        states = np.atleast_2d(states)
        logits, memory = self.net.forward_cached(states, theta)
        p_new = np.exp(log_softmax(logits, axis=1))
        g, _ = self.net.backward(memory, (p_new - old.probs) / states.shape[0], theta)
        return g

    def fisher_vector_product(self, states, v: np.ndarray, theta=None) -> np.ndarray:
        states = np.atleast_2d(states)
        n = states.shape[0]
        logits, d_logits = self.net.jvp(states, v, theta)
        _, memory = self.net.forward_cached(states, theta)
        p = np.exp(log_softmax(logits, axis=1))
        f = p * d_logits - p * np.sum(p * d_logits, axis=1, keepdims=True)
        out, _ = self.net.backward(memory, f / n, theta)
        if not np.all(np.isfinite(out)):
            raise NonFiniteError("non-finite Fisher-vector product")
        return out

    def sample(self, state, rng: np.random.Generator) -> tuple[int, float]:
        p = self.stats(state).probs[0]
        a = int(rng.choice(self.n_actions, p=p / p.sum()))
        return a, float(p[a])

    def act(self, state) -> tuple[int, float]:
        p = self.stats(state).probs[0]
        a = int(np.argmax(p))
        return a, float(p[a])

    def tabular(self, n_states: int, theta=None) -> TabularPolicy:
        """Matriz pi[s, a] evaluando la red en las observaciones one-hot."""
        p = self.stats(np.eye(n_states), theta).probs
        return TabularPolicy(p / p.sum(axis=1, keepdims=True))
