from __future__ import annotations

import numpy as np

from cmdp_core.types import Trajectory, Transition
from diff_engine.mlp import Mlp
from diff_engine.policies import CategoricalPolicy, GaussianPolicy
from tabular_oracle.exact import exact_quantities


def onehot(indices, n: int) -> np.ndarray:
    idx = np.asarray(indices, dtype=int).reshape(-1)
    out = np.zeros((idx.size, n))
    out[np.arange(idx.size), idx] = 1.0
    return out


class ExactCritics:
    """V, V_C y S_C exactos del oráculo, indexados por observaciones one-hot."""

    def __init__(self, cmdp, policy):
        self.q = exact_quantities(cmdp, policy)

    @staticmethod
    def _idx(states) -> np.ndarray:
        return np.argmax(np.atleast_2d(states), axis=1)

    def value(self, states):
        return self.q.V[self._idx(states)]

    def cost_value(self, states):
        return self.q.V_C[self._idx(states)]

    def square_value(self, states):
        return self.q.S_C[self._idx(states)]


def tabular_softmax(n_states: int, n_actions: int, rng: np.random.Generator, scale: float = 1.0) -> CategoricalPolicy:
    """Política softmax tabular exacta: sin capas ocultas sobre entradas one-hot."""
    net = Mlp((n_states, n_actions))
    net.set_flat(rng.normal(0.0, scale, size=net.n_params))
    return CategoricalPolicy(net)


def small_gaussian(rng: np.random.Generator, obs_dim: int = 3, act_dim: int = 2, hidden=(5,)) -> GaussianPolicy:
    policy = GaussianPolicy.init(obs_dim, act_dim, hidden, rng, out_scale=1.0)
    policy.log_std = rng.uniform(-1.0, 0.5, size=act_dim)
    return policy


def make_trajectory(rewards, costs, *, states=None, probs=None, truncated=False, terminal_last=False,
                    obs_dim: int = 1) -> Trajectory:
    """Trayectoria contigua sintética: estado t = [t] salvo que se pasen estados."""
    n = len(rewards)
    if states is None:
        states = [np.array([float(t)] * obs_dim) for t in range(n + 1)]
    probs = probs if probs is not None else [1.0] * n
    trs = [
        Transition(state=np.asarray(states[t], dtype=float), action=0, behavior_prob=probs[t],
                   reward=float(rewards[t]), cost=float(costs[t]), next_state=np.asarray(states[t + 1], dtype=float),
                   terminal=terminal_last and t == n - 1, step=t)
        for t in range(n)
    ]
    return Trajectory(trs, truncated=truncated)
