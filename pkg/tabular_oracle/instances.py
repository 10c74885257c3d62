from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from constants import BEHAVIOR_FLOOR
from tabular_oracle.types import TabularCMDP, TabularPolicy

DEFAULT_GAMMAS = (0.8, 0.9, 0.95)


@dataclass(frozen=True)
class OracleInstance:
    cmdp: TabularCMDP
    mu: TabularPolicy
    pi: TabularPolicy
    pi_new: TabularPolicy


def random_policy(rng: np.random.Generator, n_states: int, n_actions: int) -> TabularPolicy:
    return TabularPolicy(rng.dirichlet(np.ones(n_actions), size=n_states))


def random_cmdp(
        rng: np.random.Generator,
        *,
        gammas: Sequence[float] = DEFAULT_GAMMAS,
        max_states: int = 6,
        max_actions: int = 4,
        n_states: int | None = None,
        n_actions: int | None = None,
) -> TabularCMDP:
    """
    Filas de P Dirichlet(1), recompensas y costes uniformes en [0, 1], rho Dirichlet(1),
    gamma elegido de `gammas`.
    """
    nS = n_states if n_states is not None else int(rng.integers(2, max_states + 1))
    nA = n_actions if n_actions is not None else int(rng.integers(2, max_actions + 1))
    P = rng.dirichlet(np.ones(nS), size=(nS, nA))
    R = rng.uniform(0.0, 1.0, size=(nS, nA, nS))
    C = rng.uniform(0.0, 1.0, size=(nS, nA, nS))
    rho = rng.dirichlet(np.ones(nS))
    gamma = float(gammas[int(rng.integers(len(gammas)))])
    return TabularCMDP(P=P, R=R, C=C, rho=rho, gamma=gamma)


def random_instance(
        rng: np.random.Generator,
        *,
        gammas: Sequence[float] = DEFAULT_GAMMAS,
        same_policy: bool = False,
        behavior_floor: float = BEHAVIOR_FLOOR,
) -> OracleInstance:
    """Tripleta (mu, pi, pi') sobre un CMDP aleatorio. Con same_policy=True, pi' = pi."""
    m = random_cmdp(rng, gammas=gammas)
    mu = random_policy(rng, m.nS, m.nA).floored(behavior_floor)
    pi = random_policy(rng, m.nS, m.nA)
    pi_new = pi if same_policy else random_policy(rng, m.nS, m.nA)
    return OracleInstance(cmdp=m, mu=mu, pi=pi, pi_new=pi_new)
