"""
Entornos incluidos y selección por id de texto:
  - "pointnav"        -> PointNavEnv
  - "tabular:<seed>"  -> TabularEnv sobre un CMDP aleatorio generado con esa semilla
"""

from __future__ import annotations

import numpy as np

from cmdp_core.envs.collect import CollectResult, EnvRunner, run_episode
from cmdp_core.envs.pointnav import PointNavEnv
from cmdp_core.envs.tabular import TabularEnv
from cmdp_core.types import RejectedInputError
from tabular_oracle.instances import random_cmdp


def make_env(env_id: str, *, max_episode_steps: int | None = None):
    if env_id == "pointnav":
        kwargs = {} if max_episode_steps is None else {"max_episode_steps": max_episode_steps}
        return PointNavEnv(**kwargs)

    if env_id.startswith("tabular:"):
        try:
            seed = int(env_id.split(":", 1)[1])
        except ValueError as e:
            raise RejectedInputError(f"bad tabular env id {env_id!r}") from e
        cmdp = random_cmdp(np.random.default_rng(seed), gammas=(0.9,))
        kwargs = {} if max_episode_steps is None else {"max_episode_steps": max_episode_steps}
        return TabularEnv(cmdp, **kwargs)

    raise RejectedInputError(f"unknown env id {env_id!r}")


__all__ = [
    "make_env",
    "PointNavEnv",
    "TabularEnv",
    "EnvRunner",
    "CollectResult",
    "run_episode",
]
