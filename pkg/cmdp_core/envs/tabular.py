from __future__ import annotations

import gymnasium as gym
import numpy as np
from gymnasium import spaces

from tabular_oracle.types import TabularCMDP


class TabularEnv(gym.Env):
    """
    CMDP finito con la API de gymnasium. Observación one-hot del estado, acción discreta.
    El coste va en info["cost"]. Sin estados terminales: los episodios se truncan en max_episode_steps.
    """

    metadata = {"render_modes": []}

    def __init__(self, cmdp: TabularCMDP, max_episode_steps: int = 200):
        self.cmdp = cmdp
        self.max_episode_steps = max_episode_steps
        self.observation_space = spaces.Box(0.0, 1.0, shape=(cmdp.nS,), dtype=np.float64)
        self.action_space = spaces.Discrete(cmdp.nA)
        self._s = 0
        self._t = 0

    def _obs(self) -> np.ndarray:
        o = np.zeros(self.cmdp.nS)
        o[self._s] = 1.0
        return o

    @property
    def state_index(self) -> int:
        return self._s

    def reset(self, *, seed: int | None = None, options: dict | None = None):
        super().reset(seed=seed)
        self._s = int(self.np_random.choice(self.cmdp.nS, p=self.cmdp.rho))
        self._t = 0
        return self._obs(), {"cost": 0.0}

    def step(self, action):
        a = int(action)
        s = self._s
        s_next = int(self.np_random.choice(self.cmdp.nS, p=self.cmdp.P[s, a]))
        reward = float(self.cmdp.R[s, a, s_next])
        cost = float(self.cmdp.C[s, a, s_next])
        self._s = s_next
        self._t += 1
        truncated = self._t >= self.max_episode_steps
        return self._obs(), reward, False, truncated, {"cost": cost}
