from __future__ import annotations

import gymnasium as gym
import numpy as np
from gymnasium import spaces

from cmdp_core.costs import COST_PRESETS, logistic_cost
from cmdp_core.types import CostFunctionSpec


class PointNavEnv(gym.Env):
    """
    Navegación de un punto hacia una meta en una arena 4x4 con obstáculos (análogo de escritorio
    de PointGoal1). Dinámica de doble integrador con rozamiento, acción = aceleración en [-1, 1]^2.

    Observación (18 dims): posición, velocidad, meta relativa (posición de la meta, no LIDAR)
    y posiciones relativas de los obstáculos ordenadas por distancia.
    Recompensa: progreso hacia la meta + bonus al alcanzarla (la meta se re-muestrea).
    Coste (info["cost"]): logístico de la distancia mínima a los obstáculos.
    """

    metadata = {"render_modes": []}

    half_size = 2.0
    dt = 0.1
    friction = 0.5
    max_speed = 2.0
    goal_radius = 0.3
    goal_bonus = 1.0
    min_spawn_gap = 0.5

    def __init__(self, n_obstacles: int = 6, max_episode_steps: int = 500,
                 cost_spec: CostFunctionSpec | None = None):
        self.n_obstacles = n_obstacles
        self.max_episode_steps = max_episode_steps
        self.cost_spec = cost_spec or COST_PRESETS["hazard"]
        obs_dim = 6 + 2 * n_obstacles
        self.observation_space = spaces.Box(-np.inf, np.inf, shape=(obs_dim,), dtype=np.float64)
        self.action_space = spaces.Box(-1.0, 1.0, shape=(2,), dtype=np.float64)

        self.pos = np.zeros(2)
        self.vel = np.zeros(2)
        self.goal = np.zeros(2)
        self.obstacles = np.zeros((n_obstacles, 2))
        self._t = 0

    # -----------------------------
    # Helpers
    # -----------------------------

    def _free_point(self, taken: list[np.ndarray]) -> np.ndarray:
        lim = self.half_size - 0.2
        for _ in range(1000):
            p = self.np_random.uniform(-lim, lim, size=2)
            if all(np.linalg.norm(p - q) >= self.min_spawn_gap for q in taken):
                return p
        return p

    def _sample_goal(self) -> None:
        self.goal = self._free_point([self.pos, *self.obstacles])

    def min_obstacle_distance(self) -> float:
        if self.n_obstacles == 0:
            return float("inf")
        return float(np.min(np.linalg.norm(self.obstacles - self.pos, axis=1)))

    def _cost(self) -> float:
        d = self.min_obstacle_distance()
        if not np.isfinite(d):
            return 0.0
        return logistic_cost(d, self.cost_spec)

    def _obs(self) -> np.ndarray:
        rel = self.obstacles - self.pos
        order = np.argsort(np.linalg.norm(rel, axis=1))
        return np.concatenate([self.pos, self.vel, self.goal - self.pos, rel[order].ravel()])

    # -----------------------------
    # API gymnasium
    # -----------------------------

    def reset(self, *, seed: int | None = None, options: dict | None = None):
        super().reset(seed=seed)
        taken: list[np.ndarray] = []
        obstacles = []
        for _ in range(self.n_obstacles):
            p = self._free_point(taken)
            taken.append(p)
            obstacles.append(p)
        self.obstacles = np.array(obstacles).reshape(self.n_obstacles, 2)
        self.pos = self._free_point(taken)
        self.vel = np.zeros(2)
        self._sample_goal()
        self._t = 0
        return self._obs(), {"cost": self._cost()}

    def step(self, action):
        a = np.clip(np.asarray(action, dtype=float).reshape(2), -1.0, 1.0)
        prev_dist = np.linalg.norm(self.goal - self.pos)

        self.vel = (1.0 - self.friction * self.dt) * self.vel + a * self.dt * 2.0
        speed = np.linalg.norm(self.vel)
        if speed > self.max_speed:
            self.vel *= self.max_speed / speed
        self.pos = self.pos + self.vel * self.dt

        # paredes: se recorta la posición y se anula la velocidad en ese eje
        for i in range(2):
            if abs(self.pos[i]) > self.half_size:
                self.pos[i] = np.sign(self.pos[i]) * self.half_size
                self.vel[i] = 0.0

        dist = np.linalg.norm(self.goal - self.pos)
        reward = float(prev_dist - dist)
        info = {"goal_reached": False}
        if dist <= self.goal_radius:
            reward += self.goal_bonus
            info["goal_reached"] = True
            self._sample_goal()

        info["cost"] = self._cost()
        self._t += 1
        truncated = self._t >= self.max_episode_steps
        return self._obs(), reward, False, truncated, info
