from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Protocol

import gymnasium as gym
import numpy as np

from cmdp_core.costs import count_cv, episode_metrics
from cmdp_core.types import EpisodeMetrics, Trajectory, Transition

log = logging.getLogger(__name__)


class ActionSampler(Protocol):
    def sample(self, state: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray | int, float]:
        ...


@dataclass
class CollectResult:
    trajectories: list[Trajectory]
    finished: list[EpisodeMetrics]
    n_steps: int
    cv_count: int  # CVs de entrenamiento en esta recogida (episodios terminados o no)


@dataclass
class EnvRunner:
    """
    Mantiene un entorno vivo entre fases de recogida. Cada `collect` devuelve segmentos contiguos:
    episodios acabados y, al final, el trozo del episodio en curso (truncated=True, se hace
    bootstrap con el crítico). El episodio continúa en la siguiente llamada.
    """
    env: gym.Env
    seed: int
    _obs: np.ndarray | None = None
    _step: int = 0
    _episode: list[Transition] = field(default_factory=list)
    _n_resets: int = 0

    def _reset(self) -> None:
        self._obs, _ = self.env.reset(seed=self.seed + self._n_resets)
        self._n_resets += 1
        self._step = 0
        self._episode = []

    def collect(self, policy: ActionSampler, n_steps: int, rng: np.random.Generator) -> CollectResult:
        if self._obs is None:
            self._reset()

        trajectories: list[Trajectory] = []
        finished: list[EpisodeMetrics] = []
        segment: list[Transition] = []
        cvs = 0

        for _ in range(n_steps):
            state = np.asarray(self._obs, dtype=float)
            action, prob = policy.sample(state, rng)
            next_obs, reward, terminated, truncated, info = self.env.step(action)
            tr = Transition(
                state=state,
                action=action,
                behavior_prob=float(prob),
                reward=float(reward),
                cost=float(info.get("cost", 0.0)),
                next_state=np.asarray(next_obs, dtype=float),
                terminal=bool(terminated),
                step=self._step,
            )
            segment.append(tr)
            self._episode.append(tr)
            cvs += count_cv(tr)
            self._obs = next_obs
            self._step += 1

            if terminated or truncated:
                trajectories.append(Trajectory(segment, truncated=not terminated))
                finished.append(episode_metrics(Trajectory(self._episode, truncated=not terminated)))
                segment = []
                self._reset()

        if segment:
            trajectories.append(Trajectory(segment, truncated=True))

        return CollectResult(trajectories=trajectories, finished=finished, n_steps=n_steps, cv_count=cvs)


def run_episode(env: gym.Env, act, *, seed: int, max_steps: int | None = None) -> Trajectory:
    """
    Un episodio completo con `act(state) -> (action, prob)`. Usado en evaluación.
    """
    obs, _ = env.reset(seed=seed)
    transitions: list[Transition] = []
    step = 0
    while True:
        state = np.asarray(obs, dtype=float)
        action, prob = act(state)
        obs, reward, terminated, truncated, info = env.step(action)
        transitions.append(Transition(
            state=state, action=action, behavior_prob=float(prob), reward=float(reward),
            cost=float(info.get("cost", 0.0)), next_state=np.asarray(obs, dtype=float),
            terminal=bool(terminated), step=step,
        ))
        step += 1
        if terminated or truncated or (max_steps is not None and step >= max_steps):
            return Trajectory(transitions, truncated=not terminated)
