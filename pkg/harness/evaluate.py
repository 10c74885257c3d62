from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import gymnasium as gym
import numpy as np

from cmdp_core.costs import episode_metrics
from cmdp_core.envs import make_env, run_episode
from cmdp_core.types import EpisodeMetrics
from constants import DISCOUNT, EVAL_EPISODES
from harness.checkpoint import check_env_matches, load_checkpoint

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalReport:
    episodes: list[EpisodeMetrics]
    discounted_returns: list[float]
    discounted_costs: list[float]

    def _stat(self, values) -> tuple[float, float]:
        a = np.asarray(values, dtype=float)
        return float(a.mean()), float(a.std())

    @property
    def reward(self) -> tuple[float, float]:
        return self._stat([e.reward_sum for e in self.episodes])

    @property
    def cv(self) -> tuple[float, float]:
        return self._stat([e.cv_count for e in self.episodes])

    @property
    def cv_normalized(self) -> tuple[float, float]:
        return self._stat([e.cost_rate for e in self.episodes])

    @property
    def score(self) -> tuple[float, float]:
        return self._stat([e.score for e in self.episodes])

    @property
    def discounted_return(self) -> tuple[float, float]:
        return self._stat(self.discounted_returns)

    @property
    def discounted_cost(self) -> tuple[float, float]:
        return self._stat(self.discounted_costs)


def evaluate_policy(policy, env: gym.Env, episodes: int = EVAL_EPISODES, *, seed: int = 0,
                    stochastic: bool = False, gamma: float = DISCOUNT) -> EvalReport:
    """
    Episodios con la acción media (o muestreando si stochastic=True). El episodio i usa seed + i,
    así que misma política + misma semilla -> mismas métricas.
    """
    if episodes <= 0:
        raise ValueError(f"episodes must be > 0, got {episodes}")
    rng = np.random.default_rng(seed)
    act = (lambda s: policy.sample(s, rng)) if stochastic else policy.act

    metrics: list[EpisodeMetrics] = []
    returns: list[float] = []
    costs: list[float] = []
    for i in range(episodes):
        traj = run_episode(env, act, seed=seed + i)
        metrics.append(episode_metrics(traj))
        discount = gamma ** np.arange(len(traj))
        returns.append(float(np.sum(traj.rewards() * discount)))
        costs.append(float(np.sum(traj.costs() * discount)))
    return EvalReport(episodes=metrics, discounted_returns=returns, discounted_costs=costs)


def evaluate(checkpoint: str | Path, env_id: str | None = None, episodes: int = EVAL_EPISODES, *,
             seed: int = 0, stochastic: bool = False) -> EvalReport:
    meta, agent = load_checkpoint(checkpoint)
    env_id = env_id or meta.env
    env = make_env(env_id, max_episode_steps=meta.config.max_episode_steps)
    check_env_matches(meta, env_id, env)
    if isinstance(env.action_space, gym.spaces.Box):
        agent.policy.low = float(np.min(env.action_space.low))
        agent.policy.high = float(np.max(env.action_space.high))

    report = evaluate_policy(agent.policy, env, episodes, seed=seed, stochastic=stochastic, gamma=meta.config.gamma)
    log.info("evaluated %s on %s: score %.3f +- %.3f", checkpoint, env_id, *report.score)
    return report
