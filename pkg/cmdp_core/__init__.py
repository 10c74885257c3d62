"""
Public API for the `cmdp_core` package: experience records, cost and metric conventions,
and the replay buffer. Environments live in `cmdp_core.envs`.
"""

from __future__ import annotations

from .buffer import BatchSample, ReplayBuffer, buffer_append, sample_batch
from .costs import COST_PRESETS, cost_return, count_cv, episode_metrics, logistic_cost, score
from .types import (CostFunctionSpec, CostReturn, EpisodeMetrics, RejectedInputError, Trajectory,
                    Transition)

__all__ = [
    "Transition",
    "Trajectory",
    "CostFunctionSpec",
    "CostReturn",
    "EpisodeMetrics",
    "RejectedInputError",
    "ReplayBuffer",
    "BatchSample",
    "buffer_append",
    "sample_batch",
    "COST_PRESETS",
    "logistic_cost",
    "cost_return",
    "count_cv",
    "score",
    "episode_metrics",
]
