from __future__ import annotations

import logging
import math

from scipy.special import expit

from cmdp_core.types import (CostFunctionSpec, CostReturn, EpisodeMetrics, RejectedInputError,
                             Trajectory, Transition)
from constants import COM_HEIGHT_COST, CV_THRESHOLD, HAZARD_COST, TORSO_ANGLE_COST

log = logging.getLogger(__name__)


COST_PRESETS: dict[str, CostFunctionSpec] = {
    "hazard": CostFunctionSpec(*HAZARD_COST),
    "torso_angle": CostFunctionSpec(*TORSO_ANGLE_COST),
    "com_height": CostFunctionSpec(*COM_HEIGHT_COST),
}


def logistic_cost(x: float, spec: CostFunctionSpec) -> float:
    """
    Coste logístico en (0, 1).
      - distance: sigmoid(k (b - x)), penaliza distancias/alturas por debajo de b
      - angle:    sigmoid(k (|x| - b)), penaliza ángulos por encima de b
    """
    if spec.k <= 0:
        raise RejectedInputError(f"k must be > 0, got {spec.k}")
    if not math.isfinite(x):
        raise RejectedInputError(f"non-finite cost input: {x!r}")

    if spec.convention == "distance":
        z = spec.k * (spec.b - x)
    elif spec.convention == "angle":
        z = spec.k * (abs(x) - spec.b)
    else:
        raise RejectedInputError(f"unknown cost convention {spec.convention!r}")
    return float(expit(z))


def cost_return(traj: Trajectory, gamma: float) -> CostReturn:
    """Suma descontada sum_t gamma^t c_t. Si el episodio está truncado se marca como bootstrap."""
    if not 0.0 < gamma < 1.0:
        raise RejectedInputError(f"gamma must be in (0, 1), got {gamma}")
    if len(traj) == 0:
        log.warning("cost_return on an empty trajectory")
        return CostReturn(value=0.0, empty=True)

    total = 0.0
    disc = 1.0
    for t in traj:
        total += disc * t.cost
        disc *= gamma
    return CostReturn(value=total, bootstrapped=traj.truncated and not traj.terminated)


def count_cv(t: Transition | float) -> int:
    """1 si el coste del paso es >= 0.5 (umbral inclusivo)."""
    cost = t.cost if isinstance(t, Transition) else t
    return 1 if cost >= CV_THRESHOLD else 0


def score(reward_sum: float, cv_count: int) -> float:
    if cv_count < 0:
        raise RejectedInputError(f"cv_count must be >= 0, got {cv_count}")
    return reward_sum / (1.0 + cv_count)


def episode_metrics(traj: Trajectory) -> EpisodeMetrics:
    reward_sum = float(sum(t.reward for t in traj))
    cvs = sum(count_cv(t) for t in traj)
    length = len(traj)
    return EpisodeMetrics(
        reward_sum=reward_sum,
        cv_count=cvs,
        length=length,
        cost_rate=cvs / length if length else 0.0,
        score=score(reward_sum, cvs),
    )
