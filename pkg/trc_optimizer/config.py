from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

from cmdp_core.types import RejectedInputError
from constants import (CG_ITERS, CG_TOL, COST_LIMIT, DAMPING, DISCOUNT, KL_TOLERANCE, LINE_SEARCH_STEPS,
                       RISK_LEVEL, TRACE_DECAY, TRUST_REGION_DELTA)
from tabular_oracle.cvar import cvar_factor

UpdateMode = Literal["offtrc", "unconstrained", "onpolicy_surrogate"]


@dataclass(frozen=True)
class CVaRConfig:
    """Restricción CVaR_alpha(C) <= d / (1 - gamma)."""
    alpha: float = RISK_LEVEL
    limit: float = COST_LIMIT  # d, por paso
    gamma: float = DISCOUNT
    k: float = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise RejectedInputError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 < self.gamma < 1.0:
            raise RejectedInputError(f"gamma must be in (0, 1), got {self.gamma}")
        if self.limit < 0.0:
            raise RejectedInputError(f"cost limit must be >= 0, got {self.limit}")
        object.__setattr__(self, "k", cvar_factor(self.alpha))

    @property
    def threshold(self) -> float:
        return self.limit / (1.0 - self.gamma)


@dataclass(frozen=True)
class UpdateSettings:
    cvar: CVaRConfig = field(default_factory=CVaRConfig)
    delta: float = TRUST_REGION_DELTA
    trace_decay: float = TRACE_DECAY
    mode: UpdateMode = "offtrc"
    damping: float = DAMPING
    cg_iters: int = CG_ITERS
    cg_tol: float = CG_TOL
    line_search_steps: int = LINE_SEARCH_STEPS
    kl_tolerance: float = KL_TOLERANCE

    @property
    def gamma(self) -> float:
        return self.cvar.gamma
