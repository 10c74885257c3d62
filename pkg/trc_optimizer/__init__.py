"""
Public API for the `trc_optimizer` package: on-policy cost estimates, retrace targets,
CVaR surrogates, the adaptive trust region and the LQCLP policy step.
"""

from __future__ import annotations

from .config import CVaRConfig, UpdateSettings
from .critics_update import update_critics
from .lqclp import line_search, recovery_step, solve_lqclp, trust_region_step
from .onpolicy import estimate_onpolicy_J
from .retrace import advantages, retrace_targets
from .surrogates import approx_cvar, cvar_grad, surrogate_values
from .trust_region import compute_delta_old, kl_hvp, mean_kl, trust_region_state
from .types import (LqclpSolution, NumericalAbort, PolicyBatch, RetraceTargets, SurrogateEstimates,
                    TrustRegionState, UpdateDiagnostics)
from .update import PolicyUpdateResult, policy_update

__all__ = [
    "CVaRConfig",
    "UpdateSettings",
    "estimate_onpolicy_J",
    "retrace_targets",
    "advantages",
    "surrogate_values",
    "approx_cvar",
    "cvar_grad",
    "compute_delta_old",
    "trust_region_state",
    "mean_kl",
    "kl_hvp",
    "solve_lqclp",
    "recovery_step",
    "trust_region_step",
    "line_search",
    "update_critics",
    "policy_update",
    "PolicyUpdateResult",
    "PolicyBatch",
    "RetraceTargets",
    "SurrogateEstimates",
    "TrustRegionState",
    "LqclpSolution",
    "UpdateDiagnostics",
    "NumericalAbort",
]
