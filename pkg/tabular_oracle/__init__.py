"""
Public API for the `tabular_oracle` package.

Exact evaluation of values, advantages, state distributions, surrogates and the CVaR bounds
on finite CMDPs. Everything here is a pure function of immutable inputs.
"""

from __future__ import annotations

from .bounds import (cost_bound_check, cvar_bound_check, epsilons, reward_bound_check, square_bound_check,
                     trust_region_chain_check)
from .cvar import cvar_factor, empirical_cvar, gaussian_cvar, risk_level_for
from .exact import (discounted_dists, exact_J, exact_quantities, max_kl, max_tv, sample_cost_returns,
                    solve_square_values, solve_values, surrogate_J)
from .instances import OracleInstance, random_cmdp, random_instance, random_policy
from .suite import VerificationReport, run_verification
from .types import BoundCheck, Epsilons, ExactQuantities, OracleInputError, TabularCMDP, TabularPolicy

__all__ = [
    "TabularCMDP",
    "TabularPolicy",
    "ExactQuantities",
    "Epsilons",
    "BoundCheck",
    "OracleInputError",
    "solve_values",
    "solve_square_values",
    "discounted_dists",
    "exact_quantities",
    "exact_J",
    "surrogate_J",
    "sample_cost_returns",
    "max_tv",
    "max_kl",
    "cvar_factor",
    "gaussian_cvar",
    "empirical_cvar",
    "risk_level_for",
    "epsilons",
    "cvar_bound_check",
    "square_bound_check",
    "cost_bound_check",
    "reward_bound_check",
    "trust_region_chain_check",
    "OracleInstance",
    "random_cmdp",
    "random_policy",
    "random_instance",
    "VerificationReport",
    "run_verification",
]
