"""
Public API for the `diff_engine` package: numpy networks with flat parameters, policy heads,
critics, gradient helpers, conjugate gradient and Adam.
"""

from __future__ import annotations

from .autodiff import grad, numerical_grad, relative_error
from .critics import CRITIC_NAMES, CriticSet
from .linalg import CGResult, conjugate_gradient
from .mlp import Mlp, NonFiniteError
from .optim import Adam
from .policies import CategoricalPolicy, CategoricalStats, GaussianPolicy, GaussianStats

__all__ = [
    "Mlp",
    "NonFiniteError",
    "GaussianPolicy",
    "GaussianStats",
    "CategoricalPolicy",
    "CategoricalStats",
    "CriticSet",
    "CRITIC_NAMES",
    "grad",
    "numerical_grad",
    "relative_error",
    "conjugate_gradient",
    "CGResult",
    "Adam",
]
