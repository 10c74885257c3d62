from __future__ import annotations

import math

import numpy as np

from tabular_oracle.cvar import cvar_factor, gaussian_cvar
from tabular_oracle.exact import exact_quantities, max_kl, max_tv, surrogate_J
from tabular_oracle.types import BoundCheck, Epsilons, TabularCMDP, TabularPolicy


def approx_cvar(surr: dict[str, float], alpha: float) -> float:
    """CVaR aproximado con las sustitutas; la varianza sustituta negativa se recorta a 0."""
    return gaussian_cvar(surr["J_C"], surr["J_S"], alpha)


def epsilons(m: TabularCMDP, mu: TabularPolicy, pi: TabularPolicy, pi_new: TabularPolicy, alpha: float) -> Epsilons:
    q = exact_quantities(m, pi)
    q_new = exact_quantities(m, pi_new)
    g = m.gamma
    eps_R = float(np.abs(q.A).max())
    eps_C = float(np.abs(q.A_C).max())
    eps_S = float(np.abs(q.A_S).max())

    dd = max_tv(mu, pi_new) * max_tv(pi, pi_new)
    cvar_bar = approx_cvar(surrogate_J(m, mu, pi, pi_new), alpha)
    numerator = ((4.0 * eps_C * g / (1.0 - g * g)) ** 2 * dd
                 + 8.0 * eps_C * g / (1.0 - g) ** 2 * q_new.J_C
                 + 2.0 * eps_S * g * g / (1.0 - g * g) ** 2)
    eps_cvar = numerator / cvar_bar if cvar_bar > 0.0 else math.inf
    return Epsilons(eps_R=eps_R, eps_C=eps_C, eps_S=eps_S, eps_cvar=eps_cvar)


def cvar_bound_check(m: TabularCMDP, mu: TabularPolicy, pi: TabularPolicy, pi_new: TabularPolicy,
                   alpha: float) -> BoundCheck:
    """
    lhs: CVaR gaussiano exacto de pi'.
    rhs: CVaR aproximado + (4 eps_C g/(1-g)^2 + eps_CVaR k_alpha) D(mu,pi') D(pi,pi').
    Si el CVaR aproximado no es positivo la cota no está definida (salvo alpha = 1, donde
    el término de eps_CVaR se anula).
    """
    q_new = exact_quantities(m, pi_new)
    g = m.gamma
    k = cvar_factor(alpha)
    eps = epsilons(m, mu, pi, pi_new, alpha)
    cvar_bar = approx_cvar(surrogate_J(m, mu, pi, pi_new), alpha)
    dd = max_tv(mu, pi_new) * max_tv(pi, pi_new)

    lhs = gaussian_cvar(q_new.J_C, q_new.J_S, alpha)
    defined = k == 0.0 or math.isfinite(eps.eps_cvar)
    coef = 4.0 * eps.eps_C * g / (1.0 - g) ** 2
    if k > 0.0 and defined:
        coef += eps.eps_cvar * k
    rhs = cvar_bar + coef * dd
    return BoundCheck(name="cvar_bound", lhs=lhs, rhs=rhs, defined=defined)


def square_bound_check(m: TabularCMDP, mu: TabularPolicy, pi: TabularPolicy, pi_new: TabularPolicy) -> BoundCheck:
    """|J_S(pi') - J_S^{mu,pi}(pi')| <= 2 eps_S g^2/(1-g^2)^2 D(mu,pi') D(pi,pi')."""
    q = exact_quantities(m, pi)
    q_new = exact_quantities(m, pi_new)
    g = m.gamma
    eps_S = float(np.abs(q.A_S).max())
    surr = surrogate_J(m, mu, pi, pi_new)
    dd = max_tv(mu, pi_new) * max_tv(pi, pi_new)
    return BoundCheck(
        name="square_bound",
        lhs=abs(q_new.J_S - surr["J_S"]),
        rhs=2.0 * eps_S * g * g / (1.0 - g * g) ** 2 * dd,
    )


def cost_bound_check(m: TabularCMDP, mu: TabularPolicy, pi: TabularPolicy, pi_new: TabularPolicy) -> BoundCheck:
    """|J_C(pi') - J_C^{mu,pi}(pi')| <= 4 eps_C g/(1-g)^2 D(mu,pi') D(pi,pi')."""
    q = exact_quantities(m, pi)
    q_new = exact_quantities(m, pi_new)
    g = m.gamma
    surr = surrogate_J(m, mu, pi, pi_new)
    dd = max_tv(mu, pi_new) * max_tv(pi, pi_new)
    return BoundCheck(
        name="cost_bound",
        lhs=abs(q_new.J_C - surr["J_C"]),
        rhs=4.0 * float(np.abs(q.A_C).max()) * g / (1.0 - g) ** 2 * dd,
    )


def reward_bound_check(m: TabularCMDP, mu: TabularPolicy, pi: TabularPolicy, pi_new: TabularPolicy) -> BoundCheck:
    """Cota de la sustituta del objetivo: |J(pi') - J^{mu,pi}(pi')| <= 4 eps_R g/(1-g)^2 D D."""
    q = exact_quantities(m, pi)
    q_new = exact_quantities(m, pi_new)
    g = m.gamma
    surr = surrogate_J(m, mu, pi, pi_new)
    dd = max_tv(mu, pi_new) * max_tv(pi, pi_new)
    return BoundCheck(
        name="reward_bound",
        lhs=abs(q_new.J - surr["J"]),
        rhs=4.0 * float(np.abs(q.A).max()) * g / (1.0 - g) ** 2 * dd,
    )


def trust_region_chain_check(mu: TabularPolicy, pi: TabularPolicy, pi_new: TabularPolicy) -> BoundCheck:
    """
    Pinsker + desigualdad triangular:
    D(mu,pi') D(pi,pi') <= maxKL(pi||pi') + sqrt(maxKL(mu||pi) maxKL(pi||pi')).
    """
    kl_step = max_kl(pi, pi_new)
    kl_old = max_kl(mu, pi)
    return BoundCheck(
        name="trust_region_chain",
        lhs=max_tv(mu, pi_new) * max_tv(pi, pi_new),
        rhs=kl_step + math.sqrt(kl_old * kl_step),
    )
