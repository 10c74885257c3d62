from __future__ import annotations

import pytest

from tabular_oracle.bounds import (cost_bound_check, cvar_bound_check, epsilons, reward_bound_check,
                                   square_bound_check, trust_region_chain_check)
from tabular_oracle.cvar import gaussian_cvar
from tabular_oracle.exact import exact_J
from tabular_oracle.instances import random_instance

ALPHAS = (0.125, 0.25, 0.5, 1.0)


def test_bounds_hold_on_random_triples(rng):
    for _ in range(60):
        inst = random_instance(rng)
        m, mu, pi, new = inst.cmdp, inst.mu, inst.pi, inst.pi_new
        for alpha in ALPHAS:
            assert cvar_bound_check(m, mu, pi, new, alpha).holds(1e-9)
        assert square_bound_check(m, mu, pi, new).holds(1e-9)
        assert cost_bound_check(m, mu, pi, new).holds(1e-9)
        assert reward_bound_check(m, mu, pi, new).holds(1e-9)
        assert trust_region_chain_check(mu, pi, new).holds(1e-12)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_cvar_bound_is_tight_when_policy_unchanged(rng, alpha):
    inst = random_instance(rng, same_policy=True)
    check = cvar_bound_check(inst.cmdp, inst.mu, inst.pi, inst.pi, alpha)
    assert abs(check.gap) <= 1e-9
    J = exact_J(inst.cmdp, inst.pi)
    assert check.lhs == pytest.approx(gaussian_cvar(J["J_C"], J["J_S"], alpha), abs=1e-12)


def test_everything_collapses_when_all_policies_equal(rng):
    inst = random_instance(rng, behavior_floor=0.0)
    m, pi = inst.cmdp, inst.pi
    check = cvar_bound_check(m, pi, pi, pi, 0.25)
    assert check.lhs == pytest.approx(check.rhs, abs=1e-12)
    sq = square_bound_check(m, pi, pi, pi)
    assert sq.lhs == pytest.approx(0.0, abs=1e-12)
    assert sq.rhs == 0.0


def test_epsilons_are_nonnegative(instance):
    eps = epsilons(instance.cmdp, instance.mu, instance.pi, instance.pi_new, 0.125)
    assert eps.eps_R >= 0.0 and eps.eps_C >= 0.0 and eps.eps_S >= 0.0
    assert eps.eps_cvar >= 0.0


def test_alpha_one_bound_is_the_cost_bound(instance):
    m, mu, pi, new = instance.cmdp, instance.mu, instance.pi, instance.pi_new
    cvar = cvar_bound_check(m, mu, pi, new, 1.0)
    cost = cost_bound_check(m, mu, pi, new)
    assert cvar.defined
    # con alpha = 1 la cota del CVaR es la cota de coste sin el valor absoluto
    assert cvar.gap >= cost.gap - 1e-12
