from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.stats import norm

from tabular_oracle.cvar import cvar_factor, empirical_cvar, gaussian_cvar, risk_level_for
from tabular_oracle.types import OracleInputError


def test_alpha_one_is_the_expectation():
    assert cvar_factor(1.0) == 0.0
    assert gaussian_cvar(0.7, 5.0, 1.0) == 0.7


def test_half_tail_factor():
    assert gaussian_cvar(0.0, 1.0, 0.5) == pytest.approx(math.sqrt(2.0 / math.pi), rel=1e-12)


def test_risk_level_recipe():
    assert cvar_factor(0.125) == pytest.approx(norm.ppf(0.95), abs=0.01)
    assert risk_level_for(0.95) == pytest.approx(0.125, abs=2e-3)
    assert cvar_factor(risk_level_for(0.95)) == pytest.approx(norm.ppf(0.95), abs=1e-9)


def test_factor_decreases_with_tail_mass():
    ks = [cvar_factor(a) for a in (0.01, 0.05, 0.125, 0.25, 0.5, 0.9, 1.0)]
    assert all(a > b for a, b in zip(ks, ks[1:]))


def test_negative_variance_is_clamped():
    assert gaussian_cvar(1.0, 0.5, 0.25) == pytest.approx(1.0)
    assert gaussian_cvar(1.0, 0.5, 0.25, variance_floor=1e-8) == pytest.approx(1.0 + cvar_factor(0.25) * 1e-4)


@pytest.mark.parametrize("alpha", [0.0, -0.1, 1.5])
def test_bad_alpha_is_rejected(alpha):
    with pytest.raises(OracleInputError):
        cvar_factor(alpha)
    with pytest.raises(OracleInputError):
        empirical_cvar([1.0, 2.0], alpha)


def test_empirical_cvar_examples():
    assert empirical_cvar([3.0] * 10, 0.3) == pytest.approx(3.0)
    assert empirical_cvar([0.0, 2.0], 0.5) == pytest.approx(2.0)
    assert empirical_cvar([1.0, 2.0, 3.0, 4.0], 1.0) == pytest.approx(2.5)
    # cola fraccional: peor 0.3 de 10 muestras = media de las 3 mayores
    assert empirical_cvar(np.arange(10.0), 0.3) == pytest.approx(8.0)
    assert empirical_cvar(np.arange(10.0), 0.25) == pytest.approx((9 + 8 + 0.5 * 7) / 2.5)


def test_empirical_cvar_rejects_empty_or_too_few():
    with pytest.raises(OracleInputError):
        empirical_cvar([], 0.5)
    with pytest.raises(OracleInputError):
        empirical_cvar([1.0, 2.0], 0.125)


def test_empirical_matches_gaussian_on_gaussian_samples():
    rng = np.random.default_rng(0)
    mu, sd, alpha = 2.0, 0.5, 0.125
    x = rng.normal(mu, sd, size=1_000_000)
    emp = empirical_cvar(x, alpha)
    ref = gaussian_cvar(mu, sd * sd + mu * mu, alpha)
    # error estándar del estimador de la cola
    tail = np.sort(x)[-int(alpha * x.size):]
    se = tail.std() / math.sqrt(tail.size) + 1e-3 * sd
    assert abs(emp - ref) < 3 * se
