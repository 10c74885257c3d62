from __future__ import annotations

import math

import numpy as np
import pytest

from constants import LOG_STD_MAX
from diff_engine.autodiff import numerical_grad, relative_error
from diff_engine.mlp import Mlp
from diff_engine.policies import CategoricalPolicy, GaussianPolicy, GaussianStats
from helpers import small_gaussian, tabular_softmax


def _perturbed(policy, rng, scale=0.05):
    return policy.get_flat() + scale * rng.normal(size=policy.n_params)


# -----------------------------
# Gaussiana
# -----------------------------

def test_log_density_at_mean_with_unit_std():
    for d in (1, 3):
        st = GaussianStats(mean=np.zeros((1, d)), log_std=np.zeros(d))
        assert GaussianPolicy.log_density(st, np.zeros(d))[0] == pytest.approx(-0.5 * d * math.log(2 * math.pi))


def test_density_integrates_to_one():
    st = GaussianStats(mean=np.array([[0.3]]), log_std=np.array([-0.7]))
    grid = np.linspace(-6.0, 6.0, 20001)
    dens = np.exp(GaussianPolicy.log_density(GaussianStats(np.full((grid.size, 1), 0.3), st.log_std),
                                             grid[:, None]))
    assert np.trapezoid(dens, grid) == pytest.approx(1.0, abs=1e-3)


def test_sample_reports_its_density(rng):
    policy = small_gaussian(rng)
    s = rng.normal(size=3)
    a, prob = policy.sample(s, rng)
    assert prob == pytest.approx(float(np.exp(policy.log_prob(s, a)[0])))
    mean_action, _ = policy.act(s)
    assert np.all(np.abs(mean_action) <= 1.0)


def test_gaussian_log_prob_grad(rng):
    policy = small_gaussian(rng)
    states = rng.normal(size=(8, 3))
    actions = rng.normal(size=(8, 2))
    w = rng.uniform(0.1, 1.0, size=8)
    for _ in range(20):
        theta = _perturbed(policy, rng, 0.3)
        analytic = policy.log_prob_grad(states, actions, w, theta)
        numeric = numerical_grad(lambda t: float(np.sum(w * policy.log_prob(states, actions, t))), theta)
        assert relative_error(analytic, numeric) <= 1e-4


def test_kl_zero_at_same_parameters(rng):
    policy = small_gaussian(rng)
    states = rng.normal(size=(10, 3))
    old = policy.stats(states)
    assert policy.kl(states, old) == pytest.approx(0.0, abs=1e-14)


def test_kl_closed_form_for_shifted_means():
    old = GaussianStats(mean=np.zeros((2, 3)), log_std=np.zeros(3))
    shift = np.array([[0.1, -0.2, 0.3], [1.0, 0.0, 0.0]])
    new = GaussianStats(mean=shift, log_std=np.zeros(3))
    np.testing.assert_allclose(GaussianPolicy.kl_per_state(old, new), 0.5 * np.sum(shift ** 2, axis=1))


def test_kl_matches_monte_carlo():
    rng = np.random.default_rng(1)
    old = GaussianStats(mean=np.array([[0.2, -0.4]]), log_std=np.array([-0.3, 0.1]))
    new = GaussianStats(mean=np.array([[0.5, 0.0]]), log_std=np.array([0.0, -0.2]))
    n = 1_000_000
    a = old.mean + np.exp(old.log_std) * rng.standard_normal((n, 2))
    lr = (GaussianPolicy.log_density(GaussianStats(np.repeat(old.mean, n, 0), old.log_std), a)
          - GaussianPolicy.log_density(GaussianStats(np.repeat(new.mean, n, 0), new.log_std), a))
    exact = GaussianPolicy.kl_per_state(old, new)[0]
    assert abs(lr.mean() - exact) < 3 * lr.std() / math.sqrt(n)


def test_gaussian_kl_grad(rng):
    policy = small_gaussian(rng)
    states = rng.normal(size=(12, 3))
    old = policy.stats(states)
    for _ in range(20):
        theta = _perturbed(policy, rng, 0.2)
        analytic = policy.kl_grad(states, old, theta)
        numeric = numerical_grad(lambda t: policy.kl(states, old, t), theta)
        assert relative_error(analytic, numeric) <= 1e-4


@pytest.mark.parametrize("kind", ["gaussian", "categorical"])
def test_fisher_vector_product_matches_kl_hessian(rng, kind):
    if kind == "gaussian":
        policy = small_gaussian(rng)
        states = rng.normal(size=(15, 3))
    else:
        policy = CategoricalPolicy.init(3, 4, (6,), rng, out_scale=1.0)
        states = rng.normal(size=(15, 3))
    theta = policy.get_flat()
    old = policy.stats(states)
    h = 1e-5
    for _ in range(5):
        v = rng.normal(size=policy.n_params)
        fvp = policy.fisher_vector_product(states, v)
        fd = (policy.kl_grad(states, old, theta + h * v) - policy.kl_grad(states, old, theta - h * v)) / (2 * h)
        assert relative_error(fvp, fd) <= 1e-3


@pytest.mark.parametrize("kind", ["gaussian", "categorical"])
def test_fisher_vector_product_is_linear_and_psd(rng, kind):
    if kind == "gaussian":
        policy = small_gaussian(rng)
    else:
        policy = CategoricalPolicy.init(3, 4, (6,), rng, out_scale=1.0)
    states = rng.normal(size=(10, 3))
    np.testing.assert_array_equal(policy.fisher_vector_product(states, np.zeros(policy.n_params)), 0.0)
    for _ in range(10):
        v, w = rng.normal(size=(2, policy.n_params))
        fv = policy.fisher_vector_product(states, v)
        assert v @ fv >= -1e-12
        combo = policy.fisher_vector_product(states, 2.0 * v - 3.0 * w)
        np.testing.assert_allclose(combo, 2.0 * fv - 3.0 * policy.fisher_vector_product(states, w), atol=1e-10)


def test_log_std_is_clipped_and_its_gradient_masked(rng):
    policy = small_gaussian(rng, act_dim=1)
    theta = policy.get_flat()
    theta[-1] = LOG_STD_MAX + 1.0
    states = rng.normal(size=(4, 3))
    assert policy.stats(states, theta).log_std[0] == LOG_STD_MAX
    g = policy.log_prob_grad(states, rng.normal(size=(4, 1)), np.ones(4), theta)
    assert g[-1] == 0.0


def test_gaussian_flat_round_trip(rng):
    policy = small_gaussian(rng)
    theta = rng.normal(size=policy.n_params)
    policy.set_flat(theta)
    np.testing.assert_array_equal(policy.get_flat(), theta)
    np.testing.assert_array_equal(policy.log_std, theta[-2:])


# -----------------------------
# Categórica
# -----------------------------

def test_categorical_log_prob_grad(rng):
    policy = CategoricalPolicy.init(3, 4, (5,), rng, out_scale=1.0)
    states = rng.normal(size=(9, 3))
    actions = rng.integers(0, 4, size=9)
    w = rng.uniform(size=9)
    for _ in range(20):
        theta = _perturbed(policy, rng, 0.3)
        analytic = policy.log_prob_grad(states, actions, w, theta)
        numeric = numerical_grad(lambda t: float(np.sum(w * policy.log_prob(states, actions, t))), theta)
        assert relative_error(analytic, numeric) <= 1e-4


def test_categorical_kl_grad(rng):
    policy = CategoricalPolicy.init(3, 4, (5,), rng, out_scale=1.0)
    states = rng.normal(size=(9, 3))
    old = policy.stats(states)
    for _ in range(20):
        theta = _perturbed(policy, rng, 0.3)
        numeric = numerical_grad(lambda t: policy.kl(states, old, t), theta)
        assert relative_error(policy.kl_grad(states, old, theta), numeric) <= 1e-4


def test_tabular_softmax_policy(rng):
    policy = tabular_softmax(4, 3, rng)
    tab = policy.tabular(4)
    np.testing.assert_allclose(tab.pi.sum(axis=1), 1.0)
    W, b = policy.net.weights()[0]
    logits = W.T + b  # fila s = logits del estado s
    expected = np.exp(logits - logits.max(axis=1, keepdims=True))
    np.testing.assert_allclose(tab.pi, expected / expected.sum(axis=1, keepdims=True), atol=1e-14)


def test_categorical_sampling_frequencies(rng):
    policy = CategoricalPolicy(Mlp((1, 3)))
    theta = np.zeros(policy.n_params)
    theta[3:] = np.log([0.2, 0.3, 0.5])
    policy.set_flat(theta)
    draws = [policy.sample(np.zeros(1), rng)[0] for _ in range(20000)]
    freq = np.bincount(draws, minlength=3) / len(draws)
    np.testing.assert_allclose(freq, [0.2, 0.3, 0.5], atol=0.015)
    assert policy.act(np.zeros(1)) == (2, pytest.approx(0.5))
