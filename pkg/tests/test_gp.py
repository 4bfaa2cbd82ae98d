import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpbandits import (InputError, KernelSpec, NumericalError, Observation, PosteriorState,
                       empty_posterior, posterior_mean, posterior_var, update)
from gpbandits.gp import JITTER
from gpbandits.kernels import cross_kernel

from oracles import dense_posterior

SE = KernelSpec("se", 0.4)
MAT = KernelSpec("matern", 0.5, 1.5)


def kfun(spec):
    return lambda A, B: cross_kernel(spec, A, B)


def random_data(rng, n, d, zero_frac=0.3):
    X = rng.random((n, d))
    y = rng.standard_normal(n)
    noise = rng.uniform(0, 2, n)
    noise[rng.random(n) < zero_frac] = 0.0
    return X, y, noise


def build(spec, X, y, noise, domain=None):
    s = PosteriorState(spec, domain=domain, capacity=2)
    for x, yi, lam2 in zip(X, y, noise):
        s.update(x, yi, lam2)
    return s


def test_empty_prior():
    s = empty_posterior(SE)
    for x in ([0.1], [0.9]):
        assert posterior_mean(s, x) == 0.0
        assert posterior_var(s, x) == 1.0


def test_single_noisy_observation():
    s = update(empty_posterior(SE), Observation([0.3], 2.0, 1.0))
    assert posterior_mean(s, [0.3]) == pytest.approx(1.0, abs=1e-9)
    assert posterior_var(s, [0.3]) == pytest.approx(0.5, abs=1e-9)


def test_single_noiseless_observation_interpolates():
    s = update(empty_posterior(SE), Observation([0.3], -1.7, 0.0))
    assert abs(posterior_mean(s, [0.3]) + 1.7) <= 1e-6
    assert posterior_var(s, [0.3]) <= 1e-6


def test_update_is_copy_on_write():
    s0 = empty_posterior(SE)
    s1 = update(s0, Observation([0.3], 1.0, 0.1))
    assert s0.n == 0 and s1.n == 1
    s2 = update(s1, Observation([0.6], 1.0, 0.1))
    assert s1.n == 1 and s2.n == 2
    assert posterior_var(s1, [0.6]) > posterior_var(s2, [0.6])


@pytest.mark.parametrize("n", [10, 25])
@pytest.mark.parametrize("spec", [SE, MAT], ids=["se", "matern"])
def test_matches_dense_oracle(n, spec):
    rng = np.random.default_rng(n)
    X, y, noise = random_data(rng, n, 2)
    Q = rng.random((20, 2))
    s = build(spec, X, y, noise)
    m_ref, v_ref = dense_posterior(kfun(spec), X, y, noise, Q)
    m, v = s.mean_var(Q)
    np.testing.assert_allclose(m, m_ref, rtol=1e-8, atol=1e-8)
    np.testing.assert_allclose(v, np.maximum(v_ref, 0), rtol=1e-8, atol=1e-8)


def test_domain_cache_matches_queries():
    rng = np.random.default_rng(3)
    D = rng.random((30, 2))
    X, y, noise = random_data(rng, 15, 2)
    s = PosteriorState(SE, domain=D, capacity=4)
    for x, yi, lam2 in zip(X, y, noise):
        s.update(x, yi, lam2)
    np.testing.assert_allclose(s.domain_mean(), s.mean(D), atol=1e-10)
    np.testing.assert_allclose(s.domain_var(), s.var(D), atol=1e-10)
    np.testing.assert_allclose(s.domain_mean_given(2 * y), 2 * s.domain_mean(), atol=1e-10)


def test_domain_index_shortcut_matches_solve():
    rng = np.random.default_rng(4)
    D = rng.random((12, 1))
    a = PosteriorState(SE, domain=D)
    b = PosteriorState(SE, domain=D)
    for i in [3, 7, 3, 0, 11]:
        a.update(D[i], float(i), 0.05, domain_index=i)
        b.update(D[i], float(i), 0.05)
    np.testing.assert_allclose(a.chol, b.chol, atol=1e-12)
    np.testing.assert_allclose(a.domain_mean(), b.domain_mean(), atol=1e-10)


def test_incremental_equals_batch_and_factor_reproduces_matrix():
    rng = np.random.default_rng(5)
    X, y, noise = random_data(rng, 40, 3)
    inc = build(SE, X, y, noise)
    bat = PosteriorState.from_data(SE, X, y, noise)
    Q = rng.random((20, 3))
    for a, b in zip(inc.mean_var(Q), bat.mean_var(Q)):
        np.testing.assert_allclose(a, b, atol=1e-8)
    A = cross_kernel(SE, X, X) + np.diag(noise) + JITTER * np.eye(40)
    L = inc.chol
    assert np.linalg.norm(L @ L.T - A) <= 1e-8 * np.linalg.norm(A)
    np.testing.assert_allclose(A @ inc.weights, y, atol=1e-6)


def test_observations_and_accessors():
    s = build(SE, np.array([[0.1], [0.2]]), [1.0, 2.0], [0.0, 0.5])
    obs = s.observations
    assert [o.y for o in obs] == [1.0, 2.0]
    assert s.noise_vars.tolist() == [0.0, 0.5]
    assert s.X.shape == (2, 1)


def test_mean_linear_in_y():
    rng = np.random.default_rng(6)
    X, y, noise = random_data(rng, 12, 2)
    Q = rng.random((10, 2))
    base = build(SE, X, y, noise).mean(Q)
    np.testing.assert_allclose(build(SE, X, 3.5 * y, noise).mean(Q), 3.5 * base, atol=1e-10)
    assert np.all(build(SE, X, 0 * y, noise).mean(Q) == 0)


def test_variance_independent_of_y():
    rng = np.random.default_rng(7)
    X, y, noise = random_data(rng, 12, 1)
    Q = rng.random((10, 1))
    np.testing.assert_array_equal(build(SE, X, y, noise).var(Q), build(SE, X, -y, noise).var(Q))


def test_variance_non_increasing_on_update():
    rng = np.random.default_rng(8)
    X, y, noise = random_data(rng, 20, 2)
    Q = rng.random((50, 2))
    s = PosteriorState(MAT)
    before = s.var(Q)
    for x, yi, lam2 in zip(X, y, noise):
        s.update(x, yi, lam2)
        after = s.var(Q)
        assert np.all(after <= before + 1e-9)
        before = after


def test_noise_monotonicity():
    rng = np.random.default_rng(9)
    X, y, noise = random_data(rng, 15, 2)
    Q = rng.random((30, 2))
    v_lo = build(SE, X, y, noise).var(Q)
    v_hi = build(SE, X, y, noise + rng.uniform(0, 1, 15)).var(Q)
    assert np.all(v_hi >= v_lo - 1e-9)


def test_noiseless_interpolation_at_distinct_points():
    X = np.linspace(0, 1, 8)[:, None]
    y = np.sin(6 * X[:, 0])
    s = build(SE, X, y, np.zeros(8))
    m, v = s.mean_var(X)
    assert np.max(np.abs(m - y)) <= 1e-5
    assert np.max(v) <= 1e-5


def test_duplicate_noiseless_points_stay_solvable():
    s = build(SE, np.array([[0.5], [0.5], [0.5]]), [1.0, 1.0, 1.0], [0.0, 0.0, 0.0])
    assert s.n == 3
    assert abs(posterior_mean(s, [0.5]) - 1.0) <= 1e-6
    assert posterior_var(s, [0.5]) <= 1e-6


def test_non_positive_pivot_raises_with_index():
    s = PosteriorState(SE, jitter=0.0)
    s.update([0.5], 1.0, 0.0)
    with pytest.raises(NumericalError) as exc:
        s.update([0.5], 1.0, 0.0)
    assert exc.value.pivot_index == 1


@pytest.mark.parametrize("bad", [
    dict(x=[0.1], y=float("nan"), noise_var=0.1),
    dict(x=[0.1], y=0.0, noise_var=-1.0),
    dict(x=[0.1, 0.2], y=0.0, noise_var=0.1),
])
def test_update_rejects_bad_input(bad):
    s = PosteriorState(SE)
    s.update([0.0], 0.0, 0.1)
    with pytest.raises(InputError):
        s.update(bad["x"], bad["y"], bad["noise_var"])


def test_observation_validates():
    with pytest.raises(InputError):
        Observation([0.0], 1.0, -0.5)
    with pytest.raises(InputError):
        Observation([0.0], float("inf"), 0.5)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 15))
    X, y, noise = random_data(rng, n, 2, zero_frac=0.0)
    noise += 1e-3
    perm = rng.permutation(n)
    Q = rng.random((10, 2))
    a = build(SE, X, y, noise).mean_var(Q)
    b = build(SE, X[perm], y[perm], noise[perm]).mean_var(Q)
    for u, v in zip(a, b):
        np.testing.assert_allclose(u, v, atol=1e-8)
