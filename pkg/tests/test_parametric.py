import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stochtrans.classes import is_sst
from stochtrans.exceptions import NoObservationsError
from stochtrans.generators import gen_bad_matrix, gen_parametric
from stochtrans.metrics import normalized_mse
from stochtrans.observation import sample_full, sample_partial
from stochtrans.parametric import (
    MleConfig,
    ParametricMLE,
    induce_matrix,
    lipschitz_zeta,
    mle_fit,
    mle_matrix_estimate,
    negative_log_likelihood,
    observed_pairs,
    project_weights,
)
from oracles import mle_slsqp, nll_direct, weight_projection_qp

seeds = st.integers(0, 2**32)

# five items, three pairs missing; weights frozen from an SLSQP fit of the direct likelihood
Y_FROZEN = np.array(
    [
        [np.nan, 1, 1, 0, 1],
        [0, np.nan, 1, 1, np.nan],
        [0, 0, np.nan, 1, 1],
        [1, 0, 0, np.nan, 0],
        [0, np.nan, 0, 1, np.nan],
    ]
)
W_FROZEN = {
    "gaussian": [0.52256678, 0.50325148, 0.0, -0.52256678, -0.50325148],
    "logistic": [0.97424261, 0.79742718, 0.0, -0.97424261, -0.79742718],
}


def test_two_items_box_binds():
    w = mle_fit(np.array([[0.5, 1.0], [0.0, 0.5]]), MleConfig("logistic"))
    np.testing.assert_allclose(w.w, [1, -1], atol=1e-9)
    M = induce_matrix(w, "logistic")
    assert M[0, 1] == pytest.approx(math.exp(2) / (1 + math.exp(2)))


def test_balanced_data_gives_zero():
    cyc = np.array([[0.5, 1, 0], [0, 0.5, 1], [1, 0, 0.5]])
    for cdf in ("gaussian", "logistic"):
        np.testing.assert_allclose(mle_fit(cyc, MleConfig(cdf)).w, 0, atol=1e-9)
    np.testing.assert_allclose(mle_fit(np.full((5, 5), 0.5)).w, 0, atol=1e-12)


@pytest.mark.parametrize("cdf", ["gaussian", "logistic"])
def test_frozen_partial_fit(cdf):
    w = mle_fit(Y_FROZEN, MleConfig(cdf, grad_tol=1e-10))
    np.testing.assert_allclose(w.w, W_FROZEN[cdf], atol=1e-5)


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("cdf", ["gaussian", "logistic"])
def test_matches_slsqp_oracle(seed, cdf):
    M, _ = gen_parametric(7, seed, cdf)
    Y = sample_partial(M, 0.8, seed)
    w_ref, f_ref = mle_slsqp(Y.outcomes, cdf)
    w = mle_fit(Y, MleConfig(cdf, grad_tol=1e-10))
    assert nll_direct(w.w, Y.outcomes, cdf) <= f_ref + 1e-7
    np.testing.assert_allclose(w.w, w_ref, atol=1e-4)


def test_objective_matches_direct():
    M, _ = gen_parametric(6, 1)
    Y = sample_full(M, 1)
    I, J, y, n = observed_pairs(Y)
    w = np.random.default_rng(0).uniform(-1, 1, 6)
    for cdf in ("gaussian", "logistic"):
        f, _ = negative_log_likelihood(w, I, J, y, cdf)
        y_full = Y.outcomes.copy()
        np.fill_diagonal(y_full, np.nan)
        assert f == pytest.approx(nll_direct(w, y_full, cdf))


@pytest.mark.parametrize("cdf", ["gaussian", "logistic"])
def test_gradient_finite_differences(cdf):
    rng = np.random.default_rng(11)
    M, _ = gen_parametric(15, 3, cdf)
    I, J, y, n = observed_pairs(sample_full(M, 4))
    h = 1e-5
    for _ in range(50):
        w = project_weights(rng.uniform(-1, 1, n))
        _, g = negative_log_likelihood(w, I, J, y, cdf)
        fd = np.empty(n)
        for k in range(n):
            e = np.zeros(n)
            e[k] = h
            fd[k] = (negative_log_likelihood(w + e, I, J, y, cdf)[0] - negative_log_likelihood(w - e, I, J, y, cdf)[0]) / (2 * h)
        assert np.linalg.norm(g - fd) / max(np.linalg.norm(fd), 1e-12) < 1e-4


def test_tail_stability():
    # outcomes contradicting a maximal gap stay finite under the probit link
    I, J, y = np.array([0]), np.array([1]), np.array([0.0])
    f, g = negative_log_likelihood(np.array([40.0, -40.0]), I, J, y, "gaussian")
    assert np.isfinite(f) and np.all(np.isfinite(g))


@given(st.integers(2, 40), seeds, st.floats(0.1, 5))
def test_projection_matches_qp(n, seed, scale):
    v = np.random.default_rng(seed).normal(0, scale, n)
    w = project_weights(v)
    assert abs(w.sum()) <= 1e-10
    assert np.max(np.abs(w)) <= 1 + 1e-12
    np.testing.assert_allclose(w, weight_projection_qp(v), atol=1e-6)


@given(st.integers(3, 60), seeds, st.sampled_from(["gaussian", "logistic"]), st.floats(0.2, 1.0))
def test_fit_feasible_and_monotone(n, seed, cdf, p):
    M, _ = gen_parametric(n, seed, cdf)
    Y = sample_partial(M, p, seed) if p < 1 else sample_full(M, seed)
    if Y.n_observed_pairs() == 0:
        return
    w, info = mle_fit(Y, MleConfig(cdf), return_info=True)
    assert abs(w.w.sum()) <= 1e-8
    assert np.max(np.abs(w.w)) <= 1 + 1e-12
    assert np.all(np.diff(info.trace) <= 1e-12)
    assert info.converged


def test_no_observations():
    Y = np.full((4, 4), np.nan)
    with pytest.raises(NoObservationsError):
        mle_fit(Y)


def test_weight_error_does_not_grow():
    def median_err(n):
        errs = []
        for s in range(20):
            M, w = gen_parametric(n, s)
            errs.append(np.sum((mle_fit(sample_full(M, 1000 + s)).w - w.w) ** 2))
        return np.median(errs)

    small, large = median_err(32), median_err(128)
    assert large <= 1.5 * small


@given(st.integers(2, 25), seeds, st.sampled_from(["gaussian", "logistic"]))
def test_induced_matrix_is_sst(n, seed, cdf):
    w = project_weights(np.random.default_rng(seed).uniform(-1, 1, n))
    assert is_sst(induce_matrix(w, cdf))


@given(st.integers(2, 30), seeds, st.sampled_from(["gaussian", "logistic"]), st.floats(1e-4, 1))
def test_lipschitz_bound(n, seed, cdf, scale):
    rng = np.random.default_rng(seed)
    w1 = project_weights(rng.uniform(-1, 1, n))
    w2 = project_weights(w1 + rng.normal(0, scale, n))
    z = lipschitz_zeta(cdf)
    lhs = np.sum((induce_matrix(w1, cdf).entries - induce_matrix(w2, cdf).entries) ** 2)
    assert lhs <= 2 * n * z**2 * np.sum((w1 - w2) ** 2) + 1e-15


@pytest.mark.parametrize("cdf", ["gaussian", "logistic"])
def test_lipschitz_constant_needs_factor_two(cdf):
    # sum_ij (d_i - d_j)^2 = 2n|d|^2 for centred d, so n * zeta^2 alone is too small
    n = 10
    d = np.zeros(n)
    d[0], d[1] = 1e-4, -1e-4
    lhs = np.sum((induce_matrix(d, cdf).entries - induce_matrix(np.zeros(n), cdf).entries) ** 2)
    ratio = lhs / (n * lipschitz_zeta(cdf) ** 2 * np.sum(d**2))
    assert ratio == pytest.approx(2.0, rel=1e-6)


def test_zeta_is_peak_on_doubled_range():
    for cdf in ("gaussian", "logistic"):
        from stochtrans.links import get_link

        grid = np.linspace(-2, 2, 4001)
        assert lipschitz_zeta(cdf) == pytest.approx(get_link(cdf).pdf(grid).max())


def test_matrix_estimate_and_estimator():
    M, _ = gen_parametric(40, 2)
    Y = sample_full(M, 5)
    A = mle_matrix_estimate(Y)
    est = ParametricMLE().fit(Y)
    np.testing.assert_allclose(est.matrix_, A.entries)
    assert est.converged_ and est.weights_.shape == (40,)
    assert normalized_mse(est.matrix_, M) < normalized_mse(np.full((40, 40), 0.5), M)


def test_bad_matrix_fit_is_sst_but_biased():
    B = gen_bad_matrix(16)
    est = ParametricMLE().fit(sample_full(B, 1))
    assert is_sst(est.matrix_)
    assert normalized_mse(est.matrix_, B) > 0
