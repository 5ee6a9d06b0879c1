import numpy as np
import pytest
from scipy.stats import multivariate_normal

from alps.linalg import (IndefiniteMatrixError, chol_lower, log_det_from_chol,
                         mvn_log_density, quad_form, sample_mvn, spd_solve)


def random_spd(rng, d):
    a = rng.standard_normal((d, d))
    return a @ a.T + d * np.eye(d)


def test_chol_lower_matches_numpy():
    rng = np.random.default_rng(0)
    for d in (1, 2, 5, 10):
        a = random_spd(rng, d)
        np.testing.assert_allclose(chol_lower(a), np.linalg.cholesky(a),
                                   rtol=1e-12, atol=1e-12)


def test_chol_lower_indefinite_raises_with_pivot():
    with pytest.raises(IndefiniteMatrixError) as exc:
        chol_lower(np.array([[1.0, 0.0], [0.0, -1.0]]))
    assert exc.value.pivot == 1


def test_log_det_from_chol():
    rng = np.random.default_rng(1)
    a = random_spd(rng, 4)
    chol = chol_lower(a)
    _, expected = np.linalg.slogdet(a)
    assert abs(log_det_from_chol(chol) - expected) < 1e-10


def test_quad_form_against_solve():
    rng = np.random.default_rng(2)
    a = random_spd(rng, 6)
    v = rng.standard_normal(6)
    expected = float(v @ np.linalg.solve(a, v))
    assert abs(quad_form(chol_lower(a), v) - expected) < 1e-10


def test_mvn_log_density_against_scipy():
    rng = np.random.default_rng(3)
    d = 5
    mu = rng.standard_normal(d)
    sigma = random_spd(rng, d)
    chol = chol_lower(sigma)
    log_det = log_det_from_chol(chol)
    for _ in range(20):
        x = rng.standard_normal(d) * 3
        expected = multivariate_normal.logpdf(x, mu, sigma)
        assert abs(mvn_log_density(x, mu, chol, log_det) - expected) < 1e-10


def test_sample_mvn_moments():
    rng = np.random.default_rng(4)
    mu = np.array([1.0, -2.0])
    sigma = np.array([[2.0, 0.6], [0.6, 1.0]])
    chol = chol_lower(sigma)
    draws = np.array([sample_mvn(mu, chol, rng) for _ in range(20000)])
    np.testing.assert_allclose(draws.mean(axis=0), mu, atol=0.05)
    np.testing.assert_allclose(np.cov(draws.T), sigma, atol=0.08)


def test_spd_solve():
    rng = np.random.default_rng(5)
    a = random_spd(rng, 7)
    b = rng.standard_normal(7)
    np.testing.assert_allclose(spd_solve(chol_lower(a), b),
                               np.linalg.solve(a, b), rtol=1e-9, atol=1e-9)
