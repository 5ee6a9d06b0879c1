"""Cholesky-based linear algebra helpers.

Quadratic forms and Gaussian log-densities go through a stored lower
Cholesky factor: either a triangular solve, or (on hot paths that reuse
the same small factors many times) a cached triangular inverse applied
as a matrix-vector product.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular
from scipy.linalg.lapack import dpotrf

LOG_2PI = float(np.log(2.0 * np.pi))


class IndefiniteMatrixError(ValueError):
    """Cholesky factorization failed; `pivot` is the 0-based failing index."""

    def __init__(self, message: str, pivot: int):
        super().__init__(f"{message} (failing pivot index {pivot})")
        self.pivot = pivot


def chol_lower(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of a symmetric positive-definite matrix."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    c, info = dpotrf(a, lower=1, clean=1, overwrite_a=0)
    if info > 0:
        raise IndefiniteMatrixError("matrix is not positive definite", pivot=info - 1)
    if info < 0:
        raise ValueError(f"illegal value in Cholesky argument {-info}")
    return c


def log_det_from_chol(chol: np.ndarray) -> float:
    return float(2.0 * np.sum(np.log(np.diag(chol))))


def logsumexp_1d(a: np.ndarray) -> float:
    """logsumexp of a 1-d array without scipy's broadcasting machinery.

    The general scipy implementation costs more than the target density
    itself on the few-component arrays the kernels produce.
    """
    m = a.max()
    if not math.isfinite(m):
        return float(m)
    return float(m) + math.log(np.exp(a - m).sum())


def quad_form(chol: np.ndarray, v: np.ndarray) -> float:
    """v^T S^{-1} v where S = chol chol^T, via one triangular solve."""
    z = solve_triangular(chol, v, lower=True, check_finite=False)
    return float(z @ z)


def mvn_log_density(x: np.ndarray, mu: np.ndarray, chol: np.ndarray,
                    log_det: float | None = None) -> float:
    """Log density of N(mu, S) at x with S given by its Cholesky factor."""
    if log_det is None:
        log_det = log_det_from_chol(chol)
    d = mu.shape[0]
    q = quad_form(chol, x - mu)
    return -0.5 * (d * LOG_2PI + log_det + q)


def sample_mvn(mu: np.ndarray, chol: np.ndarray, rng: np.random.Generator,
               scale: float = 1.0) -> np.ndarray:
    z = rng.standard_normal(mu.shape[0])
    return mu + scale * (chol @ z)


def spd_solve(chol: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve S x = b for S = chol chol^T."""
    y = solve_triangular(chol, b, lower=True, check_finite=False)
    return solve_triangular(chol.T, y, lower=False, check_finite=False)
