"""Target-density abstraction consumed by every sampler in the package."""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from . import numdiff

Vector = np.ndarray


class TargetDensity:
    """Unnormalized log-density with optional analytic derivatives.

    `log_density` may return -inf where the density vanishes.  Evaluation
    must be pure: targets are shared across levels and, potentially,
    worker threads.
    """

    def __init__(self, dim: int,
                 log_density: Callable[[Vector], float],
                 gradient: Optional[Callable[[Vector], Vector]] = None,
                 hessian: Optional[Callable[[Vector], np.ndarray]] = None,
                 name: str = "target"):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = int(dim)
        self._log_density = log_density
        self._gradient = gradient
        self._hessian = hessian
        self.name = name

    def log_density(self, x: Vector) -> float:
        return float(self._log_density(np.asarray(x, dtype=float)))

    @property
    def has_gradient(self) -> bool:
        return self._gradient is not None

    @property
    def has_hessian(self) -> bool:
        return self._hessian is not None

    def gradient(self, x: Vector) -> Vector:
        x = np.asarray(x, dtype=float)
        if self._gradient is not None:
            return np.asarray(self._gradient(x), dtype=float)
        return numdiff.central_gradient(self.log_density, x)

    def hessian(self, x: Vector) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self._hessian is not None:
            h = np.asarray(self._hessian(x), dtype=float)
            return 0.5 * (h + h.T)
        return numdiff.central_hessian(self.log_density, x)


class PowerTarget:
    """Plain power-tempered density beta * log pi(x).

    Used by the parallel-tempering baseline and by the hot exploration
    chain, where no mode information is available.
    """

    def __init__(self, base: TargetDensity, beta: float):
        if beta <= 0:
            raise ValueError("beta must be positive")
        self.base = base
        self.beta = float(beta)
        self.dim = base.dim

    def log_density(self, x: Vector) -> float:
        return self.beta * self.base.log_density(x)


def check_gradient(target: TargetDensity, points: np.ndarray,
                   rel_tol: float = 1e-4) -> float:
    """Max relative error between analytic and central-difference gradients."""
    worst = 0.0
    for x in np.atleast_2d(points):
        g = target.gradient(x)
        g_fd = numdiff.central_gradient(target.log_density, x)
        scale = np.maximum(1.0, np.abs(g_fd))
        worst = max(worst, float(np.max(np.abs(g - g_fd) / scale)))
    if worst > rel_tol:
        raise AssertionError(f"gradient mismatch: max relative error {worst:.3e}")
    return worst
