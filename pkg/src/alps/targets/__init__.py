"""Target-distribution library and name-based construction for run configs."""

from __future__ import annotations

import numpy as np

from ..density import TargetDensity
from .gaussian import GaussianMixtureTarget, GaussianTarget
from .product import GaussianShape, IidProductTarget, SkewShape
from .skewnormal import SkewNormalMixtureTarget, benchmark_target
from .sur import (SurData, SurProfileTarget, load_grunfeld, load_sur_csv,
                  sur_gls_theta, sur_profile_loglik, sur_sigma_hat,
                  zellner_iterate)

__all__ = [
    "GaussianTarget", "GaussianMixtureTarget", "SkewNormalMixtureTarget",
    "benchmark_target", "IidProductTarget", "SkewShape", "GaussianShape",
    "SurData", "SurProfileTarget", "load_grunfeld", "load_sur_csv",
    "sur_sigma_hat", "sur_gls_theta", "sur_profile_loglik", "zellner_iterate",
    "build_target",
]


def build_target(name: str, params: dict | None = None) -> TargetDensity:
    """Construct a named target from a config parameter block."""
    params = dict(params or {})
    if name == "gaussian":
        return GaussianTarget(np.asarray(params["mu"], dtype=float),
                              np.asarray(params["sigma"], dtype=float))
    if name == "gaussian_mixture":
        return GaussianMixtureTarget(params["weights"], params["mus"],
                                     params["sigmas"])
    if name == "skew_normal_mixture_20d":
        return benchmark_target(dim=int(params.get("dim", 20)),
                                alpha=float(params.get("alpha", 10.0)))
    if name == "sur_grunfeld":
        data = load_grunfeld(first_years=params.get("first_years", 15))
        return SurProfileTarget(data)
    if name == "sur_csv":
        data = load_sur_csv(params["path"],
                            first_years=params.get("first_years"))
        return SurProfileTarget(data)
    if name == "iid_product_skew":
        shape = SkewShape(alpha=float(params.get("alpha", 2.0)))
        return IidProductTarget(shape, dim=int(params["dim"]),
                                beta=float(params.get("beta", 1.0)))
    raise ValueError(f"unknown target {name!r}")
