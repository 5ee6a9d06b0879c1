"""Within-temperature and between-temperature chain kernels.

Random-walk Metropolis with optional mode-local preconditioning,
standard and transformation-aided temperature swaps, and the
mode-leaping independence sampler driven by the registry's Gaussian
mixture.  All acceptance ratios are formed and compared in log space,
and every acceptance decision consumes exactly one uniform draw.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hat import gaussian_log_pdf_terms
from .linalg import LOG_2PI, logsumexp_1d
from .registry import RegistrySnapshot

LOCAL = "local"
LEAP = "leap"


@dataclass(frozen=True)
class TemperatureLadder:
    """Annealing schedule: beta_hot < 1 plus 1 = beta_0 < ... < beta_n."""

    beta_hot: float
    betas: np.ndarray

    def __post_init__(self):
        betas = np.asarray(self.betas, dtype=float)
        object.__setattr__(self, "betas", betas)
        if betas.ndim != 1 or betas.size < 1:
            raise ValueError("betas must be a non-empty vector")
        if betas[0] != 1.0:
            raise ValueError("betas[0] must equal 1")
        if np.any(np.diff(betas) <= 0):
            raise ValueError("betas must be strictly increasing")
        if not 0.0 < self.beta_hot < 1.0:
            raise ValueError("beta_hot must lie in (0, 1)")

    @property
    def n_levels(self) -> int:
        return self.betas.size


@dataclass
class LadderState:
    """Chain state (x_hot, x_0, ..., x_n) plus the snapshot version."""

    x_hot: np.ndarray
    xs: list
    registry_version: int = 0


@dataclass
class RwmConfig:
    step_scale: float = 1.0
    preconditioner: str = "none"       # "none" | "mode_local"
    hastings: str = "corrected"        # "corrected" | "frozen"

    def __post_init__(self):
        if self.step_scale <= 0:
            raise ValueError("step_scale must be positive")
        if self.preconditioner not in ("none", "mode_local"):
            raise ValueError(f"unknown preconditioner {self.preconditioner!r}")
        if self.hastings not in ("corrected", "frozen"):
            raise ValueError(f"unknown hastings variant {self.hastings!r}")


def _accept(log_ratio: float, u: float) -> bool:
    # NaN log-ratio (e.g. -inf minus -inf) compares false: auto-reject
    return bool(np.log(u) < log_ratio)


def _proposal_log_density(diff: np.ndarray, chol: np.ndarray, log_det: float,
                          scale: float) -> float:
    from scipy.linalg import solve_triangular
    d = diff.shape[0]
    z = solve_triangular(chol, diff, lower=True, check_finite=False) / scale
    return -0.5 * (d * LOG_2PI + log_det + 2.0 * d * np.log(scale)
                   + float(z @ z))


def rwm_core_alloc(x: np.ndarray, logp_x: float, target, cfg: RwmConfig,
                   rng: np.random.Generator, a_x: int | None = None):
    """One RWM step carrying the current allocation index.

    Returns (x', logp', a', accepted).  `a_x` is the known allocation of
    x at the target's temperature (None to compute it here); a' is the
    allocation of x', so repeated steps at one level evaluate each point
    against the registry exactly once.  Without mode-local
    preconditioning the allocation slots are None.
    """
    z = rng.standard_normal(x.shape[0])
    u = rng.random()
    if cfg.preconditioner != "mode_local":
        y = x + cfg.step_scale * z
        logp_y = target.log_density(y)
        if _accept(logp_y - logp_x, u):
            return y, logp_y, None, True
        return x, logp_x, None, False
    snapshot: RegistrySnapshot = target.snapshot
    if a_x is None:
        a_x = target.allocate_index(x)
    scale = cfg.step_scale / np.sqrt(target.beta)
    y = x + scale * (snapshot.chols[a_x] @ z)
    logp_y, a_y = target.value_and_alloc(y)
    log_ratio = logp_y - logp_x
    if (cfg.hastings == "corrected" and a_y != a_x
            and np.isfinite(logp_y)):
        # allocation changed: the frozen-L proposal is no longer
        # symmetric, so apply the Hastings correction
        diff = y - x
        fwd = _proposal_log_density(diff, snapshot.chols[a_x],
                                    snapshot.log_dets[a_x], scale)
        rev = _proposal_log_density(-diff, snapshot.chols[a_y],
                                    snapshot.log_dets[a_y], scale)
        log_ratio += rev - fwd
    if _accept(log_ratio, u):
        return y, logp_y, a_y, True
    return x, logp_x, a_x, False


def rwm_core(x: np.ndarray, logp_x: float, target, cfg: RwmConfig,
             rng: np.random.Generator):
    """One RWM step; returns (x', logp', accepted)."""
    x_new, logp_new, _, accepted = rwm_core_alloc(x, logp_x, target, cfg, rng)
    return x_new, logp_new, accepted


def rwm_step(x: np.ndarray, beta: float, target, cfg: RwmConfig,
             rng: np.random.Generator):
    """Spec-facing wrapper; returns (x', accepted)."""
    if getattr(target, "beta", beta) != beta:
        raise ValueError(f"target.beta {target.beta} does not match beta {beta}")
    x = np.asarray(x, dtype=float)
    x_new, _, accepted = rwm_core(x, target.log_density(x), target, cfg, rng)
    return x_new, accepted


def quanta_transform(x: np.ndarray, beta_from: float, beta_to: float,
                     mu: np.ndarray) -> np.ndarray:
    """Affine rescaling (beta_from/beta_to)^{1/2} (x - mu) + mu."""
    if beta_from <= 0 or beta_to <= 0:
        raise ValueError("temperatures must be positive")
    return np.sqrt(beta_from / beta_to) * (x - mu) + mu


@dataclass
class SwapResult:
    accepted: bool
    log_ratio: float
    x_low: np.ndarray
    x_high: np.ndarray
    logp_low: float
    logp_high: float


def quanta_swap_core(x_k: np.ndarray, x_k1: np.ndarray, logp_k: float,
                     logp_k1: float, target_k, target_k1,
                     snapshot: RegistrySnapshot,
                     rng: np.random.Generator) -> SwapResult:
    beta_k, beta_k1 = target_k.beta, target_k1.beta
    m1 = target_k.allocate_index(x_k)
    m2 = target_k1.allocate_index(x_k1)
    y_k = quanta_transform(x_k, beta_k, beta_k1, snapshot.mus[m1])
    y_k1 = quanta_transform(x_k1, beta_k1, beta_k, snapshot.mus[m2])
    u = rng.random()
    lp_yk_at_k1 = target_k1.log_density(y_k)
    lp_yk1_at_k = target_k.log_density(y_k1)
    log_ratio = (lp_yk_at_k1 + lp_yk1_at_k) - (logp_k + logp_k1)
    if _accept(log_ratio, u):
        return SwapResult(True, log_ratio, y_k1, y_k, lp_yk1_at_k, lp_yk_at_k1)
    return SwapResult(False, log_ratio, x_k, x_k1, logp_k, logp_k1)


def quanta_swap(state: LadderState, k: int, targets: list,
                snapshot: RegistrySnapshot, rng: np.random.Generator):
    """Transformation-aided swap between levels k and k+1.

    On acceptance level k holds the down-transformed cold state and
    level k+1 the up-transformed warm state.
    """
    if not 0 <= k <= len(state.xs) - 2:
        raise ValueError(f"swap index {k} out of range")
    res = quanta_swap_core(state.xs[k], state.xs[k + 1],
                           targets[k].log_density(state.xs[k]),
                           targets[k + 1].log_density(state.xs[k + 1]),
                           targets[k], targets[k + 1], snapshot, rng)
    state.xs[k] = res.x_low
    state.xs[k + 1] = res.x_high
    return state, res.accepted


def standard_swap_core(x_k: np.ndarray, x_k1: np.ndarray, logp_k: float,
                       logp_k1: float, target_k, target_k1,
                       rng: np.random.Generator) -> SwapResult:
    u = rng.random()
    lp_xk1_at_k = target_k.log_density(x_k1)
    lp_xk_at_k1 = target_k1.log_density(x_k)
    log_ratio = (lp_xk1_at_k + lp_xk_at_k1) - (logp_k + logp_k1)
    if _accept(log_ratio, u):
        return SwapResult(True, log_ratio, x_k1, x_k, lp_xk1_at_k, lp_xk_at_k1)
    return SwapResult(False, log_ratio, x_k, x_k1, logp_k, logp_k1)


def standard_swap(state: LadderState, k: int, targets: list,
                  rng: np.random.Generator):
    """Classic parallel-tempering exchange of levels k and k+1."""
    if not 0 <= k <= len(state.xs) - 2:
        raise ValueError(f"swap index {k} out of range")
    res = standard_swap_core(state.xs[k], state.xs[k + 1],
                             targets[k].log_density(state.xs[k]),
                             targets[k + 1].log_density(state.xs[k + 1]),
                             targets[k], targets[k + 1], rng)
    state.xs[k] = res.x_low
    state.xs[k + 1] = res.x_high
    return state, res.accepted


def mixture_propose(snapshot: RegistrySnapshot, beta: float,
                    rng: np.random.Generator) -> np.ndarray:
    """Draw from the registry's Laplace mixture at temperature beta."""
    if snapshot.n_modes == 0:
        raise ValueError("no modes discovered")
    u = rng.random()
    cum = np.cumsum(np.exp(snapshot.log_weights))
    j = int(np.searchsorted(cum, u * cum[-1]))
    j = min(j, snapshot.n_modes - 1)
    z = rng.standard_normal(snapshot.dim)
    return snapshot.mus[j] + (snapshot.chols[j] @ z) / np.sqrt(beta)


def mixture_log_density(snapshot: RegistrySnapshot, beta: float,
                        y: np.ndarray) -> float:
    if snapshot.n_modes == 0:
        raise ValueError("no modes discovered")
    qf = snapshot.quad_forms(np.asarray(y, dtype=float))
    return logsumexp_1d(snapshot.log_weights
                        + gaussian_log_pdf_terms(snapshot, qf, beta))


def leap_log_ratio(x: np.ndarray, y: np.ndarray, target,
                   snapshot: RegistrySnapshot, beta: float,
                   logp_x: float | None = None) -> float:
    """Independence-sampler log acceptance ratio for proposal y from x."""
    if logp_x is None:
        logp_x = target.log_density(x)
    logp_y = target.log_density(y)
    lq_x = mixture_log_density(snapshot, beta, x)
    lq_y = mixture_log_density(snapshot, beta, y)
    return (logp_y + lq_x) - (logp_x + lq_y)


def mode_leap_core(x: np.ndarray, logp_x: float, target,
                   snapshot: RegistrySnapshot, beta_max: float,
                   cfg: RwmConfig, rng: np.random.Generator):
    """Algorithm: coin-flip between a local RWM move and a mixture leap.

    Returns (x', logp', move_type, accepted).
    """
    if rng.random() < 0.5:
        x_new, logp_new, accepted = rwm_core(x, logp_x, target, cfg, rng)
        return x_new, logp_new, LOCAL, accepted
    y = mixture_propose(snapshot, beta_max, rng)
    u = rng.random()
    logp_y = target.log_density(y)
    lq_x = mixture_log_density(snapshot, beta_max, x)
    lq_y = mixture_log_density(snapshot, beta_max, y)
    log_ratio = (logp_y + lq_x) - (logp_x + lq_y)
    if _accept(log_ratio, u):
        return y, logp_y, LEAP, True
    return x, logp_x, LEAP, False


def mode_leap_step(x: np.ndarray, snapshot: RegistrySnapshot, beta_max: float,
                   target, cfg: RwmConfig, rng: np.random.Generator):
    """Spec-facing wrapper; returns (x', move_type, accepted)."""
    if target.beta != beta_max:
        raise ValueError(f"target.beta {target.beta} does not match {beta_max}")
    x = np.asarray(x, dtype=float)
    x_new, _, move_type, accepted = mode_leap_core(
        x, target.log_density(x), target, snapshot, beta_max, cfg, rng)
    return x_new, move_type, accepted
