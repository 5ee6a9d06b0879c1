"""Run orchestration: the annealed leap-point sampler and both baselines.

One sweep = v within-temperature RWM updates at levels 0..n-1, v
mode-leap updates at level n, s temperature-swap proposals, and one
exploration step.  Level-0 states are recorded after every level-0
update, so total_target_samples = v * sweeps.
"""

from __future__ import annotations

import logging
import time

import numpy as np

from . import outputs
from .config import ConfigError, RunConfig
from .density import TargetDensity
from .diagnostics import (HOT, LEAP, LEAP_LOCAL, RWM, SWAP_QUANTA,
                          SWAP_STANDARD, RunDiagnostics)
from .exploration import ExplorationConfig, hessian_at, hot_chain, mfind
from .hat import HatTarget, TruncatedHatTarget, chi2_quantile
from .kernels import (RwmConfig, mode_leap_core, quanta_swap_core, rwm_core,
                      rwm_core_alloc, standard_swap_core)
from .optimize import local_optimize
from .registry import (IndefiniteHessianError, ModeRegistry,
                       covariance_from_hessian, make_mode_info, try_insert)
from .rng import EXPLORE_STREAM, LEAP_STREAM, SWAP_STREAM, StreamFactory

logger = logging.getLogger(__name__)

_BOOTSTRAP_COUNTER_BASE = 1 << 62


class NumericalAbort(RuntimeError):
    """Target evaluation failed mid-run; message carries sweep context."""


class _StepTuner:
    """Robbins-Monro adaptation of log step scales toward a target rate."""

    def __init__(self, cfgs: list, target_rate: float, enabled: bool):
        self.cfgs = cfgs
        self.target_rate = target_rate
        self.enabled = enabled

    def update(self, level: int, rate: float, sweep: int) -> None:
        if not self.enabled or not np.isfinite(rate):
            return
        gamma = 1.0 / (1.0 + sweep) ** 0.6
        cfg = self.cfgs[level]
        cfg.step_scale = float(np.clip(
            np.exp(np.log(cfg.step_scale) + gamma * (rate - self.target_rate)),
            1e-8, 1e8))


def _initial_point(config: RunConfig, dim: int) -> np.ndarray:
    if config.init is None:
        return np.zeros(dim)
    x0 = np.asarray(config.init, dtype=float)
    if x0.shape != (dim,):
        raise ConfigError(f"init has shape {x0.shape}, expected ({dim},)")
    return x0


def _register_point_as_mode(point: np.ndarray, target: TargetDensity,
                            registry: ModeRegistry) -> bool:
    """Polish a candidate point and offer it to the registry."""
    mu, converged = local_optimize(np.asarray(point, dtype=float), target)
    if not converged:
        logger.warning("initial mode candidate did not converge; skipped")
        return False
    try:
        sigma, _, _ = covariance_from_hessian(hessian_at(target, mu))
    except (ValueError, IndefiniteHessianError) as err:
        logger.warning("initial mode candidate rejected: %s", err)
        return False
    info = make_mode_info(mu, sigma, target.log_density(mu))
    _, inserted = try_insert(registry, info)
    return inserted


def _exploration_config(config: RunConfig) -> ExplorationConfig | None:
    ec = config.exploration
    if ec is None or not ec.enabled:
        return None
    if config.ladder.beta_hot is None:
        raise ConfigError("exploration requires ladder.beta_hot")
    return ExplorationConfig(beta_hot=config.ladder.beta_hot, v=config.v,
                             step_scale=ec.step_scale,
                             n_hot_chains=ec.n_hot_chains,
                             refresh_from_modes=ec.refresh_from_modes)


def _bootstrap_registry(registry: ModeRegistry, target: TargetDensity,
                        ec_cfg: ExplorationConfig, hot_states: list,
                        factory: StreamFactory, diag: RunDiagnostics,
                        max_attempts: int) -> None:
    """Run exploration until at least one mode is registered."""
    for attempt in range(max_attempts):
        rng = factory.stream(EXPLORE_STREAM,
                             _BOOTSTRAP_COUNTER_BASE + attempt)
        chain = attempt % len(hot_states)
        record: dict = {}
        hot_states[chain], registry, found = mfind(
            hot_states[chain], registry, target, ec_cfg, rng,
            log_cb=record.update)
        diag.discovery_log.append({"sweep": -1, "iteration": attempt, **record})
        if found:
            diag.registry_events.append(
                {"sweep": -1, "version": registry.version,
                 "n_modes": registry.n_modes})
            return
    raise NumericalAbort(f"no modes discovered after {max_attempts} "
                         "bootstrap exploration attempts")


def _ladder_targets(base: TargetDensity, registry: ModeRegistry,
                    betas: np.ndarray, trunc_radius: float | None):
    snapshot = registry.snapshot()
    targets = []
    for beta in betas:
        level_target = HatTarget(base, snapshot, float(beta))
        if trunc_radius is not None and beta > 1.0:
            level_target = TruncatedHatTarget(level_target, trunc_radius)
        targets.append(level_target)
    return snapshot, targets


def _swap_schedule(strategy: str, n_pairs: int, n_swaps: int, sweep: int,
                   rng) -> list:
    """Pair indices for one sweep's swap phase.

    "uniform" draws each pair index independently; "even_odd" cycles
    deterministically through even-indexed then odd-indexed pairs,
    alternating the starting block between sweeps so neighbouring swaps
    compose into systematic up/down passes of the ladder.
    """
    if strategy == "uniform":
        return [int(rng.integers(0, n_pairs)) for _ in range(n_swaps)]
    even = list(range(0, n_pairs, 2))
    odd = list(range(1, n_pairs, 2))
    blocks = [even, odd] if sweep % 2 == 0 else [odd, even]
    out: list = []
    i = 0
    while len(out) < n_swaps:
        out.extend(blocks[i % 2] or blocks[(i + 1) % 2])
        i += 1
    return out[:n_swaps]


def _reset_nonfinite_levels(xs: list, logps: list, targets: list,
                            snapshot) -> None:
    # states stranded outside a (new) truncation region restart at the
    # dominant mode point, whose HAT value is finite at every level
    for k, lp in enumerate(logps):
        if not np.isfinite(lp):
            xs[k] = snapshot.mus[int(np.argmax(snapshot.log_weights))].copy()
            logps[k] = targets[k].log_density(xs[k])


def _exploration_phase(t: int, active: int, registry: ModeRegistry,
                       target: TargetDensity, ec_cfg: ExplorationConfig,
                       hot_states: list, hot_logps: list, hot_target,
                       hot_cfg: RwmConfig, rng_ec, diag: RunDiagnostics):
    """One sweep's exploration step; returns the (possibly grown) registry.

    Chain `active` runs a full mode search; every other chain takes
    v + 1 plain hot-temperature RWM updates (pass active = -1 once
    adaptation is frozen so no chain searches).
    """
    for c in range(len(hot_states)):
        if c == active:
            record: dict = {}
            hot_states[c], registry, found = mfind(
                hot_states[c], registry, target, ec_cfg, rng_ec,
                log_cb=record.update)
            hot_logps[c] = hot_target.log_density(hot_states[c])
            diag.discovery_log.append({"sweep": t, "iteration": c, **record})
            if found:
                diag.registry_events.append(
                    {"sweep": t, "version": registry.version,
                     "n_modes": registry.n_modes})
        else:
            for _ in range(ec_cfg.v + 1):
                hot_states[c], hot_logps[c], acc = rwm_core(
                    hot_states[c], hot_logps[c], hot_target, hot_cfg, rng_ec)
                diag.count(HOT, -1, acc)
    return registry


def alps_run(config: RunConfig, target: TargetDensity):
    """Annealed leap-point sampling; returns (level-0 samples, diagnostics)."""
    betas = np.asarray(config.ladder.betas, dtype=float)
    if betas[0] != 1.0 or np.any(np.diff(betas) <= 0):
        raise ConfigError("annealing ladder must start at 1 and increase")
    if config.out_dir:
        outputs.prepare_out_dir(config.out_dir)
    d = target.dim
    n = betas.size - 1
    diag = RunDiagnostics(dim=d)
    factory = StreamFactory(config.seed)
    registry = ModeRegistry(dim=d, tol=config.registry_tol)
    ec_cfg = _exploration_config(config)

    for point in config.initial_modes or []:
        _register_point_as_mode(np.asarray(point, dtype=float), target, registry)

    x0 = _initial_point(config, d)
    n_chains = ec_cfg.n_hot_chains if ec_cfg else 1
    hot_states = [x0.copy() for _ in range(n_chains)]
    if registry.n_modes == 0:
        if ec_cfg is None:
            raise ValueError("no modes discovered (registry empty and "
                             "exploration disabled)")
        max_attempts = (config.exploration.max_bootstrap_attempts
                        if config.exploration else 2000)
        _bootstrap_registry(registry, target, ec_cfg, hot_states, factory,
                            diag, max_attempts)

    trunc_radius = None
    if config.truncation and config.truncation.enabled:
        trunc_radius = chi2_quantile(config.truncation.level, d)

    hot_target = hot_cfg = None
    hot_logps: list = []
    if ec_cfg is not None:
        hot_target, hot_cfg = hot_chain(target, ec_cfg.beta_hot,
                                        ec_cfg.step_scale)
        hot_logps = [hot_target.log_density(s) for s in hot_states]

    snapshot, level_targets = _ladder_targets(target, registry, betas,
                                              trunc_radius)
    xs = [x0.copy() for _ in range(n + 1)]
    logps = [level_targets[k].log_density(xs[k]) for k in range(n + 1)]
    _reset_nonfinite_levels(xs, logps, level_targets, snapshot)

    rwm_cfgs = [RwmConfig(step_scale=s, preconditioner=config.rwm.preconditioner,
                          hastings=config.rwm.hastings)
                for s in config.rwm.step_scales(n + 1)]
    tuner = _StepTuner(rwm_cfgs, config.rwm.tune_target, config.rwm.tune)
    freeze = config.freeze_at_sweep
    n_sweeps = config.n_sweeps

    for t in range(n_sweeps):
        t_start = time.perf_counter()
        stage = "setup"
        try:
            if registry.version != snapshot.version:
                snapshot, level_targets = _ladder_targets(
                    target, registry, betas, trunc_radius)
                logps = [level_targets[k].log_density(xs[k])
                         for k in range(n + 1)]
                _reset_nonfinite_levels(xs, logps, level_targets, snapshot)

            for k in range(n):
                stage = f"rwm level {k}"
                rng = factory.level_stream(k, t)
                accepted = 0
                a_k = None  # allocation of xs[k], carried across the reps
                for _ in range(config.v):
                    xs[k], logps[k], a_k, acc = rwm_core_alloc(
                        xs[k], logps[k], level_targets[k], rwm_cfgs[k],
                        rng, a_k)
                    accepted += int(acc)
                    diag.count(RWM, k, acc)
                    if k == 0:
                        diag.record_sample(t, xs[0])
                if t < freeze:
                    tuner.update(k, accepted / config.v, t)

            stage = f"leap level {n}"
            rng_leap = factory.stream(LEAP_STREAM, t)
            for _ in range(config.v):
                xs[n], logps[n], move_type, acc = mode_leap_core(
                    xs[n], logps[n], level_targets[n], snapshot,
                    float(betas[n]), rwm_cfgs[n], rng_leap)
                diag.count(LEAP if move_type == "leap" else LEAP_LOCAL, n, acc)
                if n == 0:
                    diag.record_sample(t, xs[0])

            if n >= 1 and config.n_swaps > 0:
                stage = "swaps"
                rng_swap = factory.stream(SWAP_STREAM, t)
                for k in _swap_schedule(config.swap_strategy, n,
                                        config.n_swaps, t, rng_swap):
                    if rng_swap.random() < config.swap_quanta_prob:
                        res = quanta_swap_core(xs[k], xs[k + 1], logps[k],
                                               logps[k + 1], level_targets[k],
                                               level_targets[k + 1], snapshot,
                                               rng_swap)
                        diag.count(SWAP_QUANTA, k, res.accepted)
                    else:
                        res = standard_swap_core(xs[k], xs[k + 1], logps[k],
                                                 logps[k + 1], level_targets[k],
                                                 level_targets[k + 1], rng_swap)
                        diag.count(SWAP_STANDARD, k, res.accepted)
                    xs[k], xs[k + 1] = res.x_low, res.x_high
                    logps[k], logps[k + 1] = res.logp_low, res.logp_high

            if ec_cfg is not None:
                stage = "exploration"
                rng_ec = factory.stream(EXPLORE_STREAM, t)
                active = t % n_chains if t < freeze else -1
                registry = _exploration_phase(
                    t, active, registry, target, ec_cfg, hot_states,
                    hot_logps, hot_target, hot_cfg, rng_ec, diag)

            stage = "bookkeeping"
            diag.mode_visits_level0.append(level_targets[0].allocate_index(xs[0]))
            diag.mode_visits_top.append(level_targets[n].allocate_index(xs[n]))
        except (ValueError, FloatingPointError, np.linalg.LinAlgError) as err:
            raise NumericalAbort(f"sweep {t}, {stage}: {err}") from err
        diag.sweep_seconds += time.perf_counter() - t_start
        diag.n_sweeps += 1

    diag.tuned_step_scales = [cfg.step_scale for cfg in rwm_cfgs]
    diag.registry = registry
    samples = diag.samples_array()[:config.total_target_samples]
    return samples, diag


def _nearest_mode_index(x: np.ndarray, locations: np.ndarray) -> int:
    return int(np.argmin(np.sum((locations - x) ** 2, axis=1)))


def pt_run(config: RunConfig, target: TargetDensity):
    """Classic parallel tempering on power-tempered targets."""
    betas = np.asarray(config.ladder.betas, dtype=float)
    if betas[0] != 1.0 or (betas.size > 1 and np.any(np.diff(betas) >= 0)):
        raise ConfigError("tempering ladder must start at 1 and decrease")
    if config.out_dir:
        outputs.prepare_out_dir(config.out_dir)
    d = target.dim
    n = betas.size - 1
    diag = RunDiagnostics(dim=d)
    factory = StreamFactory(config.seed)

    class _Power:
        def __init__(self, beta):
            self.beta = float(beta)

        def log_density(self, x):
            return self.beta * target.log_density(x)

    level_targets = [_Power(b) for b in betas]
    x0 = _initial_point(config, d)
    xs = [x0.copy() for _ in range(n + 1)]
    logps = [level_targets[k].log_density(xs[k]) for k in range(n + 1)]
    rwm_cfgs = [RwmConfig(step_scale=s, preconditioner="none")
                for s in config.rwm.step_scales(n + 1)]
    tuner = _StepTuner(rwm_cfgs, config.rwm.tune_target, config.rwm.tune)
    freeze = config.freeze_at_sweep
    locations = getattr(target, "component_locations", None)

    for t in range(config.n_sweeps):
        t_start = time.perf_counter()
        stage = "setup"
        try:
            for k in range(n + 1):
                stage = f"rwm level {k}"
                rng = factory.level_stream(k, t)
                accepted = 0
                for _ in range(config.v):
                    xs[k], logps[k], _, acc = rwm_core_alloc(
                        xs[k], logps[k], level_targets[k], rwm_cfgs[k], rng)
                    accepted += int(acc)
                    diag.count(RWM, k, acc)
                    if k == 0:
                        diag.record_sample(t, xs[0])
                if t < freeze:
                    tuner.update(k, accepted / config.v, t)

            if n >= 1 and config.n_swaps > 0:
                stage = "swaps"
                rng_swap = factory.stream(SWAP_STREAM, t)
                for k in _swap_schedule(config.swap_strategy, n,
                                        config.n_swaps, t, rng_swap):
                    res = standard_swap_core(xs[k], xs[k + 1], logps[k],
                                             logps[k + 1], level_targets[k],
                                             level_targets[k + 1], rng_swap)
                    diag.count(SWAP_STANDARD, k, res.accepted)
                    xs[k], xs[k + 1] = res.x_low, res.x_high
                    logps[k], logps[k + 1] = res.logp_low, res.logp_high

            if locations is not None:
                diag.mode_visits_level0.append(
                    _nearest_mode_index(xs[0], locations))
                diag.mode_visits_top.append(
                    _nearest_mode_index(xs[n], locations))
        except (ValueError, FloatingPointError, np.linalg.LinAlgError) as err:
            raise NumericalAbort(f"sweep {t}, {stage}: {err}") from err
        diag.sweep_seconds += time.perf_counter() - t_start
        diag.n_sweeps += 1

    diag.tuned_step_scales = [cfg.step_scale for cfg in rwm_cfgs]
    samples = diag.samples_array()[:config.total_target_samples]
    return samples, diag


def lais_run(config: RunConfig, target: TargetDensity):
    """Laplace-mixture independence sampling at the target temperature.

    The non-annealing variant: exploration finds modes, and level 0
    alternates local RWM with mixture leaps driven by q at beta = 1.
    """
    betas = np.asarray(config.ladder.betas, dtype=float)
    if betas.size != 1 or betas[0] != 1.0:
        raise ConfigError("this sampler runs a single level at beta = 1")
    if config.out_dir:
        outputs.prepare_out_dir(config.out_dir)
    d = target.dim
    diag = RunDiagnostics(dim=d)
    factory = StreamFactory(config.seed)
    registry = ModeRegistry(dim=d, tol=config.registry_tol)
    ec_cfg = _exploration_config(config)

    for point in config.initial_modes or []:
        _register_point_as_mode(np.asarray(point, dtype=float), target, registry)

    x0 = _initial_point(config, d)
    n_chains = ec_cfg.n_hot_chains if ec_cfg else 1
    hot_states = [x0.copy() for _ in range(n_chains)]
    if registry.n_modes == 0:
        if ec_cfg is None:
            raise ValueError("no modes discovered (registry empty and "
                             "exploration disabled)")
        max_attempts = (config.exploration.max_bootstrap_attempts
                        if config.exploration else 2000)
        _bootstrap_registry(registry, target, ec_cfg, hot_states, factory,
                            diag, max_attempts)

    hot_target = hot_cfg = None
    hot_logps: list = []
    if ec_cfg is not None:
        hot_target, hot_cfg = hot_chain(target, ec_cfg.beta_hot,
                                        ec_cfg.step_scale)
        hot_logps = [hot_target.log_density(s) for s in hot_states]

    snapshot, level_targets = _ladder_targets(target, registry, betas, None)
    x = x0.copy()
    logp = level_targets[0].log_density(x)
    cfg0 = RwmConfig(step_scale=config.rwm.step_scales(1)[0],
                     preconditioner=config.rwm.preconditioner,
                     hastings=config.rwm.hastings)
    tuner = _StepTuner([cfg0], config.rwm.tune_target, config.rwm.tune)
    freeze = config.freeze_at_sweep

    for t in range(config.n_sweeps):
        t_start = time.perf_counter()
        stage = "setup"
        try:
            if registry.version != snapshot.version:
                snapshot, level_targets = _ladder_targets(target, registry,
                                                          betas, None)
                logp = level_targets[0].log_density(x)

            stage = "leap level 0"
            rng_leap = factory.stream(LEAP_STREAM, t)
            accepted_local = 0
            n_local = 0
            for _ in range(config.v):
                x, logp, move_type, acc = mode_leap_core(
                    x, logp, level_targets[0], snapshot, 1.0, cfg0, rng_leap)
                diag.count(LEAP if move_type == "leap" else LEAP_LOCAL, 0, acc)
                if move_type == "local":
                    accepted_local += int(acc)
                    n_local += 1
                diag.record_sample(t, x)
            if t < freeze and n_local:
                tuner.update(0, accepted_local / n_local, t)

            if ec_cfg is not None:
                stage = "exploration"
                rng_ec = factory.stream(EXPLORE_STREAM, t)
                active = t % n_chains if t < freeze else -1
                registry = _exploration_phase(
                    t, active, registry, target, ec_cfg, hot_states,
                    hot_logps, hot_target, hot_cfg, rng_ec, diag)

            stage = "bookkeeping"
            diag.mode_visits_level0.append(level_targets[0].allocate_index(x))
            diag.mode_visits_top.append(diag.mode_visits_level0[-1])
        except (ValueError, FloatingPointError, np.linalg.LinAlgError) as err:
            raise NumericalAbort(f"sweep {t}, {stage}: {err}") from err
        diag.sweep_seconds += time.perf_counter() - t_start
        diag.n_sweeps += 1

    diag.tuned_step_scales = [cfg0.step_scale]
    diag.registry = registry
    samples = diag.samples_array()[:config.total_target_samples]
    return samples, diag
