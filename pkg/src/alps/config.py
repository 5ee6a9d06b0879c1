"""Run configuration: strict JSON-compatible schema plus named presets.

Unknown keys anywhere in the document are errors (fail fast); the seed
is mandatory so no run ever depends on entropy.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np


class ConfigError(ValueError):
    pass


def _build(cls, obj: dict, path: str):
    """Instantiate a dataclass from a dict, rejecting unknown keys."""
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object, got {type(obj).__name__}")
    known = {f.name for f in fields(cls)}
    extra = set(obj) - known
    if extra:
        raise ConfigError(f"{path}: unknown key(s) {sorted(extra)}")
    return cls(**obj)


@dataclass
class TargetSpec:
    name: str
    params: dict = field(default_factory=dict)


@dataclass
class LadderConfig:
    betas: list
    beta_hot: Optional[float] = None

    def __post_init__(self):
        if not self.betas:
            raise ConfigError("ladder.betas must be non-empty")
        self.betas = [float(b) for b in self.betas]
        if any(b <= 0 for b in self.betas):
            raise ConfigError("ladder.betas must be positive")


@dataclass
class RwmSettings:
    step_scale: float | list = 1.0
    preconditioner: str = "none"      # "none" | "mode_local"
    hastings: str = "corrected"       # "corrected" | "frozen"
    tune: bool = False
    tune_target: float = 0.234

    def step_scales(self, n_levels: int) -> list:
        if isinstance(self.step_scale, (int, float)):
            return [float(self.step_scale)] * n_levels
        if len(self.step_scale) != n_levels:
            raise ConfigError(f"rwm.step_scale: expected {n_levels} entries, "
                              f"got {len(self.step_scale)}")
        return [float(s) for s in self.step_scale]


@dataclass
class TruncationSettings:
    enabled: bool = False
    level: float = 0.9999

    def __post_init__(self):
        if not 0.0 < self.level < 1.0:
            raise ConfigError("truncation.level must be in (0, 1)")


@dataclass
class ExplorationSettings:
    enabled: bool = True
    step_scale: float = 1.0
    n_hot_chains: int = 1
    refresh_from_modes: float = 0.0
    max_bootstrap_attempts: int = 2000

    def __post_init__(self):
        if self.step_scale <= 0 or self.n_hot_chains < 1:
            raise ConfigError("invalid exploration settings")
        if not 0.0 <= self.refresh_from_modes <= 1.0:
            raise ConfigError("exploration.refresh_from_modes must be a probability")


@dataclass
class RunConfig:
    target: TargetSpec
    ladder: LadderConfig
    seed: int
    v: int = 5
    s: Optional[int] = None
    swap_quanta_prob: float = 0.5
    swap_strategy: str = "uniform"    # "uniform" | "even_odd"
    rwm: RwmSettings = field(default_factory=RwmSettings)
    exploration: Optional[ExplorationSettings] = field(
        default_factory=ExplorationSettings)
    truncation: TruncationSettings = field(default_factory=TruncationSettings)
    total_target_samples: int = 10000
    burnin_samples: int = 0
    freeze_sweep: Optional[int] = None
    thinning: int = 10
    init: Optional[list] = None
    initial_modes: Optional[list] = None
    running_threshold: Optional[float] = None
    registry_tol: Optional[float] = None
    out_dir: Optional[str] = None

    def __post_init__(self):
        if self.seed is None or int(self.seed) < 0:
            raise ConfigError("seed must be a non-negative integer (no default)")
        self.seed = int(self.seed)
        if self.v < 1:
            raise ConfigError("v must be at least 1")
        if self.total_target_samples < 0 or self.burnin_samples < 0:
            raise ConfigError("sample counts must be non-negative")
        if self.thinning < 1:
            raise ConfigError("thinning must be at least 1")
        if not 0.0 <= self.swap_quanta_prob <= 1.0:
            raise ConfigError("swap_quanta_prob must be a probability")
        if self.swap_strategy not in ("uniform", "even_odd"):
            raise ConfigError("swap_strategy must be 'uniform' or 'even_odd'")
        if self.s is not None and self.s < 0:
            raise ConfigError("s must be non-negative")

    # Derived quantities -------------------------------------------------
    @property
    def n_levels(self) -> int:
        return len(self.ladder.betas)

    @property
    def n_swaps(self) -> int:
        if self.s is not None:
            return self.s
        return max(self.n_levels - 1, 1)

    @property
    def n_sweeps(self) -> int:
        return -(-self.total_target_samples // self.v)  # ceil division

    @property
    def burnin_sweeps(self) -> int:
        return -(-self.burnin_samples // self.v)

    @property
    def freeze_at_sweep(self) -> int:
        if self.freeze_sweep is not None:
            return self.freeze_sweep
        return self.burnin_sweeps

    @classmethod
    def from_dict(cls, obj: dict) -> "RunConfig":
        obj = copy.deepcopy(obj)
        if not isinstance(obj, dict):
            raise ConfigError("config root must be an object")
        known = {f.name for f in fields(cls)}
        extra = set(obj) - known
        if extra:
            raise ConfigError(f"unknown key(s) {sorted(extra)}")
        if "target" not in obj or "ladder" not in obj:
            raise ConfigError("config requires 'target' and 'ladder'")
        if "seed" not in obj:
            raise ConfigError("config requires 'seed' (no entropy default)")
        obj["target"] = _build(TargetSpec, obj["target"], "target")
        obj["ladder"] = _build(LadderConfig, obj["ladder"], "ladder")
        if obj.get("rwm") is not None:
            obj["rwm"] = _build(RwmSettings, obj["rwm"], "rwm")
        if obj.get("truncation") is not None:
            obj["truncation"] = _build(TruncationSettings, obj["truncation"],
                                       "truncation")
        if "exploration" in obj:
            if obj["exploration"] is None:
                pass
            else:
                obj["exploration"] = _build(ExplorationSettings,
                                            obj["exploration"], "exploration")
        try:
            return cls(**obj)
        except TypeError as err:
            raise ConfigError(str(err)) from err

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as err:
            raise ConfigError(f"invalid JSON: {err}") from err
        return cls.from_dict(obj)


def deep_merge(base: dict, override: dict) -> dict:
    """Recursive dict merge; scalars and lists in `override` win."""
    out = copy.deepcopy(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


# ---------------------------------------------------------------------------
# Named presets.  Benchmark sizes follow the published experiment; tests
# shrink them via overrides.

def _benchmark_preset() -> dict:
    return {
        "target": {"name": "skew_normal_mixture_20d", "params": {}},
        "ladder": {"beta_hot": 5e-6,
                   "betas": [1.0, 4.0, 16.0, 64.0, 256.0, 1024.0, 4096.0]},
        "seed": 1,
        "v": 5,
        "s": 6,
        "swap_quanta_prob": 0.5,
        "rwm": {"step_scale": 2.38 / np.sqrt(20.0),
                "preconditioner": "mode_local", "hastings": "corrected",
                "tune": True, "tune_target": 0.234},
        "exploration": {"enabled": True, "step_scale": 120.0,
                        "n_hot_chains": 1, "refresh_from_modes": 0.0},
        "truncation": {"enabled": False},
        "total_target_samples": 200000,
        "burnin_samples": 15000,
        "thinning": 10,
        "init": [20.0] * 20,
        "initial_modes": [[20.0] * 20],
        "running_threshold": 0.5,
    }


def _benchmark_pt_preset() -> dict:
    return {
        "target": {"name": "skew_normal_mixture_20d", "params": {}},
        "ladder": {"betas": [0.6 ** k for k in range(14)]},
        "seed": 1,
        "v": 5,
        "s": 13,
        "rwm": {"step_scale": [2.38 / np.sqrt(20.0 * 0.6 ** k)
                               for k in range(14)],
                "preconditioner": "none", "tune": True, "tune_target": 0.234},
        "exploration": None,
        "total_target_samples": 200000,
        "burnin_samples": 15000,
        "thinning": 10,
        "init": [20.0] * 20,
        "running_threshold": 0.5,
    }


def _benchmark_lais_preset() -> dict:
    return {
        "target": {"name": "skew_normal_mixture_20d", "params": {}},
        "ladder": {"beta_hot": 5e-6, "betas": [1.0]},
        "seed": 1,
        "v": 5,
        "s": 0,
        "rwm": {"step_scale": 2.38 / np.sqrt(20.0),
                "preconditioner": "mode_local", "hastings": "corrected",
                "tune": True, "tune_target": 0.234},
        "exploration": {"enabled": True, "step_scale": 120.0},
        "total_target_samples": 200000,
        "burnin_samples": 15000,
        "thinning": 10,
        "init": [20.0] * 20,
        "initial_modes": [[20.0] * 20],
        "running_threshold": 0.5,
    }


def _sur_grunfeld_preset() -> dict:
    return {
        "target": {"name": "sur_grunfeld", "params": {"first_years": 15}},
        "ladder": {"beta_hot": 0.067,
                   "betas": [1.00, 1.10, 1.40, 1.96, 2.74, 3.84, 5.38]},
        "seed": 1,
        "v": 5,
        "s": 6,
        "swap_quanta_prob": 0.5,
        "rwm": {"step_scale": 2.38 / np.sqrt(15.0),
                "preconditioner": "mode_local", "hastings": "corrected",
                "tune": True, "tune_target": 0.234},
        "exploration": {"enabled": True, "step_scale": 40.0,
                        "n_hot_chains": 1, "refresh_from_modes": 0.25},
        "truncation": {"enabled": True, "level": 0.9999},
        "total_target_samples": 20000,
        "burnin_samples": 2000,
        "thinning": 10,
        "init": None,
    }


def _sur_drton_preset() -> dict:
    # Bivariate two-mode example; requires a user-supplied CSV (the
    # 8-observation dataset is not bundled).
    return {
        "target": {"name": "sur_csv", "params": {"path": "drton.csv"}},
        "ladder": {"beta_hot": 0.5,
                   "betas": [1.0, float(np.sqrt(10.0)), 10.0]},
        "seed": 1,
        "v": 5,
        "s": 2,
        "rwm": {"step_scale": 1.0, "preconditioner": "mode_local",
                "hastings": "corrected", "tune": True},
        "exploration": {"enabled": True, "step_scale": 2.0},
        "truncation": {"enabled": True, "level": 0.9999},
        "total_target_samples": 20000,
        "burnin_samples": 2000,
        "init": None,
    }


PRESETS = {
    "synthetic-20d": _benchmark_preset,
    "synthetic-20d-pt": _benchmark_pt_preset,
    "synthetic-20d-lais": _benchmark_lais_preset,
    "sur-grunfeld": _sur_grunfeld_preset,
    "sur-drton": _sur_drton_preset,
}


def preset_dict(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: "
                          f"{sorted(PRESETS)}")
    return PRESETS[name]()


def load_config(preset: str | None = None, config_path: str | None = None,
                seed: int | None = None, out_dir: str | None = None) -> RunConfig:
    """Resolve preset + file + CLI overrides into a validated RunConfig."""
    base: dict = {}
    if preset is not None:
        base = preset_dict(preset)
    if config_path is not None:
        try:
            with open(config_path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as err:
            raise ConfigError(f"cannot read config file: {err}") from err
        try:
            override = json.loads(text)
        except json.JSONDecodeError as err:
            raise ConfigError(f"invalid JSON in {config_path}: {err}") from err
        if not isinstance(override, dict):
            raise ConfigError("config root must be an object")
        base = deep_merge(base, override)
    if not base:
        raise ConfigError("no configuration given (need --preset or --config)")
    if seed is not None:
        base["seed"] = seed
    if out_dir is not None:
        base["out_dir"] = out_dir
    return RunConfig.from_dict(base)
