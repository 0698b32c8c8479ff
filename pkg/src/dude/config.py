"""TOML scenario and sweep files.

Scenario file::

    path_loss_exponent = 4.0
    bandwidth_hz = 20e6
    noise_power_dbm = -101.0      # optional, thermal floor at bandwidth_hz otherwise
    master_seed = 1

    [macro]
    tx_power_dbm = 46.0
    intensity_per_km2 = 1.0
    shadow_mean_db = 0.0          # optional
    shadow_std_db = 0.0           # optional

    [small]
    tx_power_dbm = 20.0
    density_ratio = 5.0           # lambda_S / lambda_M; or intensity_per_km2

    [device]
    tx_power_dbm = 20.0
    intensity_per_km2 = 1e4

    [window]                      # optional, auto-sized when absent
    shape = "disk"
    size_m = 4200.0               # radius (disk) or half-side (square)
    edge_policy = "guard_region"

Sweep file::

    variable = "density_ratio"    # density_ratio | small_power_dbm | alpha | grid_Q
    values = [1, 2, 5, 10, 15, 20]
    outputs = ["case_probs"]      # case_probs | distance_pdf | spectral_efficiency | throughput
    engines = ["analytic", "mc_ppp"]   # analytic | mc_ppp | mc_grid
    series_small_power_dbm = [20, 30]  # optional outer loop

    [mc]
    n_trials = 2000
    probes_per_trial = 50
    estimator_mode = "full_deployment"

    [grid]
    area_km2 = 100.0

Unknown keys are rejected so typos do not silently fall back to defaults.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError, ScenarioError
from .geometry import auto_window
from .model import (DeviceParams, Scenario, SimWindow, TierParams, dbm_to_watts, thermal_noise_watts,
                    validate_scenario)
from .montecarlo import McConfig

_TOP_KEYS = {"path_loss_exponent", "bandwidth_hz", "noise_power_dbm", "master_seed",
             "macro", "small", "device", "window"}
_TIER_KEYS = {"tx_power_dbm", "intensity_per_km2", "density_ratio", "shadow_mean_db", "shadow_std_db"}
_DEVICE_KEYS = {"tx_power_dbm", "intensity_per_km2"}
_WINDOW_KEYS = {"shape", "size_m", "edge_policy"}

VARIABLES = ("density_ratio", "small_power_dbm", "alpha", "grid_Q")
OUTPUTS = ("case_probs", "distance_pdf", "spectral_efficiency", "throughput")
ENGINES = ("analytic", "mc_ppp", "mc_grid")


class ScenarioFile(NamedTuple):
    scenario: Scenario
    auto_window: bool
    sha256: str


def _read(path) -> tuple[dict, str]:
    text = Path(path).read_text()
    try:
        return tomllib.loads(text), hashlib.sha256(text.encode()).hexdigest()
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _check_keys(table: dict, allowed: set, where: str, path) -> None:
    unknown = sorted(set(table) - allowed)
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) in {where}: {', '.join(unknown)}")


def _get(table, key, where, path, default=None, required=False):
    if key not in table:
        if required:
            raise ConfigError(f"{path}: missing required field {where}.{key}".replace(" .", " "))
        return default
    val = table[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{path}: field {where}.{key} must be a number, got {val!r}")
    return float(val)


def scenario_from_dict(cfg: dict, path="<config>") -> tuple[Scenario, bool]:
    _check_keys(cfg, _TOP_KEYS, "top level", path)
    for sec in ("macro", "small", "device"):
        if not isinstance(cfg.get(sec), dict):
            raise ConfigError(f"{path}: missing section [{sec}]")
    macro_t, small_t, dev_t = cfg["macro"], cfg["small"], cfg["device"]
    _check_keys(macro_t, _TIER_KEYS - {"density_ratio"}, "[macro]", path)
    _check_keys(small_t, _TIER_KEYS, "[small]", path)
    _check_keys(dev_t, _DEVICE_KEYS, "[device]", path)

    def tier(t, name, base_intensity=None):
        p = _get(t, "tx_power_dbm", name, path, required=True)
        if "density_ratio" in t and "intensity_per_km2" in t:
            raise ConfigError(f"{path}: {name} sets both density_ratio and intensity_per_km2")
        if "density_ratio" in t:
            lam = _get(t, "density_ratio", name, path) * base_intensity
        else:
            lam = _get(t, "intensity_per_km2", name, path, required=True)
        return TierParams.from_config(p, lam, _get(t, "shadow_mean_db", name, path, 0.0),
                                      _get(t, "shadow_std_db", name, path, 0.0))

    macro = tier(macro_t, "macro")
    small = tier(small_t, "small", base_intensity=macro.intensity * 1e6)
    device = DeviceParams.from_config(_get(dev_t, "tx_power_dbm", "device", path, required=True),
                                      _get(dev_t, "intensity_per_km2", "device", path, required=True))
    bandwidth = _get(cfg, "bandwidth_hz", "", path, 20e6)
    noise_dbm = _get(cfg, "noise_power_dbm", "", path)
    seed = cfg.get("master_seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError(f"{path}: master_seed must be an integer")
    s = Scenario(
        macro=macro, small=small, device=device,
        path_loss_exponent=_get(cfg, "path_loss_exponent", "", path, required=True),
        noise_power=thermal_noise_watts(bandwidth) if noise_dbm is None else dbm_to_watts(noise_dbm),
        bandwidth_hz=bandwidth, master_seed=seed,
    )
    auto = "window" not in cfg
    try:
        if auto:
            validate_scenario(s)
            s = s.replace(window=auto_window(s))
        else:
            w = cfg["window"]
            _check_keys(w, _WINDOW_KEYS, "[window]", path)
            s = s.replace(window=SimWindow(str(w.get("shape", "disk")),
                                           _get(w, "size_m", "window", path, required=True),
                                           str(w.get("edge_policy", "guard_region"))))
        validate_scenario(s)
    except ScenarioError as exc:
        raise ConfigError(f"{path}: invalid scenario: {exc}") from exc
    return s, auto


def load_scenario(path) -> ScenarioFile:
    cfg, digest = _read(path)
    s, auto = scenario_from_dict(cfg, path)
    return ScenarioFile(s, auto, digest)


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple
    outputs: tuple
    engines: tuple
    series_small_power_dbm: tuple | None = None
    mc: McConfig = field(default_factory=McConfig)
    grid_area_km2: float = 100.0
    quad_rel_tol: float | None = None

    def __post_init__(self):
        problems = []
        if self.variable not in VARIABLES:
            problems.append(f"variable must be one of {VARIABLES}, got {self.variable!r}")
        if not self.values:
            problems.append("values must be a non-empty list")
        if not self.outputs or any(o not in OUTPUTS for o in self.outputs):
            problems.append(f"outputs must be a non-empty subset of {OUTPUTS}")
        if not self.engines or any(e not in ENGINES for e in self.engines):
            problems.append(f"engines must be a non-empty subset of {ENGINES}")
        if "mc_grid" in self.engines and set(self.outputs) != {"case_probs"}:
            problems.append("engine mc_grid only supports the case_probs output")
        if self.variable == "grid_Q" and any(not 0 <= v <= 1 for v in self.values):
            problems.append("grid_Q values must lie in [0, 1]")
        if problems:
            raise ConfigError("; ".join(problems))


_SWEEP_KEYS = {"variable", "values", "outputs", "engines", "series_small_power_dbm", "mc", "grid", "quad_rel_tol"}
_MC_KEYS = {"n_trials", "probes_per_trial", "estimator_mode", "seed", "workers"}


def sweep_from_dict(cfg: dict, path="<sweep>") -> SweepSpec:
    _check_keys(cfg, _SWEEP_KEYS, "top level", path)
    mc_t = cfg.get("mc", {})
    _check_keys(mc_t, _MC_KEYS, "[mc]", path)
    grid_t = cfg.get("grid", {})
    _check_keys(grid_t, {"area_km2"}, "[grid]", path)
    try:
        mc = McConfig(**mc_t)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: [mc]: {exc}") from exc
    for key in ("values", "outputs", "engines"):
        if key not in cfg:
            raise ConfigError(f"{path}: missing required field {key}")
    series = cfg.get("series_small_power_dbm")
    try:
        return SweepSpec(
            variable=cfg.get("variable", ""),
            values=tuple(float(v) for v in cfg["values"]),
            outputs=tuple(cfg["outputs"]),
            engines=tuple(cfg["engines"]),
            series_small_power_dbm=tuple(float(v) for v in series) if series is not None else None,
            mc=mc,
            grid_area_km2=float(grid_t.get("area_km2", 100.0)),
            quad_rel_tol=cfg.get("quad_rel_tol"),
        )
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def load_sweep(path) -> SweepSpec:
    cfg, _ = _read(path)
    return sweep_from_dict(cfg, path)
