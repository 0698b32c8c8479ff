"""Domain types, unit conversions and scenario construction.

Internal units: powers in linear watts, lengths in meters, intensities per
square meter. Configuration uses dBm and per-km² and is converted on ingest.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

from .errors import ScenarioError

PER_KM2 = 1e-6  # per-km² -> per-m²
THERMAL_NOISE_DBM_PER_HZ = -174.0


def dbm_to_watts(p_dbm: float) -> float:
    p_dbm = float(p_dbm)
    if not math.isfinite(p_dbm):
        raise ValueError(f"power in dBm must be finite, got {p_dbm!r}")
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_w: float) -> float:
    p_w = float(p_w)
    if not (math.isfinite(p_w) and p_w > 0):
        raise ValueError(f"power in watts must be positive and finite, got {p_w!r}")
    return 10.0 * math.log10(p_w) + 30.0


def thermal_noise_watts(bandwidth_hz: float) -> float:
    return dbm_to_watts(THERMAL_NOISE_DBM_PER_HZ + 10.0 * math.log10(bandwidth_hz))


@dataclass(frozen=True)
class TierParams:
    """One BS tier. ``intensity`` is per m²; use :meth:`from_config` for dBm / per-km² input."""

    tx_power: float
    intensity: float
    shadow_mean_db: float = 0.0
    shadow_std_db: float = 0.0

    @classmethod
    def from_config(cls, tx_power_dbm, intensity_per_km2, shadow_mean_db=0.0, shadow_std_db=0.0):
        return cls(dbm_to_watts(tx_power_dbm), intensity_per_km2 * PER_KM2,
                   float(shadow_mean_db), float(shadow_std_db))


@dataclass(frozen=True)
class DeviceParams:
    tx_power: float
    intensity: float

    @classmethod
    def from_config(cls, tx_power_dbm, intensity_per_km2):
        return cls(dbm_to_watts(tx_power_dbm), intensity_per_km2 * PER_KM2)


@dataclass(frozen=True)
class SimWindow:
    shape: str = "disk"  # "disk" | "square"
    radius_or_halfside: float = 1000.0
    edge_policy: str = "guard_region"  # "guard_region" | "torus"

    @property
    def area(self) -> float:
        r = self.radius_or_halfside
        return math.pi * r * r if self.shape == "disk" else 4.0 * r * r


@dataclass(frozen=True)
class Scenario:
    macro: TierParams
    small: TierParams
    device: DeviceParams
    path_loss_exponent: float
    noise_power: float
    bandwidth_hz: float
    window: SimWindow = field(default_factory=SimWindow)
    master_seed: int = 0

    @property
    def alpha(self) -> float:
        return self.path_loss_exponent

    @property
    def power_ratio(self) -> float:
        """P_M / P_S."""
        return self.macro.tx_power / self.small.tx_power

    def replace(self, **changes) -> "Scenario":
        return replace(self, **changes)


class AssociationCase(enum.IntEnum):
    CASE1_MM = 1
    CASE2_MS = 2
    CASE3_SM = 3
    CASE4_SS = 4

    @classmethod
    def from_tiers(cls, dl_macro: bool, ul_macro: bool) -> "AssociationCase":
        if dl_macro:
            return cls.CASE1_MM if ul_macro else cls.CASE2_MS
        return cls.CASE3_SM if ul_macro else cls.CASE4_SS

    @property
    def dl_tier(self) -> str:
        return "macro" if self in (AssociationCase.CASE1_MM, AssociationCase.CASE2_MS) else "small"

    @property
    def ul_tier(self) -> str:
        return "macro" if self in (AssociationCase.CASE1_MM, AssociationCase.CASE3_SM) else "small"


class CaseProbabilities(NamedTuple):
    p1: float
    p2: float
    p3: float
    p4: float


class Estimate(NamedTuple):
    mean: float
    ci_halfwidth_95: float
    n_samples: int

    def contains(self, value, k=1.0) -> bool:
        return abs(self.mean - value) <= k * self.ci_halfwidth_95


def validate_scenario(s: Scenario) -> Scenario:
    """Check every scenario invariant and raise :class:`ScenarioError` listing all violations."""
    issues = []

    def num(x):
        return isinstance(x, (int, float)) and math.isfinite(x)

    alpha = s.path_loss_exponent
    if not num(alpha) or alpha <= 2.0:
        issues.append(("AlphaOutOfRange", f"path_loss_exponent must be > 2, got {alpha!r}"))
    for name, tier in (("macro", s.macro), ("small", s.small)):
        if not num(tier.tx_power) or tier.tx_power <= 0:
            issues.append(("NonPositivePower", f"{name}.tx_power must be > 0, got {tier.tx_power!r}"))
        if not num(tier.intensity) or tier.intensity < 0:
            issues.append(("NegativeIntensity", f"{name}.intensity must be >= 0, got {tier.intensity!r}"))
        if not num(tier.shadow_std_db) or tier.shadow_std_db < 0:
            issues.append(("NegativeShadowStd", f"{name}.shadow_std_db must be >= 0"))
        if not num(tier.shadow_mean_db):
            issues.append(("NonFiniteShadowMean", f"{name}.shadow_mean_db must be finite"))
    if num(s.macro.intensity) and num(s.small.intensity) and s.macro.intensity + s.small.intensity <= 0:
        issues.append(("NoBaseStations", "at least one BS tier needs positive intensity"))
    if not num(s.device.tx_power) or s.device.tx_power <= 0:
        issues.append(("NonPositivePower", f"device.tx_power must be > 0, got {s.device.tx_power!r}"))
    if not num(s.device.intensity) or s.device.intensity <= 0:
        issues.append(("NonPositiveDeviceIntensity", "device.intensity must be > 0"))
    if not num(s.noise_power) or s.noise_power < 0:
        issues.append(("NegativeNoise", f"noise_power must be >= 0, got {s.noise_power!r}"))
    if not num(s.bandwidth_hz) or s.bandwidth_hz <= 0:
        issues.append(("NonPositiveBandwidth", f"bandwidth_hz must be > 0, got {s.bandwidth_hz!r}"))
    w = s.window
    if not num(w.radius_or_halfside) or w.radius_or_halfside <= 0:
        issues.append(("EmptyWindow", f"window size must be > 0, got {w.radius_or_halfside!r}"))
    if w.shape not in ("disk", "square"):
        issues.append(("BadWindowShape", f"window shape must be 'disk' or 'square', got {w.shape!r}"))
    if w.edge_policy not in ("guard_region", "torus"):
        issues.append(("BadEdgePolicy", f"unknown edge policy {w.edge_policy!r}"))
    elif w.edge_policy == "torus" and w.shape != "square":
        issues.append(("BadEdgePolicy", "torus edge policy requires a square window"))
    if issues:
        raise ScenarioError(issues)
    return s


def make_scenario(
    small_power_dbm: float = 20.0,
    density_ratio: float = 1.0,
    alpha: float = 4.0,
    *,
    macro_power_dbm: float = 46.0,
    macro_intensity_km2: float = 1.0,
    device_power_dbm: float = 20.0,
    device_intensity_km2: float = 1e4,
    bandwidth_hz: float = 20e6,
    noise_power_dbm: float | None = None,
    macro_shadow=(0.0, 0.0),
    small_shadow=(0.0, 0.0),
    window: SimWindow | None = None,
    edge_policy: str = "guard_region",
    master_seed: int = 0,
) -> Scenario:
    """Build a validated two-tier scenario from figure-style parameters.

    ``density_ratio`` is lambda_S / lambda_M. Noise defaults to the thermal floor
    at ``bandwidth_hz``; the window is auto-sized unless given.
    """
    from .geometry import auto_window

    noise = thermal_noise_watts(bandwidth_hz) if noise_power_dbm is None else dbm_to_watts(noise_power_dbm)
    s = Scenario(
        macro=TierParams.from_config(macro_power_dbm, macro_intensity_km2, *macro_shadow),
        small=TierParams.from_config(small_power_dbm, density_ratio * macro_intensity_km2, *small_shadow),
        device=DeviceParams.from_config(device_power_dbm, device_intensity_km2),
        path_loss_exponent=float(alpha),
        noise_power=noise,
        bandwidth_hz=float(bandwidth_hz),
        master_seed=int(master_seed),
    )
    if window is None:
        validate_scenario(s)
        window = auto_window(s, edge_policy=edge_policy)
    return validate_scenario(s.replace(window=window))
