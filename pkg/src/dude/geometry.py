"""Point-process sampling and nearest-distance laws.

Windows are centred on the origin. Disk windows have radius R, square
windows span [-h, h]^2. Under the guard-region policy probe devices live in
the inner half (radius R/2 or half-side h/2) while base stations fill the
whole window; under the torus policy (square only) distances wrap around.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyTier, MoreBSsThanDevices
from .model import Scenario, SimWindow, TierParams

LN10_OVER_5 = math.log(10.0) / 5.0


def effective_intensity(t: TierParams, alpha: float) -> float:
    """Intensity of the equivalent PPP after absorbing lognormal shadowing.

    lambda_eff = E[chi^(2/alpha)] * lambda with chi = 10^(X/10), X ~ N(mu, sigma^2).
    """
    m = LN10_OVER_5 * t.shadow_mean_db / alpha
    s = LN10_OVER_5 * t.shadow_std_db / alpha
    return math.exp(m + 0.5 * s * s) * t.intensity


def auto_window(s: Scenario, edge_policy: str = "guard_region", eps: float = 1e-6) -> SimWindow:
    """Window large enough that a probe has no BS of the sparser tier within
    the evaluation margin with probability below ``eps``.

    The margin is the guard width (R/2), so exp(-pi lam_min (R/2)^2) < eps.
    """
    lams = [effective_intensity(t, s.alpha) for t in (s.macro, s.small) if t.intensity > 0]
    margin = math.sqrt(math.log(1.0 / eps) / (math.pi * min(lams)))
    if edge_policy == "torus":
        return SimWindow("square", 2.0 * margin, "torus")
    return SimWindow("disk", 2.0 * margin, "guard_region")


def sample_ppp(intensity: float, window: SimWindow, rng: np.random.Generator) -> np.ndarray:
    """Homogeneous PPP on ``window``; returns an (n, 2) array in meters."""
    if intensity < 0:
        raise ValueError("intensity must be >= 0")
    if intensity == 0:
        return np.empty((0, 2))
    n = rng.poisson(intensity * window.area)
    return uniform_points(n, window, rng)


def uniform_points(n: int, window: SimWindow, rng: np.random.Generator, inner: bool = False) -> np.ndarray:
    """``n`` i.i.d. uniform points in the window, or in its evaluation region when ``inner``."""
    size = window.radius_or_halfside
    if inner and window.edge_policy == "guard_region":
        size = 0.5 * size
    if window.shape == "disk":
        r = size * np.sqrt(rng.random(n))
        theta = 2.0 * np.pi * rng.random(n)
        return np.column_stack((r * np.cos(theta), r * np.sin(theta)))
    return rng.uniform(-size, size, size=(n, 2))


@dataclass(frozen=True)
class Deployment:
    macro_points: np.ndarray
    small_points: np.ndarray
    device_points: np.ndarray
    window: SimWindow

    def __post_init__(self):
        for name in ("macro_points", "small_points", "device_points"):
            arr = np.array(getattr(self, name), dtype=float).reshape(-1, 2)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def sample_deployment(s: Scenario, rng: np.random.Generator, n_devices: int = 0) -> Deployment:
    """One PPP realisation of both BS tiers plus ``n_devices`` probe devices."""
    macro = sample_ppp(s.macro.intensity, s.window, rng)
    small = sample_ppp(s.small.intensity, s.window, rng)
    devices = uniform_points(n_devices, s.window, rng, inner=True)
    return Deployment(macro, small, devices, s.window)


@dataclass(frozen=True)
class GridSpec:
    n_bs_total: int
    area_km2: float
    prob_macro: float

    def __post_init__(self):
        if self.n_bs_total < 1:
            raise ValueError("n_bs_total must be >= 1")
        if not 0.0 <= self.prob_macro <= 1.0:
            raise ValueError("prob_macro must lie in [0, 1]")
        if self.area_km2 <= 0:
            raise ValueError("area_km2 must be > 0")

    @property
    def pitch(self) -> float:
        return math.sqrt(self.area_km2 * 1e6 / self.n_bs_total)

    @property
    def shape(self) -> tuple[int, int]:
        cols = math.ceil(math.sqrt(self.n_bs_total))
        return math.ceil(self.n_bs_total / cols), cols


def matched_grid(s: Scenario, area_km2: float) -> GridSpec:
    """Square grid with the PPP scenario's total BS density and macro share.

    The node count is rounded to a perfect square near ``lam * area_km2`` and
    the area adjusted so the density matches exactly (torus-friendly).
    """
    lam = s.macro.intensity + s.small.intensity
    side = max(1, round(math.sqrt(lam * area_km2 * 1e6)))
    n = side * side
    return GridSpec(n, n / lam * 1e-6, s.macro.intensity / lam)


def grid_lattice(g: GridSpec) -> tuple[np.ndarray, SimWindow]:
    """Row-major lattice of exactly ``n_bs_total`` nodes centred on the origin."""
    rows, cols = g.shape
    pitch = g.pitch
    idx = np.arange(g.n_bs_total)
    r, c = np.divmod(idx, cols)
    pts = np.column_stack(((c + 0.5) * pitch, (r + 0.5) * pitch))
    half = 0.5 * pitch * max(rows, cols)
    pts -= half
    complete = rows == cols and rows * cols == g.n_bs_total
    window = SimWindow("square", half, "torus" if complete else "guard_region")
    return pts, window


def sample_grid(g: GridSpec, rng: np.random.Generator) -> Deployment:
    """Lattice deployment with each node independently labelled macro w.p. Q."""
    pts, window = grid_lattice(g)
    is_macro = rng.random(len(pts)) < g.prob_macro
    return Deployment(pts[is_macro], pts[~is_macro], np.empty((0, 2)), window)


def displacements(points: np.ndarray, origins: np.ndarray, window: SimWindow | None = None) -> np.ndarray:
    """Distance matrix of shape (n_origins, n_points), wrapped on a torus window."""
    origins = np.atleast_2d(origins)
    d = origins[:, None, :] - np.asarray(points)[None, :, :]
    if window is not None and window.edge_policy == "torus":
        period = 2.0 * window.radius_or_halfside
        d -= period * np.round(d / period)
    return np.hypot(d[..., 0], d[..., 1])


def nearest_distance(points, origin=(0.0, 0.0), window: SimWindow | None = None) -> float:
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(points) == 0:
        raise EmptyTier("no points to measure a nearest distance against")
    return float(displacements(points, np.asarray(origin, dtype=float), window).min())


def nearest_distance_pdf(x, intensity: float):
    """Contact-distance density 2 pi lam x exp(-pi lam x^2), x >= 0."""
    x = np.asarray(x, dtype=float)
    out = 2.0 * np.pi * intensity * x * np.exp(-np.pi * intensity * x * x)
    out = np.where(x < 0, 0.0, out)
    return out if out.ndim else float(out)


def nearest_distance_cdf(x, intensity: float):
    x = np.asarray(x, dtype=float)
    out = np.where(x < 0, 0.0, -np.expm1(-np.pi * intensity * x * x))
    return out if out.ndim else float(out)


def sample_nearest_distance(intensity: float, size, rng: np.random.Generator) -> np.ndarray:
    """Draw contact distances by inverting the cdf (Rayleigh law)."""
    return np.sqrt(rng.standard_exponential(size) / (np.pi * intensity))


def thinning_probability(s: Scenario) -> float:
    """Fraction of devices that interfere on a resource block: (lam_M + lam_S) / lam_d."""
    bs = effective_intensity(s.macro, s.alpha) + effective_intensity(s.small, s.alpha)
    p = bs / s.device.intensity
    if p > 1.0 + 1e-12:
        raise MoreBSsThanDevices(f"BS intensity {bs:g} exceeds device intensity {s.device.intensity:g}")
    return min(p, 1.0)


def interferer_intensity(s: Scenario) -> float:
    return thinning_probability(s) * s.device.intensity


TIERS = ("macro", "small", "device")


def write_deployment_csv(dep: Deployment, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tier", "x_m", "y_m"])
        for tier, pts in zip(TIERS, (dep.macro_points, dep.small_points, dep.device_points)):
            for x, y in pts:
                w.writerow([tier, repr(float(x)), repr(float(y))])


def read_deployment_csv(path, window: SimWindow) -> Deployment:
    pts = {t: [] for t in TIERS}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            pts[row["tier"]].append((float(row["x_m"]), float(row["y_m"])))
    return Deployment(*(np.array(pts[t]).reshape(-1, 2) for t in TIERS), window)
