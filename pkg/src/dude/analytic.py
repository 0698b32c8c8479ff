"""Closed-form UL performance of Case-2 devices (DL from a macro, nearest BS a small cell).

Two policies are compared: ``"dude"`` serves the UL from the nearest small
cell, ``"drp"`` keeps the UL on the macro chosen by the DL rule. All
distances are in meters and intensities per m²; shadowing enters only
through the effective (displaced) intensities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import brentq

from .association import POLICIES, case_probabilities
from .errors import AlphaOutOfRange, Case2ProbabilityZero, InfiniteCapacity, PowerOrdering
from .geometry import effective_intensity, interferer_intensity, nearest_distance_pdf
from .model import PER_KM2, Scenario
from .quadrature import QuadResult, QuadSpec, integrate, interference_constant

LOG2_E = 1.0 / math.log(2.0)

OUTER_SPEC = QuadSpec(rel_tol=1e-8, abs_tol=1e-13, transform="none")
BRACKET_FLOOR = 1e-12  # outer truncation, relative to the peak of the distance law


class _Law(NamedTuple):
    lam_m: float
    lam_s: float
    c: float  # (P_M / P_S)^(2 / alpha)
    p2: float


def _law(s: Scenario) -> _Law:
    if s.macro.tx_power < s.small.tx_power:
        raise PowerOrdering("Case-2 analysis assumes P_M > P_S")
    p2 = case_probabilities(s).p2
    if not p2 > 0:
        raise Case2ProbabilityZero("Pr(Case 2) = 0; the conditional law is undefined")
    return _Law(effective_intensity(s.macro, s.alpha), effective_intensity(s.small, s.alpha),
                s.power_ratio ** (2.0 / s.alpha), p2)


def _check_policy(policy):
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}, got {policy!r}")


def _bracket(policy, x, law: _Law):
    """Unnormalised Case-2 density of the serving distance under ``policy``."""
    x = np.asarray(x, dtype=float)
    xx = x * x
    if policy == "dude":
        occupied = np.exp(-np.pi * law.lam_m * xx) - np.exp(-np.pi * law.lam_m * law.c * xx)
        return occupied * nearest_distance_pdf(x, law.lam_s)
    occupied = np.exp(-np.pi * law.lam_s / law.c * xx) - np.exp(-np.pi * law.lam_s * xx)
    return occupied * nearest_distance_pdf(x, law.lam_m)


def case2_pdf(policy: str, x, s: Scenario):
    """Density of the UL serving distance of a Case-2 device."""
    _check_policy(policy)
    law = _law(s)
    out = np.where(np.asarray(x) < 0, 0.0, _bracket(policy, x, law) / law.p2)
    return out if out.ndim else float(out)


def case2_ccdf(policy: str, x: float, s: Scenario, spec: QuadSpec = QuadSpec(rel_tol=1e-11)) -> float:
    """Pr(D > x | Case 2) by integrating the unnormalised density from x to infinity."""
    _check_policy(policy)
    law = _law(s)
    if x <= 0:
        return 1.0
    scale = 1.0 / math.sqrt(math.pi * (law.lam_m + law.lam_s))
    val = integrate(lambda u: _bracket(policy, u, law), x, math.inf, spec, scale=scale).value
    return min(1.0, max(0.0, val / law.p2))


def case2_ccdf_dude(x: float, s: Scenario) -> float:
    return case2_ccdf("dude", x, s)


def case2_cdf(policy: str, x, s: Scenario):
    """Vectorised closed form of 1 - ccdf.

    The Case-2 bracket is a difference of two Gaussian-in-x terms times a
    Rayleigh density, so its tail integrates to a difference of exponentials.
    """
    _check_policy(policy)
    law = _law(s)
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    xx = x * x
    if policy == "dude":
        a1, a2 = law.lam_s + law.lam_m, law.lam_s + law.c * law.lam_m
        tail = law.lam_s / a1 * np.exp(-np.pi * a1 * xx) - law.lam_s / a2 * np.exp(-np.pi * a2 * xx)
    else:
        a1, a2 = law.lam_m + law.lam_s / law.c, law.lam_m + law.lam_s
        tail = law.lam_m / a1 * np.exp(-np.pi * a1 * xx) - law.lam_m / a2 * np.exp(-np.pi * a2 * xx)
    out = np.where(x == 0, 0.0, np.clip(1.0 - tail / law.p2, 0.0, 1.0))
    return out if out.ndim else float(out)


def case2_mean_distance(policy: str, s: Scenario) -> float:
    """First moment of the Case-2 serving distance (closed form)."""
    _check_policy(policy)
    law = _law(s)
    if policy == "dude":
        a1, a2, w = law.lam_s + law.lam_m, law.lam_s + law.c * law.lam_m, law.lam_s
    else:
        a1, a2, w = law.lam_m + law.lam_s / law.c, law.lam_m + law.lam_s, law.lam_m
    # integral of exp(-pi a x^2) over [0, inf) is 1 / (2 sqrt(a))
    return (w / a1 / (2 * math.sqrt(a1)) - w / a2 / (2 * math.sqrt(a2))) / law.p2


@dataclass(frozen=True)
class Case2DistanceLaw:
    policy: str
    pdf: Callable
    ccdf: Callable
    mean: float


def case2_distance_law(policy: str, s: Scenario) -> Case2DistanceLaw:
    _check_policy(policy)
    return Case2DistanceLaw(
        policy,
        pdf=lambda x: case2_pdf(policy, x, s),
        ccdf=lambda x: 1.0 - case2_cdf(policy, x, s),
        mean=case2_mean_distance(policy, s),
    )


def laplace_functional_exponent(s_arg: float, scenario: Scenario) -> float:
    """log E[exp(-s I)] for the UL interference seen at the serving BS.

    Reduced form -pi lam_I s^(2/alpha) K(alpha); exp() of it is the Laplace functional.
    """
    if s_arg < 0:
        raise ValueError("s_arg must be >= 0")
    k = interference_constant(scenario.alpha)
    if s_arg == 0:
        return 0.0
    return -math.pi * interferer_intensity(scenario) * s_arg ** (2.0 / scenario.alpha) * k


def laplace_functional_exponent_quad(s_arg: float, scenario: Scenario,
                                     spec: QuadSpec = QuadSpec(rel_tol=1e-12, abs_tol=1e-300)) -> float:
    """Same exponent from the radial integral, without the K(alpha) reduction."""
    a = scenario.alpha
    if not a > 2:
        raise AlphaOutOfRange(f"alpha must be > 2, got {a!r}")
    if s_arg == 0:
        return 0.0
    # 1 - 1/(1 + s v^-a) == s / (v^a + s), written to stay finite at v = 0
    f = lambda v: s_arg / (v ** a + s_arg) * v
    val = integrate(f, 0.0, math.inf, spec, scale=s_arg ** (1.0 / a)).value
    return -2.0 * math.pi * interferer_intensity(scenario) * val


def laplace_functional(s_arg: float, scenario: Scenario) -> float:
    return math.exp(laplace_functional_exponent(s_arg, scenario))


def _inner_t_integral(a_int, b_noise, alpha, spec: QuadSpec) -> QuadResult:
    """Integral over t of exp(-a (e^t - 1)^(2/alpha) - b (e^t - 1)), truncated at integrand < abs_tol."""
    if a_int == 0 and b_noise == 0:
        raise InfiniteCapacity("no interference and no noise: spectral efficiency diverges")
    level = math.log(1.0 / spec.abs_tol)
    expo = lambda x: a_int * x ** (2.0 / alpha) + b_noise * x  # noqa: E731
    hi = min((level / a_int) ** (alpha / 2.0) if a_int > 0 else math.inf,
             level / b_noise if b_noise > 0 else math.inf)
    x_star = brentq(lambda x: expo(x) - level, 0.0, hi, xtol=1e-14 * hi, rtol=1e-14) if expo(hi) > level else hi
    t_max = math.log1p(x_star)

    def g(t):
        x = np.expm1(t)
        return np.exp(-a_int * x ** (2.0 / alpha) - b_noise * x)

    res = integrate(g, 0.0, t_max, spec)
    # past t_max the exponent grows at rate >= (2/alpha) * level
    return QuadResult(res.value, res.error + spec.abs_tol * alpha / (2.0 * level))


def _outer_limit(policy, law: _Law) -> float:
    rate = law.lam_s + law.lam_m if policy == "dude" else law.lam_m + law.lam_s / law.c
    y = 1.0 / math.sqrt(math.pi * rate)
    grid = np.linspace(0.0, 4.0 * y, 401)[1:]
    peak = float(np.max(_bracket(policy, grid, law)))
    while float(_bracket(policy, y, law)) > BRACKET_FLOOR * peak:
        y *= 1.25
    return y


def spectral_efficiency_case2(policy: str, s: Scenario, spec: QuadSpec = OUTER_SPEC) -> QuadResult:
    """E[log2(1 + SINR_UL)] of a Case-2 device as a nested integral (outer y, inner t).

    The error estimate combines both quadrature levels and the truncation tails.
    """
    _check_policy(policy)
    law = _law(s)
    a = s.alpha
    k = interference_constant(a)
    lam_i = interferer_intensity(s)
    noise_ratio = s.noise_power / s.device.tx_power
    if lam_i == 0 and noise_ratio == 0:
        raise InfiniteCapacity("no interference and no noise: spectral efficiency diverges")
    inner_spec = spec.tighter(10.0)
    inner_err = [0.0]

    def outer(yv):
        out = np.empty_like(yv)
        for i, y in enumerate(yv):
            if y <= 0:
                out[i] = 0.0
                continue
            r = _inner_t_integral(math.pi * lam_i * k * y * y, y ** a * noise_ratio, a, inner_spec)
            out[i] = r.value
            inner_err[0] = max(inner_err[0], r.error)
        return out * _bracket(policy, yv, law)

    y_max = _outer_limit(policy, law)
    res = integrate(outer, 0.0, y_max, spec)
    scale = LOG2_E / law.p2
    # inner errors are weighted by a probability mass of at most p2
    err = (res.error + inner_err[0] * law.p2) * scale
    return QuadResult(res.value * scale, err)


REFERENCE_AREA_M2 = 1.0 / PER_KM2  # 1 km²


class ThroughputContext(NamedTuple):
    n_devices_avg: float
    n_bs_avg: float
    n_macro_avg: float
    n_a_dude: float
    n_a_drp: float

    def devices_per_server(self, policy: str) -> float:
        return self.n_a_dude if policy == "dude" else self.n_a_drp


def throughput_context(s: Scenario) -> ThroughputContext:
    """Average devices sharing a serving BS, from counts over a 1 km² reference area."""
    n_d = s.device.intensity * REFERENCE_AREA_M2
    n_m = s.macro.intensity * REFERENCE_AREA_M2
    n_bs = n_m + s.small.intensity * REFERENCE_AREA_M2
    p = case_probabilities(s)
    return ThroughputContext(n_d, n_bs, n_m, n_d / n_bs, n_d * (p.p1 + p.p2) / n_m)


def ul_throughput_case2(policy: str, s: Scenario, spec: QuadSpec = OUTER_SPEC) -> QuadResult:
    """Per-device UL throughput in bit/s: spectral efficiency times B / N_a."""
    se = spectral_efficiency_case2(policy, s, spec)
    share = s.bandwidth_hz / throughput_context(s).devices_per_server(policy)
    return QuadResult(se.value * share, se.error * share)


def calibrate_macro_intensity(target_bps: float, policy: str, s: Scenario, bracket_km2=None) -> float:
    """Macro intensity (per km²) at which the Case-2 throughput under ``policy`` equals ``target_bps``.

    The density ratio lambda_S / lambda_M and the device intensity of ``s`` are held fixed.
    """
    ratio = s.small.intensity / s.macro.intensity

    def gap(log_lam):
        lam = math.exp(log_lam) * PER_KM2
        trial = s.replace(macro=s.macro.__class__(s.macro.tx_power, lam, s.macro.shadow_mean_db,
                                                  s.macro.shadow_std_db),
                          small=s.small.__class__(s.small.tx_power, ratio * lam, s.small.shadow_mean_db,
                                                  s.small.shadow_std_db))
        return math.log(ul_throughput_case2(policy, trial).value / target_bps)

    if bracket_km2 is None:
        # keep the BS tiers sparser than the devices so thinning stays valid
        bracket_km2 = (1e-3, 0.5 * s.device.intensity / (1.0 + ratio) / PER_KM2)
    lo, hi = (math.log(b) for b in bracket_km2)
    return math.exp(brentq(gap, lo, hi, xtol=1e-10))
