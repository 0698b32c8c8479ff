"""Brute-force Monte Carlo estimators that check the closed forms.

Every trial draws from its own generator seeded by ``(seed, estimator tag,
trial index)``, and per-trial partial sums are reduced in trial order, so
results are bit-identical for any number of worker processes.

Two estimator modes:

``full_deployment``
    one PPP realisation per trial, many probe devices placed uniformly in the
    evaluation region; probes within a trial are correlated, so confidence
    intervals use between-trial (batch) variability.
``translated_origin``
    every probe is a typical device at the origin with its own fresh point
    processes; samples are i.i.d.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import NamedTuple

import numpy as np

from .association import POLICIES, associate_many, classify, sample_shadow_table
from .channel import clamp_distance, sample_fading, sample_shadowing
from .errors import Case2ProbabilityZero, EmptyTier, InsufficientCase2Samples, PowerOrdering
from .geometry import (Deployment, GridSpec, displacements, effective_intensity, grid_lattice, interferer_intensity,
                       sample_deployment, sample_nearest_distance, sample_ppp, uniform_points)
from .model import Estimate, Scenario

Z95 = 1.959963984540054
MODES = ("full_deployment", "translated_origin")
MIN_CASE2_SAMPLES = 1000

_TAG_CASES_PPP = 1
_TAG_CASES_GRID = 2
_TAG_DISTANCES = 3
_TAG_SPECTRAL = 4
_TAG_CONTACT = 5


@dataclass(frozen=True)
class McConfig:
    n_trials: int = 100
    probes_per_trial: int = 1000
    estimator_mode: str = "full_deployment"
    seed: int | None = None  # falls back to the scenario's master_seed
    workers: int = 1
    keep_raw: bool = False

    def __post_init__(self):
        if self.n_trials < 1 or self.probes_per_trial < 1:
            raise ValueError("n_trials and probes_per_trial must be >= 1")
        if self.estimator_mode not in MODES:
            raise ValueError(f"estimator_mode must be one of {MODES}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def master_seed(self, s: Scenario) -> int:
        return s.master_seed if self.seed is None else self.seed


def trial_rng(seed: int, tag: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), tag, trial]))


def _map_trials(fn, n_trials: int, workers: int) -> list:
    if workers == 1 or n_trials == 1:
        return [fn(i) for i in range(n_trials)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, range(n_trials), chunksize=max(1, n_trials // (4 * workers))))


def _estimate(sums, counts, sumsq, batched: bool) -> Estimate:
    """Ratio estimate sum(sums) / sum(counts) with a 95% normal-approximation CI.

    ``batched`` uses the between-trial variance of the ratio estimator; otherwise
    samples are treated as i.i.d.
    """
    sums = np.asarray(sums, dtype=float)
    counts = np.asarray(counts, dtype=float)
    n = int(counts.sum())
    if n == 0:
        return Estimate(math.nan, math.inf, 0)
    mean = float(sums.sum() / n)
    t = len(sums)
    if batched and t >= 2:
        nbar = n / t
        var = float(np.sum((sums - mean * counts) ** 2)) / (t * (t - 1) * nbar * nbar)
    elif n >= 2:
        var = max(float(np.sum(sumsq)) / n - mean * mean, 0.0) * n / (n - 1) / n
    else:
        var = math.inf
    return Estimate(mean, Z95 * math.sqrt(var), n)


class CaseEstimates(NamedTuple):
    p1: Estimate
    p2: Estimate
    p3: Estimate
    p4: Estimate
    rejected: int

    @property
    def means(self) -> tuple:
        return tuple(e.mean for e in self[:4])


def _case_estimates(results, batched) -> CaseEstimates:
    counts = np.array([r[0] for r in results])  # (T, 4)
    rejected = sum(r[1] for r in results)
    totals = counts.sum(axis=1)
    ests = [_estimate(counts[:, k], totals, counts[:, k], batched) for k in range(4)]
    return CaseEstimates(*ests, rejected)


# -- association probabilities ------------------------------------------------

def _nearest_from_origin(s: Scenario, tier, n: int, radius: float, rng):
    """Nearest shadow-adjusted distance from the origin to a fresh PPP per probe.

    Returns (eff, dist, empty) where ``empty`` flags probes that saw no point.
    """
    if tier.intensity == 0:
        inf = np.full(n, np.inf)
        return inf, inf, np.zeros(n, dtype=bool)
    counts = rng.poisson(tier.intensity * math.pi * radius * radius, size=n)
    total = int(counts.sum())
    d = clamp_distance(radius * np.sqrt(rng.random(total)))
    chi = sample_shadowing(rng, tier.shadow_mean_db, tier.shadow_std_db, total)
    eff = d * np.power(chi, -1.0 / s.alpha)
    empty = counts == 0
    out_eff = np.full(n, np.inf)
    out_d = np.full(n, np.inf)
    if total:
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))[~empty]
        seg = np.repeat(np.arange(n)[~empty], counts[~empty])
        out_eff[~empty] = np.minimum.reduceat(eff, starts)
        # physical distance of the argmin: lexsort by (eff) within segment
        order = np.lexsort((eff, seg))
        first = np.searchsorted(seg[order], np.arange(n)[~empty])
        out_d[~empty] = d[order][first]
    return out_eff, out_d, empty


def _origin_probes(s: Scenario, n: int, rng):
    """Best per-tier distances for ``n`` typical devices, resampling probes with an empty tier."""
    radius = _eval_margin(s)
    me, md, em = _nearest_from_origin(s, s.macro, n, radius, rng)
    se, sd, es = _nearest_from_origin(s, s.small, n, radius, rng)
    bad = em | es
    rejected = 0
    while bad.any():
        idx = np.flatnonzero(bad)
        rejected += len(idx)
        me[idx], md[idx], em_i = _nearest_from_origin(s, s.macro, len(idx), radius, rng)
        se[idx], sd[idx], es_i = _nearest_from_origin(s, s.small, len(idx), radius, rng)
        bad = np.zeros(n, dtype=bool)
        bad[idx] = em_i | es_i
    return me, md, se, sd, rejected


def _eval_margin(s: Scenario) -> float:
    w = s.window
    return 0.5 * w.radius_or_halfside if w.edge_policy == "guard_region" else w.radius_or_halfside


def _deployment_batch(s: Scenario, n_probes: int, rng):
    """Sample deployments until both required tiers are present; return (dep, batch, rejected)."""
    rejected = 0
    while True:
        dep = sample_deployment(s, rng, n_devices=n_probes)
        try:
            batch = associate_many(dep.device_points, dep, s,
                                   sample_shadow_table(s, dep, n_probes, rng))
        except EmptyTier:
            rejected += 1
            continue
        return dep, batch, rejected


def _case_trial_ppp(s: Scenario, mc: McConfig, trial: int):
    rng = trial_rng(mc.master_seed(s), _TAG_CASES_PPP, trial)
    n = mc.probes_per_trial
    if mc.estimator_mode == "full_deployment":
        _, batch, rejected = _deployment_batch(s, n, rng)
        cases = batch.cases
    else:
        me, _, se, _, rejected = _origin_probes(s, n, rng)
        dl, ul = classify(me, se, s)
        cases = np.where(dl, np.where(ul, 1, 2), np.where(ul, 3, 4))
    return np.bincount(cases, minlength=5)[1:], rejected


def estimate_case_probs_ppp(s: Scenario, mc: McConfig) -> CaseEstimates:
    """Empirical DUDe case frequencies over PPP deployments."""
    results = _map_trials(partial(_case_trial_ppp, s, mc), mc.n_trials, mc.workers)
    return _case_estimates(results, batched=mc.estimator_mode == "full_deployment")


def _case_trial_grid(g: GridSpec, s: Scenario, mc: McConfig, trial: int):
    rng = trial_rng(mc.master_seed(s), _TAG_CASES_GRID, trial)
    pts, window = grid_lattice(g)
    required = (g.prob_macro > 0, g.prob_macro < 1)
    probes = uniform_points(mc.probes_per_trial, window, rng, inner=True)
    rejected = 0
    while True:
        is_macro = rng.random(len(pts)) < g.prob_macro
        dep = Deployment(pts[is_macro], pts[~is_macro], probes, window)
        if (required[0] and not is_macro.any()) or (required[1] and is_macro.all()):
            rejected += 1
            continue
        break
    shadow = sample_shadow_table(s, dep, len(probes), rng)
    batch = associate_many(probes, dep, s, shadow, required=required)
    return np.bincount(batch.cases, minlength=5)[1:], rejected


def estimate_case_probs_grid(g: GridSpec, s: Scenario, mc: McConfig) -> CaseEstimates:
    """Empirical case frequencies on a lattice whose nodes are macro w.p. Q.

    Powers, path loss and shadowing come from ``s``; its intensities are ignored.
    """
    results = _map_trials(partial(_case_trial_grid, g, s, mc), mc.n_trials, mc.workers)
    return _case_estimates(results, batched=True)


def _check_case2(s: Scenario) -> None:
    if s.macro.tx_power < s.small.tx_power:
        raise PowerOrdering("Case-2 analysis needs P_M > P_S")
    if s.macro.tx_power == s.small.tx_power:
        raise Case2ProbabilityZero("P_M = P_S: no device is ever in Case 2")


# -- Case-2 serving distances ---------------------------------------------------

@dataclass(frozen=True)
class EmpiricalDistribution:
    bin_edges: np.ndarray
    counts: np.ndarray
    total: int
    samples: np.ndarray | None = None  # sorted; kept for KS tests

    def __post_init__(self):
        if np.any(np.diff(self.bin_edges) <= 0):
            raise ValueError("bin edges must be strictly increasing")
        if int(np.sum(self.counts)) != self.total:
            raise ValueError("counts must sum to total")

    @property
    def mean(self) -> float:
        return float(np.mean(self.samples))

    def density(self) -> np.ndarray:
        return self.counts / (self.total * np.diff(self.bin_edges))

    def ks_statistic(self, cdf) -> float:
        """Kolmogorov-Smirnov distance between the samples and ``cdf``."""
        x = self.samples
        n = len(x)
        f = np.asarray(cdf(x), dtype=float)
        i = np.arange(1, n + 1)
        return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def _case2_distance_trial(s: Scenario, mc: McConfig, trial: int):
    rng = trial_rng(mc.master_seed(s), _TAG_DISTANCES, trial)
    n = mc.probes_per_trial
    if mc.estimator_mode == "full_deployment":
        _, b, _ = _deployment_batch(s, n, rng)
        me, se, dl, ul = b.macro_eff, b.small_eff, b.dl_macro, b.ul_macro
    else:
        me, _, se, _, _ = _origin_probes(s, n, rng)
        dl, ul = classify(me, se, s)
    case2 = dl & ~ul
    return se[case2], me[case2]


def sample_case2_distances_both(s: Scenario, mc: McConfig, bins=100) -> dict:
    """Case-2 serving distances under both policies from one set of probes."""
    _check_case2(s)
    results = _map_trials(partial(_case2_distance_trial, s, mc), mc.n_trials, mc.workers)
    out = {}
    for k, policy in enumerate(POLICIES):
        x = np.sort(np.concatenate([r[k] for r in results]))
        if len(x) < MIN_CASE2_SAMPLES:
            raise InsufficientCase2Samples(len(x), MIN_CASE2_SAMPLES)
        edges = np.linspace(0.0, float(x[-1]) * (1 + 1e-12), bins + 1) if np.isscalar(bins) else np.asarray(bins)
        counts, _ = np.histogram(x, bins=edges)
        inside = x[(x >= edges[0]) & (x <= edges[-1])]
        out[policy] = EmpiricalDistribution(edges, counts, int(counts.sum()), inside)
    return out


def sample_case2_distances(policy: str, s: Scenario, mc: McConfig, bins=100) -> EmpiricalDistribution:
    """Histogram of the UL serving distance of Case-2 probes under ``policy``.

    Distances are shadow-adjusted (equal to physical ones without shadowing).
    """
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}")
    return sample_case2_distances_both(s, mc, bins)[policy]


# -- Case-2 UL spectral efficiency ----------------------------------------------

def _log2_sinr(signal, interference, noise_ratio):
    return np.log2(1.0 + signal / (interference + noise_ratio))


def _spectral_trial_full(policy: str, s: Scenario, mc: McConfig, trial: int):
    rng = trial_rng(mc.master_seed(s), _TAG_SPECTRAL, trial)
    dep, b, _ = _deployment_batch(s, mc.probes_per_trial, rng)
    case2 = b.dl_macro & ~b.ul_macro
    if policy == "dude":
        servers = dep.small_points[b.small_index[case2]]
        d_serv = b.small_eff[case2]
    else:
        servers = dep.macro_points[b.macro_index[case2]]
        d_serv = b.macro_eff[case2]
    interferers = sample_ppp(interferer_intensity(s), dep.window, rng)
    a = s.alpha
    n2 = len(d_serv)
    if n2 == 0:
        return 0, 0.0, 0.0, None
    signal = sample_fading(rng, n2) * np.power(d_serv, -a)
    if len(interferers):
        d_int = clamp_distance(displacements(interferers, servers, dep.window))
        interference = np.sum(sample_fading(rng, d_int.shape) * np.power(d_int, -a), axis=1)
    else:
        interference = np.zeros(n2)
    c = _log2_sinr(signal, interference, s.noise_power / s.device.tx_power)
    return n2, float(c.sum()), float(np.dot(c, c)), c if mc.keep_raw else None


def _case2_serving_from_law(policy: str, s: Scenario, n: int, rng) -> np.ndarray:
    """Exact draws from the Case-2 conditional distance law by rejection on the contact distances."""
    lam_m = effective_intensity(s.macro, s.alpha)
    lam_s = effective_intensity(s.small, s.alpha)
    out = []
    got = 0
    while got < n:
        m = max(256, 2 * (n - got))
        dm = sample_nearest_distance(lam_m, m, rng)
        ds = sample_nearest_distance(lam_s, m, rng)
        dl, ul = classify(dm, ds, s)
        keep = dl & ~ul
        pick = ds[keep] if policy == "dude" else dm[keep]
        out.append(pick)
        got += len(pick)
    return np.concatenate(out)[:n]


def _spectral_trial_origin(policy: str, s: Scenario, mc: McConfig, trial: int):
    rng = trial_rng(mc.master_seed(s), _TAG_SPECTRAL, trial)
    n = mc.probes_per_trial
    a = s.alpha
    d_serv = clamp_distance(_case2_serving_from_law(policy, s, n, rng))
    signal = sample_fading(rng, n) * np.power(d_serv, -a)
    radius = _eval_margin(s)
    counts = rng.poisson(interferer_intensity(s) * math.pi * radius * radius, size=n)
    total = int(counts.sum())
    r = clamp_distance(radius * np.sqrt(rng.random(total)))
    contrib = sample_fading(rng, total) * np.power(r, -a)
    interference = np.bincount(np.repeat(np.arange(n), counts), weights=contrib, minlength=n)
    c = _log2_sinr(signal, interference, s.noise_power / s.device.tx_power)
    return n, float(c.sum()), float(np.dot(c, c)), c if mc.keep_raw else None


class SpectralEstimate(NamedTuple):
    estimate: Estimate
    raw: np.ndarray | None


def estimate_spectral_efficiency_case2(policy: str, s: Scenario, mc: McConfig,
                                       min_samples: int = MIN_CASE2_SAMPLES) -> Estimate:
    """Mean log2(1 + SINR_UL) over Case-2 probes served under ``policy``.

    Interferers form an independent PPP with the thinned device intensity
    (lam_M + lam_S), placed anywhere in the window around the serving BS.
    """
    return estimate_spectral_efficiency_case2_raw(policy, s, mc, min_samples).estimate


def estimate_spectral_efficiency_case2_raw(policy: str, s: Scenario, mc: McConfig,
                                           min_samples: int = MIN_CASE2_SAMPLES) -> SpectralEstimate:
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}")
    _check_case2(s)
    full = mc.estimator_mode == "full_deployment"
    fn = _spectral_trial_full if full else _spectral_trial_origin
    results = _map_trials(partial(fn, policy, s, mc), mc.n_trials, mc.workers)
    counts, sums, sumsq, raw = zip(*results)
    est = _estimate(sums, counts, sumsq, batched=full)
    if est.n_samples < min_samples:
        raise InsufficientCase2Samples(est.n_samples, min_samples)
    raw_all = np.concatenate([r for r in raw if r is not None]) if mc.keep_raw else None
    return SpectralEstimate(est, raw_all)


# -- contact distance ---------------------------------------------------------------

def _contact_trial(intensity: float, radius: float, mc: McConfig, seed: int, trial: int):
    rng = trial_rng(seed, _TAG_CONTACT, trial)
    n = mc.probes_per_trial
    counts = rng.poisson(intensity * math.pi * radius * radius, size=n)
    while np.any(counts == 0):
        counts[counts == 0] = rng.poisson(intensity * math.pi * radius * radius, size=int(np.sum(counts == 0)))
    r = radius * np.sqrt(rng.random(int(counts.sum())))
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    return np.minimum.reduceat(r, starts)


def contact_distance_samples(intensity: float, mc: McConfig, seed: int = 0, eps: float = 1e-9) -> np.ndarray:
    """Distance from the origin to the nearest point of fresh PPPs, by brute force."""
    radius = math.sqrt(math.log(1.0 / eps) / (math.pi * intensity))
    fn = partial(_contact_trial, intensity, radius, mc, seed)
    return np.concatenate(_map_trials(fn, mc.n_trials, mc.workers))


def estimate_mean_contact_distance(intensity: float, mc: McConfig, seed: int = 0) -> Estimate:
    x = contact_distance_samples(intensity, mc, seed)
    return _estimate([x.sum()], [len(x)], [np.dot(x, x)], batched=False)
