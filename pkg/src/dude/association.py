"""DUDe / DRP association rules, case classification and closed-form case probabilities.

Within a tier every BS shares one transmit power, so the best BS of a tier is
the same in both directions: the one with the smallest shadow-adjusted
distance d * chi^(-1/alpha). Only the choice *between* tiers differs: DL
weighs the tier powers, UL (devices all transmit with P_d) does not.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.spatial import cKDTree

from .channel import clamp_distance, sample_shadowing
from .errors import EmptyTier, PowerOrdering
from .geometry import Deployment, displacements, effective_intensity
from .model import AssociationCase, CaseProbabilities, Scenario

POLICIES = ("dude", "drp")


class ServerRef(NamedTuple):
    tier: str
    index: int
    distance: float


class AssociationOutcome(NamedTuple):
    case: AssociationCase
    dl_server: ServerRef
    ul_server: ServerRef


@dataclass
class AssociationBatch:
    """Vectorised association of many probes against one deployment.

    ``*_eff`` are shadow-adjusted (displaced) distances; equal to the physical
    distance when shadowing is off.
    """

    dl_macro: np.ndarray
    ul_macro: np.ndarray
    macro_index: np.ndarray
    small_index: np.ndarray
    macro_dist: np.ndarray
    small_dist: np.ndarray
    macro_eff: np.ndarray
    small_eff: np.ndarray

    @property
    def cases(self) -> np.ndarray:
        return np.where(self.dl_macro, np.where(self.ul_macro, 1, 2), np.where(self.ul_macro, 3, 4))

    def serving_eff(self, direction_macro: np.ndarray) -> np.ndarray:
        return np.where(direction_macro, self.macro_eff, self.small_eff)

    def __len__(self):
        return len(self.dl_macro)


def sample_shadow_table(s: Scenario, dep: Deployment, n_probes: int, rng: np.random.Generator):
    """Per-link lognormal multipliers, shape (n_probes, n_bs) per tier, or None without shadowing."""
    if all(t.shadow_std_db == 0 and t.shadow_mean_db == 0 for t in (s.macro, s.small)):
        return None
    return (
        sample_shadowing(rng, s.macro.shadow_mean_db, s.macro.shadow_std_db, (n_probes, len(dep.macro_points))),
        sample_shadowing(rng, s.small.shadow_mean_db, s.small.shadow_std_db, (n_probes, len(dep.small_points))),
    )


def _best_in_tier(points, probes, window, alpha, chi, tree=None):
    n = len(probes)
    if len(points) == 0:
        return np.full(n, -1), np.full(n, np.inf), np.full(n, np.inf)
    if chi is None:
        if tree is None:
            tree = _tree(points, window)
        dist, idx = tree.query(_tree_coords(probes, window))
        dist = clamp_distance(dist)
        return idx, dist, dist
    d = clamp_distance(displacements(points, probes, window))
    eff = d * np.power(chi, -1.0 / alpha)
    idx = np.argmin(eff, axis=1)
    rows = np.arange(n)
    return idx, d[rows, idx], eff[rows, idx]


def _tree_coords(pts, window):
    if window is not None and window.edge_policy == "torus":
        h = window.radius_or_halfside
        return np.mod(np.asarray(pts) + h, 2.0 * h)
    return pts


def _tree(points, window):
    if window is not None and window.edge_policy == "torus":
        return cKDTree(_tree_coords(points, window), boxsize=2.0 * window.radius_or_halfside)
    return cKDTree(points)


def associate_many(probes: np.ndarray, dep: Deployment, s: Scenario, shadow_table=None,
                   required=None) -> AssociationBatch:
    """Associate every probe under both DL and UL rules.

    A tier with no points is an error if ``required`` says so (by default:
    when the scenario gives it positive intensity); otherwise it is simply
    never selected.
    """
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    if required is None:
        required = (s.macro.intensity > 0, s.small.intensity > 0)
    for name, pts, req in (("macro", dep.macro_points, required[0]), ("small", dep.small_points, required[1])):
        if len(pts) == 0 and req:
            raise EmptyTier(f"{name} tier has no base stations in the window")
    chi_m, chi_s = shadow_table if shadow_table is not None else (None, None)
    a = s.alpha
    mi, md, me = _best_in_tier(dep.macro_points, probes, dep.window, a, chi_m)
    si, sd, se = _best_in_tier(dep.small_points, probes, dep.window, a, chi_s)
    dl_macro, ul_macro = classify(me, se, s)
    return AssociationBatch(dl_macro, ul_macro, mi, si, md, sd, me, se)


def classify(macro_eff, small_eff, s: Scenario):
    """Tier choices (dl_macro, ul_macro) from the best shadow-adjusted distance per tier.

    An absent tier is passed as ``inf``. Ties go to the macro tier.
    """
    a = s.alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        # log-domain comparison of P * eff^-alpha
        dl_macro = math.log(s.macro.tx_power) - a * np.log(macro_eff) >= math.log(s.small.tx_power) - a * np.log(small_eff)
    ul_macro = np.asarray(macro_eff) <= np.asarray(small_eff)
    return dl_macro, ul_macro


def _outcome(batch: AssociationBatch, dl_macro: bool, ul_macro: bool) -> AssociationOutcome:
    def ref(macro):
        if macro:
            return ServerRef("macro", int(batch.macro_index[0]), float(batch.macro_dist[0]))
        return ServerRef("small", int(batch.small_index[0]), float(batch.small_dist[0]))

    return AssociationOutcome(AssociationCase.from_tiers(dl_macro, ul_macro), ref(dl_macro), ref(ul_macro))


def _single_shadow(shadow_table):
    if shadow_table is None:
        return None
    chi_m, chi_s = shadow_table
    return np.atleast_2d(np.asarray(chi_m, dtype=float)), np.atleast_2d(np.asarray(chi_s, dtype=float))


def _require_both(dep):
    if len(dep.macro_points) == 0 or len(dep.small_points) == 0:
        raise EmptyTier("both BS tiers must be non-empty")


def associate_dude(device, dep: Deployment, s: Scenario, shadow_table=None) -> AssociationOutcome:
    """DL from the strongest fading-averaged BS, UL from the smallest path loss."""
    _require_both(dep)
    b = associate_many(np.asarray(device, dtype=float)[None, :], dep, s, _single_shadow(shadow_table))
    return _outcome(b, bool(b.dl_macro[0]), bool(b.ul_macro[0]))


def associate_drp(device, dep: Deployment, s: Scenario, shadow_table=None) -> AssociationOutcome:
    """Coupled association: the DL rule picks the server for both directions."""
    _require_both(dep)
    b = associate_many(np.asarray(device, dtype=float)[None, :], dep, s, _single_shadow(shadow_table))
    dl = bool(b.dl_macro[0])
    return _outcome(b, dl, dl)


def case_probabilities(s: Scenario) -> CaseProbabilities:
    lam_m = effective_intensity(s.macro, s.alpha)
    lam_s = effective_intensity(s.small, s.alpha)
    if lam_m + lam_s <= 0:
        raise ValueError("at least one tier needs positive intensity")
    c = s.power_ratio ** (2.0 / s.alpha)
    p1 = lam_m / (lam_m + lam_s)
    p4 = lam_s / (lam_s + c * lam_m)
    p2 = lam_s / (lam_s + lam_m) - p4
    if s.macro.tx_power < s.small.tx_power:
        # P_S > P_M flips the roles of Case 2 and Case 3; not part of the model
        raise PowerOrdering("closed-form case probabilities assume P_M >= P_S")
    return CaseProbabilities(p1, max(p2, 0.0), 0.0, p4)


def case2_peak_density_ratio(s: Scenario) -> float:
    """lambda_S / lambda_M that maximises Pr(Case 2): (P_M / P_S)^(1/alpha)."""
    if s.macro.tx_power < s.small.tx_power:
        raise PowerOrdering("P_M must be >= P_S")
    return s.power_ratio ** (1.0 / s.alpha)
