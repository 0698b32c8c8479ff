import math

import numpy as np
import pytest

from dude import analytic, montecarlo
from dude.analytic import case2_cdf, case2_mean_distance, spectral_efficiency_case2
from dude.association import case_probabilities
from dude.errors import Case2ProbabilityZero, InsufficientCase2Samples, PowerOrdering
from dude.geometry import GridSpec, matched_grid
from dude.model import make_scenario
from dude.montecarlo import (EmpiricalDistribution, McConfig, estimate_case_probs_grid, estimate_case_probs_ppp,
                             estimate_mean_contact_distance, estimate_spectral_efficiency_case2,
                             estimate_spectral_efficiency_case2_raw, sample_case2_distances,
                             sample_case2_distances_both)


def test_config_validation():
    with pytest.raises(ValueError):
        McConfig(n_trials=0)
    with pytest.raises(ValueError):
        McConfig(estimator_mode="nope")


@pytest.mark.parametrize("mode", ["full_deployment", "translated_origin"])
def test_case_probs_match_closed_form(mode):
    s = make_scenario(20.0, 5.0, 3.0)
    est = estimate_case_probs_ppp(s, McConfig(200, 100, mode))
    for e, p in zip(est[:4], case_probabilities(s)):
        assert abs(e.mean - p) <= max(4 * e.ci_halfwidth_95, 1e-12)
    assert sum(e.mean for e in est[:4]) == pytest.approx(1.0, abs=1e-15)
    assert est.p3.mean == 0.0


def test_equal_powers():
    s = make_scenario(46.0, 1.0, 3.0)
    est = estimate_case_probs_ppp(s, McConfig(100, 100))
    assert est.p2.mean == 0.0
    assert est.p1.contains(0.5, k=2)


def test_ci_shrinks_as_inverse_sqrt():
    s = make_scenario(20.0, 5.0, 3.0)
    a = estimate_case_probs_ppp(s, McConfig(10, 1000, "translated_origin"))
    b = estimate_case_probs_ppp(s, McConfig(10, 4000, "translated_origin"))
    assert b.p2.ci_halfwidth_95 / a.p2.ci_halfwidth_95 == pytest.approx(0.5, rel=0.2)


def test_case_probs_deterministic_across_workers():
    s = make_scenario(20.0, 5.0, 3.0, master_seed=9)
    a = estimate_case_probs_ppp(s, McConfig(8, 200, workers=1))
    b = estimate_case_probs_ppp(s, McConfig(8, 200, workers=2))
    c = estimate_case_probs_ppp(s, McConfig(8, 200, workers=1))
    assert a == b == c
    d = estimate_case_probs_ppp(s, McConfig(8, 200, seed=10))
    assert d != a


def test_grid_single_tier():
    s = make_scenario(20.0, 1.0, 3.0)
    est = estimate_case_probs_grid(GridSpec(100, 100.0, 1.0), s, McConfig(5, 200))
    assert est.p1.mean == 1.0


def test_grid_deterministic_and_p1():
    s = make_scenario(20.0, 5.0, 3.0)
    g = matched_grid(s, 100.0)
    a = estimate_case_probs_grid(g, s, McConfig(100, 200, workers=1))
    b = estimate_case_probs_grid(g, s, McConfig(100, 200, workers=2))
    assert a == b
    # the macro share of a random labelling sets Pr(UL to macro) for the grid too
    assert a.p1.contains(case_probabilities(s).p1, k=4)


def test_distances_histogram_and_means():
    s = make_scenario(20.0, 5.0, 4.0)
    d = sample_case2_distances_both(s, McConfig(200, 50))
    for policy in ("dude", "drp"):
        e = d[policy]
        assert int(e.counts.sum()) == e.total == len(e.samples)
        assert e.ks_statistic(lambda x: case2_cdf(policy, x, s)) < 0.05
        assert e.mean == pytest.approx(case2_mean_distance(policy, s), rel=0.05)
    assert d["dude"].mean < d["drp"].mean
    assert np.array_equal(sample_case2_distances("dude", s, McConfig(200, 50)).samples, d["dude"].samples)


def test_distances_insufficient():
    s = make_scenario(20.0, 5.0, 4.0)
    with pytest.raises(InsufficientCase2Samples):
        sample_case2_distances("dude", s, McConfig(2, 50))


def test_empirical_distribution_invariants():
    with pytest.raises(ValueError):
        EmpiricalDistribution(np.array([0.0, 1.0, 1.0]), np.array([1, 1]), 2)
    with pytest.raises(ValueError):
        EmpiricalDistribution(np.array([0.0, 1.0, 2.0]), np.array([1, 1]), 3)


@pytest.mark.parametrize("mode", ["full_deployment", "translated_origin"])
def test_spectral_noise_limited(mode, monkeypatch):
    s = make_scenario(20.0, 5.0, 4.0, macro_intensity_km2=0.05, noise_power_dbm=-90.0)
    monkeypatch.setattr(montecarlo, "interferer_intensity", lambda s: 0.0)
    monkeypatch.setattr(analytic, "interferer_intensity", lambda s: 0.0)
    ref = spectral_efficiency_case2("dude", s).value
    est = estimate_spectral_efficiency_case2("dude", s, McConfig(100, 100, mode))
    assert est.contains(ref, k=3)


def test_spectral_modes_agree():
    s = make_scenario(20.0, 5.0, 4.0)
    a = estimate_spectral_efficiency_case2("dude", s, McConfig(60, 100, "full_deployment"))
    b = estimate_spectral_efficiency_case2("dude", s, McConfig(40, 200, "translated_origin"))
    assert abs(a.mean - b.mean) <= a.ci_halfwidth_95 + b.ci_halfwidth_95
    ref = spectral_efficiency_case2("dude", s).value
    assert b.contains(ref, k=3)


def test_spectral_deterministic_across_workers():
    s = make_scenario(20.0, 5.0, 4.0)
    for mode in ("full_deployment", "translated_origin"):
        a = estimate_spectral_efficiency_case2("drp", s, McConfig(6, 300, mode, workers=1), min_samples=1)
        b = estimate_spectral_efficiency_case2("drp", s, McConfig(6, 300, mode, workers=2), min_samples=1)
        assert a == b


def test_spectral_raw_samples_flag():
    s = make_scenario(20.0, 5.0, 4.0)
    r = estimate_spectral_efficiency_case2_raw("dude", s, McConfig(4, 100, "translated_origin", keep_raw=True),
                                               min_samples=1)
    assert len(r.raw) == r.estimate.n_samples
    assert np.mean(r.raw) == pytest.approx(r.estimate.mean, rel=1e-12)
    off = estimate_spectral_efficiency_case2_raw("dude", s, McConfig(4, 100, "translated_origin"), min_samples=1)
    assert off.raw is None


def test_contact_distance_mean():
    lam = 2e-6
    est = estimate_mean_contact_distance(lam, McConfig(10, 5000), seed=3)
    assert est.contains(1 / (2 * math.sqrt(lam)), k=3)


def test_case2_estimators_reject_equal_and_reversed_powers():
    with pytest.raises(Case2ProbabilityZero):
        sample_case2_distances("dude", make_scenario(46.0, 5.0, 4.0), McConfig(2, 10))
    with pytest.raises(PowerOrdering):
        estimate_spectral_efficiency_case2("dude", make_scenario(50.0, 5.0, 4.0), McConfig(2, 10))
