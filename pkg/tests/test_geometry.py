import math

import numpy as np
import pytest
from scipy import stats

from dude.errors import EmptyTier, MoreBSsThanDevices
from dude.geometry import (Deployment, GridSpec, auto_window, displacements, effective_intensity, grid_lattice,
                           interferer_intensity, matched_grid, nearest_distance, nearest_distance_cdf,
                           nearest_distance_pdf, read_deployment_csv, sample_deployment, sample_grid, sample_ppp,
                           sample_nearest_distance, thinning_probability, write_deployment_csv)
from dude.model import SimWindow, TierParams, make_scenario


def test_effective_intensity_identity():
    assert effective_intensity(TierParams(1.0, 3.0), 4.0) == 3.0


def test_effective_intensity_shadow_std():
    # exp(0.5 * (0.460517 * 2)^2)
    assert effective_intensity(TierParams(1.0, 1.0, 0.0, 8.0), 4.0) == pytest.approx(1.5285, abs=1e-3)
    assert effective_intensity(TierParams(1.0, 1.0, 0.0, 8.0), 4.0) == pytest.approx(1.5282936457798482, rel=1e-12)


def test_effective_intensity_shadow_mean():
    assert effective_intensity(TierParams(1.0, 1.0, -3.0, 0.0), 3.0) == pytest.approx(0.6309573444801932, rel=1e-12)


def test_effective_intensity_matches_lognormal_moment():
    rng = np.random.default_rng(3)
    x = rng.normal(2.0, 6.0, 400_000)
    chi = 10 ** (x / 10)
    mc = np.mean(chi ** (2 / 3.5))
    assert effective_intensity(TierParams(1.0, 1.0, 2.0, 6.0), 3.5) == pytest.approx(mc, rel=5e-3)


def test_ppp_zero_intensity_is_empty():
    assert sample_ppp(0.0, SimWindow("disk", 100.0), np.random.default_rng(0)).shape == (0, 2)


def test_ppp_count_moment():
    w = SimWindow("square", 50.0)  # area 1e4
    lam = 100.0 / w.area
    counts = [len(sample_ppp(lam, w, np.random.default_rng(i))) for i in range(10_000)]
    assert abs(np.mean(counts) - 100.0) <= 3 * math.sqrt(100 / 1e4) * 3


def test_ppp_deterministic():
    w = SimWindow("disk", 500.0)
    a = sample_ppp(1e-4, w, np.random.default_rng(7))
    b = sample_ppp(1e-4, w, np.random.default_rng(7))
    assert np.array_equal(a, b)


def test_ppp_points_inside_disk():
    w = SimWindow("disk", 300.0)
    pts = sample_ppp(1e-3, w, np.random.default_rng(1))
    assert np.all(np.hypot(pts[:, 0], pts[:, 1]) <= 300.0)


def test_deployment_arrays_read_only():
    s = make_scenario(alpha=3.0)
    dep = sample_deployment(s, np.random.default_rng(0), 5)
    with pytest.raises(ValueError):
        dep.device_points[0, 0] = 1.0


def test_grid_all_macro():
    dep = sample_grid(GridSpec(100, 1.0, 1.0), np.random.default_rng(0))
    assert len(dep.macro_points) == 100 and len(dep.small_points) == 0


def test_grid_pitch_and_shape():
    g = GridSpec(100, 1.0, 0.5)
    assert g.shape == (10, 10)
    assert g.pitch == pytest.approx(100.0)
    pts, window = grid_lattice(g)
    xs = np.unique(np.round(pts[:, 0], 9))
    assert len(xs) == 10 and np.allclose(np.diff(xs), 100.0)
    assert window.edge_policy == "torus"


def test_grid_macro_fraction_binomial():
    dep = sample_grid(GridSpec(10_000, 100.0, 0.2), np.random.default_rng(11))
    frac = len(dep.macro_points) / 10_000
    assert abs(frac - 0.2) <= 0.012


def test_matched_grid_density():
    s = make_scenario(density_ratio=5.0, alpha=3.0)
    g = matched_grid(s, 100.0)
    assert g.n_bs_total / g.area_km2 == pytest.approx(6.0, rel=1e-12)
    assert g.prob_macro == pytest.approx(1 / 6)


def test_nearest_distance_345():
    assert nearest_distance(np.array([[3.0, 4.0]])) == 5.0


def test_nearest_distance_order_invariant():
    pts = np.array([[3.0, 4.0], [-4.0, 3.0], [10.0, 0.0]])
    assert nearest_distance(pts) == nearest_distance(pts[::-1]) == 5.0


def test_nearest_distance_empty():
    with pytest.raises(EmptyTier):
        nearest_distance(np.empty((0, 2)))


def test_torus_displacement_wraps():
    w = SimWindow("square", 100.0, "torus")
    d = displacements(np.array([[95.0, 0.0]]), np.array([[-95.0, 0.0]]), w)
    assert d[0, 0] == pytest.approx(10.0)


def test_contact_pdf_values():
    assert nearest_distance_pdf(0.0, 1.0) == 0.0
    assert nearest_distance_pdf(1.0, 1 / math.pi) == pytest.approx(2 * math.exp(-1), rel=1e-12)
    assert nearest_distance_cdf(1.0, 1 / math.pi) == pytest.approx(1 - math.exp(-1), rel=1e-12)


def test_contact_sampler_ks():
    lam = 1e-5
    x = sample_nearest_distance(lam, 100_000, np.random.default_rng(5))
    ks = stats.kstest(x, lambda v: nearest_distance_cdf(v, lam)).statistic
    assert ks < 0.01


def test_thinning_probability():
    s = make_scenario(density_ratio=4.0, alpha=3.0)
    assert thinning_probability(s) == pytest.approx(5e-4, rel=1e-12)
    assert interferer_intensity(s) == pytest.approx(5e-6, rel=1e-12)


def test_thinning_boundary_and_error():
    s = make_scenario(density_ratio=4.0, alpha=3.0, device_intensity_km2=5.0)
    assert thinning_probability(s) == 1.0
    s = make_scenario(density_ratio=4.0, alpha=3.0, device_intensity_km2=4.0)
    with pytest.raises(MoreBSsThanDevices):
        thinning_probability(s)


def test_auto_window_margin():
    s = make_scenario(density_ratio=5.0, alpha=3.0)
    w = auto_window(s)
    margin = w.radius_or_halfside / 2
    assert math.exp(-math.pi * s.macro.intensity * margin ** 2) == pytest.approx(1e-6, rel=1e-9)


def test_deployment_csv_roundtrip(tmp_path):
    s = make_scenario(density_ratio=2.0, alpha=3.0)
    dep = sample_deployment(s, np.random.default_rng(0), 3)
    path = tmp_path / "dep.csv"
    write_deployment_csv(dep, path)
    back = read_deployment_csv(path, dep.window)
    for name in ("macro_points", "small_points", "device_points"):
        assert np.array_equal(getattr(dep, name), getattr(back, name))
    assert isinstance(back, Deployment)
