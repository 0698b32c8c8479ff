import math

import numpy as np
import pytest
from scipy import integrate as sci
from scipy.special import exp1

from dude import analytic
from dude.analytic import (case2_ccdf, case2_ccdf_dude, case2_cdf, case2_distance_law, case2_mean_distance,
                           case2_pdf, laplace_functional, laplace_functional_exponent,
                           laplace_functional_exponent_quad, spectral_efficiency_case2, throughput_context,
                           ul_throughput_case2)
from dude.association import case_probabilities
from dude.errors import Case2ProbabilityZero, InfiniteCapacity
from dude.geometry import interferer_intensity
from dude.model import make_scenario

GRID = [(a, r, ps) for a in (3.0, 4.0) for r in (1.0, 5.0, 15.0) for ps in (20.0, 30.0)]

# Frozen from an independent scipy evaluation of E[ln(1+SINR)] = int P(SINR > x) / (1 + x) dx
# with the interference constant computed by scipy.integrate.quad (alpha=4, B=20 MHz, thermal noise).
SE_ORACLE = {
    ("dude", 20.0, 5.0): 0.9545113451433732,
    ("drp", 20.0, 5.0): 0.17710411077285673,
    ("dude", 20.0, 15.0): 0.7502333916696382,
    ("drp", 20.0, 15.0): 0.10503304803030772,
    ("dude", 30.0, 5.0): 0.7021713428160546,
    ("drp", 30.0, 5.0): 0.23274489674775536,
    ("dude", 30.0, 15.0): 0.5952500820302525,
    ("drp", 30.0, 15.0): 0.17923309085258526,
}


def _scale(s):
    return 1 / math.sqrt(math.pi * (s.macro.intensity + s.small.intensity))


@pytest.mark.parametrize("alpha, ratio, ps", GRID)
@pytest.mark.parametrize("policy", ["dude", "drp"])
def test_pdf_normalises(policy, alpha, ratio, ps):
    s = make_scenario(ps, ratio, alpha)
    h = _scale(s)
    ref = sci.quad(lambda x: case2_pdf(policy, x, s), 0, 60 * h, epsabs=1e-13, epsrel=1e-12, limit=400,
                   points=[h, 5 * h])[0]
    assert ref == pytest.approx(1.0, abs=1e-6)
    assert case2_ccdf(policy, 0.0, s) == 1.0
    assert case2_ccdf(policy, 1e-9, s) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("alpha, ratio, ps", GRID)
def test_ccdf_quadrature_vs_closed_form(alpha, ratio, ps):
    s = make_scenario(ps, ratio, alpha)
    h = _scale(s)
    for x in (0.1 * h, h, 3 * h):
        assert case2_ccdf_dude(x, s) == pytest.approx(1 - case2_cdf("dude", x, s), abs=1e-6)
        assert case2_ccdf("drp", x, s) == pytest.approx(1 - case2_cdf("drp", x, s), abs=1e-6)


def test_ccdf_monotone_to_zero(fcell4):
    xs = np.linspace(0, 40 * _scale(fcell4), 200)
    c = 1 - case2_cdf("dude", xs, fcell4)
    assert c[0] == 1.0 and np.all(np.diff(c) <= 1e-15) and c[-1] < 1e-12


@pytest.mark.parametrize("alpha, ratio, ps", GRID)
def test_means(alpha, ratio, ps):
    s = make_scenario(ps, ratio, alpha)
    h = _scale(s)
    means = {}
    for policy in ("dude", "drp"):
        ref = sci.quad(lambda x: x * case2_pdf(policy, x, s), 0, 60 * h, epsrel=1e-11, limit=400)[0]
        means[policy] = case2_mean_distance(policy, s)
        assert means[policy] == pytest.approx(ref, rel=1e-8)
    assert means["dude"] < means["drp"]


def test_distance_law_bundle(fcell4):
    law = case2_distance_law("drp", fcell4)
    assert law.mean == case2_mean_distance("drp", fcell4)
    assert law.ccdf(0.0) == 1.0


def test_pdf_negative_is_zero(fcell4):
    assert case2_pdf("dude", -1.0, fcell4) == 0.0


def test_equal_powers_rejected():
    s = make_scenario(46.0, 5.0, 4.0)
    with pytest.raises(Case2ProbabilityZero):
        case2_pdf("dude", 10.0, s)
    with pytest.raises(Case2ProbabilityZero):
        spectral_efficiency_case2("dude", s)


def test_bad_policy(fcell4):
    with pytest.raises(ValueError):
        case2_pdf("x", 1.0, fcell4)


def test_laplace_trivial(fcell4):
    assert laplace_functional_exponent(0.0, fcell4) == 0.0
    assert laplace_functional(0.0, fcell4) == 1.0


def test_laplace_alpha4_closed(fcell4):
    lam = interferer_intensity(fcell4)
    s_arg = 1e5
    assert laplace_functional_exponent(s_arg, fcell4) == pytest.approx(
        -math.pi * lam * math.sqrt(s_arg) * math.pi / 2, rel=1e-14)


def test_laplace_linear_in_intensity(fcell4, monkeypatch):
    base = laplace_functional_exponent(3e4, fcell4)
    lam = interferer_intensity(fcell4)
    monkeypatch.setattr(analytic, "interferer_intensity", lambda s: 2 * lam)
    assert laplace_functional_exponent(3e4, fcell4) == pytest.approx(2 * base, rel=1e-14)


@pytest.mark.parametrize("alpha", [3.0, 4.0])
def test_laplace_raw_vs_reduced(alpha):
    s = make_scenario(20.0, 5.0, alpha)
    for s_arg in np.logspace(-6, 6, 13):
        assert laplace_functional_exponent_quad(s_arg, s) == pytest.approx(
            laplace_functional_exponent(s_arg, s), rel=1e-8)


@pytest.mark.parametrize("key", sorted(SE_ORACLE))
def test_spectral_efficiency_oracle(key):
    policy, ps, ratio = key
    r = spectral_efficiency_case2(policy, make_scenario(ps, ratio, 4.0))
    assert r.value == pytest.approx(SE_ORACLE[key], rel=1e-7)
    assert 0 < r.error < 1e-6


def test_no_noise_no_interference(fcell4, monkeypatch):
    monkeypatch.setattr(analytic, "interferer_intensity", lambda s: 0.0)
    with pytest.raises(InfiniteCapacity):
        spectral_efficiency_case2("dude", fcell4.replace(noise_power=0.0))


@pytest.mark.parametrize("policy", ["dude", "drp"])
def test_noise_limited_matches_1d_quadrature(policy, monkeypatch):
    s = make_scenario(20.0, 5.0, 4.0, macro_intensity_km2=0.05, noise_power_dbm=-90.0)
    monkeypatch.setattr(analytic, "interferer_intensity", lambda s: 0.0)
    got = spectral_efficiency_case2(policy, s).value
    snr_coef = s.device.tx_power / s.noise_power
    p2 = case_probabilities(s).p2

    def integrand(y):
        # E_h[ln(1 + h a)] for unit-mean exponential h is exp(1/a) E1(1/a)
        inv = y ** 4 / snr_coef
        if inv < 700:
            g = math.exp(inv) * exp1(inv)
        else:  # asymptotic series, exact to ~1e-11 here
            g = (1 - 1 / inv + 2 / inv ** 2 - 6 / inv ** 3) / inv
        return case2_pdf(policy, y, s) * p2 * g

    h = _scale(s)
    ref = sci.quad(integrand, 0, 40 * h, epsrel=1e-11, limit=400, points=[h])[0] / p2 / math.log(2)
    assert got == pytest.approx(ref, rel=1e-7)


def test_monotone_in_interference_and_noise(fcell4, monkeypatch):
    base = spectral_efficiency_case2("dude", fcell4).value
    noisy = spectral_efficiency_case2("dude", fcell4.replace(noise_power=fcell4.noise_power * 1e4)).value
    assert noisy < base
    lam = interferer_intensity(fcell4)
    monkeypatch.setattr(analytic, "interferer_intensity", lambda s: 2 * lam)
    assert spectral_efficiency_case2("dude", fcell4).value < base


def test_throughput_context(fcell4):
    ctx = throughput_context(fcell4)
    p = case_probabilities(fcell4)
    assert ctx.n_devices_avg == pytest.approx(1e4)
    assert ctx.n_a_dude == pytest.approx(1e4 / 16)
    assert ctx.n_a_drp == pytest.approx(1e4 * (p.p1 + p.p2))


def test_bandwidth_doubles_throughput():
    s = make_scenario(20.0, 15.0, 4.0, noise_power_dbm=-101.0)
    t1 = ul_throughput_case2("dude", s).value
    t2 = ul_throughput_case2("dude", s.replace(bandwidth_hz=2 * s.bandwidth_hz)).value
    assert t2 == pytest.approx(2 * t1, rel=1e-14)


def test_fig3_orderings():
    t = {(ps, pol): ul_throughput_case2(pol, make_scenario(ps, 15.0, 4.0)).value
         for ps in (20.0, 30.0) for pol in ("dude", "drp")}
    assert t[(30.0, "drp")] > t[(20.0, "drp")]
    assert t[(20.0, "dude")] > t[(30.0, "dude")]
    assert t[(20.0, "dude")] / t[(20.0, "drp")] > 10
    for ps in (20.0, 30.0):
        for r in (1.0, 5.0, 10.0, 15.0):
            s = make_scenario(ps, r, 4.0)
            assert ul_throughput_case2("dude", s).value > ul_throughput_case2("drp", s).value
