import math

import numpy as np
from hypothesis import given, settings, strategies as st

from dude.analytic import case2_cdf, case2_mean_distance, laplace_functional_exponent
from dude.association import case2_peak_density_ratio, case_probabilities, classify
from dude.model import make_scenario
from dude.quadrature import integrate

alphas = st.floats(2.2, 6.0)
ratios = st.floats(0.01, 100.0)
small_powers = st.floats(0.0, 45.0)


@given(small_powers, ratios, alphas)
def test_case_probabilities_form_a_distribution(ps, r, a):
    p = case_probabilities(make_scenario(ps, r, a))
    assert all(0.0 <= x <= 1.0 for x in p)
    assert math.isclose(sum(p), 1.0, abs_tol=1e-12)
    assert p.p3 == 0.0


@given(small_powers, alphas)
def test_peak_is_a_maximum(ps, a):
    s = make_scenario(ps, 1.0, a)
    r = case2_peak_density_ratio(s)
    peak = case_probabilities(make_scenario(ps, r, a)).p2
    for f in (0.8, 1.25):
        assert case_probabilities(make_scenario(ps, r * f, a)).p2 <= peak + 1e-15


@given(small_powers, alphas, st.lists(st.floats(1.0, 1e4), min_size=2, max_size=2))
def test_case3_impossible(ps, a, d):
    dl, ul = classify(np.array([d[0]]), np.array([d[1]]), make_scenario(ps, 1.0, a))
    assert not (ul[0] and not dl[0])


@settings(max_examples=50)
@given(st.floats(0.0, 43.0), st.floats(0.2, 30.0), alphas)
def test_case2_cdf_is_a_cdf(ps, r, a):
    s = make_scenario(ps, r, a)
    xs = np.linspace(0.0, 5e3, 64)
    for policy in ("dude", "drp"):
        f = case2_cdf(policy, xs, s)
        assert f[0] == 0.0
        assert np.all(np.diff(f) >= -1e-12)
        assert np.all((f >= 0) & (f <= 1))
    assert case2_mean_distance("dude", s) < case2_mean_distance("drp", s)


@given(alphas, st.floats(1e-6, 1e6), st.floats(1.5, 10.0))
def test_laplace_exponent_scaling(a, s_arg, k):
    s = make_scenario(20.0, 5.0, a)
    e1 = laplace_functional_exponent(s_arg, s)
    e2 = laplace_functional_exponent(k * s_arg, s)
    assert math.isclose(e2, e1 * k ** (2 / a), rel_tol=1e-12)


@settings(max_examples=30)
@given(st.floats(0.1, 50.0))
def test_integrate_scale_invariant(lam):
    f = lambda x: 2 * math.pi * lam * x * np.exp(-math.pi * lam * x * x)  # noqa: E731
    assert math.isclose(integrate(f, 0.0, math.inf).value, 1.0, abs_tol=1e-8)
