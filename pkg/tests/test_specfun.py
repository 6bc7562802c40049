import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import i0e

from collapse_bounds.core import DomainError, QuadratureError
from collapse_bounds.specfun import (QuadratureConfig, bessel_i0, bessel_j0,
                                     bessel_j1, circle_nonoverlap_area, erf,
                                     f_s, f_s_closed_form, f_s_large_a_limit,
                                     f_s_psl_approximation,
                                     f_s_small_a_coefficient, g2_disk,
                                     g_alpha_cutoff_sensitivity,
                                     g_alpha_integral, phi_cdf)

FIXTURE = json.loads((Path(__file__).parent / "fixtures" / "special_values.json")
                     .read_text())
FUNCS = {"erf": erf, "phi_cdf": phi_cdf, "j0": bessel_j0, "j1": bessel_j1,
         "i0": bessel_i0}

# 10^6-point Simpson rule of Phi^2 e^{-z^2} on [-12, 12] built on math.erfc
G2_SIMPSON = 0.5389796849359177
# 10^7-sample Monte Carlo estimate of the non-overlap area at d = r_D, in r_D^2
AREA_MC_AT_RD = 3.8254626


@pytest.mark.parametrize("name", sorted(FUNCS))
def test_special_functions_against_mpmath(name):
    assert len(FIXTURE[name]) == 20
    for x, want in FIXTURE[name]:
        got = float(FUNCS[name](x))
        if name == "i0":
            assert got == pytest.approx(want, rel=1e-13)
        else:
            assert abs(got - want) <= 1e-12 * max(1.0, abs(want))


def test_phi_values():
    assert phi_cdf(0.0) == 0.5
    assert phi_cdf(1.0) == pytest.approx(0.8413447460685429, rel=1e-15)
    assert phi_cdf(-40.0) == 0.0 and phi_cdf(40.0) == 1.0


@settings(max_examples=200, deadline=None)
@given(st.floats(-30, 30))
def test_phi_reflection(z):
    assert phi_cdf(z) == pytest.approx(1 - phi_cdf(-z), abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(-20, 20), st.floats(1e-3, 5))
def test_phi_monotone(z, dz):
    assert phi_cdf(z + dz) >= phi_cdf(z)


def test_g_alpha_special_values():
    assert g_alpha_integral(1.0) == pytest.approx(math.sqrt(math.pi), rel=1e-10)
    assert g_alpha_integral(1.5) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-10)
    assert abs(g_alpha_integral(0.5) - 5.675) < 0.005
    assert g_alpha_integral(2.0) == pytest.approx(G2_SIMPSON, rel=1e-9)


def test_g_alpha_strictly_decreasing():
    alphas = np.linspace(0.51, 3.0, 20)
    vals = [g_alpha_integral(a) for a in alphas]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_g_alpha_domain_and_cutoff_sensitivity():
    with pytest.raises(DomainError):
        g_alpha_integral(0.3)
    assert g_alpha_cutoff_sensitivity(0.5) < 1e-12
    assert g_alpha_cutoff_sensitivity(0.4) < 1e-10


def test_quadrature_config_validation():
    with pytest.raises(DomainError):
        QuadratureConfig(abs_tol=0)
    with pytest.raises(DomainError):
        QuadratureConfig(infinite_domain_cutoff=6)


@pytest.mark.parametrize("alpha", [1.0, 1.5, 2.0])
@pytest.mark.parametrize("a", [0.1, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 20.0])
def test_f_s_closed_forms(alpha, a):
    assert f_s(a, alpha) == pytest.approx(float(f_s_closed_form(a, alpha)), rel=1e-8)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0, 0.75, 2.5])
def test_f_s_limits(alpha):
    assert f_s(0.0, alpha) == 0.0
    assert f_s(50.0, alpha) == pytest.approx(f_s_large_a_limit(alpha), rel=1e-6)
    assert f_s(1e-3, alpha) / 1e-6 == pytest.approx(f_s_small_a_coefficient(alpha),
                                                   rel=1e-4)


def test_small_a_coefficient_matches_closed_forms():
    # second-order Taylor coefficients of the closed forms
    sp = math.sqrt(math.pi)
    assert f_s_small_a_coefficient(1.0) == pytest.approx(3 * sp / 4)
    assert f_s_small_a_coefficient(1.5) == pytest.approx(
        (2 / 3) * math.sqrt(2 * math.pi / 3) * 2, rel=1e-12)
    assert f_s_small_a_coefficient(2.0) == pytest.approx(
        0.5 * math.sqrt(math.pi / 2) * 5.5, rel=1e-12)


def test_f_s_psl_value_against_mpmath():
    # mpmath quad of the defining integral at a = 2, alpha = 1/2
    assert f_s(2.0, 0.5) == pytest.approx(3.67928749821628, rel=1e-10)


def test_f_s_psl_approximation_is_rough():
    # the simple stand-in deviates by at most ~16% from the integral
    for a in np.linspace(0.1, 10, 50):
        ratio = f_s(a, 0.5) / f_s_psl_approximation(a)
        assert 0.83 < ratio <= 1.0


@pytest.mark.xfail(strict=True, reason="the exponential stand-in is 15% off at a = 2")
def test_f_s_psl_approximation_within_ten_percent():
    assert f_s(2.0, 0.5) == pytest.approx(float(f_s_psl_approximation(2.0)), rel=0.10)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0])
def test_f_s_nonnegative(alpha):
    assert all(f_s(a, alpha) >= 0 for a in np.linspace(0, 10, 41))


def test_f_s_monotone_only_for_psl():
    grid = np.linspace(0, 10, 41)
    psl = [f_s(a, 0.5) for a in grid]
    assert all(b >= a for a, b in zip(psl, psl[1:]))
    # alpha >= 1 overshoots the large-separation limit near a ~ 3
    for alpha in (1.0, 1.5, 2.0):
        assert max(f_s(a, alpha) for a in grid) > f_s_large_a_limit(alpha) * 1.01


def test_f_s_huge_separation():
    for alpha in (0.5, 1.0, 2.0):
        assert f_s(1e15, alpha) == pytest.approx(f_s_large_a_limit(alpha), rel=1e-12)


def test_f_s_rejects_bad_input():
    with pytest.raises(DomainError):
        f_s(-1.0, 1.0)
    with pytest.raises(DomainError):
        f_s(1.0, 0.0)


@pytest.mark.parametrize("r_d,r_c", [(1e-5, 1e-6), (1e-5, 1e-7), (1e-6, 1e-6),
                                     (1e-7, 1e-6), (1e-5, 1e-9)])
def test_g2_closed_forms(r_d, r_c):
    g0 = (-math.expm1(-r_d**2 / (2 * r_c**2))) / r_d
    assert g2_disk(0.0, r_d, r_c) == pytest.approx(g0, rel=1e-8)
    x = r_d**2 / r_c**2
    # e^{-x} I0(x) written through the scaled Bessel function
    gb = (1 - i0e(x)) / (2 * r_d)
    assert g2_disk(r_d, r_d, r_c) == pytest.approx(gb, rel=1e-8)


def test_g2_small_disk_limit():
    r_d, r_c = 1e-9, 1e-6
    assert g2_disk(0.0, r_d, r_c) == pytest.approx(r_d / (2 * r_c**2), rel=1e-6)
    r = 1.5e-6
    assert g2_disk(r, r_d, r_c) == pytest.approx(
        r_d / (2 * r_c**2) * math.exp(-r * r / (2 * r_c**2)), rel=1e-6)


@pytest.mark.parametrize("r_d,r_c", [(1e-5, 1e-6), (1e-6, 1e-6)])
def test_g2_vanishes_far_outside(r_d, r_c):
    assert abs(g2_disk(r_d + 12 * r_c, r_d, r_c)) < 1e-12 * g2_disk(0.0, r_d, r_c)


def test_g2_too_oscillatory():
    with pytest.raises(QuadratureError):
        g2_disk(1.0, 1.0, 1e-7)


def test_circle_area_values():
    r = 1e-5
    assert circle_nonoverlap_area(0.0, r) == 0.0
    assert circle_nonoverlap_area(2 * r, r) == pytest.approx(2 * math.pi * r * r)
    assert circle_nonoverlap_area(5 * r, r) == pytest.approx(2 * math.pi * r * r)
    s = math.sqrt(3) / 2
    formula = 2 * r * r * (math.pi - 2 * (math.asin(s) - 0.5 * s))
    assert circle_nonoverlap_area(r, r) == pytest.approx(formula, rel=1e-14)
    assert circle_nonoverlap_area(r, r) / r**2 == pytest.approx(AREA_MC_AT_RD, rel=1e-3)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 5), st.floats(0, 1), st.floats(1e-6, 10))
def test_circle_area_bounded_and_monotone(t, dt, r_d):
    a = circle_nonoverlap_area(t * r_d, r_d)
    b = circle_nonoverlap_area((t + dt) * r_d, r_d)
    full = 2 * math.pi * r_d**2
    assert 0 <= a / full <= 1
    assert b >= a - 1e-12 * full
