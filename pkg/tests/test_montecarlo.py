import math

import numpy as np
import pytest

from collapse_bounds.core import CollapseParams, DomainError, ValidityWarning
from collapse_bounds.dynamics import quadratic_observable_growth
from collapse_bounds.montecarlo import (NoiseGridConfig, discrete_force_variance_coefficient,
                                        discretization_error, force_variance_coefficient,
                                        momentum_variance, radiated_power_estimate,
                                        sample_force, sample_forces, trajectory_rng)

M0 = 1.67262192369e-27
E = 1.602176634e-19
HBAR = 1.054571817e-34
P1 = CollapseParams(1.0, 1e-7, 2.2e-17)
GRID = NoiseGridConfig(n_trajectories=2000, dt=1e-3, n_steps=1000)


@pytest.fixture(scope="module")
def forces():
    return sample_forces(P1, M0, GRID)


def test_force_mean_is_zero(forces):
    se = forces.std(axis=0, ddof=1) / math.sqrt(len(forces))
    assert np.all(np.abs(forces.mean(axis=0)) < 3 * se)


def test_force_variance_and_isotropy(forces):
    n = len(forces)
    var = forces.var(axis=0, ddof=1) * GRID.dt
    want = force_variance_coefficient(P1, M0)
    # the variance of a sample variance of normals is 2 sigma^4 / (n - 1)
    se = want * math.sqrt(2 / (n - 1))
    assert np.all(np.abs(var - want) < 3 * se)
    assert np.ptp(var) < 3 * math.sqrt(2) * se


def test_continuum_variance_closed_form():
    # Var(F_j) dt = hbar^2 gamma (m/m0)^(2 alpha) int (d_j g^alpha)^2
    a, r = 0.5, 2e-7
    p = CollapseParams(a, r, 1e-9)
    kernel = math.pi**1.5 * r / (2 * math.sqrt(a)) * (2 * math.pi * r * r) ** (-3 * a)
    want = HBAR**2 * p.gamma * 9.0 ** (2 * a) * kernel
    assert force_variance_coefficient(p, 9 * M0) == pytest.approx(want, rel=1e-12)


def test_sampled_force_is_reproducible():
    a = sample_force(P1, M0, GRID, trajectory_rng(7, 3))
    b = sample_force(P1, M0, GRID, trajectory_rng(7, 3))
    c = sample_force(P1, M0, GRID, trajectory_rng(7, 4))
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    g = NoiseGridConfig(n_trajectories=100)
    assert np.array_equal(sample_forces(P1, M0, g), sample_forces(P1, M0, g))


def test_discretization_refinement():
    errs = [abs(discretization_error(1.0, h)) for h in (2.0, 1.0, 0.5)]
    assert errs[0] > errs[1] > errs[2]
    assert abs(discretization_error(1.0, 0.25)) < 1e-12
    assert abs(discretization_error(0.5, 0.25)) < 1e-12


def test_discrete_coefficient_matches_continuum_on_default_grid():
    for a in (0.5, 1.0, 2.0):
        p = CollapseParams(a, 1e-7, 1.0)
        assert discrete_force_variance_coefficient(p, M0, 0.25) == pytest.approx(
            force_variance_coefficient(p, M0), rel=1e-10)


@pytest.fixture(scope="module")
def stats():
    g = NoiseGridConfig(n_trajectories=1000, dt=1e-3, n_steps=1000, rng_seed=42)
    return momentum_variance(P1, M0, g, [0.0, 0.5, 1.0])


def test_momentum_variance_slope(stats):
    assert stats.var[0].tolist() == [0.0, 0.0, 0.0]
    assert abs(stats.z_score) < 3
    assert abs(stats.relative_error) < 0.05
    _, dp2 = quadratic_observable_growth(P1, M0, 1.0)
    assert stats.analytic_slope == pytest.approx(dp2, rel=1e-14)
    assert np.all(stats.var >= 0)
    assert np.allclose(stats.se_mean, np.sqrt(stats.var / stats.n_trajectories))


def test_momentum_mean_has_no_drift(stats):
    nonzero = stats.times > 0
    assert np.all(np.abs(stats.mean[nonzero]) < 3 * stats.se_mean[nonzero])


def test_slope_ratio_between_csl_and_psl():
    g = NoiseGridConfig(n_trajectories=1000)
    s1 = momentum_variance(P1, M0, g)
    s2 = momentum_variance(CollapseParams(0.5, 1e-7, 2.2e-17), M0, g)
    assert s1.analytic_slope / s2.analytic_slope == pytest.approx(2.0, rel=1e-14)
    ratio = s1.slope / s2.slope
    err = ratio * math.hypot(s1.slope_se / s1.slope, s2.slope_se / s2.slope)
    assert abs(ratio - 2) < 3 * err


def test_momentum_variance_validation():
    g = NoiseGridConfig(n_trajectories=100, dt=1e-3, n_steps=10)
    with pytest.raises(DomainError):
        momentum_variance(P1, M0, g, [0.0, 0.0105])
    with pytest.raises(DomainError):
        momentum_variance(P1, M0, g, [0.02])
    with pytest.raises(DomainError):
        momentum_variance(P1, M0, g, [0.005, 0.002])


def test_grid_config_validation():
    with pytest.raises(DomainError):
        NoiseGridConfig(spacing=0.5)
    with pytest.raises(DomainError):
        NoiseGridConfig(half_width=6)
    with pytest.raises(DomainError):
        NoiseGridConfig(dt=0)
    with pytest.warns(ValidityWarning):
        NoiseGridConfig(n_trajectories=10)


BAND = (1e-33, 2e-33)


def test_radiated_power_matches_analytic():
    g = NoiseGridConfig(n_trajectories=1000)
    est = radiated_power_estimate(P1, M0, E, g, BAND)
    assert abs(est.sampled - est.analytic) < 3 * est.standard_error
    assert abs(est.relative_error) < 0.05


def test_radiated_power_scalings():
    g = NoiseGridConfig(n_trajectories=100)
    base = radiated_power_estimate(P1, M0, E, g, BAND)
    charged = radiated_power_estimate(P1, M0, 2 * E, g, BAND)
    heavy = radiated_power_estimate(P1, 5 * M0, E, g, BAND)
    assert charged.sampled == pytest.approx(4 * base.sampled, rel=1e-12)
    assert heavy.sampled == pytest.approx(base.sampled, rel=1e-5)
    assert heavy.analytic == pytest.approx(base.analytic, rel=1e-14)


def test_radiated_power_band_validation():
    g = NoiseGridConfig(n_trajectories=100)
    with pytest.raises(DomainError):
        radiated_power_estimate(P1, M0, E, g, (2e-33, 1e-33))
    with pytest.raises(DomainError):
        radiated_power_estimate(P1, M0, E, g, (1e-33, 1.0))
