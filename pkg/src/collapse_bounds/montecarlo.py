"""
Monte Carlo sampling of the collapse-induced stochastic force.

The unitary unraveling of the master equation drives a point particle with the
force

    F_j = hbar sqrt(gamma) (m/m0)^alpha  int d^3x [d_j g^alpha(q - x)] w(x, t)

where ``w`` is space-time white noise. Space is cut into cubic cells of side
``h r_C`` covering ``[-L, L]^3`` around the (frozen) particle; in every cell and
time step ``w`` is an independent normal variate of variance ``1/(dV dt)``.
Because the kernel gradient factorizes along the three axes, the sum over the
``n^3`` cells is done as a chain of small matrix-vector products.

Each trajectory uses its own Philox stream derived from ``(seed, index)``, so
results do not depend on execution order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import CONSTANTS, CollapseParams, DomainError, ValidityWarning, _check_positive
from .radiation import emission_rate_single

__all__ = [
    "NoiseGridConfig", "TrajectoryStats", "PowerEstimate", "trajectory_rng",
    "sample_force", "sample_forces", "force_variance_coefficient",
    "discrete_force_variance_coefficient", "discretization_error",
    "momentum_variance", "radiated_power_estimate",
]

M0 = CONSTANTS.m0
HBAR = CONSTANTS.hbar
MIN_TRAJECTORIES = 100


@dataclass(frozen=True)
class NoiseGridConfig:
    """Discretization of the noise field.

    Attributes
    ----------
    half_width : float
        Half side of the cubic noise box, in units of ``r_C``.
    spacing : float
        Cell side, in units of ``r_C``.
    dt : float
        Time step [s].
    n_steps : int
        Number of time steps per trajectory.
    n_trajectories : int
        Ensemble size; fewer than 100 triggers a warning.
    rng_seed : int
    """

    half_width: float = 8.0
    spacing: float = 0.25
    dt: float = 1e-3
    n_steps: int = 1000
    n_trajectories: int = 1000
    rng_seed: int = 42

    def __post_init__(self):
        if not self.spacing > 0 or self.spacing > 0.25:
            raise DomainError("spacing must lie in (0, 0.25] r_C")
        if not self.half_width >= 8:
            raise DomainError("half_width must be at least 8 r_C")
        _check_positive(dt=self.dt)
        if self.n_steps < 1 or self.n_trajectories < 1:
            raise DomainError("n_steps and n_trajectories must be >= 1")
        if self.rng_seed < 0:
            raise DomainError("rng_seed must be non-negative")
        if self.n_trajectories < MIN_TRAJECTORIES:
            warnings.warn(f"n_trajectories={self.n_trajectories} is below the "
                          f"statistical minimum of {MIN_TRAJECTORIES}",
                          ValidityWarning, stacklevel=3)

    @property
    def n_cells(self):
        return int(round(2 * self.half_width / self.spacing))


def trajectory_rng(seed, index):
    """Independent generator for trajectory ``index`` of a run seeded with ``seed``."""
    return np.random.Generator(np.random.Philox(
        np.random.SeedSequence(seed, spawn_key=(index,))))


def _axis_profiles(alpha, spacing, half_width):
    n = int(round(2 * half_width / spacing))
    z = -half_width + (np.arange(n) + 0.5) * spacing
    e = np.exp(-0.5 * alpha * z * z)
    return -alpha * z * e, e


class _Field:
    """Contracts cell noise with the three force-kernel components."""

    def __init__(self, params: CollapseParams, m, spacing, half_width):
        a, r = params.alpha, params.r_c
        d, e = _axis_profiles(a, spacing, half_width)
        self.n = d.size
        self.d = d.astype(np.float32)
        self.e = e.astype(np.float32)
        # hbar sqrt(gamma) (m/m0)^a (2 pi r^2)^(-3a/2) / r, times sqrt(dV)
        self.scale = HBAR * math.sqrt(params.gamma) * (m / M0) ** a \
            * (2 * math.pi * r * r) ** (-1.5 * a) / r * (spacing * r) ** 1.5
        self._buf = np.empty((self.n,) * 3, dtype=np.float32)

    def draw(self, rng):
        """Sum over cells of ``c_j(zeta) xi`` for one set of unit normals."""
        xi = rng.standard_normal(out=self._buf, dtype=np.float32)
        xe = xi @ self.e
        xd = xi @ self.d
        f1 = self.d @ (xe @ self.e)
        f2 = self.e @ (xe @ self.d)
        f3 = self.e @ (xd @ self.e)
        return np.array([f1, f2, f3], dtype=float)


def sample_force(params: CollapseParams, m, grid: NoiseGridConfig, rng_state):
    """One draw of the discretized stochastic force [N] over a time step ``grid.dt``.

    ``rng_state`` is a :class:`numpy.random.Generator`.
    """
    _check_positive(m=m)
    f = _Field(params, m, grid.spacing, grid.half_width)
    return f.scale / math.sqrt(grid.dt) * f.draw(rng_state)


def sample_forces(params: CollapseParams, m, grid: NoiseGridConfig, n=None):
    """``n`` independent force draws (default ``grid.n_trajectories``), shape ``(n, 3)``.

    Draw ``i`` uses :func:`trajectory_rng` with index ``i``.
    """
    _check_positive(m=m)
    n = grid.n_trajectories if n is None else int(n)
    f = _Field(params, m, grid.spacing, grid.half_width)
    out = np.empty((n, 3))
    for i in range(n):
        out[i] = f.draw(trajectory_rng(grid.rng_seed, i))
    return out * (f.scale / math.sqrt(grid.dt))


def force_variance_coefficient(params: CollapseParams, m):
    """Continuum ``Var(F_j) dt = alpha lambda (m/m0)^(2 alpha) hbar^2 / (2 r_C^2)``."""
    _check_positive(m=m)
    a = params.alpha
    return a * params.lam * (m / M0) ** (2 * a) * HBAR**2 / (2 * params.r_c**2)


def discrete_force_variance_coefficient(params: CollapseParams, m, spacing,
                                        half_width=8.0):
    """Exact ``Var(F_j) dt`` of the discretized force for any cell size."""
    d, e = _axis_profiles(params.alpha, spacing, half_width)
    r = params.r_c
    k2 = HBAR**2 * params.gamma * (m / M0) ** (2 * params.alpha) \
        * (2 * math.pi * r * r) ** (-3 * params.alpha) / (r * r) * (spacing * r) ** 3
    return k2 * float(np.sum(d * d)) * float(np.sum(e * e)) ** 2


def discretization_error(alpha, spacing, half_width=8.0):
    """Relative error of the cell sum for ``Var(F_j)`` against the continuum value."""
    p = CollapseParams(alpha, 1.0, 1.0)
    return discrete_force_variance_coefficient(p, M0, spacing, half_width) \
        / force_variance_coefficient(p, M0) - 1.0


@dataclass(frozen=True)
class TrajectoryStats:
    """Ensemble statistics of the momentum at the recorded times.

    ``mean``, ``var`` and ``se_mean`` have shape ``(len(times), 3)``.
    ``slope`` estimates ``d Var(p_j)/dt`` from all increments and components;
    ``slope_se`` is its standard error.
    """

    times: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    se_mean: np.ndarray
    slope: float
    slope_se: float
    analytic_slope: float
    n_trajectories: int
    seed: int

    @property
    def z_score(self):
        return (self.slope - self.analytic_slope) / self.slope_se

    @property
    def relative_error(self):
        return self.slope / self.analytic_slope - 1.0


def _step_counts(grid, t_record):
    t = np.asarray(t_record, dtype=float)
    if t.ndim != 1 or t.size == 0 or np.any(t < 0) or np.any(np.diff(t) < 0):
        raise DomainError("t_record must be a non-empty, non-decreasing list of times >= 0")
    steps = np.rint(t / grid.dt).astype(np.int64)
    if np.any(np.abs(steps * grid.dt - t) > 1e-9 * np.maximum(t, grid.dt)):
        raise DomainError("recorded times must be multiples of grid.dt")
    if steps[-1] > grid.n_steps:
        raise DomainError("recorded times exceed n_steps * dt")
    return t, np.diff(np.concatenate([[0], steps]))


def momentum_variance(params: CollapseParams, m, grid: NoiseGridConfig,
                      t_record: Sequence[float] = None) -> TrajectoryStats:
    """Ensemble momentum statistics of a frozen particle kicked by the noise.

    Over ``k`` time steps the kicks add up to a sum of ``k`` independent
    normals per cell, which is itself one normal of variance ``k``; each
    interval between recorded times is therefore sampled with a single draw,
    exact in distribution.
    """
    _check_positive(m=m)
    if t_record is None:
        t_record = [grid.n_steps * grid.dt]
    times, counts = _step_counts(grid, t_record)
    f = _Field(params, m, grid.spacing, grid.half_width)
    n_traj, n_t = grid.n_trajectories, times.size
    p = np.zeros((n_traj, n_t, 3))
    rate_samples = []
    for i in range(n_traj):
        rng = trajectory_rng(grid.rng_seed, i)
        cur = np.zeros(3)
        for k, c in enumerate(counts):
            if c:
                dtk = c * grid.dt
                dp = f.scale * math.sqrt(dtk) * f.draw(rng)
                cur = cur + dp
                rate_samples.append(dp * dp / dtk)
            p[i, k] = cur
    mean = p.mean(axis=0)
    var = p.var(axis=0, ddof=1) if n_traj > 1 else np.zeros((n_t, 3))
    se = np.sqrt(var / n_traj)
    r = np.concatenate(rate_samples) if rate_samples else np.zeros(1)
    slope = float(r.mean())
    slope_se = float(r.std(ddof=1) / math.sqrt(r.size)) if r.size > 1 else float("inf")
    return TrajectoryStats(times, mean, var, se, slope, slope_se,
                           force_variance_coefficient(params, m), n_traj,
                           grid.rng_seed)


@dataclass(frozen=True)
class PowerEstimate:
    """Sampled and analytic radiated power [W] in an energy band."""

    sampled: float
    standard_error: float
    analytic: float

    @property
    def relative_error(self):
        return self.sampled / self.analytic - 1.0


def radiated_power_estimate(params: CollapseParams, m, q, grid: NoiseGridConfig,
                            band) -> PowerEstimate:
    """Larmor power radiated in the photon-energy band ``[E1, E2]``.

    The discretized force is white up to the Nyquist frequency ``pi/dt``, so
    the sampled mean Larmor power ``q^2 <|a|^2> / (6 pi eps0 c^3)`` is spread
    evenly over photon energies ``[0, hbar pi / dt]``; the band receives the
    fraction ``(E2 - E1) / (hbar pi / dt)``. The analytic value integrates
    ``E dGamma/dE`` over the band.
    """
    _check_positive(m=m, q=q)
    e1, e2 = (float(x) for x in band)
    e_max = HBAR * math.pi / grid.dt
    if not 0 < e1 < e2:
        raise DomainError("band must satisfy 0 < E1 < E2")
    if e2 > e_max:
        raise DomainError(f"band exceeds the sampled bandwidth hbar*pi/dt = {e_max:.3e} J")
    forces = sample_forces(params, m, grid)
    larmor = q * q / (6 * math.pi * CONSTANTS.eps0 * CONSTANTS.c**3 * m * m)
    power = larmor * np.sum(forces * forces, axis=1) * (e2 - e1) / e_max
    n = power.size
    se = float(power.std(ddof=1) / math.sqrt(n)) if n > 1 else float("inf")
    analytic = (e2 - e1) * e1 * emission_rate_single(params, m, q, e1)
    return PowerEstimate(float(power.mean()), se, analytic)
