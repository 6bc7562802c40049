"""
Decoherence rates and the growth of quadratic observables.

Covers a single point particle, a probe particle surrounded by fixed point-like
bystanders, and constant-density rigid bodies whose surface is flat on the
``r_C`` scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (CONSTANTS, BodyGeometry, CollapseParams, Cube, Cylinder,
                   DomainError, Parallelepiped, QuadratureError, Sphere,
                   _check_positive)
from .specfun import DEFAULT_QUAD, QuadratureConfig, g_alpha_integral, phi_cdf

__all__ = [
    "single_particle_decoherence_rate", "quadratic_observable_growth",
    "BystanderConfig", "BystanderResult", "bystander_decoherence_rate",
    "SurfaceIntegralResult", "surface_integrals", "surface_integral_nj2",
    "rigid_body_coefficient", "RigidBodyGrowth", "rigid_body_growth",
    "rigid_body_growth_from_coefficients", "smeared_density_near_surface",
]

M0 = CONSTANTS.m0
HBAR = CONSTANTS.hbar


def single_particle_decoherence_rate(params: CollapseParams, m, d):
    """Decoherence rate ``Gamma_alpha(d)`` [1/s] of a superposition of width ``d``.

    ``lambda (m/m0)^(2 alpha) [1 - exp(-alpha d^2 / 4 r_C^2)]``.
    """
    _check_positive(m=m)
    d = np.asarray(d, dtype=float)
    if np.any(~(d >= 0)):
        raise DomainError("d must be >= 0")
    a, r = params.alpha, params.r_c
    out = params.lam * (m / M0) ** (2 * a) * -np.expm1(-a * d * d / (4.0 * r * r))
    return float(out) if out.ndim == 0 else out


def _momentum_diffusion(params: CollapseParams, m):
    # d<p_j^2>/dt for a point particle
    return params.alpha * params.lam / params.r_c**2 * (m / M0) ** (2 * params.alpha) \
        * HBAR**2 / 2.0


def quadratic_observable_growth(params: CollapseParams, m, t):
    """Collapse-induced growth of ``<q_j^2>`` [m^2] and ``<p_j^2>`` [kg^2 m^2/s^2].

    Returns
    -------
    dq2, dp2 : float
        Increments along a single axis after time ``t``.
    """
    _check_positive(m=m)
    t = np.asarray(t, dtype=float)
    if np.any(~(t >= 0)):
        raise DomainError("t must be >= 0")
    dp2 = _momentum_diffusion(params, m) * t
    dq2 = dp2 * t * t / (3.0 * m * m)
    if t.ndim == 0:
        return float(dq2), float(dp2)
    return dq2, dp2


# -- bystanders ---------------------------------------------------------------

@dataclass(frozen=True)
class BystanderConfig:
    """Probe in a superposition of ``x_p`` and ``y_p`` next to fixed point masses.

    Attributes
    ----------
    m_p : float
        Probe mass [kg].
    x_p, y_p : 3-vectors
        The two branch positions of the probe [m].
    bystanders : sequence of (mass, position)
        Classical, perfectly localized neighbours.
    """

    m_p: float
    x_p: tuple
    y_p: tuple
    bystanders: tuple = field(default_factory=tuple)

    def __post_init__(self):
        _check_positive(m_p=self.m_p)
        object.__setattr__(self, "x_p", _vec3(self.x_p, "x_p"))
        object.__setattr__(self, "y_p", _vec3(self.y_p, "y_p"))
        parsed = []
        for mk, zk in self.bystanders:
            _check_positive(bystander_mass=mk)
            parsed.append((float(mk), _vec3(zk, "bystander position")))
        object.__setattr__(self, "bystanders", tuple(parsed))


def _vec3(v, name):
    v = tuple(float(x) for x in np.asarray(v, dtype=float).ravel())
    if len(v) != 3 or not np.all(np.isfinite(v)):
        raise DomainError(f"{name} must be a finite 3-vector")
    return v


@dataclass(frozen=True)
class BystanderResult:
    rate: float
    error: float


MAX_BYSTANDERS = 8


def _gl_nodes(lo, hi, order):
    x, w = np.polynomial.legendre.leggauss(order)
    n = max(1, int(math.ceil(hi - lo)))
    edges = np.linspace(lo, hi, n + 1)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    return (mid + half * x).ravel(), (half * w).ravel()


def _bystander_integral(mass_p, probe_x, probe_y, env, alpha, lo, hi, order):
    # ∫ d^3ζ [(Σ_x)^α - (Σ_y)^α]^2 in units of r_C; env holds (mass/m0, centre)
    (x, wx), (y, wy), (z, wz) = (_gl_nodes(lo[i], hi[i], order) for i in range(3))
    wyz = np.outer(wy, wz)
    total = 0.0
    for i0 in range(0, x.size, 8):
        xs = x[i0:i0 + 8, None, None]

        def blob(c):
            return np.exp(-0.5 * ((xs - c[0]) ** 2 + ((y - c[1]) ** 2)[None, :, None]
                                  + ((z - c[2]) ** 2)[None, None, :]))

        rest = sum((w * blob(c) for w, c in env), np.zeros((1, 1, 1)))
        sx = rest + mass_p * blob(probe_x)
        sy = rest + mass_p * blob(probe_y)
        diff = sx**alpha - sy**alpha
        total += float(np.einsum("ijk,i,jk->", diff * diff, wx[i0:i0 + 8], wyz))
    return total


def bystander_decoherence_rate(cfg: BystanderConfig, params: CollapseParams,
                               quad_cfg: QuadratureConfig = DEFAULT_QUAD):
    """Decoherence rate of the probe with bystanders held at fixed positions.

    The rate is

        (lambda / 2) (alpha / pi)^(3/2) int d^3z [S_x(z)^alpha - S_y(z)^alpha]^2

    with ``S_x = (m_p/m0) e^(-|z - x_p|^2/2) + sum_k (m_k/m0) e^(-|z - z_k|^2/2)``
    and all lengths in units of ``r_C``. The integral runs over a box reaching
    at least ``10 r_C`` beyond every position, with composite Gauss-Legendre
    panels one ``r_C`` wide. The returned error is the difference between an
    8- and a 12-point rule.

    Returns
    -------
    BystanderResult
    """
    if len(cfg.bystanders) > MAX_BYSTANDERS:
        raise DomainError(f"at most {MAX_BYSTANDERS} bystanders are supported")
    a, r = params.alpha, params.r_c
    px = np.asarray(cfg.x_p) / r
    py = np.asarray(cfg.y_p) / r
    env = [(mk / M0, np.asarray(zk) / r) for mk, zk in cfg.bystanders]
    pts = np.array([px, py] + [c for _, c in env])
    # the integrand decays like exp(-alpha |z|^2)
    pad = max(10.0, 10.0 / math.sqrt(2.0 * a))
    lo, hi = pts.min(axis=0) - pad, pts.max(axis=0) + pad
    if np.any(hi - lo > 400):
        raise DomainError("positions span more than a few hundred r_C; "
                          "the 3D quadrature box would be too large")
    mp = cfg.m_p / M0
    coarse = _bystander_integral(mp, px, py, env, a, lo, hi, 8)
    fine = _bystander_integral(mp, px, py, env, a, lo, hi, 12)
    pref = 0.5 * params.lam * (a / math.pi) ** 1.5
    rate, err = pref * fine, pref * abs(fine - coarse)
    if err > max(quad_cfg.rel_tol * abs(rate), quad_cfg.abs_tol * pref) * 1e3:
        raise QuadratureError("bystander quadrature did not converge", rate, err)
    return BystanderResult(rate, err)


# -- rigid bodies -------------------------------------------------------------

@dataclass(frozen=True)
class SurfaceIntegralResult:
    """Per-axis surface integrals ``I_j = int n_j^2 dS`` [m^2]."""

    values: tuple

    def __getitem__(self, j):
        return self.values[j - 1]

    @property
    def total(self):
        return sum(self.values)


def surface_integrals(body: BodyGeometry) -> SurfaceIntegralResult:
    s = body.shape
    if isinstance(s, Parallelepiped):
        vals = (2 * s.L2 * s.L3, 2 * s.L1 * s.L3, 2 * s.L1 * s.L2)
    elif isinstance(s, Cube):
        vals = (2 * s.L**2,) * 3
    elif isinstance(s, Cylinder):
        side = math.pi * s.R * s.L
        vals = (side, side, 2 * math.pi * s.R**2)
    elif isinstance(s, Sphere):
        vals = (4 * math.pi * s.R**2 / 3,) * 3
    else:
        raise DomainError(f"unsupported shape {type(s).__name__}")
    return SurfaceIntegralResult(tuple(float(v) for v in vals))


def surface_integral_nj2(body: BodyGeometry, j: int):
    """``int_{dV} n_j^2 dS`` [m^2] along axis ``j`` in {1, 2, 3}."""
    if j not in (1, 2, 3):
        raise DomainError(f"axis must be 1, 2 or 3, got {j}")
    return surface_integrals(body)[j]


def _surface_factor(body, params):
    a = params.alpha
    return a * a * (body.mu0 / M0) ** (2 * a) * g_alpha_integral(a) \
        / (2.0 * math.pi * params.r_c)


def rigid_body_coefficient(body: BodyGeometry, params: CollapseParams, j: int):
    """Rigid-body coefficient ``C_j`` of a constant-density, flat-surfaced body.

    ``C_j = alpha^2 (mu0/m0)^(2 alpha) G(alpha) / (2 pi r_C) * I_j``. Multiplied by
    ``gamma hbar^2`` it gives the growth rate of ``<P_j^2>``. A
    :class:`~collapse_bounds.core.ValidityWarning` is emitted when the body is
    not at least ten collapse radii thick.
    """
    body.check_large(params.r_c)
    return _surface_factor(body, params) * surface_integral_nj2(body, j)


@dataclass(frozen=True)
class RigidBodyGrowth:
    dQ2: float
    dP2: float
    dE_dt: float


def _check_mass(body, M):
    _check_positive(M=M)
    if abs(M - body.mass) > 1e-9 * body.mass:
        raise DomainError(f"M={M} is inconsistent with mu0*V={body.mass}")


def rigid_body_growth(body: BodyGeometry, params: CollapseParams, M, t):
    """Growth of ``<Q^2>``, ``<P^2>`` and the heating rate from ``A`` and ``V``.

    Parameters
    ----------
    body : BodyGeometry
    params : CollapseParams
    M : float
        Total mass; must equal ``mu0 V`` to 1e-9 relative.
    t : float
        Elapsed time [s].
    """
    _check_mass(body, M)
    if not t >= 0:
        raise DomainError("t must be >= 0")
    body.check_large(params.r_c)
    a, r, mu0 = params.alpha, params.r_c, body.mu0
    A, V = body.area, body.volume
    k = params.gamma * (mu0 / M0) ** (2 * a) * HBAR**2 * a * a \
        * g_alpha_integral(a) / (2.0 * math.pi * r)
    dQ2 = k / (3.0 * mu0**2) * A / V**2 * t**3
    dP2 = k * A * t
    dE = params.gamma * HBAR**2 * a * a * g_alpha_integral(a) / (4.0 * math.pi * r * M0) \
        * (mu0 / M0) ** (2 * a - 1) * A / V
    return RigidBodyGrowth(dQ2, dP2, dE)


def rigid_body_growth_from_coefficients(body: BodyGeometry, params: CollapseParams,
                                        M, t):
    """Same quantities as :func:`rigid_body_growth`, summed from the ``C_j``."""
    _check_mass(body, M)
    if not t >= 0:
        raise DomainError("t must be >= 0")
    c = sum(rigid_body_coefficient(body, params, j) for j in (1, 2, 3))
    g = params.gamma * HBAR**2
    return RigidBodyGrowth(g * t**3 * c / (3.0 * M * M), g * t * c, g * c / (2.0 * M))


def smeared_density_near_surface(d, mu0, r_c):
    """Smeared mass density ``mu0 Phi(-d / r_C)`` at signed distance ``d`` (inside < 0)."""
    _check_positive(mu0=mu0, r_c=r_c)
    out = mu0 * phi_cdf(-np.asarray(d, dtype=float) / r_c)
    return float(out) if np.ndim(out) == 0 else out
