"""
Special functions and the one-dimensional integrals used across the package.

The elementary special functions (erf, normal CDF, Bessel ``J0``, ``J1``,
``I0``) are thin wrappers over :mod:`scipy.special`. The collapse-specific
integrals are evaluated here:

* ``G(alpha) = int Phi(z)^(2 alpha - 2) exp(-z^2) dz``
* ``f_S(a, alpha)``, the separation profile of the force noise between two
  test masses,
* ``G_2(r, r_D, r_C)``, the Gaussian-damped Hankel-type integral describing the
  smeared density of a thin disk,
* the non-overlapping area of two equal circles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .core import DomainError, QuadratureError

__all__ = [
    "QuadratureConfig", "DEFAULT_QUAD", "erf", "phi_cdf", "bessel_j0",
    "bessel_j1", "bessel_i0", "g_alpha_integral", "g_alpha_cutoff_sensitivity",
    "f_s", "f_s_closed_form", "f_s_small_a_coefficient", "f_s_large_a_limit",
    "f_s_psl_approximation", "g2_disk", "circle_nonoverlap_area",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances shared by the quadrature routines.

    Attributes
    ----------
    abs_tol, rel_tol : float
        Absolute and relative tolerances handed to the integrators.
    max_subdivisions : int
        Subinterval limit for adaptive quadrature.
    infinite_domain_cutoff : float
        Truncation of infinite domains in units of the integrand's natural
        (Gaussian) scale.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    infinite_domain_cutoff: float = 12.0

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be > 0")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")
        if not self.infinite_domain_cutoff >= 8:
            raise DomainError("infinite_domain_cutoff must be >= 8")


DEFAULT_QUAD = QuadratureConfig()


# -- elementary functions ---------------------------------------------------

def erf(x):
    """Error function."""
    return special.erf(x)


def phi_cdf(z):
    """Standard normal CDF ``[1 + erf(z / sqrt 2)] / 2``."""
    return special.ndtr(z)


def bessel_j0(x):
    return special.j0(x)


def bessel_j1(x):
    return special.j1(x)


def bessel_i0(x):
    return special.i0(x)


def _quad(func, a, b, cfg, points=None, what="integral"):
    with np.errstate(all="ignore"):
        val, err, *info = integrate.quad(
            func, a, b, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
            limit=cfg.max_subdivisions, points=points, full_output=1)
    ok = len(info) < 2 or not info[1]
    if not (np.isfinite(val) and np.isfinite(err)):
        raise QuadratureError(f"{what} is not finite", val, err)
    if not ok and err > max(cfg.abs_tol, 10 * cfg.rel_tol * abs(val)):
        raise QuadratureError(f"{what} did not converge: {info[1]}", val, err)
    return val


# -- G(alpha) ---------------------------------------------------------------

G_ALPHA_MIN = 0.4


def _g_alpha_integrand(alpha):
    p = 2.0 * alpha - 2.0
    return lambda z: math.exp(p * special.log_ndtr(z) - z * z)


@lru_cache(maxsize=256)
def _g_alpha_cached(alpha, cfg):
    c = cfg.infinite_domain_cutoff
    # Phi^(2a-2) grows like exp((1-a) z^2) on the left, so the effective
    # Gaussian width there is 1/sqrt(2a) rather than 1/sqrt 2
    left = -c * max(1.0, 1.0 / math.sqrt(2.0 * alpha))
    return _quad(_g_alpha_integrand(alpha), left, c, cfg, points=[0.0],
                 what=f"G({alpha})")


def g_alpha_integral(alpha, cfg: QuadratureConfig = DEFAULT_QUAD):
    """Surface factor ``G(alpha) = int Phi(z)^(2 alpha - 2) exp(-z^2) dz``.

    The integrand is evaluated as ``exp((2 alpha - 2) log Phi(z) - z^2)`` so the
    left tail stays finite for ``alpha < 1``. Validated for ``alpha >= 0.4``.

    Examples
    --------
    >>> round(g_alpha_integral(1.0) ** 2, 10) == round(math.pi, 10)
    True
    """
    alpha = float(alpha)
    if not np.isfinite(alpha) or alpha < G_ALPHA_MIN:
        raise DomainError(
            f"G(alpha) is only validated for alpha >= {G_ALPHA_MIN}; got {alpha}. "
            "The left tail of the integrand decays like exp(-alpha z^2) and the "
            "truncated evaluation becomes cutoff dominated as alpha -> 0.")
    return _g_alpha_cached(alpha, cfg)


def g_alpha_cutoff_sensitivity(alpha, cfg: QuadratureConfig = DEFAULT_QUAD,
                               extra=4.0):
    """Relative change of ``G(alpha)`` when the cutoff is widened by ``extra``."""
    base = g_alpha_integral(alpha, cfg)
    wide = QuadratureConfig(cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions,
                            cfg.infinite_domain_cutoff + extra)
    return abs(g_alpha_integral(alpha, wide) - base) / base


# -- f_S(a, alpha) ----------------------------------------------------------

def _f_s_integrand(a, alpha):
    def f(x):
        u = -0.5 * x * x
        v = -0.5 * (x + a) ** 2
        s = np.logaddexp(u, v)
        w = x * math.exp(u - s) - (x + a) * math.exp(v - s)
        return math.exp(2.0 * alpha * s) * w * w
    return f


def f_s(a_tilde, alpha, cfg: QuadratureConfig = DEFAULT_QUAD):
    """Force-noise profile ``f_S(a, alpha)`` for two masses a distance ``a`` apart.

    ``a_tilde`` is the separation in units of ``r_C``. The integrand

        [e^(-x^2/2) + e^(-(x+a)^2/2)]^(2 alpha - 2)
            * [x e^(-x^2/2) - (x+a) e^(-(x+a)^2/2)]^2

    is rewritten as ``exp(2 alpha s) w^2`` with ``s`` the log-sum-exp of the two
    Gaussian exponents, which keeps it bounded for every ``alpha > 0``.
    """
    a = float(a_tilde)
    alpha = float(alpha)
    if not (np.isfinite(a) and a >= 0):
        raise DomainError(f"a_tilde must be finite and >= 0, got {a_tilde}")
    if not (np.isfinite(alpha) and alpha > 0):
        raise DomainError(f"alpha must be > 0, got {alpha}")
    if a == 0.0:
        return 0.0
    c = cfg.infinite_domain_cutoff / math.sqrt(alpha)
    # the integrand is symmetric under x -> -x - a, so integrate x > -a/2 only;
    # beyond 2c the two Gaussians no longer overlap and the gap is negligible
    lo = max(-0.5 * a, -c)
    points = [0.0] if lo < 0 else None
    return 2.0 * _quad(_f_s_integrand(a, alpha), lo, c, cfg, points=points,
                       what=f"f_S({a}, {alpha})")


def f_s_closed_form(a, alpha):
    """Closed forms of ``f_S`` for ``alpha`` in {1, 3/2, 2}."""
    a = np.asarray(a, dtype=float)
    a2 = a * a
    sp = math.sqrt(math.pi)
    if alpha == 1:
        return sp * (1.0 + (0.5 * a2 - 1.0) * np.exp(-0.25 * a2))
    if alpha == 1.5:
        return (2.0 / 3.0) * math.sqrt(2.0 * math.pi / 3.0) * (
            1.0 + (5.0 * a2 / 3.0 - 1.0) * np.exp(-a2 / 3.0))
    if alpha == 2:
        return 0.5 * math.sqrt(0.5 * math.pi) * (
            1.0 + (3.0 * a2 - 1.0) * np.exp(-0.5 * a2)
            + 2.0 * a2 * np.exp(-0.375 * a2))
    raise DomainError(f"no closed form of f_S for alpha={alpha}")


def f_s_small_a_coefficient(alpha):
    """Limit of ``f_S(a, alpha) / a^2`` as ``a -> 0``."""
    return math.sqrt(math.pi) * (3.0 + 4.0 * alpha * (alpha - 1.0)) \
        * 4.0 ** (alpha - 2.0) / alpha**2.5


def f_s_large_a_limit(alpha):
    """Limit of ``f_S(a, alpha)`` as ``a -> infinity``."""
    return math.sqrt(math.pi) / alpha**1.5


def f_s_psl_approximation(a):
    """Simple analytic stand-in for ``f_S(a, 1/2)``."""
    return 2.0 * math.sqrt(2.0 * math.pi) * (1.0 - np.exp(-0.5 * np.asarray(a) ** 2))


# -- G_2 ----------------------------------------------------------------------

_GL_LO = np.polynomial.legendre.leggauss(20)
_GL_HI = np.polynomial.legendre.leggauss(30)
_G2_MAX_PANELS = 400_000


def _panel_sum(f, edges, rule):
    x, w = rule
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = 0.5 * (hi + lo) + half * x
    total = 0.0
    # chunk the panels to bound memory
    for i in range(0, nodes.shape[0], 20_000):
        total += float(np.sum(f(nodes[i:i + 20_000]) * (half[i:i + 20_000] * w)))
    return total


def g2_disk(r, r_d, r_c, cfg: QuadratureConfig = DEFAULT_QUAD):
    """``G_2(r, r_D, r_C) = int_0^inf J0(r k) J1(r_D k) exp(-k^2 r_C^2 / 2) dk`` [1/m].

    Evaluated in ``kappa = k r_C`` on ``[0, cutoff]`` with composite
    Gauss-Legendre panels short enough to resolve the Bessel oscillations.
    The error estimate compares a 20- and a 30-point rule on every panel.
    """
    r, r_d, r_c = float(r), float(r_d), float(r_c)
    if not (r >= 0 and r_d > 0 and r_c > 0) or not np.isfinite([r, r_d, r_c]).all():
        raise DomainError("g2_disk needs r >= 0 and r_d, r_c > 0")
    rho, rho_d = r / r_c, r_d / r_c
    kmax = cfg.infinite_domain_cutoff
    # half a period of the fastest oscillation per panel
    width = min(1.0, math.pi / (rho + rho_d))
    n = int(math.ceil(kmax / width))
    if n > _G2_MAX_PANELS:
        raise QuadratureError(
            f"G_2 needs {n} panels (r/r_C={rho:.3g}, r_D/r_C={rho_d:.3g})")
    edges = np.linspace(0.0, kmax, n + 1)

    def f(k):
        return special.j0(rho * k) * special.j1(rho_d * k) * np.exp(-0.5 * k * k)

    lo = _panel_sum(f, edges, _GL_LO)
    hi = _panel_sum(f, edges, _GL_HI)
    # accumulated roundoff over many panels sets the floor of the estimate
    scale = math.sqrt(n) * 1e-15 / max(1.0, math.sqrt(rho * rho_d))
    if abs(hi - lo) > max(cfg.abs_tol, cfg.rel_tol * abs(hi), scale):
        raise QuadratureError("G_2 panel rules disagree", hi / r_c, abs(hi - lo) / r_c)
    return hi / r_c


# -- two-circle geometry ------------------------------------------------------

def circle_nonoverlap_area(d, r_d):
    """Area of the non-overlapping parts of two radius-``r_d`` circles ``d`` apart."""
    d = np.asarray(d, dtype=float)
    if not r_d > 0:
        raise DomainError("r_d must be > 0")
    if np.any(~(d >= 0)):
        raise DomainError("d must be >= 0")
    t = np.minimum(d / (2.0 * r_d), 1.0)
    s = np.sqrt(1.0 - t * t)
    area = 2.0 * math.pi * r_d**2 - 4.0 * r_d**2 * (np.arcsin(s) - t * s)
    area = np.clip(area, 0.0, 2.0 * math.pi * r_d**2)
    return float(area) if area.ndim == 0 else area
