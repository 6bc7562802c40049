"""
Lower and upper bounds on the collapse rate and the resulting exclusion regions.

Lower bounds come from requiring that a graphene disk superposition decoheres
within the time resolution of human perception. Upper bounds come from the
spontaneous X-ray emission of a Germanium detector and from the force noise
measured on the test masses of LIGO and LISA Pathfinder.

Where a bound is known only in the two asymptotic regimes ``r_C << D`` and
``r_C >> D``, the two branches are joined at their intersection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (CONSTANTS, CollapseParams, DomainError, QuadratureError,
                   RegimeError, _check_positive)
from .specfun import circle_nonoverlap_area, f_s, g_alpha_integral

__all__ = [
    "DiskSpec", "DetectorSpec", "RadiationBoundSpec", "LIGO", "LISA",
    "GERMANIUM", "BoundCurve", "ExclusionReport", "default_grid", "n_of_rc",
    "adler_effective_rate", "theoretical_lower_bound", "thin_disk_decoherence_rate",
    "refined_disk_lower_bound", "radiation_ratio", "radiation_upper_bound",
    "gw_noise_per_lambda", "gw_force_noise", "gw_upper_bound", "lower_curve",
    "radiation_curve", "gw_curve", "assemble_exclusion",
    "modified_experiment_scenarios", "critical_scale", "BOUND_KINDS",
]

M0 = CONSTANTS.m0
HBAR = CONSTANTS.hbar
RADIATION_VALIDITY = 1e-9
BOUND_KINDS = ("lower", "radiation", "ligo", "lisa")


def default_grid(r_min=1e-9, r_max=1e-2, n=240):
    """Log-spaced collapse radii [m]."""
    if not (0 < r_min < r_max) or n < 2:
        raise DomainError("grid needs 0 < r_min < r_max and n >= 2")
    return np.logspace(math.log10(r_min), math.log10(r_max), int(n))


def _grid(r_c):
    r = np.atleast_1d(np.asarray(r_c, dtype=float))
    if r.ndim != 1 or np.any(~np.isfinite(r)) or np.any(r <= 0):
        raise DomainError("collapse radii must be finite and > 0")
    return r


def _out(x, like):
    return float(x[0]) if np.ndim(like) == 0 else x


# -- specs ---------------------------------------------------------------------

@dataclass(frozen=True)
class DiskSpec:
    """Graphene disk used for the perception-based lower bound."""

    r_d: float = 1e-5
    r_a: float = 1e-10
    m_a: float = 12 * CONSTANTS.m0
    n_a: float = 1e10
    tau: float = 1e-2
    D: Optional[float] = None

    def __post_init__(self):
        if self.D is None:
            object.__setattr__(self, "D", self.r_d)
        _check_positive(r_d=self.r_d, r_a=self.r_a, m_a=self.m_a, n_a=self.n_a,
                        tau=self.tau, D=self.D)
        if self.r_a >= self.r_d:
            raise DomainError("atom radius must be smaller than the disk radius")

    @property
    def mass(self):
        return self.n_a * self.m_a


@dataclass(frozen=True)
class RadiationBoundSpec:
    """Germanium emitter and the measured CSL radiation bound.

    ``coefficient`` is the experimental ``lambda_1 <= coefficient * r_C^2``
    constant [1/(s m^2)]. ``D`` defaults to ``(M / mu0)^(1/3)``.
    """

    coefficient: float = 4.79e-1
    mu0: float = 5327.0
    mass: float = 44.1
    lattice: float = 5.66e-10
    D: Optional[float] = None

    def __post_init__(self):
        if self.D is None:
            object.__setattr__(self, "D", (self.mass / self.mu0) ** (1.0 / 3.0))
        _check_positive(coefficient=self.coefficient, mu0=self.mu0, mass=self.mass,
                        lattice=self.lattice, D=self.D)


@dataclass(frozen=True)
class DetectorSpec:
    """Test-mass geometry and force-noise floor of a gravitational-wave detector.

    ``A_P`` defaults to ``pi R^2`` for cylinders (``R`` given) and ``L^2`` for
    cubes. ``s_exp`` is divided by ``spectrum_divisor`` before comparison.
    """

    name: str
    mass: float
    a: float
    L: float
    s_exp: float
    spectrum_divisor: int
    R: Optional[float] = None
    A_P: Optional[float] = None

    def __post_init__(self):
        _check_positive(mass=self.mass, a=self.a, L=self.L, s_exp=self.s_exp)
        if self.R is not None:
            _check_positive(R=self.R)
        if self.A_P is None:
            area = math.pi * self.R**2 if self.R is not None else self.L**2
            object.__setattr__(self, "A_P", area)
        _check_positive(A_P=self.A_P)
        if self.spectrum_divisor not in (2, 4):
            raise DomainError("spectrum_divisor must be 2 or 4")

    @property
    def mu0(self):
        return self.mass / (self.A_P * self.L)

    @property
    def D(self):
        return max(self.L, self.R or 0.0)


GERMANIUM = RadiationBoundSpec()
LIGO = DetectorSpec("LIGO", mass=40.0, a=4e3, L=0.02, R=0.017, s_exp=9.025e-27,
                    spectrum_divisor=4)
LISA = DetectorSpec("LISA", mass=1.928, a=0.376, L=0.046, s_exp=2.5091e-29,
                    spectrum_divisor=2)


# -- curves ----------------------------------------------------------------------

@dataclass(frozen=True)
class BoundCurve:
    """A bound ``lambda(r_C)`` sampled on a grid.

    ``regime`` holds ``"SmallRc"``, ``"LargeRc"`` or ``"Joined"`` per sample,
    ``reliable`` is False where ``r_C`` exceeds the size of the object the
    bound rests on, and ``valid`` is False outside the formula's stated range.
    """

    kind: str
    alpha: float
    r_c: np.ndarray
    lam: np.ndarray
    regime: tuple
    reliable: np.ndarray
    valid: np.ndarray
    crossover: Optional[float] = None

    def __post_init__(self):
        if np.any(np.diff(self.r_c) <= 0):
            raise DomainError("r_c samples must be strictly increasing")
        if np.any(~np.isfinite(self.lam)) or np.any(self.lam <= 0):
            raise QuadratureError(f"{self.kind} bound is not finite and positive")


@dataclass(frozen=True)
class ExclusionReport:
    """Allowed interval ``[lambda_lower, lambda_upper]`` at each collapse radius.

    Disabled bounds are stored as NaN. ``allowed_min``/``allowed_max`` are NaN
    where the interval is empty.
    """

    alpha: float
    r_c: np.ndarray
    lower: np.ndarray
    radiation: np.ndarray
    ligo: np.ndarray
    lisa: np.ndarray
    flags: tuple

    @property
    def upper(self):
        ups = np.vstack([self.radiation, self.ligo, self.lisa])
        out = np.full(self.r_c.shape, np.inf)
        have = ~np.all(np.isnan(ups), axis=0)
        out[have] = np.nanmin(ups[:, have], axis=0)
        return out

    @property
    def excluded(self):
        lo = np.nan_to_num(self.lower, nan=0.0)
        return lo > self.upper

    @property
    def allowed_min(self):
        return np.where(self.excluded, np.nan, np.nan_to_num(self.lower, nan=0.0))

    @property
    def allowed_max(self):
        return np.where(self.excluded, np.nan, self.upper)

    @property
    def model_excluded(self):
        return bool(np.all(self.excluded))

    def log_width(self, i):
        """Width of the allowed interval at sample ``i`` in decades (NaN if empty)."""
        if self.excluded[i]:
            return float("nan")
        return float(np.log10(self.allowed_max[i] / self.allowed_min[i]))


# -- regime joining -------------------------------------------------------------

_SCAN = np.logspace(-12, 2, 200)


def _find_crossing(small: Callable, large: Callable, D):
    """Radius where two branch curves intersect, nearest to ``D`` in log space."""
    with np.errstate(all="ignore"):
        g = np.log(small(_SCAN)) - np.log(large(_SCAN))
    ok = np.isfinite(g)
    idx = [i for i in range(len(g) - 1)
           if ok[i] and ok[i + 1] and g[i] * g[i + 1] < 0]
    if not idx:
        return None
    roots = []
    for i in idx:
        lo, hi, glo = math.log(_SCAN[i]), math.log(_SCAN[i + 1]), g[i]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            gm = math.log(small(np.array([math.exp(mid)]))[0]) \
                - math.log(large(np.array([math.exp(mid)]))[0])
            if gm * glo > 0:
                lo, glo = mid, gm
            else:
                hi = mid
        roots.append(math.exp(0.5 * (lo + hi)))
    return min(roots, key=lambda x: abs(math.log(x / D)))


def _join(small, large, r, crossing, pick):
    if crossing is None:
        return pick(small(r), large(r)), ("Joined",) * r.size
    below = r < crossing
    lam = np.empty_like(r)
    if below.any():
        lam[below] = small(r[below])
    if (~below).any():
        lam[~below] = large(r[~below])
    return lam, tuple("SmallRc" if b else "LargeRc" for b in below)


# -- lower bound -------------------------------------------------------------------

def n_of_rc(spec: DiskSpec, r_c):
    """Effective number of atoms acting together at collapse radius ``r_c``."""
    r = _grid(r_c)
    n = np.where(r < spec.r_a, 1.0,
                 np.where(r <= spec.r_d, (r / spec.r_a) ** 2, spec.n_a))
    return _out(n, r_c)


def _log_lambda_factor(spec, alpha, r):
    n = n_of_rc(spec, r)
    return np.log(spec.n_a / n) + 2 * alpha * np.log(spec.m_a * n / M0)


def adler_effective_rate(spec: DiskSpec, params: CollapseParams):
    """Decoherence rate [1/s] of the disk displaced by ``spec.D``."""
    r = np.array([params.r_c])
    big_lambda = np.exp(_log_lambda_factor(spec, params.alpha, r))[0] * params.lam
    return big_lambda * -math.expm1(-params.alpha * spec.D**2 / (4 * params.r_c**2))


def theoretical_lower_bound(spec: DiskSpec, alpha, r_c):
    """Smallest ``lambda_alpha`` [1/s] that decoheres the disk within ``spec.tau``."""
    _check_positive(alpha=alpha)
    r = _grid(r_c)
    log_den = math.log(spec.tau) + _log_lambda_factor(spec, alpha, r) \
        + np.log(-np.expm1(-alpha * spec.D**2 / (4 * r * r)))
    return _out(np.exp(-log_den), r_c)


def _disk_geometry_factor(spec):
    # A(D) / (2 r_D^2)
    return circle_nonoverlap_area(spec.D, spec.r_d) / (2.0 * spec.r_d**2)


def thin_disk_decoherence_rate(spec: DiskSpec, params: CollapseParams):
    """Decoherence rate of a homogeneous thin disk for ``r_a << r_C << r_D``."""
    a, r, rd = params.alpha, params.r_c, spec.r_d
    return 0.5 * params.gamma * (spec.mass / M0) ** (2 * a) \
        * (2.0 / ((2 * math.pi) ** 1.5 * r * rd)) ** (2 * a) \
        * math.sqrt(math.pi) * r / math.sqrt(a) \
        * 2.0 * rd**2 / rd ** (2 * a) * _disk_geometry_factor(spec)


def refined_disk_lower_bound(spec: DiskSpec, alpha, r_c):
    """Lower bound from the homogeneous thin-disk calculation.

    Valid for ``r_a << r_C << r_D``; enforced as ``3 r_a < r_C < r_D / 3``.
    """
    _check_positive(alpha=alpha)
    r = _grid(r_c)
    if np.any(r <= 3 * spec.r_a) or np.any(r >= spec.r_d / 3):
        raise RegimeError(
            f"refined disk bound needs {3 * spec.r_a:.3g} < r_C < {spec.r_d / 3:.3g} m")
    log_den = math.log(spec.tau * alpha / math.pi) \
        + 2 * alpha * math.log(2 * spec.mass / M0) \
        + (4 * alpha - 2) * np.log(r / spec.r_d) \
        + math.log(_disk_geometry_factor(spec))
    return _out(np.exp(-log_den), r_c)


def lower_curve(spec: DiskSpec, alpha, grid) -> BoundCurve:
    r = _grid(grid)
    lam = theoretical_lower_bound(spec, alpha, r)
    regime = tuple("SmallRc" if x <= spec.r_d else "LargeRc" for x in r)
    return BoundCurve("lower", alpha, r, lam, regime, r <= spec.D,
                      np.ones(r.size, bool))


# -- radiation -----------------------------------------------------------------------

def radiation_ratio(spec: RadiationBoundSpec, alpha, r_c, regime):
    """``K(1)/K(alpha)`` in the ``"small"`` or ``"large"`` r_C regime."""
    r = np.asarray(r_c, dtype=float)
    if regime == "small":
        cell = spec.mu0 * (math.sqrt(2 * math.pi) * r) ** 3 / M0
        return alpha**-3.5 * cell ** (2 - 2 * alpha)
    if regime == "large":
        return alpha**-1 * (spec.mass / M0) ** (2 - 2 * alpha) * np.ones_like(r)
    raise DomainError(f"unknown regime {regime!r}")


def _radiation_branches(spec, alpha):
    def small(r):
        return r * r * radiation_ratio(spec, alpha, r, "small") * spec.coefficient

    def large(r):
        return r * r * radiation_ratio(spec, alpha, r, "large") * spec.coefficient
    return small, large


@lru_cache(maxsize=128)
def _radiation_crossing(spec, alpha):
    return _find_crossing(*_radiation_branches(spec, alpha), spec.D)


def radiation_curve(spec: RadiationBoundSpec, alpha, grid) -> BoundCurve:
    _check_positive(alpha=alpha)
    r = _grid(grid)
    cross = _radiation_crossing(spec, float(alpha))
    lam, regime = _join(*_radiation_branches(spec, alpha), r, cross, np.minimum)
    return BoundCurve("radiation", alpha, r, lam, regime, r <= spec.D,
                      r >= RADIATION_VALIDITY, cross)


def radiation_upper_bound(spec: RadiationBoundSpec, alpha, r_c):
    """Largest ``lambda_alpha`` [1/s] compatible with the measured X-ray emission.

    Below ``1e-9 m`` the small-r_C emission formula is outside its validity;
    values are still returned and :func:`radiation_curve` flags them.
    """
    return _out(radiation_curve(spec, alpha, np.sort(_grid(r_c))).lam, r_c) \
        if np.ndim(r_c) == 0 else radiation_curve(spec, alpha, r_c).lam


# -- gravitational-wave detectors ------------------------------------------------------

def _gw_small(det, alpha, r):
    cell = det.mu0 * (math.sqrt(2 * math.pi) * r) ** 3 / M0
    return cell ** (2 * alpha) * alpha**3.5 * g_alpha_integral(alpha) * HBAR**2 \
        * det.A_P / (2 * math.pi**2.5 * r**4)


def _gw_large(det, alpha, r):
    fs = np.array([f_s(det.a / x, alpha) for x in np.atleast_1d(r)])
    return alpha**2.5 * HBAR**2 / (4 * math.sqrt(math.pi) * r * r) \
        * (det.mass / M0) ** (2 * alpha) * fs


@lru_cache(maxsize=128)
def _gw_crossing(det, alpha):
    return _find_crossing(lambda r: _gw_small(det, alpha, r),
                          lambda r: _gw_large(det, alpha, r), det.D)


def gw_noise_per_lambda(det: DetectorSpec, alpha, r_c, regime="auto"):
    """Force-noise density per unit rate, ``S / lambda`` [kg^2 m^2 s^-2].

    ``regime`` is ``"small"``, ``"large"`` or ``"auto"`` (branches joined at
    their intersection, or the larger of the two if they never cross).
    """
    _check_positive(alpha=alpha)
    r = _grid(r_c)
    if regime == "small":
        out = _gw_small(det, alpha, r)
    elif regime == "large":
        out = _gw_large(det, alpha, r)
    elif regime == "auto":
        out, _ = _join(lambda x: _gw_small(det, alpha, x),
                       lambda x: _gw_large(det, alpha, x), r,
                       _gw_crossing(det, float(alpha)), np.maximum)
    else:
        raise DomainError(f"unknown regime {regime!r}")
    return _out(out, r_c)


def gw_force_noise(det: DetectorSpec, params: CollapseParams, regime="auto"):
    """Collapse-induced force noise density ``S`` [kg^2 m^2 s^-3]."""
    return params.lam * gw_noise_per_lambda(det, params.alpha, params.r_c, regime)


def gw_curve(det: DetectorSpec, alpha, grid) -> BoundCurve:
    _check_positive(alpha=alpha)
    r = _grid(grid)
    cross = _gw_crossing(det, float(alpha))
    floor = det.s_exp / det.spectrum_divisor
    lam, regime = _join(lambda x: floor / _gw_small(det, alpha, x),
                        lambda x: floor / _gw_large(det, alpha, x), r, cross,
                        np.minimum)
    return BoundCurve(det.name.lower(), alpha, r, lam, regime, r <= det.D,
                      np.ones(r.size, bool), cross)


def gw_upper_bound(det: DetectorSpec, alpha, r_c):
    """Largest ``lambda_alpha`` [1/s] compatible with the detector's noise floor."""
    r = _grid(r_c)
    order = np.argsort(r)
    lam = np.empty_like(r)
    lam[order] = gw_curve(det, alpha, r[order]).lam
    return _out(lam, r_c)


# -- exclusion -----------------------------------------------------------------------

def assemble_exclusion(alpha, grid=None, disk: DiskSpec = DiskSpec(),
                       radiation: RadiationBoundSpec = GERMANIUM,
                       ligo: DetectorSpec = LIGO, lisa: DetectorSpec = LISA,
                       enabled: Sequence[str] = BOUND_KINDS) -> ExclusionReport:
    """Combine the lower bound with the tightest enabled upper bound on a grid.

    Examples
    --------
    >>> assemble_exclusion(2.0).model_excluded
    True
    """
    r = _grid(default_grid() if grid is None else grid)
    if np.any(np.diff(r) <= 0):
        raise DomainError("grid must be strictly increasing")
    enabled = set(enabled)
    unknown = enabled - set(BOUND_KINDS)
    if unknown or not enabled:
        raise DomainError(f"enabled bounds must be a non-empty subset of {BOUND_KINDS}")
    nan = np.full(r.shape, np.nan)
    curves = {}
    if "lower" in enabled:
        curves["lower"] = lower_curve(disk, alpha, r)
    if "radiation" in enabled:
        curves["radiation"] = radiation_curve(radiation, alpha, r)
    if "ligo" in enabled:
        curves["ligo"] = gw_curve(ligo, alpha, r)
    if "lisa" in enabled:
        curves["lisa"] = gw_curve(lisa, alpha, r)
    flags = []
    for i in range(r.size):
        tokens = [f"{k}:large_rc" for k, c in curves.items() if not c.reliable[i]]
        tokens += [f"{k}:invalid" for k, c in curves.items() if not c.valid[i]]
        flags.append(";".join(tokens) if tokens else "ok")

    def get(k):
        return curves[k].lam if k in curves else nan.copy()
    return ExclusionReport(float(alpha), r, get("lower"), get("radiation"),
                           get("ligo"), get("lisa"), tuple(flags))


def _scaled_specs(radiation_scale, ligo_scale, lisa_scale, radiation, ligo, lisa):
    for name, s in (("radiation", radiation_scale), ("ligo", ligo_scale),
                    ("lisa", lisa_scale)):
        if not (np.isfinite(s) and s > 0):
            raise DomainError(f"{name} scale factor must be > 0, got {s}")
    return (replace(radiation, coefficient=radiation.coefficient * radiation_scale),
            replace(ligo, s_exp=ligo.s_exp * ligo_scale),
            replace(lisa, s_exp=lisa.s_exp * lisa_scale))


def modified_experiment_scenarios(alpha=0.5, radiation_scale=1.0, ligo_scale=1.0,
                                  lisa_scale=1.0, grid=None, disk=DiskSpec(),
                                  radiation=GERMANIUM, ligo=LIGO, lisa=LISA):
    """Exclusion with experimental floors multiplied by the given factors."""
    rad, lg, ls = _scaled_specs(radiation_scale, ligo_scale, lisa_scale,
                                radiation, ligo, lisa)
    return assemble_exclusion(alpha, grid, disk, rad, lg, ls)


def critical_scale(alpha, which, grid=None, disk=DiskSpec(), radiation=GERMANIUM,
                   ligo=LIGO, lisa=LISA):
    """Largest factor on one bound's floor that excludes ``alpha`` on the whole grid.

    Every upper bound is linear in its experimental floor, so the factor is
    ``min(lambda_lower / lambda_which)`` over the samples the other bounds do
    not already exclude.
    """
    if which not in ("radiation", "ligo", "lisa"):
        raise DomainError(f"unknown bound {which!r}")
    rep = assemble_exclusion(alpha, grid, disk, radiation, ligo, lisa)
    others = [k for k in ("radiation", "ligo", "lisa") if k != which]
    other_up = np.nanmin(np.vstack([getattr(rep, k) for k in others]), axis=0)
    need = rep.lower <= other_up
    if not need.any():
        return float("inf")
    return float(np.min(rep.lower[need] / getattr(rep, which)[need]))
