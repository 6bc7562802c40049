"""
Physical constants, collapse-model parameters and body geometry.

Everything in the package works in SI units. The collapse operator is the
smeared mass density raised to a power ``alpha`` and divided by ``m0**alpha``
(``m0`` is the proton mass); ``alpha = 1`` is CSL and ``alpha = 1/2`` is PSL.

Two equivalent ways of quoting the collapse strength are supported:

* the coupling ``gamma_alpha`` (units ``s^-1 m^(6 alpha - 3)``), and
* the single-nucleon localization rate ``lambda_alpha`` (units ``s^-1``),

related by ``lambda = gamma * (pi r_C^2 / alpha)^(3/2) / (2 pi r_C^2)^(3 alpha)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "PhysicalConstants", "CONSTANTS", "DomainError", "QuadratureError",
    "RegimeError", "ValidityWarning", "GammaRate", "LambdaRate",
    "CollapseParams", "lambda_from_gamma", "gamma_from_lambda",
    "gaussian_kernel", "Parallelepiped", "Cube", "Cylinder", "Sphere",
    "BodyGeometry",
]


class DomainError(ValueError):
    """An argument lies outside the domain of the requested quantity."""


class RegimeError(DomainError):
    """Parameters fall outside the regime in which an approximation holds."""


class QuadratureError(ArithmeticError):
    """A numerical integration failed to reach the requested tolerance."""

    def __init__(self, message, estimate=float("nan"), error=float("nan")):
        super().__init__(f"{message} (estimate={estimate:.6e}, error={error:.3e})")
        self.estimate = estimate
        self.error = error


class ValidityWarning(UserWarning):
    """A formula is being evaluated close to or outside its validity regime."""


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 values used throughout the package."""

    hbar: float = 1.054571817e-34
    c: float = 2.99792458e8
    eps0: float = 8.8541878128e-12
    m0: float = 1.67262192369e-27
    e_charge: float = 1.602176634e-19

    def __post_init__(self):
        for name in ("hbar", "c", "eps0", "m0", "e_charge"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be strictly positive")


CONSTANTS = PhysicalConstants()


def _check_positive(**values):
    for name, value in values.items():
        if not (np.all(np.isfinite(value)) and np.all(np.asarray(value) > 0)):
            raise DomainError(f"{name} must be finite and > 0, got {value!r}")


def _conversion_factor(alpha, r_c):
    # lambda / gamma
    return (math.pi * r_c**2 / alpha) ** 1.5 / (2.0 * math.pi * r_c**2) ** (3.0 * alpha)


def lambda_from_gamma(gamma, alpha, r_c):
    """Collapse rate ``lambda_alpha`` [1/s] from the coupling ``gamma_alpha``.

    Parameters
    ----------
    gamma : float
        Coupling constant in ``s^-1 m^(6 alpha - 3)``.
    alpha : float
        Exponent of the mass density in the collapse operator.
    r_c : float
        Collapse radius [m].
    """
    _check_positive(gamma=gamma, alpha=alpha, r_c=r_c)
    if alpha == 0.5:
        # the r_C dependence cancels identically
        return float(gamma)
    return gamma * _conversion_factor(alpha, r_c)


def gamma_from_lambda(lam, alpha, r_c):
    """Inverse of :func:`lambda_from_gamma`."""
    _check_positive(lam=lam, alpha=alpha, r_c=r_c)
    if alpha == 0.5:
        return float(lam)
    return lam / _conversion_factor(alpha, r_c)


@dataclass(frozen=True)
class GammaRate:
    """Collapse strength given as the coupling ``gamma_alpha``."""

    value: float


@dataclass(frozen=True)
class LambdaRate:
    """Collapse strength given as the localization rate ``lambda_alpha`` [1/s]."""

    value: float


@dataclass(frozen=True)
class CollapseParams:
    """Model parameters ``(alpha, r_C, rate)``.

    ``rate`` keeps whichever of ``gamma_alpha``/``lambda_alpha`` the caller
    supplied; the other one is derived on demand. Plain floats are read as
    ``lambda_alpha``.

    Examples
    --------
    >>> p = CollapseParams(alpha=1.0, r_c=1e-7, rate=GammaRate(1e-36))
    >>> round(p.lam * 1e17, 2)
    2.25
    """

    alpha: float
    r_c: float
    rate: Union[GammaRate, LambdaRate, float]

    def __post_init__(self):
        if not isinstance(self.rate, (GammaRate, LambdaRate)):
            object.__setattr__(self, "rate", LambdaRate(float(self.rate)))
        _check_positive(alpha=self.alpha, r_c=self.r_c, rate=self.rate.value)

    @property
    def lam(self) -> float:
        if isinstance(self.rate, LambdaRate):
            return self.rate.value
        return lambda_from_gamma(self.rate.value, self.alpha, self.r_c)

    @property
    def gamma(self) -> float:
        if isinstance(self.rate, GammaRate):
            return self.rate.value
        return gamma_from_lambda(self.rate.value, self.alpha, self.r_c)

    def with_lambda(self, lam) -> "CollapseParams":
        return CollapseParams(self.alpha, self.r_c, LambdaRate(lam))


def gaussian_kernel(x, r_c):
    """Normalized 3D Gaussian smearing kernel ``g_{r_C}(x)`` [1/m^3].

    ``x`` is a displacement vector, or an array whose last axis has length 3.
    """
    _check_positive(r_c=r_c)
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    return (2.0 * math.pi * r_c**2) ** -1.5 * np.exp(-r2 / (2.0 * r_c**2))


# -- body geometry ----------------------------------------------------------


@dataclass(frozen=True)
class Parallelepiped:
    L1: float
    L2: float
    L3: float

    def __post_init__(self):
        _check_positive(L1=self.L1, L2=self.L2, L3=self.L3)

    @property
    def volume(self):
        return self.L1 * self.L2 * self.L3

    @property
    def area(self):
        return 2.0 * (self.L1 * self.L2 + self.L2 * self.L3 + self.L1 * self.L3)

    @property
    def cross_section(self):
        return self.L2 * self.L3

    @property
    def min_dimension(self):
        return min(self.L1, self.L2, self.L3)


@dataclass(frozen=True)
class Cube:
    L: float

    def __post_init__(self):
        _check_positive(L=self.L)

    @property
    def volume(self):
        return self.L**3

    @property
    def area(self):
        return 6.0 * self.L**2

    @property
    def cross_section(self):
        return self.L**2

    @property
    def min_dimension(self):
        return self.L


@dataclass(frozen=True)
class Cylinder:
    """Circular cylinder with its symmetry axis along ``x3``."""

    R: float
    L: float

    def __post_init__(self):
        _check_positive(R=self.R, L=self.L)

    @property
    def volume(self):
        return math.pi * self.R**2 * self.L

    @property
    def area(self):
        return 2.0 * math.pi * self.R * (self.R + self.L)

    @property
    def cross_section(self):
        return math.pi * self.R**2

    @property
    def min_dimension(self):
        return min(2.0 * self.R, self.L)


@dataclass(frozen=True)
class Sphere:
    R: float

    def __post_init__(self):
        _check_positive(R=self.R)

    @property
    def volume(self):
        return 4.0 / 3.0 * math.pi * self.R**3

    @property
    def area(self):
        return 4.0 * math.pi * self.R**2

    @property
    def cross_section(self):
        return math.pi * self.R**2

    @property
    def min_dimension(self):
        return 2.0 * self.R


Shape = Union[Parallelepiped, Cube, Cylinder, Sphere]


@dataclass(frozen=True)
class BodyGeometry:
    """Constant-density rigid body.

    Volume, surface area and cross-section are derived from ``shape``. The
    cross-section is the one seen along the shape's symmetry axis (``x1`` for
    the parallelepiped).
    """

    mu0: float
    shape: Shape

    def __post_init__(self):
        _check_positive(mu0=self.mu0)
        if not isinstance(self.shape, (Parallelepiped, Cube, Cylinder, Sphere)):
            raise DomainError(f"unsupported shape {type(self.shape).__name__}")
        # isoperimetric inequality, equality only for the sphere
        if self.area**3 < 36.0 * math.pi * self.volume**2 * (1.0 - 1e-12):
            raise DomainError("geometry violates the isoperimetric inequality")

    @property
    def volume(self):
        return self.shape.volume

    @property
    def area(self):
        return self.shape.area

    @property
    def cross_section(self):
        return self.shape.cross_section

    @property
    def mass(self):
        return self.mu0 * self.volume

    def check_large(self, r_c, factor=10.0):
        """Warn if the body is not much larger than ``r_c``; returns the flag."""
        small = self.shape.min_dimension < factor * r_c
        if small:
            warnings.warn(
                f"smallest body dimension {self.shape.min_dimension:.3g} m is below "
                f"{factor:g} r_C; surface-flatness approximation is unreliable",
                ValidityWarning, stacklevel=3)
        return small
