"""
Spontaneous photon emission rates ``dGamma/dE``.

All rates have a pure ``1/E`` spectrum; integrate them over a finite energy
band to get a number of photons (or ``E dGamma/dE`` for power).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

from .core import (CONSTANTS, BodyGeometry, CollapseParams, DomainError,
                   ValidityWarning, _check_positive)
from .specfun import g_alpha_integral

__all__ = [
    "EmitterSpec", "emission_rate_single", "emission_rate_bulk_small_rc",
    "emission_rate_bulk_large_rc", "bulk_coefficient_small_rc",
    "bulk_coefficient_large_rc", "rigid_body_emission_rate",
    "LATTICE_VALIDITY",
]

C = CONSTANTS
# below this radius the macroscopic-density picture of the emitter breaks down
LATTICE_VALIDITY = 5e-9


@dataclass(frozen=True)
class EmitterSpec:
    """A bulk emitter made of ``n_atoms`` identical atoms.

    Attributes
    ----------
    n_atoms : float
        Number of atoms ``N_P``.
    nuclear_charge : float
        Nuclear charge ``Q_N = Z e`` [C].
    n_electrons : float
        Electrons per atom that take part in the emission.
    mu0 : float
        Mass density [kg/m^3].
    total_mass : float
        Mass ``M`` [kg].
    D : float, optional
        Typical linear size [m]; defaults to ``(M / mu0)^(1/3)``.
    """

    n_atoms: float
    nuclear_charge: float
    n_electrons: float
    mu0: float
    total_mass: float
    D: Optional[float] = None

    def __post_init__(self):
        _check_positive(n_atoms=self.n_atoms, nuclear_charge=self.nuclear_charge,
                        n_electrons=self.n_electrons, mu0=self.mu0,
                        total_mass=self.total_mass)
        z = self.nuclear_charge / C.e_charge
        if abs(z - round(z)) > 1e-9 * max(1.0, z):
            raise DomainError("nuclear_charge must be an integer multiple of e")
        if self.D is None:
            object.__setattr__(self, "D", (self.total_mass / self.mu0) ** (1.0 / 3.0))
        _check_positive(D=self.D)

    @property
    def charge_factor(self):
        # protons inside a nucleus add coherently, electrons incoherently
        return self.n_atoms * (self.nuclear_charge**2 + self.n_electrons * C.e_charge**2)


def _base(r_c, charge2):
    return C.hbar * charge2 / (4.0 * math.pi**2 * C.eps0 * C.m0**2 * r_c**2 * C.c**3)


def _check_energy(E):
    if not E > 0:
        raise DomainError("photon energy must be > 0")


def emission_rate_single(params: CollapseParams, m, q, E):
    """Photon emission rate density [1/(s J)] of a free point charge ``q`` of mass ``m``."""
    _check_positive(m=m)
    _check_energy(E)
    a = params.alpha
    return (m / C.m0) ** (2 * a - 2) * a * _base(params.r_c, q * q) * params.lam / E


def bulk_coefficient_small_rc(spec: EmitterSpec, alpha, r_c):
    """``E dGamma/dE / lambda`` for ``r_C`` much smaller than the emitter."""
    cell = spec.mu0 * (math.sqrt(2.0 * math.pi) * r_c) ** 3 / C.m0
    return alpha**3.5 * cell ** (2 * alpha - 2) * _base(r_c, spec.charge_factor)


def bulk_coefficient_large_rc(spec: EmitterSpec, alpha, r_c):
    """``E dGamma/dE / lambda`` for ``r_C`` much larger than the emitter."""
    return alpha * (spec.total_mass / C.m0) ** (2 * alpha - 2) \
        * _base(r_c, spec.charge_factor)


def emission_rate_bulk_small_rc(spec: EmitterSpec, params: CollapseParams, E):
    """Emission rate density of a bulk body when ``r_C`` is below its size.

    Warns when ``r_C > D/10`` or when ``r_C`` approaches lattice scales.
    """
    _check_energy(E)
    r = params.r_c
    if r > spec.D / 10:
        warnings.warn(f"r_C={r:.3g} m is not small compared to D={spec.D:.3g} m",
                      ValidityWarning, stacklevel=2)
    if r < LATTICE_VALIDITY:
        warnings.warn(f"r_C={r:.3g} m is close to the lattice scale",
                      ValidityWarning, stacklevel=2)
    return bulk_coefficient_small_rc(spec, params.alpha, r) * params.lam / E


def emission_rate_bulk_large_rc(spec: EmitterSpec, params: CollapseParams, E):
    """Emission rate density of a bulk body when ``r_C`` exceeds its size."""
    _check_energy(E)
    if params.r_c < 10 * spec.D:
        warnings.warn(f"r_C={params.r_c:.3g} m is not large compared to "
                      f"D={spec.D:.3g} m", ValidityWarning, stacklevel=2)
    return bulk_coefficient_large_rc(spec, params.alpha, params.r_c) * params.lam / E


def rigid_body_emission_rate(spec: EmitterSpec, body: BodyGeometry,
                             params: CollapseParams, E):
    """Emission rate obtained by treating every charge as moving with the centre of mass.

    This treatment is physically wrong for bulk emission: it is kept only to
    show that it disagrees with :func:`emission_rate_bulk_small_rc`.
    """
    _check_energy(E)
    a, M = params.alpha, spec.total_mass
    return spec.charge_factor * a * a * C.hbar * params.gamma \
        / (6.0 * math.pi**2 * C.eps0 * C.c**3 * M * M * E) \
        * (M / (C.m0 * body.volume)) ** (2 * a) \
        * g_alpha_integral(a) / (2.0 * math.pi * params.r_c) * body.area
