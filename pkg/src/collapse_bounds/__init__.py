"""Phenomenology and parameter bounds for mass-density-power collapse models."""

from .core import (CONSTANTS, BodyGeometry, CollapseParams, Cube, Cylinder,
                   DomainError, GammaRate, LambdaRate, Parallelepiped,
                   PhysicalConstants, QuadratureError, RegimeError, Sphere,
                   ValidityWarning, gamma_from_lambda, gaussian_kernel,
                   lambda_from_gamma)

__version__ = "0.1.0"
