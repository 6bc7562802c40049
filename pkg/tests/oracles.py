"""Independent reference computations shared by the test modules."""

import math

import numpy as np
from scipy.special import ndtr

M0 = 1.67262192369e-27


def sphere_coefficient_brute_force(alpha, radius, mu0, r_c, spacing=0.25,
                                   half_width=28.0, step=1e-3, axis=0):
    """``m0^(-2 alpha) int [d_j (mu0 Phi(-d/r_C))^alpha]^2 dx`` on a midpoint grid.

    Lengths ``radius``, ``spacing``, ``half_width`` and ``step`` are in units of
    ``r_C``; the derivative is a central finite difference along ``axis``.
    Returns the value in SI units (per m).
    """
    n = int(round(2 * half_width / spacing))
    z = -half_width + (np.arange(n) + 0.5) * spacing
    scale = (mu0 / M0) ** alpha
    total = 0.0
    for i0 in range(0, n, 8):
        x = z[i0:i0 + 8, None, None]
        y = z[None, :, None]
        w = z[None, None, :]
        pts = [x, y, w]

        def field(shift):
            q = list(pts)
            q[axis] = q[axis] + shift
            d = np.sqrt(q[0] ** 2 + q[1] ** 2 + q[2] ** 2) - radius
            return ndtr(-d) ** alpha

        grad = (field(step) - field(-step)) / (2 * step)
        total += float(np.sum(grad * grad))
    # dx^3 = (spacing r_C)^3 and each derivative carries 1/r_C
    return scale**2 * total * spacing**3 * r_c
