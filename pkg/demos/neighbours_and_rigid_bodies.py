"""How surrounding mass changes decoherence, and how rigid bodies heat up.

A proton sits in a superposition of two positions 4 r_C apart. A heavy
neighbour at the midpoint slows its decoherence when alpha < 1, leaves it
unchanged at alpha = 1 and speeds it up when alpha > 1.

The second part compares the heating rate of centimetre cubes and shows that
only the surface-to-volume ratio matters. The last part checks the
flat-surface rigid-body coefficient of a sphere against a brute-force 3D sum;
the gap shrinks as the radius grows.

Run with ``python demos/neighbours_and_rigid_bodies.py``.
"""

import sys
from pathlib import Path

from collapse_bounds.core import CONSTANTS, BodyGeometry, CollapseParams, Cube, Sphere
from collapse_bounds.dynamics import (BystanderConfig, bystander_decoherence_rate,
                                      rigid_body_coefficient, rigid_body_growth)

m0, r_c = CONSTANTS.m0, 1e-7
x, y = (-2 * r_c, 0, 0), (2 * r_c, 0, 0)

print("neighbour of 100 m0 at the midpoint:")
for alpha in (0.5, 1.0, 2.0):
    p = CollapseParams(alpha, r_c, 2.2e-17)
    bare = bystander_decoherence_rate(BystanderConfig(m0, x, y), p)
    crowded = bystander_decoherence_rate(
        BystanderConfig(m0, x, y, ((100 * m0, (0, 0, 0)),)), p)
    print(f"  alpha={alpha:3.1f}: rate {bare.rate:.3e} -> {crowded.rate:.3e} 1/s "
          f"(x{crowded.rate / bare.rate:.3g})")

print("\nheating of water-density cubes at alpha = 1:")
p = CollapseParams(1.0, r_c, 2.2e-17)
for side in (1e-2, 2e-2, 4e-2):
    body = BodyGeometry(1000.0, Cube(side))
    g = rigid_body_growth(body, p, body.mass, 1.0)
    print(f"  L = {side * 100:.0f} cm: dE/dt = {g.dE_dt:.3e} W, "
          f"d<P^2>/dt = {g.dP2:.3e} kg^2 m^2/s^3")

# the brute-force sum lives with the test oracles
sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from oracles import sphere_coefficient_brute_force  # noqa: E402

print("\nsphere coefficient, brute-force / flat-surface closed form (alpha = 1/2):")
for radius in (20, 40):
    body = BodyGeometry(1000.0, Sphere(radius * r_c))
    closed = rigid_body_coefficient(body, CollapseParams(0.5, r_c, 1.0), 1)
    brute = sphere_coefficient_brute_force(0.5, radius, 1000.0, r_c,
                                           half_width=radius + 8)
    print(f"  R = {radius} r_C: {brute / closed:.4f}")
