"""Where the collapse rate is still allowed, for four values of alpha.

For each alpha the script prints the fraction of collapse radii that survive
all bounds, the allowed rate interval at r_C = 1e-7 m, and then asks how much
each experiment would have to improve before alpha = 1 is ruled out
everywhere, and whether alpha = 1/2 survives that improvement.

Run with ``python demos/exclusion_regions.py``.
"""

import numpy as np

from collapse_bounds.bounds import (assemble_exclusion, critical_scale, default_grid,
                                    modified_experiment_scenarios)

grid = default_grid()

print("alpha  allowed radii   allowed lambda at r_C = 1e-7 m")
for alpha in (0.5, 1.0, 1.5, 2.0):
    rep = assemble_exclusion(alpha, grid)
    point = assemble_exclusion(alpha, [1e-7])
    allowed = int((~rep.excluded).sum())
    if point.excluded[0]:
        window = "empty"
    else:
        window = (f"[{point.allowed_min[0]:.2e}, {point.allowed_max[0]:.2e}] 1/s "
                  f"({point.log_width(0):.1f} decades)")
    print(f"{alpha:5.2f}  {allowed:3d}/{grid.size}         {window}")

print()
print("Tightening one experiment until alpha = 1 is excluded on the whole grid:")
for which in ("radiation", "lisa", "ligo"):
    s = critical_scale(1.0, which)
    psl = modified_experiment_scenarios(0.5, **{f"{which}_scale": 0.99 * s})
    left = ~psl.excluded
    span = (f"r_C in [{psl.r_c[left].min():.1e}, {psl.r_c[left].max():.1e}] m"
            if left.any() else "nothing")
    print(f"  {which:9s} floor x {0.99 * s:.2e}: alpha = 1/2 keeps {int(left.sum())} "
          f"radii, {span}")

# the lower bound alone is the same curve for every experiment scenario
assert np.array_equal(assemble_exclusion(1.0, grid).lower,
                      modified_experiment_scenarios(1.0, grid=grid).lower)
