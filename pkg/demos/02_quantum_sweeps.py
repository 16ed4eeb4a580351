"""Contextual fraction of Bell and GHZ states over a grid of equatorial angles.

Every qubit is measured at angle phi1 (setting 1) or phi2 (setting 2).  The
grids below are printed as text; ``contextuality quantum --grid G`` writes
the same values as CSV for plotting.
"""
import math
import sys

import numpy as np

from contextuality.fraction import noncontextual_fraction
from contextuality.quantum import (bell_state, born_model, ghz_extremal_angles, ghz_state,
                                   sweep, sweep_maxima)

jobs = int(sys.argv[1]) if len(sys.argv) > 1 else 1


def show(grid, unit):
    print("      " + " ".join(f"{j:>6}" for j in range(grid.shape[1])))
    for i, row in enumerate(grid):
        print(f"{i:>5} " + " ".join(f"{v:6.3f}" for v in row))
    pairs = sorted({tuple(round(a / unit) for a in p) for p in sweep_maxima(grid)})
    print("max", round(grid.max(), 6), "at", pairs)


print("Bell state, angles in units of pi/8")
show(sweep(bell_state(), 8, jobs=jobs), math.pi / 8)

# At (pi/8, 5pi/8) the correlations reach the Tsirelson bound.
e = born_model(bell_state(), (math.pi / 8, 5 * math.pi / 8))
print("tables at (pi/8, 5pi/8):", np.round(e.tables[0], 6), np.round(e.tables[3], 6))

print("\nGHZ(3), angles in units of pi/6")
show(sweep(ghz_state(3), 6, jobs=jobs), math.pi / 6)

# For GHZ(n) the pairs ((n+k) pi/2n, k pi/2n) are strongly contextual.
for n in (3, 4, 5):
    cfs = [noncontextual_fraction(born_model(ghz_state(n), ghz_extremal_angles(n, k))).cf
           for k in range(n)]
    print(f"GHZ({n}) extremal pairs cf:", np.round(cfs, 9))
