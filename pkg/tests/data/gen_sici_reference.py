"""Regenerate sici_reference.csv.

Reference Si/Ci values from mpmath's arbitrary-precision implementation
(independent of everything under src/), rounded to float64.  Run from the
repository root:

    python tests/data/gen_sici_reference.py
"""

import csv
import os

import mpmath
import numpy as np

mpmath.mp.dps = 60

GRID = np.unique(np.concatenate([
    np.geomspace(1e-8, 700.0, 120),
    np.geomspace(5.0, 50.0, 21),          # strategy-overlap window
    np.array([1.0, 10.0, np.pi, 700.0]),  # pinned table values
]))


def main():
    out = os.path.join(os.path.dirname(__file__), "sici_reference.csv")
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["phi", "si", "ci"])
        for phi in GRID:
            si = float(mpmath.si(mpmath.mpf(float(phi))))
            ci = float(mpmath.ci(mpmath.mpf(float(phi))))
            writer.writerow([repr(float(phi)), repr(si), repr(ci)])
    print(f"wrote {out} ({GRID.size} rows)")


if __name__ == "__main__":
    main()
