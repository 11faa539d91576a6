#!/usr/bin/env python3
"""How often does the probabilistic preparation succeed?

Preparing the double-occupancy-suppressed state with one ancilla per
site works only when every ancilla measures 0; otherwise the run is
discarded.  The acceptance probability p(N, g) therefore sets the
repetition cost.  Two limits bracket its shape:

* weak coupling: d ln p / dg -> -N/2 at g = 0, so the cost climbs
  exponentially with system size at fixed g;
* strong coupling: p saturates once the remaining double occupancy is
  negligible, so pushing g higher is eventually free.

The slope also encodes a physical observable: the mean double occupancy
of the projected state is  <D> = -(N/4 + (1/2) d ln p / dg).
"""
from __future__ import annotations

import numpy as np

from gutzmc import build_lattice, success_probability_curve

SIZES = (2, 4, 6, 8, 10, 12)
G_GRID = np.arange(0.0, 3.0 + 1e-12, 0.5)


def main() -> None:
    lattices = [build_lattice("chain", n) for n in SIZES]
    rows = {n: {} for n in SIZES}
    for lattice in lattices:
        for n, g, p in success_probability_curve(lattice, G_GRID):
            rows[n][g] = p

    header = "  g  " + "".join(f"  N={n:<10}" for n in SIZES)
    print("acceptance probability p(N, g), half-filled chains")
    print(header)
    for g in G_GRID:
        cells = "".join(f"  {rows[n][g]:<12.6f}" for n in SIZES)
        print(f"{g:4.1f} {cells}")

    # numerical slope of ln p at both ends
    print()
    print(f"{'N':>4} {'slope at g=0':>14} {'-N/2':>8} {'slope at g=12':>14}")
    for lattice in lattices:
        n = lattice.n_sites
        eps = 1e-5
        pts = dict(
            (g, p)
            for _, g, p in success_probability_curve(
                lattice, [0.0, eps, 12.0 - eps, 12.0 + eps]
            )
        )
        slope0 = (np.log(pts[eps]) - np.log(pts[0.0])) / eps
        slope_inf = (np.log(pts[12.0 + eps]) - np.log(pts[12.0 - eps])) / (2 * eps)
        print(f"{n:4d} {slope0:14.6f} {-n / 2:8.1f} {slope_inf:14.2e}")


if __name__ == "__main__":
    main()
