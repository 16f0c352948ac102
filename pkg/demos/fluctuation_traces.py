#!/usr/bin/env python3
"""Watch a half-filled box relax and then rattle around equilibrium.

All particles start uniformly in the left half of the circle with thermal
momenta (mean speed 1).  The occupied fraction of the left half drops from 1
toward 1/2 and then fluctuates on the scale sqrt(N/4)/N, so the wiggles die
like 1/sqrt(N) as the gas grows.
"""

from __future__ import annotations

import math

import numpy as np

from equilab import (
    InitialMeasureSpec,
    TimeGrid,
    TorusRegion,
    UniformPositions,
    run_fluctuation_trace,
    thermal_momenta,
)

REGION = TorusRegion.interval(0.0, 0.5)
HALF_FULL = InitialMeasureSpec(UniformPositions(REGION), thermal_momenta(1.0, 1))


def relaxation_table():
    grid = TimeGrid(0.0, 0.25, 24)  # t = 0.25 .. 6.0
    print("Occupied fraction of [0, 1/2) while relaxing:")
    print(f"{'t':>6} {'N=100':>9} {'N=10000':>9}")
    traces = {
        n: run_fluctuation_trace(n, HALF_FULL, REGION, grid, seed=11)
        for n in (100, 10_000)
    }
    for i, t in enumerate(grid.times):
        if i % 4 == 3:
            print(f"{t:6.2f} {traces[100].values[i]:9.4f} {traces[10_000].values[i]:9.4f}")


def equilibrium_spread():
    grid = TimeGrid(19.5, 0.5, 201)  # t = 20 .. 120, past the transient
    print("\nLate-time spread against the equilibrium prediction:")
    print(f"{'N':>7} {'std(f)':>10} {'sqrt(1/4N)':>11} {'ratio':>7}")
    for n in (100, 1000, 10_000):
        series = run_fluctuation_trace(n, HALF_FULL, REGION, grid, seed=23)
        got = float(np.std(series.values, ddof=1))
        want = math.sqrt(0.25 / n)
        print(f"{n:7d} {got:10.5f} {want:11.5f} {got / want:7.3f}")


if __name__ == "__main__":
    relaxation_table()
    equilibrium_spread()
