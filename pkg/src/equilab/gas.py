"""Free-streaming dynamics of the non-interacting gas on the torus.

The flow is exactly integrable: a particle at (x, p) sits at frac(x + p t)
at time t, for positive or negative t.  Everything here is a deterministic
function of a :class:`~equilab.core.GasMicrostate`, so one sampled state can
be evolved, reversed, and probed repeatedly with no hidden mutation.

The coarse observable is the occupied fraction of a region,
f(t) = (1/n) * #{i : x_i + p_i t in I}, together with the region counts of a
partition and the derived empirical density per region.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    GasMicrostate,
    RegionPartition,
    TimeGrid,
    TorusRegion,
    format_float,
    fractional_part,
)

__all__ = [
    "ObservableSeries",
    "positions_at",
    "fraction_in",
    "region_counts",
    "density_profile",
    "reverse_at",
    "zermelo_state",
    "trace",
]


@dataclass(frozen=True)
class ObservableSeries:
    """A scalar observable sampled on a time grid.

    ``times`` and ``values`` are matching one-dimensional float arrays;
    values are fractions, so they live in [0, 1].
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.array(self.times, dtype=float, copy=True)
        v = np.array(self.values, dtype=float, copy=True)
        if t.ndim != 1 or v.ndim != 1 or t.shape != v.shape:
            raise ValueError("times and values must be matching 1-d arrays")
        if t.size == 0:
            raise ValueError("series must not be empty")
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("times must be strictly increasing")
        if np.any(v < 0.0) or np.any(v > 1.0):
            raise ValueError("observable values must lie in [0, 1]")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.times.size

    def to_csv(self, path) -> None:
        """Write rows ``t,f`` with 17 significant digits and a header line."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("t,f\n")
            for t, v in zip(self.times, self.values):
                fh.write(f"{format_float(t)},{format_float(v)}\n")


def positions_at(state: GasMicrostate, t: float) -> np.ndarray:
    """Particle positions frac(x + p t) at time t (t may be negative).

    The flow is evaluated in closed form, so there is no integration error.
    The only inaccuracy is the double-precision wraparound of x + p*t, about
    |p*t| * 2^-52 per coordinate; keep |p*t| below ~1e9 where that error
    stays under 1e-7.
    """
    return fractional_part(state.positions + state.momenta * float(t))


def fraction_in(state: GasMicrostate, t: float, region: TorusRegion) -> float:
    """Occupied fraction of ``region`` at time t; a multiple of 1/n."""
    if region.dim != state.dim:
        raise ValueError(f"region dimension {region.dim} != state dimension {state.dim}")
    inside = region.contains(positions_at(state, t))
    return int(np.count_nonzero(inside)) / state.n


def region_counts(
    state: GasMicrostate, t: float, partition: RegionPartition
) -> np.ndarray:
    """Integer occupation count of each partition cell at time t.

    The cells are disjoint and tile the torus, so the counts sum to n
    exactly.
    """
    if partition.dim != state.dim:
        raise ValueError(
            f"partition dimension {partition.dim} != state dimension {state.dim}"
        )
    pts = positions_at(state, t)
    counts = np.empty(len(partition), dtype=np.int64)
    for i, region in enumerate(partition.regions):
        counts[i] = np.count_nonzero(region.contains(pts))
    if counts.sum() != state.n:
        raise RuntimeError("partition failed to cover every particle")
    return counts


def density_profile(
    state: GasMicrostate, t: float, partition: RegionPartition
) -> np.ndarray:
    """Empirical density per cell: count_a / |I_a|.

    At equilibrium every entry hovers near n.  Cells of zero measure are
    rejected since the density is not defined there.
    """
    measures = partition.measures()
    if np.any(measures <= 0.0):
        raise ValueError("density is undefined on zero-measure regions")
    return region_counts(state, t, partition) / measures


def reverse_at(state: GasMicrostate, t: float) -> GasMicrostate:
    """Evolve to time t, then flip every momentum.

    Streaming the returned state for another t lands back on the initial
    positions (with momenta negated): the flow composed with momentum
    reversal is an involution up to roundoff.
    """
    return GasMicrostate(positions_at(state, t), -state.momenta)


def zermelo_state(n: int, x0, p0) -> GasMicrostate:
    """All n particles at one point with one shared momentum.

    The whole cloud then moves as a single point on the torus, so every
    coarse observable is exactly periodic: a recurrent orbit by
    construction.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    x = np.atleast_1d(np.asarray(x0, dtype=float))
    p = np.atleast_1d(np.asarray(p0, dtype=float))
    if x.shape != p.shape or x.ndim != 1:
        raise ValueError("x0 and p0 must be d-vectors of equal length")
    if np.all(p == 0.0):
        raise ValueError("p0 must be nonzero for a nontrivial orbit")
    return GasMicrostate(np.tile(x, (n, 1)), np.tile(p, (n, 1)))


def trace(state: GasMicrostate, region: TorusRegion, grid: TimeGrid) -> ObservableSeries:
    """Occupied fraction of ``region`` along the grid times."""
    times = grid.times
    values = np.empty_like(times)
    for i, t in enumerate(times):
        values[i] = fraction_in(state, t, region)
    return ObservableSeries(times, values)
