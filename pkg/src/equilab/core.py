"""Shared geometry, state, and probability-bookkeeping types.

Positions live on the d-dimensional unit torus, represented as plain float
arrays with every coordinate in [0, 1).  Regions are axis-aligned half-open
boxes, chosen half-open so that a partition tiles the torus with no double
counting.  Probabilities that arise from concentration bounds can be as
small as exp(-1500), far below double-precision range, so they are carried
as natural logarithms (:class:`LogProbability`).

Random number streams are counter-based (Philox) and keyed by a
``(master_seed, stream_id)`` pair, which makes every ensemble result
bit-identical regardless of how work is scheduled across processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import total_ordering

import numpy as np

__all__ = [
    "fractional_part",
    "TorusRegion",
    "RegionPartition",
    "GasMicrostate",
    "TimeGrid",
    "LogProbability",
    "RngStream",
    "format_float",
]

#: Linear values below this threshold are reported as underflow instead of
#: being materialized as floats.
UNDERFLOW_LINEAR = 1e-300
_UNDERFLOW_LOG = math.log(UNDERFLOW_LINEAR)

_TWO64 = 2**64


def format_float(x: float) -> str:
    """Locale-independent float formatting with 17 significant digits.

    Used by every CSV writer in the package so that identical runs produce
    byte-identical files.
    """
    return format(float(x), ".17g")


def fractional_part(y) -> np.ndarray:
    """Map real coordinates onto the unit torus, componentwise ``y - floor(y)``.

    Accepts any array shape (a single d-tuple or a batch of points) and
    returns an array of the same shape with every entry in [0, 1).

    Raises
    ------
    ValueError
        If any input coordinate is not finite.
    """
    arr = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("fractional_part requires finite coordinates")
    out = arr - np.floor(arr)
    # Rounding can land exactly on 1.0 for tiny negative inputs; fold it back.
    if out.ndim == 0:
        return np.asarray(0.0) if out >= 1.0 else out
    out[out >= 1.0] = 0.0
    return out


@dataclass(frozen=True)
class TorusRegion:
    """Axis-aligned half-open box ``[lower_k, upper_k)`` on the torus.

    Membership is half-open in every coordinate: the lower face belongs to
    the region, the upper face does not.
    """

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lower))
        up = tuple(float(v) for v in np.atleast_1d(self.upper))
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)
        if len(lo) != len(up):
            raise ValueError("lower and upper must have the same dimension")
        for a, b in zip(lo, up):
            if not (0.0 <= a <= b <= 1.0):
                raise ValueError(
                    f"region bounds must satisfy 0 <= lower <= upper <= 1, got [{a}, {b})"
                )

    @classmethod
    def interval(cls, a: float, b: float) -> "TorusRegion":
        """One-dimensional region [a, b)."""
        return cls((a,), (b,))

    @property
    def dim(self) -> int:
        return len(self.lower)

    def measure(self) -> float:
        """Lebesgue measure, the product of side lengths."""
        m = 1.0
        for a, b in zip(self.lower, self.upper):
            m *= b - a
        return m

    def contains(self, points) -> np.ndarray:
        """Half-open membership test.

        ``points`` may be a single point of shape (d,) or a batch (n, d);
        returns a scalar bool or a boolean array of shape (n,).
        """
        pts = np.asarray(points, dtype=float)
        lo = np.asarray(self.lower)
        up = np.asarray(self.upper)
        inside = (pts >= lo) & (pts < up)
        return inside.all(axis=-1)


def region_contains(region: TorusRegion, point) -> bool:
    """Functional alias for :meth:`TorusRegion.contains` on a single point."""
    return bool(region.contains(point))


def _boxes_disjoint(a: TorusRegion, b: TorusRegion) -> bool:
    # Half-open boxes are disjoint iff they separate along some axis.
    for (alo, aup, blo, bup) in zip(a.lower, a.upper, b.lower, b.upper):
        if aup <= blo or bup <= alo:
            return True
    return False


@dataclass(frozen=True)
class RegionPartition:
    """A finite family of pairwise-disjoint boxes whose measures sum to 1."""

    regions: tuple

    def __post_init__(self):
        regs = tuple(self.regions)
        object.__setattr__(self, "regions", regs)
        if not regs:
            raise ValueError("partition needs at least one region")
        dim = regs[0].dim
        if any(r.dim != dim for r in regs):
            raise ValueError("all regions must share one dimension")
        total = sum(r.measure() for r in regs)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"region measures sum to {total}, expected 1")
        for i in range(len(regs)):
            for j in range(i + 1, len(regs)):
                if not _boxes_disjoint(regs[i], regs[j]):
                    raise ValueError(f"regions {i} and {j} overlap")

    @classmethod
    def regular(cls, count: int, dim: int = 1) -> "RegionPartition":
        """Uniform grid of ``count`` cells per axis."""
        if count < 1:
            raise ValueError("count must be >= 1")
        edges = np.linspace(0.0, 1.0, count + 1)
        cells_1d = [(edges[i], edges[i + 1]) for i in range(count)]
        if dim == 1:
            regs = [TorusRegion((a,), (b,)) for a, b in cells_1d]
        else:
            from itertools import product

            regs = [
                TorusRegion(tuple(c[0] for c in combo), tuple(c[1] for c in combo))
                for combo in product(cells_1d, repeat=dim)
            ]
        return cls(tuple(regs))

    def __len__(self) -> int:
        return len(self.regions)

    @property
    def dim(self) -> int:
        return self.regions[0].dim

    def measures(self) -> np.ndarray:
        return np.array([r.measure() for r in self.regions])

    def locate(self, point) -> int:
        """Index of the unique region containing ``point``."""
        for i, r in enumerate(self.regions):
            if r.contains(point):
                return i
        raise ValueError(f"point {point} not covered by the partition")


@dataclass(frozen=True)
class GasMicrostate:
    """Positions and momenta of n non-interacting particles on the d-torus.

    ``positions`` and ``momenta`` are (n, d) float arrays; positions must lie
    in [0, 1) coordinatewise.  Instances are immutable: the arrays are marked
    read-only, so one sampled state can be probed at many times, by many
    workers, without copies.
    """

    positions: np.ndarray
    momenta: np.ndarray

    def __post_init__(self):
        x = np.array(self.positions, dtype=float, copy=True)
        p = np.array(self.momenta, dtype=float, copy=True)
        if x.ndim == 1:
            x = x[:, None]
        if p.ndim == 1:
            p = p[:, None]
        if x.ndim != 2 or p.ndim != 2 or x.shape != p.shape:
            raise ValueError(
                f"positions and momenta must be matching (n, d) arrays, got {x.shape} and {p.shape}"
            )
        if x.shape[0] < 1:
            raise ValueError("need at least one particle")
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(p)):
            raise ValueError("positions and momenta must be finite")
        if np.any(x < 0.0) or np.any(x >= 1.0):
            raise ValueError("positions must lie in [0, 1) coordinatewise")
        x.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "momenta", p)

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def dim(self) -> int:
        return self.positions.shape[1]


@dataclass(frozen=True)
class TimeGrid:
    """Observation instants ``t0 + k * dt`` for k = 1..k_count."""

    t0: float
    dt: float
    k_count: int

    def __post_init__(self):
        if not (self.t0 >= 0.0 and math.isfinite(self.t0)):
            raise ValueError("t0 must be finite and >= 0")
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ValueError("dt must be finite and > 0")
        if self.k_count < 1:
            raise ValueError("k_count must be >= 1")

    @property
    def times(self) -> np.ndarray:
        k = np.arange(1, self.k_count + 1, dtype=float)
        return self.t0 + k * self.dt

    @property
    def duration(self) -> float:
        return self.k_count * self.dt


@total_ordering
@dataclass(frozen=True)
class LogProbability:
    """A probability carried as its natural logarithm.

    ``log_value`` is always <= 0; probability exactly zero is the
    distinguished value ``-inf``.  Upper bounds that exceed 1 are clamped to
    1 and flagged ``vacuous``; the pre-clamp value survives in ``raw_log``
    so a vacuous bound still reports how badly it missed.  All arithmetic
    (products, counted unions, complements, sums) stays in log space; a
    linear value is materialized only on request and only when it is
    representable (>= 1e-300), otherwise :attr:`linear` reports 0.0 and
    :attr:`underflows` is true.
    """

    log_value: float
    vacuous: bool = False
    raw_log: float | None = None

    def __post_init__(self):
        lv = float(self.log_value)
        if math.isnan(lv) or lv > 0.0:
            raise ValueError(f"log_value must be <= 0 or -inf, got {lv}")
        object.__setattr__(self, "log_value", lv)
        if self.raw_log is None:
            object.__setattr__(self, "raw_log", lv)
        else:
            object.__setattr__(self, "raw_log", float(self.raw_log))

    @classmethod
    def from_log(cls, log_value: float) -> "LogProbability":
        """Build from a raw log bound, clamping values above log(1) = 0."""
        lv = float(log_value)
        if math.isnan(lv):
            raise ValueError("log bound is NaN")
        if lv > 0.0:
            return cls(0.0, vacuous=True, raw_log=lv)
        return cls(lv)

    @classmethod
    def from_linear(cls, p: float) -> "LogProbability":
        if p < 0.0:
            raise ValueError("probability must be >= 0")
        if p == 0.0:
            return cls(-math.inf)
        if p > 1.0:
            return cls(0.0, vacuous=True)
        return cls(math.log(p))

    @property
    def linear(self) -> float:
        """exp(log_value) when representable, else 0.0 (see underflows)."""
        if self.log_value < _UNDERFLOW_LOG:
            return 0.0
        return math.exp(self.log_value)

    @property
    def underflows(self) -> bool:
        return self.log_value < _UNDERFLOW_LOG

    def __mul__(self, other: "LogProbability") -> "LogProbability":
        return LogProbability.from_log(self.log_value + other.log_value)

    def __add__(self, other: "LogProbability") -> "LogProbability":
        return LogProbability.from_log(np.logaddexp(self.log_value, other.log_value))

    def scaled(self, count: float) -> "LogProbability":
        """Union-bound scaling: probability multiplied by a positive count."""
        if count <= 0:
            raise ValueError("count must be positive")
        return LogProbability.from_log(self.log_value + math.log(count))

    def complement(self) -> "LogProbability":
        """log(1 - p), computed without leaving log space."""
        if self.log_value == 0.0:
            return LogProbability(-math.inf)
        return LogProbability.from_log(math.log1p(-math.exp(self.log_value)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LogProbability):
            return NotImplemented
        return self.log_value == other.log_value

    def __lt__(self, other) -> bool:
        if not isinstance(other, LogProbability):
            return NotImplemented
        return self.log_value < other.log_value

    def __hash__(self):
        return hash(self.log_value)

    def csv_fields(self) -> tuple:
        """(log_value, linear_or_'underflow') pair used by bounds reports."""
        linear = "underflow" if self.underflows else format_float(self.linear)
        return format_float(self.log_value), linear


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream keyed by (master_seed, stream_id).

    Streams with distinct ids are statistically independent, and a given key
    reproduces the same sequence on any machine and any worker count, because
    the underlying generator (Philox) is counter-based.  A stream is single
    owner: call :meth:`generator` to obtain a fresh generator positioned at
    the start of the stream.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "master_seed", int(self.master_seed) % _TWO64)
        object.__setattr__(self, "stream_id", int(self.stream_id) % _TWO64)

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, offset: int) -> "RngStream":
        """Stream with the same master seed and a shifted stream id."""
        return RngStream(self.master_seed, self.stream_id + int(offset))
