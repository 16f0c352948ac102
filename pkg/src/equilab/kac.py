"""Marked-ring color dynamics: exact evolution, expectations, and oracles.

N sites sit on a circle; site n carries a fixed marker xi_n in {+1, -1}
(-1 = marked) and a ball of color eta_n in {+1, -1} (+1 = white).  Each step
every ball moves one site counterclockwise and flips color when it leaves a
marked site:

    eta_n(t) = xi_{n-1} * eta_{n-1}(t-1)        (indices mod N).

The dynamics is deterministic, invertible, and 2N-periodic.  The observable
is the white-minus-black count Delta(t) and its fraction delta_bar; from an
all-white start Delta(t) is a sum of marker-window products, which this
module evaluates both by iterating the map and in closed form via prefix
products, and, for small rings, by exact enumeration over all 2^N marker
sequences.  The closed form and the enumeration serve as mutual oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import LogProbability, RngStream, format_float

__all__ = [
    "KacConfiguration",
    "KacObservable",
    "step",
    "inverse_step",
    "ring_trace",
    "delta_closed_form",
    "sample_markers",
    "expected_delta_bar",
    "BruteForceMoments",
    "brute_force_expectation",
    "RingBoundSchedule",
    "ring_bound_schedule",
    "BlockDecomposition",
    "block_decomposition",
    "write_trace_csv",
]


def _as_pm_one(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.int8)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"{name} must be a nonempty 1-d sequence")
    if not np.all((arr == 1) | (arr == -1)):
        raise ValueError(f"{name} entries must be +1 or -1")
    return arr


@dataclass(frozen=True)
class KacConfiguration:
    """Immutable ring state: markers, ball colors, and a step counter.

    ``time`` counts net forward steps since preparation; it can go negative
    if a freshly prepared state is stepped backward.
    """

    markers: np.ndarray
    colors: np.ndarray
    time: int = 0

    def __post_init__(self):
        m = _as_pm_one(self.markers, "markers")
        c = _as_pm_one(self.colors, "colors")
        if m.size != c.size:
            raise ValueError("markers and colors must have equal length")
        m = m.copy()
        c = c.copy()
        m.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "markers", m)
        object.__setattr__(self, "colors", c)
        object.__setattr__(self, "time", int(self.time))

    @classmethod
    def all_white(cls, markers) -> "KacConfiguration":
        m = _as_pm_one(markers, "markers")
        return cls(m, np.ones(m.size, dtype=np.int8), 0)

    @property
    def n_sites(self) -> int:
        return self.markers.size

    @property
    def marker_count(self) -> int:
        return int(np.count_nonzero(self.markers == -1))


@dataclass(frozen=True)
class KacObservable:
    """White-minus-black count Delta and its fraction of the ring size."""

    delta: int
    delta_bar: float

    @classmethod
    def of(cls, config: KacConfiguration) -> "KacObservable":
        d = int(config.colors.sum(dtype=np.int64))
        return cls(d, d / config.n_sites)


def step(config: KacConfiguration) -> KacConfiguration:
    """One forward step: eta'_n = xi_{n-1} * eta_{n-1}, markers fixed."""
    new_colors = np.roll(config.markers * config.colors, 1)
    return KacConfiguration(config.markers, new_colors, config.time + 1)


def inverse_step(config: KacConfiguration) -> KacConfiguration:
    """One backward step: eta'_n = xi_n * eta_{n+1}; undoes :func:`step` exactly."""
    new_colors = config.markers * np.roll(config.colors, -1)
    return KacConfiguration(config.markers, new_colors, config.time - 1)


def ring_trace(config: KacConfiguration, t_max: int) -> np.ndarray:
    """Delta(t) for t = 0..t_max by iterating the map from ``config``."""
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    deltas = np.empty(t_max + 1, dtype=np.int64)
    colors = config.colors.copy()
    markers = config.markers
    deltas[0] = colors.sum(dtype=np.int64)
    for t in range(1, t_max + 1):
        colors = np.roll(markers * colors, 1)
        deltas[t] = colors.sum(dtype=np.int64)
    return deltas


def _window_products(markers_2d: np.ndarray, t: int) -> np.ndarray:
    """X_{n,t} = prod_{j=1..t} xi_{n-j} for each row, n = 0..N-1, 1 <= t <= N.

    Uses prefix products over the doubled marker array; entries are +-1 so
    the usual quotient of prefix products becomes a plain product.
    """
    n = markers_2d.shape[1]
    doubled = np.concatenate([markers_2d, markers_2d], axis=1).astype(np.int64)
    prefix = np.ones((markers_2d.shape[0], 2 * n + 1), dtype=np.int64)
    np.cumprod(doubled, axis=1, out=prefix[:, 1:])
    starts = (np.arange(n) - t) % n
    return prefix[:, starts + t] * prefix[:, starts]


def delta_closed_form(markers, t: int) -> int:
    """Delta(t) from the all-white start, in O(N) via prefix products.

    Valid for 0 <= t <= 2N.  Beyond one revolution every window picks up the
    full-ring product (-1)^m, so Delta(N + s) = (-1)^m Delta_formula(s); in
    particular Delta(N) = (-1)^m N and Delta(2N) = N.
    """
    m = _as_pm_one(markers, "markers")
    n = m.size
    if not (0 <= t <= 2 * n):
        raise ValueError(f"t must lie in [0, {2 * n}], got {t}")
    sign = 1
    if t > n:
        sign = -1 if (int(np.count_nonzero(m == -1)) % 2) else 1
        t = t - n
    if t == 0:
        return sign * n
    x = _window_products(m[None, :], t)
    return sign * int(x.sum(dtype=np.int64))


def sample_markers(n: int, mu: float, rng: RngStream) -> np.ndarray:
    """I.i.d. markers with P(marked) = mu, as a +-1 int8 array."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (0.0 < mu <= 1.0):
        raise ValueError("mu must lie in (0, 1]")
    gen = rng.generator()
    marked = gen.random(n) < mu
    out = np.where(marked, np.int8(-1), np.int8(1))
    return out


def expected_delta_bar(mu: float, t: int, n_sites: int) -> float:
    """Ensemble mean of delta_bar(t) from all white: (1 - 2 mu)^t.

    The window products behind Delta(t) involve distinct markers only while
    t <= N, so the formula is refused past one revolution.
    """
    if not (0.0 <= mu <= 1.0):
        raise ValueError("mu must lie in [0, 1]")
    if t < 0:
        raise ValueError("t must be >= 0")
    if t > n_sites:
        raise ValueError(
            f"the product formula holds only for t <= N = {n_sites}, got t = {t}"
        )
    return (1.0 - 2.0 * mu) ** t


@dataclass(frozen=True)
class BruteForceMoments:
    mean: float
    variance: float


_BRUTE_LIMIT = 20
_BRUTE_CHUNK = 1 << 16


def brute_force_expectation(n: int, mu: float, t: int) -> BruteForceMoments:
    """Exact moments of delta_bar(t) by summing all 2^N marker sequences.

    Each sequence is weighted mu^m (1-mu)^(N-m); the result is exact up to
    float rounding, which makes it the ground-truth oracle for the closed
    form and the (1-2 mu)^t mean.  Refuses N > 20 (the enumeration is 2^N).
    """
    if not (1 <= n <= _BRUTE_LIMIT):
        raise ValueError(f"brute force enumeration requires 1 <= N <= {_BRUTE_LIMIT}")
    if not (0.0 <= mu <= 1.0):
        raise ValueError("mu must lie in [0, 1]")
    if not (0 <= t <= 2 * n):
        raise ValueError(f"t must lie in [0, {2 * n}]")
    total = 1 << n
    bit_cols = np.arange(n, dtype=np.uint64)
    mean_acc = 0.0
    sq_acc = 0.0
    for start in range(0, total, _BRUTE_CHUNK):
        codes = np.arange(start, min(start + _BRUTE_CHUNK, total), dtype=np.uint64)
        bits = ((codes[:, None] >> bit_cols) & 1).astype(np.int8)
        marked = bits.sum(axis=1, dtype=np.int64)
        markers = (1 - 2 * bits).astype(np.int8)
        if t == 0:
            deltas = np.full(codes.size, n, dtype=np.int64)
        else:
            tt = t
            sign = np.ones(codes.size, dtype=np.int64)
            if tt > n:
                sign = 1 - 2 * (marked % 2)
                tt -= n
            if tt == 0:
                deltas = sign * n
            else:
                deltas = sign * _window_products(markers, tt).sum(axis=1, dtype=np.int64)
        # Weights via logs so mu near 0 or 1 cannot underflow intermediate powers.
        with np.errstate(divide="ignore"):
            log_w = marked * np.log(mu) if mu > 0 else np.where(marked == 0, 0.0, -np.inf)
            if mu < 1:
                log_w = log_w + (n - marked) * np.log1p(-mu)
            else:
                log_w = np.where(marked == n, log_w, -np.inf)
        w = np.exp(log_w)
        dbar = deltas / n
        mean_acc += float(np.sum(w * dbar))
        sq_acc += float(np.sum(w * dbar * dbar))
    return BruteForceMoments(mean=mean_acc, variance=sq_acc - mean_acc**2)


@dataclass(frozen=True)
class RingBoundSchedule:
    """Size thresholds, time window, and tail bounds for ring equilibration.

    For a deviation threshold epsilon and window exponent alpha in (0, 1):
    rings larger than ``min_sites`` = (4/eps)^(1/(1-alpha)) equilibrate by
    ``t_start`` (the first integer time with |1-2mu|^t <= eps/4) and stay
    concentrated until ``window_end(N)`` = N^alpha / 2, with per-time tail
    2 exp(eps^2/2) exp(-(eps^2/2) N^(1-alpha)) and the window-long bound the
    per-time one multiplied by the window length.
    """

    epsilon: float
    alpha: float
    mu: float
    min_sites: float
    t_start: float
    t_start_exact: float

    def window_end(self, n_sites: int) -> float:
        return 0.5 * n_sites**self.alpha

    def _log_per_time(self, n_sites: int) -> float:
        half_sq = 0.5 * self.epsilon**2
        return math.log(2.0) + half_sq - half_sq * n_sites ** (1.0 - self.alpha)

    def per_time_bound(self, n_sites: int) -> LogProbability:
        return LogProbability.from_log(self._log_per_time(n_sites))

    def sequence_bound(self, n_sites: int) -> LogProbability:
        log_window = math.log(self.window_end(n_sites))
        return LogProbability.from_log(log_window + self._log_per_time(n_sites))


def ring_bound_schedule(epsilon: float, alpha: float, mu: float) -> RingBoundSchedule:
    """Equilibration schedule for rings with marker fraction mu.

    ``t_start`` solves |1-2mu|^t = eps/4 and is rounded up to an integer; at
    mu = 1/2 the mean vanishes after one step, so t_start = 1, while mu in
    {0, 1} never decays (t_start = inf).
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be > 0")
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie in (0, 1)")
    if not (0.0 <= mu <= 1.0):
        raise ValueError("mu must lie in [0, 1]")
    min_sites = (4.0 / epsilon) ** (1.0 / (1.0 - alpha))
    lam = abs(1.0 - 2.0 * mu)
    if lam == 0.0:
        exact = 0.0
    elif lam == 1.0:
        exact = math.inf
    else:
        exact = math.log(epsilon / 4.0) / math.log(lam)
    t_start = math.inf if math.isinf(exact) else float(max(1, math.ceil(exact)))
    return RingBoundSchedule(
        epsilon=epsilon,
        alpha=alpha,
        mu=mu,
        min_sites=min_sites,
        t_start=t_start,
        t_start_exact=exact,
    )


@dataclass(frozen=True)
class BlockDecomposition:
    """Split of Delta(t) into independent block sums plus a short remainder.

    Writing N = block_count * t + remainder_count groups the window products
    into t interleaved sums of block_count independent terms each
    (windows t apart share no marker), plus remainder_count leftovers.
    """

    block_sum: int
    remainder: int
    block_count: int
    remainder_count: int


def block_decomposition(markers, t: int) -> BlockDecomposition:
    """Decompose Delta(t) = block_sum + remainder with |remainder| < t."""
    m = _as_pm_one(markers, "markers")
    n = m.size
    if not (1 <= t <= n):
        raise ValueError(f"t must lie in [1, {n}], got {t}")
    k = n // t
    rc = n - k * t
    x = _window_products(m[None, :], t)[0]
    # The grouping indexes sites 1..N; site N wraps to index 0.
    x_shifted = np.concatenate([x[1:], x[:1]])
    block_sum = int(x_shifted[: k * t].sum(dtype=np.int64))
    remainder = int(x_shifted[k * t :].sum(dtype=np.int64))
    return BlockDecomposition(
        block_sum=block_sum,
        remainder=remainder,
        block_count=k,
        remainder_count=rc,
    )


def write_trace_csv(path, deltas: np.ndarray, n_sites: int) -> None:
    """Write a Delta trace as rows ``t,delta,delta_bar`` (t = 0, 1, ...)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,delta,delta_bar\n")
        for t, d in enumerate(np.asarray(deltas)):
            fh.write(f"{t},{int(d)},{format_float(int(d) / n_sites)}\n")
