"""Monte Carlo ensembles: deviation scaling, fluctuation traces, ring sweeps.

Histories are independent and each one owns a counter-based RNG stream
(stream_id = global history index), so scheduling cannot change any draw.
Work is split into fixed-size chunks of histories regardless of the worker
count, and every per-chunk statistic is an integer (deviation counts, color
sums, squared color sums); chunk results are merged by integer addition,
which is exact and order-independent.  Identical spec and master seed
therefore produce byte-identical result files at any worker count, the
property the determinism checks pin down.
"""

from __future__ import annotations

import json
import math
import sys
import time as _time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import RngStream, TimeGrid, TorusRegion, format_float
from .gas import ObservableSeries, trace
from .kac import sample_markers
from .sampler import InitialMeasureSpec, sample_microstate

__all__ = [
    "ScalingExperimentSpec",
    "ScalingResult",
    "FitResult",
    "run_gas_scaling",
    "fit_exponential",
    "run_fluctuation_trace",
    "KacEnsembleResult",
    "run_kac_ensemble",
    "write_summary_json",
    "run_metadata",
]

_GAS_CHUNK = 256
_KAC_CHUNK = 512


def _map_chunks(func, payloads, workers: int):
    if workers <= 1:
        return [func(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, payloads))


# ---------------------------------------------------------------------------
# Gas deviation scaling


@dataclass(frozen=True)
class ScalingExperimentSpec:
    """Deviation-frequency experiment over particle counts and grid prefixes.

    For each n in ``n_values``, ``histories`` microstates are sampled from
    ``initial`` and checked for |f(t_k) - |I|| > epsilon along the grid; the
    deviation probability is then reported for every prefix length K in
    ``k_values``.
    """

    n_values: tuple
    k_values: tuple
    histories: int
    epsilon: float
    grid: TimeGrid
    region: TorusRegion
    initial: InitialMeasureSpec
    master_seed: int

    def __post_init__(self):
        nv = tuple(int(v) for v in self.n_values)
        kv = tuple(int(v) for v in self.k_values)
        object.__setattr__(self, "n_values", nv)
        object.__setattr__(self, "k_values", kv)
        if not nv or any(b <= a for a, b in zip(nv, nv[1:])) or nv[0] < 1:
            raise ValueError("n_values must be nonempty and strictly increasing")
        if not kv or any(b <= a for a, b in zip(kv, kv[1:])) or kv[0] < 1:
            raise ValueError("k_values must be nonempty and strictly increasing")
        if kv[-1] > self.grid.k_count:
            raise ValueError("largest K exceeds the time grid length")
        if self.histories < 1:
            raise ValueError("histories must be >= 1")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be > 0")


@dataclass(frozen=True)
class FitResult:
    """Exponential fit p = a * exp(-b * epsilon^2 * n)."""

    a: float
    b: float


@dataclass(frozen=True)
class ScalingResult:
    """Per-(n, K) deviation counts with derived rates and an optional fit."""

    n_values: tuple
    k_values: tuple
    histories: int
    epsilon: float
    deviations: np.ndarray
    p_hat: np.ndarray
    p_hat_over_k: np.ndarray
    stderr: np.ndarray
    fit: FitResult | None

    def to_csv(self, path) -> None:
        """Rows ``N,K,deviations,M,p_hat,p_hat_over_K,stderr`` per (n, K)."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("N,K,deviations,M,p_hat,p_hat_over_K,stderr\n")
            for i, n in enumerate(self.n_values):
                for j, k in enumerate(self.k_values):
                    fh.write(
                        f"{n},{k},{int(self.deviations[i, j])},{self.histories},"
                        f"{format_float(self.p_hat[i, j])},"
                        f"{format_float(self.p_hat_over_k[i, j])},"
                        f"{format_float(self.stderr[i, j])}\n"
                    )


def _gas_scaling_chunk(payload):
    """First-exceedance histogram for one chunk of histories.

    Returns an int64 array h of length K+1: h[0] counts histories that never
    exceed epsilon on the grid, h[k] those whose first exceedance is at the
    k-th grid time.  Prefix sums of h[1:] then give the deviation count for
    every K at once.
    """
    (n, dim, initial, region, times, epsilon, master_seed, stream_base, count) = payload
    measure = region.measure()
    lo = np.asarray(region.lower)
    up = np.asarray(region.upper)
    xs = np.empty((count, n, dim))
    ps = np.empty((count, n, dim))
    for i in range(count):
        state = sample_microstate(initial, n, dim, RngStream(master_seed, stream_base + i))
        xs[i] = state.positions
        ps[i] = state.momenta
    first = np.zeros(count, dtype=np.int64)
    alive = np.arange(count)
    for k, t in enumerate(times, start=1):
        y = xs[alive] + ps[alive] * t
        y -= np.floor(y)
        inside = ((y >= lo) & (y < up)).all(axis=2)
        frac = inside.sum(axis=1, dtype=np.int64) / n
        exceeded = np.abs(frac - measure) > epsilon
        first[alive[exceeded]] = k
        alive = alive[~exceeded]
        if alive.size == 0:
            break
    return np.bincount(first, minlength=len(times) + 1)


def run_gas_scaling(spec: ScalingExperimentSpec, workers: int = 1) -> ScalingResult:
    """Measure deviation frequencies for every (n, K) requested by ``spec``.

    Each history samples one microstate and walks the grid until the first
    time |f - |I|| exceeds epsilon (histories are independent across n via
    disjoint stream ids).  The fit pools all (n, K) points with nonzero
    rate; if fewer than two such points exist the fit is omitted.
    """
    times = tuple(float(t) for t in spec.grid.times)
    dim = spec.region.dim
    m = spec.histories
    dev = np.zeros((len(spec.n_values), len(spec.k_values)), dtype=np.int64)
    for ni, n in enumerate(spec.n_values):
        payloads = []
        base = ni * m
        for start in range(0, m, _GAS_CHUNK):
            cnt = min(_GAS_CHUNK, m - start)
            payloads.append(
                (n, dim, spec.initial, spec.region, times, spec.epsilon,
                 spec.master_seed, base + start, cnt)
            )
        hist = np.zeros(len(times) + 1, dtype=np.int64)
        for part in _map_chunks(_gas_scaling_chunk, payloads, workers):
            hist += part
        by_k = np.cumsum(hist[1:])
        for j, k in enumerate(spec.k_values):
            dev[ni, j] = by_k[k - 1]
    p_hat = dev / m
    p_over_k = p_hat / np.asarray(spec.k_values)
    stderr = np.sqrt(p_hat * (1.0 - p_hat) / m)
    points = [
        (n, p_over_k[i, j])
        for i, n in enumerate(spec.n_values)
        for j in range(len(spec.k_values))
    ]
    usable = sum(1 for _, p in points if p > 0)
    fit = fit_exponential(points, spec.epsilon) if usable >= 2 else None
    if fit is None:
        warnings.warn("fewer than 2 nonzero deviation rates; exponential fit skipped")
    return ScalingResult(
        n_values=spec.n_values,
        k_values=spec.k_values,
        histories=m,
        epsilon=spec.epsilon,
        deviations=dev,
        p_hat=p_hat,
        p_hat_over_k=p_over_k,
        stderr=stderr,
        fit=fit,
    )


def fit_exponential(points, epsilon: float) -> FitResult:
    """Least squares for log p = log a - b * epsilon^2 * n.

    ``points`` is a list of (n, p) pairs; zero rates carry no log-space
    information and are dropped with a warning.  Unweighted in log space.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be > 0")
    xs, ys = [], []
    for n, p in points:
        if p < 0.0:
            raise ValueError("probabilities must be >= 0")
        if p == 0.0:
            warnings.warn(f"dropping zero-rate point at N={n}: no log-space value")
            continue
        xs.append(epsilon**2 * n)
        ys.append(math.log(p))
    if len(xs) < 2:
        raise ValueError("need at least 2 points with p > 0 to fit")
    slope, intercept = np.polyfit(np.asarray(xs), np.asarray(ys), 1)
    return FitResult(a=float(np.exp(intercept)), b=float(-slope))


def run_fluctuation_trace(
    n: int,
    initial: InitialMeasureSpec,
    region: TorusRegion,
    grid: TimeGrid,
    seed: int,
) -> ObservableSeries:
    """Trace f(t) for one sampled history (stream_id 0 of ``seed``)."""
    state = sample_microstate(initial, n, region.dim, RngStream(seed, 0))
    return trace(state, region, grid)


# ---------------------------------------------------------------------------
# Ring ensembles


@dataclass(frozen=True)
class KacEnsembleResult:
    """Per-time moments of delta_bar over sampled marker sequences.

    ``p_dev`` is the frequency of |delta_bar(t)| > epsilon at each t.  When
    a window (t_lo, t_hi) was requested, ``window_exceed_fraction`` is the
    fraction of histories exceeding epsilon at ANY time inside the window.
    """

    n_sites: int
    mu: float
    histories: int
    epsilon: float
    times: np.ndarray
    mean: np.ndarray
    variance: np.ndarray
    p_dev: np.ndarray
    window: tuple | None = None
    window_exceed_count: int | None = None
    window_exceed_fraction: float | None = None

    def to_csv(self, path) -> None:
        """Rows ``t,mean,variance,p_dev,M`` for t = 0..t_max."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("t,mean,variance,p_dev,M\n")
            for i, t in enumerate(self.times):
                fh.write(
                    f"{int(t)},{format_float(self.mean[i])},"
                    f"{format_float(self.variance[i])},"
                    f"{format_float(self.p_dev[i])},{self.histories}\n"
                )


def _kac_ensemble_chunk(payload):
    """Integer accumulators for one chunk of marker histories.

    Returns (sum_delta, sum_delta_sq, exceed_count) per time plus the count
    of histories exceeding epsilon anywhere in the window (0 if no window).
    All four are exact integers, so merging across chunks is exact.
    """
    (n, mu, t_max, epsilon, master_seed, stream_base, count, window) = payload
    markers = np.empty((count, n), dtype=np.int8)
    for i in range(count):
        markers[i] = sample_markers(n, mu, RngStream(master_seed, stream_base + i))
    colors = np.ones((count, n), dtype=np.int8)
    threshold = epsilon * n
    sum_d = np.zeros(t_max + 1, dtype=np.int64)
    sum_d2 = np.zeros(t_max + 1, dtype=np.int64)
    exceed = np.zeros(t_max + 1, dtype=np.int64)
    window_hit = np.zeros(count, dtype=bool)
    for t in range(t_max + 1):
        if t > 0:
            colors = np.roll(markers * colors, 1, axis=1)
        delta = colors.sum(axis=1, dtype=np.int64)
        sum_d[t] = delta.sum()
        sum_d2[t] = (delta * delta).sum()
        over = np.abs(delta) > threshold
        exceed[t] = np.count_nonzero(over)
        if window is not None and window[0] <= t <= window[1]:
            window_hit |= over
    return sum_d, sum_d2, exceed, int(np.count_nonzero(window_hit))


def run_kac_ensemble(
    n_sites: int,
    mu: float,
    histories: int,
    t_max: int,
    epsilon: float,
    seed: int,
    workers: int = 1,
    window: tuple | None = None,
) -> KacEnsembleResult:
    """Evolve ``histories`` independent rings and report per-time statistics.

    Every history starts all white with markers drawn at rate mu from its
    own stream.  ``window`` (t_lo, t_hi), if given, additionally counts
    histories with an epsilon exceedance anywhere inside the window, the
    quantity the ring bound schedule controls.
    """
    if t_max > 2 * n_sites:
        raise ValueError("t_max beyond one full period 2N is redundant")
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    if histories < 1:
        raise ValueError("histories must be >= 1")
    if epsilon <= 0.0:
        raise ValueError("epsilon must be > 0")
    if window is not None:
        window = (float(window[0]), float(window[1]))
        if window[0] > window[1]:
            raise ValueError("window must satisfy t_lo <= t_hi")
    payloads = []
    for start in range(0, histories, _KAC_CHUNK):
        cnt = min(_KAC_CHUNK, histories - start)
        payloads.append((n_sites, mu, t_max, epsilon, seed, start, cnt, window))
    sum_d = np.zeros(t_max + 1, dtype=np.int64)
    sum_d2 = np.zeros(t_max + 1, dtype=np.int64)
    exceed = np.zeros(t_max + 1, dtype=np.int64)
    window_count = 0
    for part_d, part_d2, part_e, part_w in _map_chunks(
        _kac_ensemble_chunk, payloads, workers
    ):
        sum_d += part_d
        sum_d2 += part_d2
        exceed += part_e
        window_count += part_w
    m = histories
    n = n_sites
    mean = sum_d / (m * n)
    if m > 1:
        variance = (sum_d2 - sum_d.astype(float) ** 2 / m) / ((m - 1) * n * n)
    else:
        variance = np.zeros(t_max + 1)
    p_dev = exceed / m
    return KacEnsembleResult(
        n_sites=n_sites,
        mu=mu,
        histories=m,
        epsilon=epsilon,
        times=np.arange(t_max + 1),
        mean=mean,
        variance=variance,
        p_dev=p_dev,
        window=window,
        window_exceed_count=window_count if window is not None else None,
        window_exceed_fraction=window_count / m if window is not None else None,
    )


# ---------------------------------------------------------------------------
# Summary serialization


def _json_safe(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return [_json_safe(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def write_summary_json(path, payload: dict) -> None:
    """Write a structured run summary; keys are sorted for stable output."""
    body = _json_safe(payload)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(body, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_metadata(start_time: float) -> dict:
    """Version and timing block shared by every summary file."""
    from . import __version__

    return {
        "package_version": __version__,
        "python_version": sys.version.split()[0],
        "numpy_version": np.__version__,
        "wall_time_s": _time.perf_counter() - start_time,
    }
