"""Closed-form expectations and probability bounds, evaluated in log space.

The expected occupied fraction of a box under free streaming has a Fourier
representation: with chi_l the coefficients of the box indicator, nu the
position law and phi the momentum characteristic function,

    E f(t) = |I| + sum_{l >= 1} 2 Re( conj(chi_l) nu_l phi(2 pi l t) ),

evaluated per axis (product laws and product regions factorize).  The series
is truncated once the per-term bound |chi_l| |nu_l| |phi| drops below
``tail_tol``, using the monotone envelopes |chi_l| <= min(|I|, 1/(pi l)) and,
for uniform position laws, |nu_l| <= min(1, 1/(pi l w)).  That envelope form
matters: individual coefficients can vanish (every even one does for
[0, 0.5)), so stopping on a raw small term would truncate too early.

Concentration bounds (Hoeffding tail, K-instant scenario bounds, partition
union bounds, the Chebyshev-type 1/N control, and the macroscopic pressure
estimate) are returned as :class:`~equilab.core.LogProbability` so that
values like exp(-1500) survive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import LogProbability, TorusRegion, format_float
from .sampler import (
    GaussianMomenta,
    InitialMeasureSpec,
    PointMixturePositions,
    PointPositions,
    TabulatedMomenta,
    UniformPositions,
)

__all__ = [
    "DecayEstimate",
    "ScenarioParameters",
    "MacroEstimate",
    "box_fourier_coeff",
    "expected_fraction",
    "decay_bound_check",
    "fit_decay",
    "hoeffding_tail",
    "scenario_bound",
    "log_sequence_capacity",
    "equilibration_time",
    "partition_scenario_bound",
    "markov_bound",
    "macro_estimator",
    "write_bounds_csv",
]

_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Fourier machinery


def _expi_minus_one(theta: np.ndarray) -> np.ndarray:
    """exp(i theta) - 1 without cancellation, via the half-angle identity."""
    half = 0.5 * theta
    return -2.0 * np.sin(half) ** 2 + 1j * np.sin(theta)


def _interval_transform(a: float, b: float, ells: np.ndarray) -> np.ndarray:
    """Vector of integral_a^b exp(2 pi i l y) dy for the given nonzero l."""
    u = _TWO_PI * ells
    return np.exp(1j * u * a) * _expi_minus_one(u * (b - a)) / (1j * u)


def box_fourier_coeff(region: TorusRegion, ell: int) -> complex:
    """Fourier coefficient of a one-dimensional box indicator.

    Returns b - a for ell = 0 and (e^{i 2 pi l b} - e^{i 2 pi l a})/(i 2 pi l)
    otherwise; the magnitude never exceeds min(b - a, 1/(pi |l|)).
    """
    if region.dim != 1:
        raise ValueError("box_fourier_coeff expects a one-dimensional region")
    a, b = region.lower[0], region.upper[0]
    if ell == 0:
        return complex(b - a)
    out = _interval_transform(a, b, np.array([float(ell)]))
    return complex(out[0])


def _momentum_char(law, u: np.ndarray) -> np.ndarray:
    """Characteristic function E exp(i u p) of one momentum component."""
    if isinstance(law, GaussianMomenta):
        return np.exp(-0.5 * (law.sigma * u) ** 2)
    if isinstance(law, TabulatedMomenta):
        return _tabulated_char(law, u)
    raise ValueError(f"unsupported momentum law {type(law).__name__}")


def _tabulated_char(law: TabulatedMomenta, u: np.ndarray) -> np.ndarray:
    """Exact characteristic function of the piecewise-linear tabulated density.

    Each segment [x0, x0+h] with linear density f0 + s*y contributes
    e^{i u x0} (f0 A + s B) where A = (e^{iuh}-1)/(iu) and
    B = (h e^{iuh} - A)/(iu); small |u h| falls back to the Taylor forms so
    nothing blows up near u = 0.  This is exact for the interpolated density
    (the same interpolant the sampler draws from), so the only model error is
    the caller's choice of grid.
    """
    x = np.asarray(law.grid)
    f = np.asarray(law.density)
    x0 = x[:-1]
    h = np.diff(x)
    f0 = f[:-1]
    slope = np.diff(f) / h
    mass = float(np.sum(0.5 * (f[1:] + f[:-1]) * h))

    uu = np.atleast_1d(np.asarray(u, dtype=float))[:, None]
    uh = uu * h
    small = np.abs(uh) < 1e-5
    u_safe = np.where(np.abs(uu) < 1e-300, 1.0, uu)
    e1 = _expi_minus_one(uh)
    a_exact = e1 / (1j * u_safe)
    a_small = h * (1.0 + 0.5j * uh - uh**2 / 6.0)
    a_int = np.where(small, a_small, a_exact)
    b_exact = (h * (e1 + 1.0) - a_int) / (1j * u_safe)
    b_small = h**2 * (0.5 + 1j * uh / 3.0 - uh**2 / 8.0)
    b_int = np.where(small, b_small, b_exact)
    seg = np.exp(1j * uu * x0) * (f0 * a_int + slope * b_int)
    out = seg.sum(axis=1) / mass
    if np.isscalar(u) or np.asarray(u).ndim == 0:
        return out[0]
    return out


def _position_components(law, dim: int):
    """Flatten a position law into weighted per-axis descriptors.

    Returns a list of (weight, [descriptor per axis]) where a descriptor is
    ("point", a) or ("uniform", lo, hi).  Mixtures expand by linearity before
    the per-axis factorization, which keeps the product formula valid.
    """
    if isinstance(law, UniformPositions):
        if law.region.dim != dim:
            raise ValueError(
                f"position law dimension {law.region.dim} does not match region dimension {dim}"
            )
        axes = [
            ("uniform", lo, up) for lo, up in zip(law.region.lower, law.region.upper)
        ]
        return [(1.0, axes)]
    if isinstance(law, PointPositions):
        if len(law.point) != dim:
            raise ValueError(
                f"position law dimension {len(law.point)} does not match region dimension {dim}"
            )
        return [(1.0, [("point", v) for v in law.point])]
    if isinstance(law, PointMixturePositions):
        if len(law.points[0]) != dim:
            raise ValueError(
                f"position law dimension {len(law.points[0])} does not match region dimension {dim}"
            )
        return [
            (w, [("point", v) for v in pt]) for pt, w in zip(law.points, law.weights)
        ]
    raise ValueError(f"unsupported position law {type(law).__name__}")


def _position_transform(desc, ells: np.ndarray):
    """(nu_l, envelope) for one axis descriptor at the given l >= 1."""
    if desc[0] == "point":
        nu = np.exp(1j * _TWO_PI * ells * desc[1])
        return nu, np.ones_like(ells)
    lo, hi = desc[1], desc[2]
    width = hi - lo
    nu = _interval_transform(lo, hi, ells) / width
    return nu, np.minimum(1.0, 1.0 / (math.pi * ells * width))


def _overlap_1d(desc, a: float, b: float) -> float:
    """P(x in [a, b)) under one axis of the position law, exact (used at t=0)."""
    if desc[0] == "point":
        return 1.0 if a <= desc[1] < b else 0.0
    lo, hi = desc[1], desc[2]
    return max(0.0, min(b, hi) - max(a, lo)) / (hi - lo)


_BLOCK = 4096


def _series_1d(desc, a, b, momentum, t, tail_tol, max_terms) -> float:
    """One-axis expected indicator at time t > 0 via the truncated series."""
    length = b - a
    if length <= 0.0:
        return 0.0
    total = length
    # Gaussian phi decreases monotonically in l, so the first sub-threshold
    # envelope already bounds every later term; other laws only guarantee
    # |phi| <= 1, so require a run of small envelopes plus the hard
    # (phi-free) envelope as a backstop.
    monotone = isinstance(momentum, GaussianMomenta)
    run_needed = 1 if monotone else 3
    run = 0
    start = 1
    while start <= max_terms:
        stop = min(start + _BLOCK - 1, max_terms)
        ells = np.arange(start, stop + 1, dtype=float)
        chi_env = np.minimum(length, 1.0 / (math.pi * ells))
        phi = _momentum_char(momentum, _TWO_PI * ells * t)
        chi = _interval_transform(a, b, ells)
        nu, nu_env = _position_transform(desc, ells)
        terms = 2.0 * np.real(np.conj(chi) * nu * phi)
        env = chi_env * nu_env * np.abs(phi)
        hard = chi_env * nu_env

        small = env < tail_tol
        cut = len(ells)
        for i, sm in enumerate(small):
            run = run + 1 if sm else 0
            if run >= run_needed:
                cut = i - run_needed + 1
                break
        hard_idx = np.nonzero(hard < tail_tol)[0]
        done = cut < len(ells)
        if hard_idx.size and hard_idx[0] < cut:
            cut = int(hard_idx[0])
            done = True
        total += float(terms[:cut].sum())
        if done:
            return total
        start = stop + 1
    raise RuntimeError(
        f"indicator series did not reach tail_tol={tail_tol} within {max_terms} terms"
    )


def expected_fraction(
    initial: InitialMeasureSpec,
    region: TorusRegion,
    t: float,
    tail_tol: float = 1e-12,
    max_terms: int = 10_000_000,
) -> float:
    """Expected occupied fraction E f(t) of a box region under free streaming.

    Sums the Fourier series per axis and per mixture component until the
    term envelope drops below ``tail_tol``; t = 0 is evaluated exactly as an
    overlap so the degenerate (slowly converging) series never runs.  The
    result is clamped to [0, 1].
    """
    if not (t >= 0.0 and math.isfinite(t)):
        raise ValueError("t must be finite and >= 0")
    if not (tail_tol > 0.0):
        raise ValueError("tail_tol must be > 0")
    momentum = initial.momenta
    if not isinstance(momentum, (GaussianMomenta, TabulatedMomenta)):
        raise ValueError(f"unsupported momentum law {type(momentum).__name__}")
    components = _position_components(initial.positions, region.dim)
    total = 0.0
    for weight, axes in components:
        value = 1.0
        for desc, a, b in zip(axes, region.lower, region.upper):
            if t == 0.0:
                axis_val = _overlap_1d(desc, a, b)
            else:
                axis_val = _series_1d(desc, a, b, momentum, t, tail_tol, max_terms)
            value *= axis_val
            if value == 0.0:
                break
        total += weight * value
    return min(1.0, max(0.0, total))


# ---------------------------------------------------------------------------
# Mean decay estimates


@dataclass(frozen=True)
class DecayEstimate:
    """Power-law envelope |E f(t) - |I|| <= c_mu * t^(-2r)."""

    c_mu: float
    r: float

    def __post_init__(self):
        if not (self.c_mu > 0.0 and math.isfinite(self.c_mu)):
            raise ValueError("c_mu must be finite and > 0")
        if not (self.r > 0.0 and math.isfinite(self.r)):
            raise ValueError("r must be finite and > 0")

    def bound(self, t: float) -> float:
        if t <= 0.0:
            raise ValueError("decay bound is defined for t > 0")
        return self.c_mu * t ** (-2.0 * self.r)


def decay_bound_check(
    initial: InitialMeasureSpec,
    region: TorusRegion,
    decay: DecayEstimate,
    t_values,
    tail_tol: float = 1e-12,
) -> bool:
    """True iff |E f(t) - |I|| <= c_mu t^(-2r) on every listed time."""
    measure = region.measure()
    for t in np.asarray(t_values, dtype=float):
        dev = abs(expected_fraction(initial, region, float(t), tail_tol) - measure)
        if dev > decay.bound(float(t)) * (1.0 + 1e-12) + 1e-15:
            return False
    return True


def fit_decay(
    initial: InitialMeasureSpec,
    region: TorusRegion,
    t_values,
    tail_tol: float = 1e-12,
) -> DecayEstimate:
    """Fit (c_mu, r) to the computed mean deviations on a time grid.

    The exponent comes from a least-squares line in log-log space; the
    constant is then raised to the envelope max_i dev_i * t_i^(2r), so the
    fitted bound holds at every fitted point, not just on average.  Points
    whose deviation is below 1e-290 (log-unsafe) are dropped.
    """
    ts = np.asarray(t_values, dtype=float)
    if np.any(ts <= 0.0):
        raise ValueError("fit times must be > 0")
    measure = region.measure()
    devs = np.array(
        [abs(expected_fraction(initial, region, float(t), tail_tol) - measure) for t in ts]
    )
    keep = devs > 1e-290
    if np.count_nonzero(keep) < 2:
        raise ValueError("need at least 2 times with nonzero mean deviation to fit")
    log_t = np.log(ts[keep])
    log_d = np.log(devs[keep])
    slope = np.polyfit(log_t, log_d, 1)[0]
    r = -0.5 * slope
    if r <= 0.0:
        raise ValueError("no decay detected: fitted exponent is not positive")
    c_mu = float(np.max(devs[keep] * ts[keep] ** (2.0 * r))) * (1.0 + 1e-12)
    return DecayEstimate(c_mu, r)


# ---------------------------------------------------------------------------
# Concentration bounds


@dataclass(frozen=True)
class ScenarioParameters:
    """Inputs of the K-instant concentration scenario.

    epsilon is the deviation threshold, n the particle count, k_count the
    number of observation instants, and eta the fraction of epsilon granted
    to the mean term (1/2 unless stated otherwise).
    """

    epsilon: float
    n: int
    k_count: float = 1
    eta: float = 0.5

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise ValueError("epsilon must lie in (0, 1)")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not (self.k_count >= 1):
            raise ValueError("k_count must be >= 1")
        if not (0.0 < self.eta < 1.0):
            raise ValueError("eta must lie in (0, 1)")


def hoeffding_tail(epsilon: float, n: int) -> LogProbability:
    """Two-sided Hoeffding tail 2 exp(-2 eps^2 n) for a mean of n in [0,1] draws.

    epsilon = 0 is allowed and yields the vacuous bound 2 (flagged, with the
    raw log preserved).
    """
    if epsilon < 0.0:
        raise ValueError("epsilon must be >= 0")
    if n < 1:
        raise ValueError("n must be >= 1")
    return LogProbability.from_log(math.log(2.0) - 2.0 * epsilon**2 * n)


def scenario_bound(params: ScenarioParameters) -> LogProbability:
    """Probability bound 2K exp(-2 (1-eta)^2 eps^2 n) for a K-instant failure.

    At eta = 1/2 this is 2K exp(-eps^2 n / 2).  Bounds at or above 1 come
    back clamped with the vacuous flag set.
    """
    log_bound = (
        math.log(2.0)
        + math.log(params.k_count)
        - 2.0 * (1.0 - params.eta) ** 2 * params.epsilon**2 * params.n
    )
    return LogProbability.from_log(log_bound)


def log_sequence_capacity(epsilon: float, n: int) -> float:
    """log K_n for the self-balancing instant budget K_n = exp(eps^2 n / 4) / 2.

    With K = K_n the eta = 1/2 scenario bound collapses to exp(-eps^2 n / 4).
    Returned as a log because K_n overflows floats already at eps^2 n ~ 2800.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be > 0")
    if n < 1:
        raise ValueError("n must be >= 1")
    return 0.25 * epsilon**2 * n - math.log(2.0)


def equilibration_time(decay: DecayEstimate, epsilon: float, eta: float = 0.5) -> float:
    """Smallest t with c_mu t^(-2r) <= eta * epsilon, i.e. (c_mu/(eta eps))^(1/2r)."""
    if epsilon <= 0.0:
        raise ValueError("epsilon must be > 0")
    if not (0.0 < eta < 1.0):
        raise ValueError("eta must lie in (0, 1)")
    return (decay.c_mu / (eta * epsilon)) ** (1.0 / (2.0 * decay.r))


def partition_scenario_bound(params: ScenarioParameters, l_count: int) -> LogProbability:
    """Union bound L exp(-eps^2 n / 4) over the L cells of a partition.

    Uses the self-balancing instant budget (K = K_n at eta = 1/2) per cell,
    so only epsilon and n enter besides L.
    """
    if l_count < 1:
        raise ValueError("l_count must be >= 1")
    log_bound = math.log(l_count) - 0.25 * params.epsilon**2 * params.n
    return LogProbability.from_log(log_bound)


def markov_bound(epsilon: float, n: int, t_large: bool) -> LogProbability:
    """Chebyshev-type tail 4/(eps^2 n), valid once the mean term is <= eps/2.

    The caller asserts the time regime through ``t_large``; the bound has no
    time dependence of its own.
    """
    if not t_large:
        raise ValueError(
            "markov_bound holds only after the mean deviation has fallen below "
            "epsilon/2; pass t_large=True to assert that"
        )
    if epsilon <= 0.0:
        raise ValueError("epsilon must be > 0")
    if n < 1:
        raise ValueError("n must be >= 1")
    return LogProbability.from_log(math.log(4.0) - math.log(epsilon**2 * n))


# ---------------------------------------------------------------------------
# Macroscopic pressure-cell estimate


@dataclass(frozen=True)
class MacroEstimate:
    """Concentration estimate for a macroscopic observation cell.

    single_time_exponent is -2 eps^2 n; the single-time bound is its bare
    exponential (no prefactor), while the k_count-instant sequence bound
    carries the union-bound prefactor 2K.
    """

    epsilon: float
    n: float
    k_count: float
    single_time_exponent: float
    single_time_bound: LogProbability
    sequence_bound: LogProbability


def macro_estimator(
    n0: float,
    cell_volume: float,
    sub_volume: float,
    delta_pi: float,
    k_count: float = 1.0,
) -> MacroEstimate:
    """Deviation bounds for pressure read off a sub-volume of a gas cell.

    n0 is the number density (1/cm^3) and the volumes are in cm^3, so the
    cell holds n = n0 * cell_volume particles.  A relative pressure accuracy
    delta_pi on a sub-volume fraction pi = sub_volume / cell_volume tolerates
    fraction deviations up to eps = pi * delta_pi, and Hoeffding gives
    exp(-2 eps^2 n) per observation instant, 2 K exp(-2 eps^2 n) for K
    instants.  Everything stays in log space: realistic numbers produce
    exponents in the hundreds to thousands.
    """
    if n0 <= 0.0 or cell_volume <= 0.0 or sub_volume <= 0.0:
        raise ValueError("n0 and volumes must be > 0")
    if sub_volume >= cell_volume:
        raise ValueError("sub_volume must be smaller than cell_volume")
    if not (0.0 < delta_pi < 1.0):
        raise ValueError("delta_pi must lie in (0, 1)")
    if k_count < 1:
        raise ValueError("k_count must be >= 1")
    n = n0 * cell_volume
    epsilon = (sub_volume / cell_volume) * delta_pi
    exponent = -2.0 * epsilon**2 * n
    single = LogProbability.from_log(exponent)
    sequence = LogProbability.from_log(math.log(2.0) + math.log(k_count) + exponent)
    return MacroEstimate(
        epsilon=epsilon,
        n=n,
        k_count=float(k_count),
        single_time_exponent=exponent,
        single_time_bound=single,
        sequence_bound=sequence,
    )


def write_bounds_csv(path, entries) -> None:
    """Write (name, LogProbability) pairs as a bounds report CSV.

    Schema: ``quantity,log_value,linear_value_or_underflow``; linear values
    below 1e-300 are written as the literal string ``underflow``.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("quantity,log_value,linear_value_or_underflow\n")
        for name, prob in entries:
            log_s, lin_s = prob.csv_fields()
            fh.write(f"{name},{log_s},{lin_s}\n")
