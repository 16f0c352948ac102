"""Initial-condition sampling for the free gas.

An initial measure is a product: a position law on the torus times an i.i.d.
momentum law per particle.  Position laws cover the cases used throughout
the package (uniform on a box, a single point, a finite mixture of points);
momentum laws are an isotropic Gaussian or a tabulated one-dimensional
density applied independently per component.

Every draw goes through an :class:`~equilab.core.RngStream`, so a sampled
microstate is a pure function of (law, n, dim, master_seed, stream_id).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import GasMicrostate, RngStream, TorusRegion

__all__ = [
    "UniformPositions",
    "PointPositions",
    "PointMixturePositions",
    "GaussianMomenta",
    "TabulatedMomenta",
    "InitialMeasureSpec",
    "sample_microstate",
    "sigma_for_mean_speed",
    "thermal_momenta",
]


@dataclass(frozen=True)
class UniformPositions:
    """Positions uniform on a half-open box."""

    region: TorusRegion

    def sample(self, n: int, dim: int, gen: np.random.Generator) -> np.ndarray:
        if self.region.dim != dim:
            raise ValueError(
                f"position region has dimension {self.region.dim}, expected {dim}"
            )
        lo = np.asarray(self.region.lower)
        up = np.asarray(self.region.upper)
        if np.any(up <= lo):
            raise ValueError("uniform position law needs a region of positive measure")
        # gen.random() lands in [0, 1), so samples respect the half-open box.
        return lo + gen.random((n, dim)) * (up - lo)


@dataclass(frozen=True)
class PointPositions:
    """All particles start at one point (a deterministic position law)."""

    point: tuple

    def __post_init__(self):
        pt = tuple(float(v) for v in np.atleast_1d(self.point))
        if any(not (0.0 <= v < 1.0) for v in pt):
            raise ValueError("point coordinates must lie in [0, 1)")
        object.__setattr__(self, "point", pt)

    def sample(self, n: int, dim: int, gen: np.random.Generator) -> np.ndarray:
        if len(self.point) != dim:
            raise ValueError(f"point has dimension {len(self.point)}, expected {dim}")
        return np.tile(np.asarray(self.point, dtype=float), (n, 1))


@dataclass(frozen=True)
class PointMixturePositions:
    """Each particle picks one of finitely many points with given weights."""

    points: tuple
    weights: tuple

    def __post_init__(self):
        pts = tuple(tuple(float(v) for v in np.atleast_1d(p)) for p in self.points)
        wts = tuple(float(w) for w in self.weights)
        if len(pts) != len(wts) or not pts:
            raise ValueError("points and weights must be non-empty and match in length")
        if any(w < 0 for w in wts):
            raise ValueError("mixture weights must be >= 0")
        if abs(sum(wts) - 1.0) > 1e-12:
            raise ValueError(f"mixture weights sum to {sum(wts)}, expected 1")
        dims = {len(p) for p in pts}
        if len(dims) != 1:
            raise ValueError("all mixture points must share one dimension")
        for p in pts:
            if any(not (0.0 <= v < 1.0) for v in p):
                raise ValueError("point coordinates must lie in [0, 1)")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    def sample(self, n: int, dim: int, gen: np.random.Generator) -> np.ndarray:
        if len(self.points[0]) != dim:
            raise ValueError(
                f"mixture points have dimension {len(self.points[0])}, expected {dim}"
            )
        idx = gen.choice(len(self.points), size=n, p=np.asarray(self.weights))
        return np.asarray(self.points, dtype=float)[idx]


@dataclass(frozen=True)
class GaussianMomenta:
    """Isotropic Gaussian momenta, standard deviation sigma per component."""

    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0.0 and math.isfinite(self.sigma)):
            raise ValueError("sigma must be finite and > 0")

    def sample(self, n: int, dim: int, gen: np.random.Generator) -> np.ndarray:
        return self.sigma * gen.standard_normal((n, dim))


@dataclass(frozen=True)
class TabulatedMomenta:
    """Momenta drawn per component from a tabulated one-dimensional density.

    The density is the piecewise-linear interpolant of the table, and the
    sampler inverts its CDF exactly (the within-segment CDF is quadratic, so
    inversion solves one quadratic per draw).  Draws therefore follow the
    interpolated density itself; the only model error is the caller's choice
    of grid.
    """

    grid: tuple
    density: tuple

    def __post_init__(self):
        g = tuple(float(v) for v in self.grid)
        d = tuple(float(v) for v in self.density)
        if len(g) != len(d) or len(g) < 2:
            raise ValueError("grid and density must match and contain >= 2 nodes")
        if any(b <= a for a, b in zip(g, g[1:])):
            raise ValueError("grid must be strictly increasing")
        if any(v < 0 for v in d):
            raise ValueError("density values must be >= 0")
        if not any(v > 0 for v in d):
            raise ValueError("density must not vanish identically")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "density", d)

    def _cdf_nodes(self):
        g = np.asarray(self.grid)
        d = np.asarray(self.density)
        seg = 0.5 * (d[1:] + d[:-1]) * np.diff(g)
        cdf = np.concatenate([[0.0], np.cumsum(seg)])
        return g, cdf / cdf[-1]

    def sample(self, n: int, dim: int, gen: np.random.Generator) -> np.ndarray:
        g, cdf = self._cdf_nodes()
        f = np.asarray(self.density, dtype=float)
        seg_mass = 0.5 * (f[1:] + f[:-1]) * np.diff(g)
        f = f / seg_mass.sum()  # normalized node densities
        slope = np.diff(f) / np.diff(g)
        u = gen.random((n, dim))
        j = np.searchsorted(cdf, u, side="right") - 1
        j = np.clip(j, 0, len(g) - 2)
        # Solve f0*y + slope*y^2/2 = v for the within-segment offset y, using
        # the cancellation-free root 2v / (f0 + sqrt(f0^2 + 2*slope*v)); the
        # discriminant interpolates f0^2 -> f1^2 so it never goes negative.
        v = u - cdf[j]
        f0 = f[:-1][j]
        s = slope[j]
        disc = np.maximum(f0 * f0 + 2.0 * s * v, 0.0)
        denom = f0 + np.sqrt(disc)
        y = np.where(denom > 0.0, 2.0 * v / np.where(denom > 0.0, denom, 1.0), 0.0)
        return g[j] + y


@dataclass(frozen=True)
class InitialMeasureSpec:
    """Product initial measure: position law times i.i.d. momentum law."""

    positions: object
    momenta: object


def sample_microstate(
    spec: InitialMeasureSpec, n: int, dim: int, rng: RngStream
) -> GasMicrostate:
    """Draw a microstate of ``n`` particles in dimension ``dim``.

    Positions come first in the stream, then momenta, so enlarging n or
    swapping the momentum law changes draws in the obvious prefix fashion.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    gen = rng.generator()
    x = spec.positions.sample(n, dim, gen)
    p = spec.momenta.sample(n, dim, gen)
    return GasMicrostate(x, p)


def sigma_for_mean_speed(mean_speed: float, dim: int) -> float:
    """Gaussian component sigma giving a prescribed mean speed E||p||.

    For an isotropic Gaussian in d components the speed follows a chi
    distribution with mean sigma * sqrt(2) * Gamma((d+1)/2) / Gamma(d/2),
    which this inverts.  Supported for dim in {1, 2, 3}.
    """
    if not (mean_speed > 0.0 and math.isfinite(mean_speed)):
        raise ValueError("mean_speed must be finite and > 0")
    if dim not in (1, 2, 3):
        raise ValueError("mean-speed calibration is defined for dim in {1, 2, 3}")
    chi_mean = math.sqrt(2.0) * math.gamma((dim + 1) / 2.0) / math.gamma(dim / 2.0)
    return mean_speed / chi_mean


def thermal_momenta(mean_speed: float, dim: int) -> GaussianMomenta:
    """Isotropic Gaussian momentum law calibrated to a mean speed."""
    return GaussianMomenta(sigma_for_mean_speed(mean_speed, dim))
