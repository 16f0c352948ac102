"""Statistical marginals and determinism of the initial-condition sampler."""
from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import stats

from equilab.core import RngStream, TorusRegion
from equilab.sampler import (
    GaussianMomenta,
    InitialMeasureSpec,
    PointMixturePositions,
    PointPositions,
    TabulatedMomenta,
    UniformPositions,
    sample_microstate,
    sigma_for_mean_speed,
    thermal_momenta,
)


def test_sampling_is_deterministic_per_stream():
    spec = InitialMeasureSpec(
        UniformPositions(TorusRegion.interval(0.0, 0.5)), GaussianMomenta(1.0)
    )
    s1 = sample_microstate(spec, 500, 1, RngStream(42, 3))
    s2 = sample_microstate(spec, 500, 1, RngStream(42, 3))
    s3 = sample_microstate(spec, 500, 1, RngStream(42, 4))
    assert np.array_equal(s1.positions, s2.positions)
    assert np.array_equal(s1.momenta, s2.momenta)
    assert not np.array_equal(s1.positions, s3.positions)


@pytest.mark.parametrize("seed", range(3))
def test_uniform_positions_stay_in_region(seed: int):
    region = TorusRegion((0.2, 0.5), (0.7, 0.9))
    spec = InitialMeasureSpec(UniformPositions(region), GaussianMomenta(1.0))
    state = sample_microstate(spec, 2000, 2, RngStream(seed, 0))
    assert np.all(region.contains(state.positions))


def test_uniform_positions_mean_matches_law():
    # Uniform on [0, 0.5): mean 0.25, sd 0.5/sqrt(12).
    region = TorusRegion.interval(0.0, 0.5)
    spec = InitialMeasureSpec(UniformPositions(region), GaussianMomenta(1.0))
    n = 10**5
    state = sample_microstate(spec, n, 1, RngStream(7, 0))
    tol = 3.0 * (0.5 / math.sqrt(12.0)) / math.sqrt(n)
    assert abs(state.positions.mean() - 0.25) < tol


def test_uniform_positions_ks_test():
    region = TorusRegion.interval(0.25, 0.75)
    gen = RngStream(19, 0).generator()
    x = UniformPositions(region).sample(10**5, 1, gen)[:, 0]
    res = stats.kstest(x, stats.uniform(loc=0.25, scale=0.5).cdf)
    assert res.pvalue > 0.01


def test_point_positions_are_exact():
    spec = InitialMeasureSpec(PointPositions((0.2, 0.8)), GaussianMomenta(2.0))
    state = sample_microstate(spec, 50, 2, RngStream(0, 0))
    assert np.all(state.positions == np.array([0.2, 0.8]))


def test_point_mixture_frequencies_match_weights():
    law = PointMixturePositions(((0.1,), (0.5,), (0.9,)), (0.2, 0.3, 0.5))
    gen = RngStream(3, 0).generator()
    x = law.sample(10**5, 1, gen)[:, 0]
    for point, weight in zip((0.1, 0.5, 0.9), (0.2, 0.3, 0.5)):
        freq = np.mean(x == point)
        tol = 4.0 * math.sqrt(weight * (1 - weight) / 10**5)
        assert abs(freq - weight) < tol
    # Nothing outside the atom set.
    assert set(np.unique(x)) == {0.1, 0.5, 0.9}


def test_point_mixture_validates_weights():
    with pytest.raises(ValueError):
        PointMixturePositions(((0.1,), (0.5,)), (0.6, 0.5))
    with pytest.raises(ValueError):
        PointMixturePositions(((0.1,), (0.5,)), (1.1, -0.1))


def test_gaussian_momenta_moments():
    gen = RngStream(5, 0).generator()
    p = GaussianMomenta(1.7).sample(2 * 10**5, 1, gen)[:, 0]
    n = p.size
    assert abs(p.mean()) < 4.0 * 1.7 / math.sqrt(n)
    assert abs(p.std() - 1.7) < 4.0 * 1.7 / math.sqrt(2 * n)


def test_gaussian_momenta_half_normal_mean():
    # In one dimension E|p| = sigma * sqrt(2/pi).
    sigma = 1.3
    gen = RngStream(6, 0).generator()
    p = GaussianMomenta(sigma).sample(10**5, 1, gen)[:, 0]
    expect = sigma * math.sqrt(2.0 / math.pi)
    sd = sigma * math.sqrt(1.0 - 2.0 / math.pi)
    assert abs(np.abs(p).mean() - expect) < 3.0 * sd / math.sqrt(p.size)


def test_tabulated_momenta_ks_against_cdf():
    # Triangular density on [-1, 1]; its CDF is available in closed form.
    law = TabulatedMomenta((-1.0, 0.0, 1.0), (0.0, 1.0, 0.0))
    gen = RngStream(8, 0).generator()
    p = law.sample(10**5, 1, gen)[:, 0]
    res = stats.kstest(p, stats.triang(c=0.5, loc=-1.0, scale=2.0).cdf)
    assert res.pvalue > 0.01


def test_tabulated_momenta_validation():
    with pytest.raises(ValueError):
        TabulatedMomenta((0.0, 0.0, 1.0), (1.0, 1.0, 1.0))  # grid not increasing
    with pytest.raises(ValueError):
        TabulatedMomenta((0.0, 1.0), (-1.0, 1.0))  # negative density
    with pytest.raises(ValueError):
        TabulatedMomenta((0.0, 1.0), (0.0, 0.0))  # vanishing density


@pytest.mark.parametrize(
    "mean_speed,dim,expected",
    [
        (1.0, 1, math.sqrt(math.pi / 2.0)),
        (2.0, 1, 2.0 * math.sqrt(math.pi / 2.0)),
        (1.0, 2, math.sqrt(2.0 / math.pi)),
    ],
)
def test_sigma_for_mean_speed_known_values(mean_speed, dim, expected):
    assert sigma_for_mean_speed(mean_speed, dim) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_sigma_for_mean_speed_calibrates_sampled_speed(dim: int):
    law = thermal_momenta(1.0, dim)
    gen = RngStream(9, 0).generator()
    p = law.sample(10**5, dim, gen)
    speeds = np.linalg.norm(p, axis=1)
    # Speed sd is at most sigma * sqrt(d); use 4 standard errors of the mean.
    tol = 4.0 * law.sigma * math.sqrt(dim) / math.sqrt(p.shape[0])
    assert abs(speeds.mean() - 1.0) < tol


def test_sigma_for_mean_speed_rejects_high_dim():
    with pytest.raises(ValueError):
        sigma_for_mean_speed(1.0, 4)


def test_sample_microstate_validates_counts():
    spec = InitialMeasureSpec(PointPositions((0.5,)), GaussianMomenta(1.0))
    with pytest.raises(ValueError):
        sample_microstate(spec, 0, 1, RngStream(0, 0))
    with pytest.raises(ValueError):
        sample_microstate(spec, 5, 0, RngStream(0, 0))
