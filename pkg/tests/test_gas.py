"""Free-streaming flow, coarse observables, and reversal identities."""
from __future__ import annotations

import math

import numpy as np
import pytest

from equilab.core import (
    GasMicrostate,
    RegionPartition,
    RngStream,
    TimeGrid,
    TorusRegion,
    fractional_part,
)
from equilab.gas import (
    ObservableSeries,
    density_profile,
    fraction_in,
    positions_at,
    region_counts,
    reverse_at,
    trace,
    zermelo_state,
)
from equilab.sampler import (
    GaussianMomenta,
    InitialMeasureSpec,
    UniformPositions,
    sample_microstate,
    thermal_momenta,
)


def _random_state(seed: int, n: int = 200, dim: int = 1) -> GasMicrostate:
    spec = InitialMeasureSpec(
        UniformPositions(TorusRegion(tuple([0.0] * dim), tuple([1.0] * dim))),
        GaussianMomenta(1.0),
    )
    return sample_microstate(spec, n, dim, RngStream(seed, 0))


# ---------------------------------------------------------------------------
# Flow


def test_positions_at_zero_is_identity():
    state = _random_state(0)
    assert np.array_equal(positions_at(state, 0.0), state.positions)


def test_positions_at_hand_values():
    state = GasMicrostate(np.array([0.1, 0.6]), np.array([0.5, 0.5]))
    out = positions_at(state, 1.0)[:, 0]
    assert out[0] == pytest.approx(0.6, abs=1e-15)
    assert out[1] == pytest.approx(0.1, abs=1e-15)  # wraps around


@pytest.mark.parametrize("seed,t,s", [(1, 3.0, 4.0), (2, 100.0, -40.0), (3, 1e4, 1e4)])
def test_flow_additivity(seed: int, t: float, s: float):
    state = _random_state(seed, n=300, dim=2)
    direct = positions_at(state, t + s)
    stepped = fractional_part(positions_at(state, t) + state.momenta * s)
    diff = np.abs(direct - stepped)
    diff = np.minimum(diff, 1.0 - diff)  # compare on the circle
    assert diff.max() < 1e-9


def test_positions_at_does_not_mutate_state():
    state = _random_state(4)
    before = state.positions.copy()
    positions_at(state, 7.7)
    assert np.array_equal(state.positions, before)


# ---------------------------------------------------------------------------
# fraction_in and partitions


def test_fraction_in_hand_case():
    state = GasMicrostate(np.array([0.1, 0.6]), np.array([0.5, 0.5]))
    assert fraction_in(state, 1.0, TorusRegion.interval(0.5, 1.0)) == 0.5


def test_fraction_in_full_torus_is_one():
    state = _random_state(5)
    for t in (0.0, 0.7, 13.0):
        assert fraction_in(state, t, TorusRegion.interval(0.0, 1.0)) == 1.0


@pytest.mark.parametrize("seed", range(5))
def test_fraction_is_multiple_of_one_over_n(seed: int):
    state = _random_state(seed, n=97)
    f = fraction_in(state, 2.5, TorusRegion.interval(0.2, 0.6))
    assert (f * 97) == pytest.approx(round(f * 97), abs=1e-12)


@pytest.mark.parametrize("seed,t", [(0, 0.0), (1, 0.3), (2, 5.0), (3, 123.0)])
def test_partition_fractions_sum_to_one_exactly(seed: int, t: float):
    state = _random_state(seed, n=157)
    part = RegionPartition.regular(8, 1)
    total = sum(fraction_in(state, t, r) for r in part.regions)
    counts = region_counts(state, t, part)
    assert counts.sum() == 157
    assert total == pytest.approx(1.0, abs=1e-12)


def test_density_profile_weighted_sum_is_n():
    state = _random_state(6, n=1000)
    part = RegionPartition.regular(4, 1)
    rho = density_profile(state, 3.0, part)
    assert float(np.dot(rho, part.measures())) == pytest.approx(1000.0, abs=1e-9)


def test_density_profile_trivial_partition():
    state = _random_state(7, n=321)
    part = RegionPartition.regular(1, 1)
    assert density_profile(state, 0.0, part)[0] == pytest.approx(321.0)


def test_density_profile_concentrated_state():
    # All particles in the first of two half cells.
    state = GasMicrostate(np.full(10, 0.25), np.zeros(10))
    part = RegionPartition(
        (TorusRegion.interval(0.0, 0.5), TorusRegion.interval(0.5, 1.0))
    )
    rho = density_profile(state, 0.0, part)
    assert rho[0] == pytest.approx(20.0)
    assert rho[1] == 0.0


def test_density_profile_near_equilibrium():
    n = 10**6
    state = _random_state(8, n=n)
    part = RegionPartition.regular(4, 1)
    rho = density_profile(state, 50.0, part)
    # Each cell count is Binomial(n, 1/4): sd = sqrt(n * 3/16) on the count,
    # so the density per cell fluctuates by 4 * that around n.
    tol = 3.0 * 4.0 * math.sqrt(n * (0.25 * 0.75))
    assert np.all(np.abs(rho - n) < tol)


# ---------------------------------------------------------------------------
# Reversal and recurrence


def test_reverse_at_zero_only_flips_momenta():
    state = _random_state(9)
    rev = reverse_at(state, 0.0)
    assert np.array_equal(rev.positions, state.positions)
    assert np.array_equal(rev.momenta, -state.momenta)


def test_reverse_at_hand_value():
    state = GasMicrostate(np.array([0.1]), np.array([0.5]))
    rev = reverse_at(state, 1.0)
    assert rev.positions[0, 0] == pytest.approx(0.6, abs=1e-15)
    assert rev.momenta[0, 0] == -0.5
    back = positions_at(rev, 1.0)
    assert back[0, 0] == pytest.approx(0.1, abs=1e-12)


@pytest.mark.parametrize("seed,t_rev", [(10, 5.0), (11, 50.0), (12, 500.0)])
def test_loschmidt_reversal_restores_positions(seed: int, t_rev: float):
    state = _random_state(seed, n=500, dim=2)
    rev = reverse_at(state, t_rev)
    back = positions_at(rev, t_rev)
    diff = np.abs(back - state.positions)
    diff = np.minimum(diff, 1.0 - diff)
    assert diff.max() < 1e-9
    # Double reversal restores the momenta exactly.
    assert np.array_equal(reverse_at(rev, 0.0).momenta, state.momenta)


@pytest.mark.parametrize("seed", range(3))
def test_loschmidt_fraction_returns_exactly(seed: int):
    state = _random_state(seed, n=400)
    region = TorusRegion.interval(0.0, 0.5)
    f0 = fraction_in(state, 0.0, region)
    rev = reverse_at(state, 30.0)
    assert fraction_in(rev, 30.0, region) == f0


def test_zermelo_state_is_periodic_and_binary():
    state = zermelo_state(100, 0.25, 1.0)
    region = TorusRegion.interval(0.5, 1.0)
    # Integer times return to the start (period 1 at |p| = 1).
    for t in (0.0, 1.0, 2.0, 5.0):
        assert fraction_in(state, t, region) == 0.0
    assert fraction_in(state, 0.5, region) == 1.0  # all particles at 0.75
    grid = TimeGrid(0.0, 0.1, 30)
    series = trace(state, region, grid)
    assert set(np.unique(series.values)) <= {0.0, 1.0}


def test_zermelo_state_validation():
    with pytest.raises(ValueError):
        zermelo_state(10, 0.25, 0.0)
    with pytest.raises(ValueError):
        zermelo_state(0, 0.25, 1.0)


# ---------------------------------------------------------------------------
# trace and ObservableSeries


def test_trace_matches_pointwise_fraction():
    state = _random_state(13, n=64)
    region = TorusRegion.interval(0.1, 0.4)
    grid = TimeGrid(1.0, 0.25, 12)
    series = trace(state, region, grid)
    assert len(series) == 12
    assert np.array_equal(series.times, grid.times)
    for t, v in zip(series.times, series.values):
        assert fraction_in(state, float(t), region) == v


def test_trace_constant_for_frozen_momenta():
    state = GasMicrostate(np.linspace(0.0, 0.9, 10), np.zeros(10))
    series = trace(state, TorusRegion.interval(0.0, 0.45), TimeGrid(0.0, 1.0, 5))
    assert np.all(series.values == series.values[0])


def test_observable_series_validation():
    with pytest.raises(ValueError):
        ObservableSeries(np.array([1.0, 1.0]), np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        ObservableSeries(np.array([1.0, 2.0]), np.array([0.5, 1.5]))
    with pytest.raises(ValueError):
        ObservableSeries(np.array([]), np.array([]))


def test_observable_series_csv_format(tmp_path):
    series = ObservableSeries(np.array([0.5, 1.0]), np.array([1.0, 0.25]))
    path = tmp_path / "series.csv"
    series.to_csv(path)
    assert path.read_text() == "t,f\n0.5,1\n1,0.25\n"


def test_equilibrium_trace_starts_high_and_settles():
    # Half-filled start: f(0+) near 1, late values near 0.5.
    region = TorusRegion.interval(0.0, 0.5)
    spec = InitialMeasureSpec(UniformPositions(region), thermal_momenta(1.0, 1))
    state = sample_microstate(spec, 10**4, 1, RngStream(21, 0))
    early = fraction_in(state, 0.01, region)
    assert early > 0.95
    late = trace(state, region, TimeGrid(20.0, 0.5, 100)).values
    assert abs(late.mean() - 0.5) < 0.02
