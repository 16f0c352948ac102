"""Equilibration laboratory: exactly solvable many-body models at desk scale.

Two model systems, one question: how do reversible microscopic dynamics
produce irreversible-looking macroscopic behaviour, and how sharply can the
exceptions be bounded?

* a free (non-interacting) gas on the d-dimensional unit torus, where
  occupation fractions of fixed regions relax toward the region measure and
  the relaxation curve has a closed Fourier form;
* the marked ring (Kac) model, a discrete caricature with an exact
  recurrence at 2N steps and an exactly computable colour-difference curve.

Alongside the simulators sit the concentration bounds (Hoeffding, union
over observation schedules, Markov / Chebyshev) evaluated in log space so
that astronomically small probabilities survive, plus deterministic
Monte Carlo drivers whose CSV outputs are byte-identical for any worker
count.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .core import (
    GasMicrostate,
    LogProbability,
    RegionPartition,
    RngStream,
    TimeGrid,
    TorusRegion,
    format_float,
    fractional_part,
    region_contains,
)
from .sampler import (
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
from .gas import (
    ObservableSeries,
    density_profile,
    fraction_in,
    positions_at,
    region_counts,
    reverse_at,
    trace,
    zermelo_state,
)
from .analytic import (
    DecayEstimate,
    MacroEstimate,
    ScenarioParameters,
    box_fourier_coeff,
    decay_bound_check,
    equilibration_time,
    expected_fraction,
    fit_decay,
    hoeffding_tail,
    log_sequence_capacity,
    macro_estimator,
    markov_bound,
    partition_scenario_bound,
    scenario_bound,
    write_bounds_csv,
)
from .kac import (
    BlockDecomposition,
    BruteForceMoments,
    KacConfiguration,
    KacObservable,
    RingBoundSchedule,
    block_decomposition,
    brute_force_expectation,
    delta_closed_form,
    expected_delta_bar,
    inverse_step,
    ring_bound_schedule,
    ring_trace,
    sample_markers,
    step,
    write_trace_csv,
)
from .ensemble import (
    FitResult,
    KacEnsembleResult,
    ScalingExperimentSpec,
    ScalingResult,
    fit_exponential,
    run_fluctuation_trace,
    run_gas_scaling,
    run_kac_ensemble,
    run_metadata,
    write_summary_json,
)

__all__ = [
    "__version__",
    # core
    "GasMicrostate",
    "LogProbability",
    "RegionPartition",
    "RngStream",
    "TimeGrid",
    "TorusRegion",
    "format_float",
    "fractional_part",
    "region_contains",
    # sampler
    "GaussianMomenta",
    "InitialMeasureSpec",
    "PointMixturePositions",
    "PointPositions",
    "TabulatedMomenta",
    "UniformPositions",
    "sample_microstate",
    "sigma_for_mean_speed",
    "thermal_momenta",
    # gas
    "ObservableSeries",
    "density_profile",
    "fraction_in",
    "positions_at",
    "region_counts",
    "reverse_at",
    "trace",
    "zermelo_state",
    # analytic
    "DecayEstimate",
    "MacroEstimate",
    "ScenarioParameters",
    "box_fourier_coeff",
    "decay_bound_check",
    "equilibration_time",
    "expected_fraction",
    "fit_decay",
    "hoeffding_tail",
    "log_sequence_capacity",
    "macro_estimator",
    "markov_bound",
    "partition_scenario_bound",
    "scenario_bound",
    "write_bounds_csv",
    # kac
    "BlockDecomposition",
    "BruteForceMoments",
    "KacConfiguration",
    "KacObservable",
    "RingBoundSchedule",
    "block_decomposition",
    "brute_force_expectation",
    "delta_closed_form",
    "expected_delta_bar",
    "inverse_step",
    "ring_bound_schedule",
    "ring_trace",
    "sample_markers",
    "step",
    "write_trace_csv",
    # ensemble
    "FitResult",
    "KacEnsembleResult",
    "ScalingExperimentSpec",
    "ScalingResult",
    "fit_exponential",
    "run_fluctuation_trace",
    "run_gas_scaling",
    "run_kac_ensemble",
    "run_metadata",
    "write_summary_json",
]
