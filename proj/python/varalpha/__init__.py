"""Time-changed Brownian motion with a position-dependent waiting-time order.

The heavy lifting lives in the compiled extension ``varalpha._core``:
one-sided stable sampling, coupled-path simulation, the inverse time
change, ensemble statistics, the variable-order grid solver and the
relaxation function. This package re-exports the public surface.
"""

from ._core import (
    AlphaField,
    CoupledPath,
    EnsembleSummary,
    FieldSolution,
    IntervalUnion,
    RegimePrediction,
    SimConfig,
    TimeChangedSample,
    __version__,
    invert_time_change,
    ks_two_sample,
    mittag_leffler,
    occupation_fraction,
    run_ensemble,
    run_experiment,
    sample_positive_stable,
    simulate_coupled,
    solve_fde,
)

__all__ = [
    "AlphaField",
    "CoupledPath",
    "EnsembleSummary",
    "FieldSolution",
    "IntervalUnion",
    "RegimePrediction",
    "SimConfig",
    "TimeChangedSample",
    "__version__",
    "invert_time_change",
    "ks_two_sample",
    "mittag_leffler",
    "occupation_fraction",
    "run_ensemble",
    "run_experiment",
    "sample_positive_stable",
    "simulate_coupled",
    "solve_fde",
]
