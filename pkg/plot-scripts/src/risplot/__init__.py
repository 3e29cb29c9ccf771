"""Figure rendering for simulation result CSVs.

Consumes the flat CSV schema emitted by the simulation harness
(``scheme, sweep_value, trial, sum_rate, min_rate_g1..gG, iters, seed,
status``) and renders either a mean sum-rate line plot with standard-error
bands (one line per scheme) or empirical CDFs of per-group minimum rates
(one curve per scheme/group pair).
"""

from .plots import PlotSpec, PlotInputError, load_results, plot_cdf, plot_sweep

__all__ = ["PlotSpec", "PlotInputError", "load_results", "plot_cdf",
           "plot_sweep"]
