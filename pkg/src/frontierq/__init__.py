"""frontierq: production-frontier estimation and inference from extreme quantiles.

Estimate the maximal feasible output at a given input level from i.i.d.
input/output data, with confidence intervals from either bias-cancelling
subsampling or an approximate-Bayesian MCMC built on the fixed-k
extreme-value limit density.
"""

from .core import (
    EffectiveSample,
    IntervalEstimate,
    Observation,
    Sample,
    check_quantile,
    effective_sample,
    reduce_outputs,
)
from .errors import FrontierError
from .evt import bias_weights, default_ev_index, h_of_k, k_of_h, normalizer, pickands_xi
from .limits import HGrid, density_pool, joint_density, simulate_limit
from .subsampling import SubsamplingConfig, run_subsampling, subsample_indices
from .abc import AbcConfig, PosteriorChain, posterior_log_kernel, posterior_summaries, run_mcmc
from .tuning import auto_grid, default_L, preset_grid, sub_config, abc_grid, subsample_size
from .simlab import DgpSpec, MethodSpec, StudyReport, dgp1, dgp2, gen_dgp, run_study

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Observation",
    "Sample",
    "EffectiveSample",
    "IntervalEstimate",
    "FrontierError",
    "reduce_outputs",
    "effective_sample",
    "check_quantile",
    "h_of_k",
    "k_of_h",
    "pickands_xi",
    "default_ev_index",
    "normalizer",
    "bias_weights",
    "HGrid",
    "simulate_limit",
    "joint_density",
    "density_pool",
    "SubsamplingConfig",
    "subsample_indices",
    "run_subsampling",
    "AbcConfig",
    "PosteriorChain",
    "posterior_log_kernel",
    "run_mcmc",
    "posterior_summaries",
    "preset_grid",
    "auto_grid",
    "subsample_size",
    "default_L",
    "sub_config",
    "abc_grid",
    "DgpSpec",
    "MethodSpec",
    "StudyReport",
    "dgp1",
    "dgp2",
    "gen_dgp",
    "run_study",
]
