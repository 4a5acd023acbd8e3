"""Categorical Markov random fields on lattices.

Gibbs simulation, pseudolikelihood estimation, double Metropolis-Hastings
posterior sampling, an approximate curvature diagnostic for the sampler,
synthetic-field generators, grid aggregation of point data, and exact
enumeration oracles for verification on tiny lattices.
"""

from ._kernels import BACKEND as _kernel_backend
from .lattice import GridSpec, NeighborhoodGraph, build_regular_grid, neighbor_class_counts
from .model import (
    DesignMatrix,
    ModelSpec,
    Params,
    full_conditional,
    log_unnormalized,
    re_reference,
    suff_stats,
)
from .gibbs import SweepSchedule, gibbs_sweep, random_arrangement, sample
from .priors import PriorSpec
from .pseudolikelihood import MpleResult, mple_fit, neg_log_pseudolikelihood
from .dmh import ChainOutput, DMHConfig, ProposalSpec, dmh_block_step, run_dmh, tune_scales
from .acd import ACDConfig, ACDResult, acd_statistic, chi_square_quantile, diagnose, score_and_hessian
from .oracle import (
    enumerate_log_z,
    enumerate_table,
    exact_distribution,
    exact_moments,
    exact_posterior_grid,
)
from .summaries import PosteriorSummary, summarize

__version__ = "0.1.0"


def kernel_backend() -> str:
    """Active sweep-kernel backend: 'c' (compiled) or 'python' (fallback)."""
    return _kernel_backend


__all__ = [
    "ACDConfig",
    "ACDResult",
    "ChainOutput",
    "DMHConfig",
    "DesignMatrix",
    "GridSpec",
    "ModelSpec",
    "MpleResult",
    "NeighborhoodGraph",
    "Params",
    "PosteriorSummary",
    "PriorSpec",
    "ProposalSpec",
    "SweepSchedule",
    "acd_statistic",
    "build_regular_grid",
    "chi_square_quantile",
    "diagnose",
    "dmh_block_step",
    "enumerate_log_z",
    "enumerate_table",
    "exact_distribution",
    "exact_moments",
    "exact_posterior_grid",
    "full_conditional",
    "gibbs_sweep",
    "kernel_backend",
    "log_unnormalized",
    "mple_fit",
    "neg_log_pseudolikelihood",
    "neighbor_class_counts",
    "random_arrangement",
    "re_reference",
    "run_dmh",
    "sample",
    "score_and_hessian",
    "suff_stats",
    "summarize",
    "tune_scales",
]
