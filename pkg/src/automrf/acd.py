"""Approximate curvature diagnostic for doubly-intractable MCMC output.

For a posterior draw theta, the score and Hessian of log(prior x
likelihood) are available through exponential-family identities,

    grad log f(y|theta) = s(y) - E_theta[s],
    hess log f(y|theta) = -Cov_theta[s],

with the moments estimated from auxiliary Gibbs samples at theta.  Under
the true posterior the curvature identity E[H + g g'] = 0 holds, so the
half-vectorized chain average of B_t = H_t + g_t g_t', studentized by its
sample covariance, is asymptotically chi-square with
r = p_total (p_total + 1) / 2 degrees of freedom.  Rank deficiency of the
studentizing covariance is handled by a spectral generalized inverse; the
retained rank replaces r in the reference distribution.

A sample path passes when the statistic falls below the requested
quantile of the reference chi-square distribution.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator
from scipy.stats import chi2

from .dmh import ChainOutput
from .gibbs import site_order, sweeps_in_place
from .model import ModelSpec, Params, class_predictors, suff_stats, validate_labels
from .priors import PriorSpec
from .rng import STREAM_ACD, substream


@dataclass(frozen=True)
class ACDConfig:
    """Auxiliary-sample budget and test settings.

    ``aux_samples`` arrangements are drawn per posterior draw by Gibbs at
    that draw (``aux_burn_sweeps`` first, then one sample every
    ``aux_sweeps``).  ``thin`` subsamples the chain before the per-draw
    computation.
    """

    aux_samples: int = 500
    aux_burn_sweeps: int = 50
    aux_sweeps: int = 5
    thin: int = 100
    quantile: float = 0.99
    rank_tolerance: float = 1e-10

    def __post_init__(self):
        if self.aux_samples < 2:
            raise ValueError("aux_samples must be >= 2 (covariance needs it)")
        if not 0 < self.quantile < 1:
            raise ValueError("quantile must lie in (0, 1)")
        if self.aux_burn_sweeps < 0 or self.aux_sweeps < 1 or self.thin < 1:
            raise ValueError("invalid auxiliary sweep settings")

    def to_dict(self) -> dict:
        return {
            "aux_samples": self.aux_samples,
            "aux_burn_sweeps": self.aux_burn_sweeps,
            "aux_sweeps": self.aux_sweeps,
            "thin": self.thin,
            "quantile": self.quantile,
            "rank_tolerance": self.rank_tolerance,
        }


@dataclass
class ACDResult:
    statistic: float
    dof: int
    threshold: float
    passed: bool
    n_draws: int
    r_nominal: int
    quantile: float
    rank_tolerance: float
    seed: int | None = None
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "dof": self.dof,
            "threshold": self.threshold,
            "pass": self.passed,
            "n_draws": self.n_draws,
            "r_nominal": self.r_nominal,
            "quantile": self.quantile,
            "rank_tolerance": self.rank_tolerance,
            "seed": self.seed,
            "config": self.config,
        }


def chi_square_quantile(p: float, dof: int) -> float:
    """Inverse CDF of the chi-square distribution."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if dof < 1:
        raise ValueError("dof must be >= 1")
    return float(chi2.ppf(p, dof))


def vech(mat: np.ndarray) -> np.ndarray:
    """Stacked lower triangle (including the diagonal) of a symmetric matrix."""
    idx = np.tril_indices(mat.shape[0])
    return mat[idx]


def unvech(vec: np.ndarray, dim: int) -> np.ndarray:
    out = np.zeros((dim, dim))
    idx = np.tril_indices(dim)
    out[idx] = vec
    out = out + out.T - np.diag(np.diag(out))
    return out


def score_hessian_from_moments(
    s_y: np.ndarray,
    mean_s: np.ndarray,
    cov_s: np.ndarray,
    prior: PriorSpec,
    theta_flat: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Assemble (g, H) from moments of the sufficient statistics.

    Shared by the Monte Carlo route and the exact-moment oracle route, so
    tests can swap moment sources without touching the statistic.
    """
    g = s_y - mean_s + prior.grad_log_density(theta_flat)
    h = -cov_s + prior.hess_log_density(theta_flat)
    return g, h


def score_and_hessian(
    spec: ModelSpec,
    params: Params,
    y: np.ndarray,
    prior: PriorSpec,
    config: ACDConfig,
    rng: Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo score and Hessian of log(prior x likelihood) at ``params``."""
    y = validate_labels(y, spec.n_classes, spec.n_sites)
    s_y = suff_stats(spec, y, ref_class=params.ref_class)
    order = site_order(spec.graph, "raster")
    unary = class_predictors(spec, params)
    z = y.copy()
    sweeps_in_place(z, spec.graph, unary, params.gamma, order, rng, config.aux_burn_sweeps)
    stats = np.empty((config.aux_samples, spec.p_total))
    for l in range(config.aux_samples):
        sweeps_in_place(z, spec.graph, unary, params.gamma, order, rng, config.aux_sweeps)
        stats[l] = suff_stats(spec, z, ref_class=params.ref_class)
    mean_s = stats.mean(axis=0)
    cov_s = np.cov(stats, rowvar=False, ddof=1).reshape(spec.p_total, spec.p_total)
    return score_hessian_from_moments(s_y, mean_s, cov_s, prior, params.flatten())


def acd_statistic(
    gs: np.ndarray,
    hs: np.ndarray,
    quantile: float = 0.99,
    rank_tolerance: float = 1e-10,
) -> ACDResult:
    """Chi-square curvature statistic from per-draw (g_t, H_t) pairs.

    ``gs`` is (N, p_total); ``hs`` is (N, p_total, p_total).
    """
    gs = np.asarray(gs, dtype=np.float64)
    hs = np.asarray(hs, dtype=np.float64)
    n_draws, p_total = gs.shape
    if n_draws < 2:
        raise ValueError("need at least 2 draws to studentize the statistic")
    r_nominal = p_total * (p_total + 1) // 2
    if n_draws < r_nominal:
        warnings.warn(
            f"only {n_draws} draws for a nominal rank of {r_nominal}; "
            "the covariance estimate will be rank-deficient",
            stacklevel=2,
        )

    idx = np.tril_indices(p_total)
    b = hs + np.einsum("ti,tj->tij", gs, gs)
    bv = b[:, idx[0], idx[1]]
    bbar = bv.mean(axis=0)
    sigma = np.cov(bv, rowvar=False, ddof=1).reshape(r_nominal, r_nominal)

    if not sigma.any():
        if not bbar.any():
            return ACDResult(
                statistic=0.0,
                dof=0,
                threshold=0.0,
                passed=True,
                n_draws=n_draws,
                r_nominal=r_nominal,
                quantile=quantile,
                rank_tolerance=rank_tolerance,
            )
        raise ValueError("all-zero studentizing covariance with a nonzero mean")

    evals, evecs = np.linalg.eigh(0.5 * (sigma + sigma.T))
    keep = evals > rank_tolerance * evals.max()
    dof = int(keep.sum())
    pinv_diag = np.where(keep, 1.0 / np.where(keep, evals, 1.0), 0.0)
    proj = evecs.T @ bbar
    statistic = float(n_draws * (proj * pinv_diag) @ proj)
    threshold = chi_square_quantile(quantile, dof) if dof >= 1 else 0.0
    return ACDResult(
        statistic=statistic,
        dof=dof,
        threshold=threshold,
        passed=statistic < threshold,
        n_draws=n_draws,
        r_nominal=r_nominal,
        quantile=quantile,
        rank_tolerance=rank_tolerance,
    )


def _draw_task(args):
    spec, theta_flat, y, prior, config, seed, draw_index, ref_class = args
    params = Params.unflatten(theta_flat, spec.p, spec.n_classes, ref_class=ref_class)
    rng = substream(seed, STREAM_ACD, draw_index)
    return score_and_hessian(spec, params, y, prior, config, rng)


def diagnose(
    chain: ChainOutput,
    spec: ModelSpec,
    y: np.ndarray,
    prior: PriorSpec,
    config: ACDConfig,
    seed: int,
    workers: int = 1,
    ref_class: int = 1,
) -> ACDResult:
    """Evaluate the diagnostic on a chain.

    The chain is subsampled by ``config.thin`` (on top of any thinning
    already applied when it was run); each retained draw gets an
    independent random substream keyed by its index, so results do not
    depend on ``workers``.
    """
    if chain.n_draws == 0:
        raise ValueError("cannot diagnose an empty chain")
    retained = chain.draws[:: config.thin]
    tasks = [
        (spec, retained[t], y, prior, config, seed, t, ref_class)
        for t in range(retained.shape[0])
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            pairs = list(pool.map(_draw_task, tasks, chunksize=8))
    else:
        pairs = [_draw_task(t) for t in tasks]
    gs = np.stack([g for g, _ in pairs])
    hs = np.stack([h for _, h in pairs])
    result = acd_statistic(gs, hs, quantile=config.quantile, rank_tolerance=config.rank_tolerance)
    result.seed = seed
    result.config = config.to_dict()
    return result
