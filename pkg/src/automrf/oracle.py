"""Brute-force exact computations on tiny lattices.

Everything here enumerates all K^n arrangements and is the ground truth
against which the stochastic modules are validated: the log normalizing
constant, the exact joint distribution, exact moments of the sufficient
statistics, exact posteriors on parameter grids, and a Metropolis-Hastings
sampler driven by the exact likelihood.

A hard guard refuses enumeration beyond CONFIG_GUARD arrangements; there
is no silent truncation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator
from scipy.special import logsumexp

from .errors import LatticeTooLargeError
from .model import ModelSpec, Params, suff_stats, validate_labels
from .priors import PriorSpec

CONFIG_GUARD = 2_000_000


def _check_guard(spec: ModelSpec) -> int:
    n_configs = spec.n_classes**spec.n_sites
    if n_configs > CONFIG_GUARD:
        raise LatticeTooLargeError(
            f"{spec.n_classes}^{spec.n_sites} = {n_configs} arrangements exceeds "
            f"the enumeration guard ({CONFIG_GUARD}); refusing"
        )
    return n_configs


@dataclass(frozen=True)
class ExactTable:
    """All arrangements of a tiny model with their sufficient statistics.

    Row c of ``labels`` is arrangement c in mixed-radix order (site 0 the
    fastest digit); row c of ``stats`` is its statistic vector.  Building
    the table once makes repeated evaluation of log Z / moments a matvec.
    """

    spec: ModelSpec
    ref_class: int
    labels: np.ndarray
    stats: np.ndarray

    @property
    def n_configs(self) -> int:
        return self.labels.shape[0]

    def log_partition(self, params: Params) -> float:
        logh = self.stats @ params.flatten()
        mx = logh.max()
        return float(mx + np.log(np.exp(logh - mx).sum()))

    def log_probs(self, params: Params) -> np.ndarray:
        logh = self.stats @ params.flatten()
        mx = logh.max()
        return logh - (mx + np.log(np.exp(logh - mx).sum()))

    def moments(self, params: Params) -> tuple[np.ndarray, np.ndarray]:
        """(E[s], Cov[s]) under the exact distribution at ``params``."""
        probs = np.exp(self.log_probs(params))
        mean = probs @ self.stats
        cov = self.stats.T @ (self.stats * probs[:, None]) - np.outer(mean, mean)
        return mean, 0.5 * (cov + cov.T)

    def config_index(self, y: np.ndarray) -> int:
        """Row index of an arrangement in this table."""
        k = self.spec.n_classes
        weights = k ** np.arange(self.spec.n_sites, dtype=np.int64)
        return int(np.asarray(y, dtype=np.int64) @ weights)


def enumerate_table(spec: ModelSpec, ref_class: int = 1) -> ExactTable:
    """Materialize every arrangement and its sufficient statistics."""
    n_configs = _check_guard(spec)
    n, k = spec.n_sites, spec.n_classes
    idx = np.arange(n_configs, dtype=np.int64)
    weights = k ** np.arange(n, dtype=np.int64)
    labels = ((idx[:, None] // weights[None, :]) % k).astype(np.int8)

    p_total = spec.p_total
    stats = np.empty((n_configs, p_total))
    col = 0
    for cls in range(k):
        if cls == ref_class - 1:
            continue
        if spec.p:
            indicator = (labels == cls).astype(np.float64)
            stats[:, col : col + spec.p] = indicator @ spec.design.values
        col += spec.p
    agree = np.zeros(n_configs)
    for i, j in spec.graph.edges:
        agree += labels[:, i] == labels[:, j]
    stats[:, -1] = agree
    return ExactTable(spec=spec, ref_class=ref_class, labels=labels, stats=stats)


def enumerate_log_z(spec: ModelSpec, params: Params) -> float:
    """log Z(theta): log-sum-exp of log h over all arrangements."""
    return enumerate_table(spec, ref_class=params.ref_class).log_partition(params)


@dataclass(frozen=True)
class ExactDistribution:
    """Per-arrangement log probabilities (mixed-radix order) and log Z."""

    table: ExactTable
    log_probs: np.ndarray
    log_z: float

    def prob_of(self, y: np.ndarray) -> float:
        return float(np.exp(self.log_probs[self.table.config_index(y)]))


def exact_distribution(spec: ModelSpec, params: Params, table: ExactTable | None = None) -> ExactDistribution:
    if table is None:
        table = enumerate_table(spec, ref_class=params.ref_class)
    return ExactDistribution(
        table=table, log_probs=table.log_probs(params), log_z=table.log_partition(params)
    )


def exact_moments(
    spec: ModelSpec, params: Params, table: ExactTable | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """(E[s], Cov[s]) under the exact model distribution.

    These are the gradient and Hessian of log Z, the identities the
    curvature diagnostic is checked against.
    """
    if table is None:
        table = enumerate_table(spec, ref_class=params.ref_class)
    return table.moments(params)


@dataclass(frozen=True)
class GridAxis:
    """One free coordinate of the flattened parameter vector."""

    index: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))


@dataclass(frozen=True)
class PosteriorGrid:
    axes: tuple[GridAxis, ...]
    base: Params
    log_posterior: np.ndarray  # unnormalized, shaped by the axes
    probs: np.ndarray  # normalized over the grid

    def marginal_mean(self, axis: int = 0) -> float:
        reduce_dims = tuple(d for d in range(self.probs.ndim) if d != axis)
        marg = self.probs.sum(axis=reduce_dims) if reduce_dims else self.probs
        return float(marg @ self.axes[axis].values)


def exact_posterior_grid(
    spec: ModelSpec,
    y: np.ndarray,
    prior: PriorSpec,
    axes: list[GridAxis] | tuple[GridAxis, ...],
    base: Params,
    table: ExactTable | None = None,
) -> PosteriorGrid:
    """Exact posterior over a grid of at most two free parameters.

    The remaining coordinates stay at ``base``.  The returned table is
    normalized over the grid points and is the validation target for the
    double MH sampler.
    """
    axes = tuple(axes)
    if not 1 <= len(axes) <= 2:
        raise ValueError("grid must span 1 or 2 free parameters")
    if table is None:
        table = enumerate_table(spec, ref_class=base.ref_class)
    y = validate_labels(y, spec.n_classes, spec.n_sites)
    s_y = suff_stats(spec, y, ref_class=base.ref_class)

    shape = tuple(len(ax.values) for ax in axes)
    log_post = np.empty(shape)
    theta = base.flatten()
    for pos in np.ndindex(*shape):
        th = theta.copy()
        for ax, p in zip(axes, pos):
            th[ax.index] = ax.values[p]
        params = Params.unflatten(th, spec.p, spec.n_classes, ref_class=base.ref_class)
        log_post[pos] = prior.log_density(th) + float(th @ s_y) - table.log_partition(params)
    flat = log_post.ravel()
    probs = np.exp(flat - logsumexp(flat)).reshape(shape)
    return PosteriorGrid(axes=axes, base=base, log_posterior=log_post, probs=probs)


def exact_mh_chain(
    table: ExactTable,
    s_y: np.ndarray,
    prior: PriorSpec,
    start: np.ndarray,
    proposal_chol: np.ndarray,
    n_steps: int,
    rng: Generator,
) -> tuple[np.ndarray, float]:
    """Random-walk MH on theta driven by the exact likelihood.

    Samples the true posterior (up to MCMC error); the asymptotically
    inexact double MH sampler is benchmarked against chains from here.
    Returns (draws, acceptance rate).  One joint update per step with a
    symmetric normal proposal given by ``proposal_chol``.
    """
    spec = table.spec
    theta = np.asarray(start, dtype=np.float64).copy()
    params = Params.unflatten(theta, spec.p, spec.n_classes, ref_class=table.ref_class)
    log_z = table.log_partition(params)
    log_p = prior.log_density(theta)
    draws = np.empty((n_steps, theta.shape[0]))
    accepted = 0
    for t in range(n_steps):
        step = proposal_chol @ rng.standard_normal(theta.shape[0])
        prop = theta + step
        log_p_prop = prior.log_density(prop)
        if np.isfinite(log_p_prop):
            params_prop = Params.unflatten(prop, spec.p, spec.n_classes, ref_class=table.ref_class)
            log_z_prop = table.log_partition(params_prop)
            log_alpha = (log_p_prop - log_p) + (prop - theta) @ s_y - (log_z_prop - log_z)
            if np.log(rng.random()) < log_alpha:
                theta, log_z, log_p = prop, log_z_prop, log_p_prop
                accepted += 1
        draws[t] = theta
    return draws, accepted / max(n_steps, 1)
