"""Double Metropolis-Hastings posterior sampling.

The outer chain random-walks the parameter vector in blocks.  Each block
proposal theta' spawns an auxiliary arrangement z by running m Gibbs
sweeps at theta' from the observed data, and the acceptance ratio

    log alpha = [log p(theta') - log p(theta)]
              + (theta' - theta) . s(y) + (theta - theta') . s(z)

never touches the intractable normalizing function: the auxiliary
construction cancels it, and a symmetric proposal cancels q.  The chain
is asymptotically inexact for finite m; the curvature diagnostic
(:mod:`automrf.acd`) judges whether a given m is adequate.

Defaults follow standard practice where the methodology leaves choices
open: diffuse normal(0, 10) priors, inner chains started at the observed
arrangement, fixed block order, and proposal covariances taken from the
pseudolikelihood fit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.random import Generator

from .gibbs import site_order, sweeps_in_place
from .model import ModelSpec, Params, class_predictors, suff_stats, validate_labels
from .priors import PriorSpec
from .pseudolikelihood import mple_fit
from .rng import STREAM_CHAIN, STREAM_TUNE, substream

DEFAULT_BETA_BAND = (0.20, 0.30)
DEFAULT_GAMMA_BAND = (0.30, 0.40)


def default_blocks(spec: ModelSpec) -> list[np.ndarray]:
    """One block per non-reference class's coefficients, then {gamma}."""
    p, k = spec.p, spec.n_classes
    blocks = []
    if p:
        for c in range(k - 1):
            blocks.append(np.arange(c * p, (c + 1) * p, dtype=np.int64))
    blocks.append(np.array([spec.p_total - 1], dtype=np.int64))
    return blocks


def validate_blocks(blocks: list[np.ndarray], p_total: int) -> list[np.ndarray]:
    """Blocks must partition 0..p_total-1."""
    blocks = [np.asarray(b, dtype=np.int64) for b in blocks]
    flat = np.concatenate(blocks) if blocks else np.array([], dtype=np.int64)
    if sorted(flat.tolist()) != list(range(p_total)):
        raise ValueError("blocks must cover every parameter index exactly once")
    return blocks


def _chol_with_jitter(mat: np.ndarray) -> np.ndarray:
    mat = np.asarray(mat, dtype=np.float64)
    if mat.shape[0] != mat.shape[1] or not np.allclose(mat, mat.T, atol=1e-10):
        raise ValueError("proposal covariance must be a symmetric square matrix")
    scale = max(float(np.trace(mat)) / max(mat.shape[0], 1), 1e-30)
    for jitter in (0.0, 1e-12, 1e-10, 1e-8):
        try:
            return np.linalg.cholesky(mat + jitter * scale * np.eye(mat.shape[0]))
        except np.linalg.LinAlgError:
            continue
    raise ValueError("proposal covariance is not positive definite")


@dataclass
class ProposalSpec:
    """Per-block normal proposal: deviation = scale * chol(cov) @ z.

    The effective proposal covariance of a block is scale**2 * cov.
    ``tuned`` records the outcome when :func:`tune_scales` produced this
    spec (None means never tuned).
    """

    covariances: list[np.ndarray]
    scales: list[float]
    tuned: bool | None = None
    tune_rounds: int = 0
    tune_history: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.covariances) != len(self.scales):
            raise ValueError("need one scale per block covariance")
        self.scales = [float(s) for s in self.scales]

    def chols(self) -> list[np.ndarray]:
        return [_chol_with_jitter(c) for c in self.covariances]

    @classmethod
    def from_mple_covariance(
        cls, covariance: np.ndarray | None, blocks: list[np.ndarray], scale: float = 1.0
    ) -> "ProposalSpec":
        covs = []
        for b in blocks:
            if covariance is None:
                covs.append(np.eye(len(b)) * 0.01)
            else:
                covs.append(covariance[np.ix_(b, b)])
        return cls(covariances=covs, scales=[scale] * len(blocks))


@dataclass
class DMHConfig:
    outer_iterations: int
    burn_in: int = 0
    thin: int = 1
    inner_sweeps: int = 8
    seed: int = 0
    blocks: list[np.ndarray] | None = None
    proposals: ProposalSpec | None = None
    prior: PriorSpec = field(default_factory=PriorSpec)
    sweep_mode: str = "raster"

    def __post_init__(self):
        if self.outer_iterations < 0:
            raise ValueError("outer_iterations must be >= 0")
        if not 0 <= self.burn_in <= self.outer_iterations:
            raise ValueError("need 0 <= burn_in <= outer_iterations")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.inner_sweeps < 1:
            raise ValueError("inner_sweeps must be >= 1")


@dataclass
class ChainOutput:
    """Post burn-in, thinned draws plus bookkeeping.

    ``draws`` has one row per retained outer iteration in flattening
    order; ``accept_flags`` records which blocks moved on that iteration.
    Acceptance rates count all outer iterations.  ``timings`` hold wall
    clock data and are excluded from deterministic serializations.
    """

    draws: np.ndarray
    iterations: np.ndarray
    log_h: np.ndarray
    accept_flags: np.ndarray
    block_accept_rates: np.ndarray
    param_names: list[str]
    seed: int
    inner_sweeps: int
    outer_iterations: int
    burn_in: int
    thin: int
    truncated: bool = False
    timings: dict = field(default_factory=dict)

    @property
    def n_draws(self) -> int:
        return self.draws.shape[0]


def dmh_block_step(
    spec: ModelSpec,
    y: np.ndarray,
    params: Params,
    block: np.ndarray,
    proposal_chol: np.ndarray,
    scale: float,
    prior: PriorSpec,
    inner_sweeps: int,
    rng: Generator,
    s_y: np.ndarray | None = None,
    order: np.ndarray | None = None,
) -> tuple[Params, bool, np.ndarray | None]:
    """One block update; returns (next params, accepted, auxiliary stats).

    A proposal outside the prior support is rejected before any inner
    sampling.  The auxiliary chain starts at the observed arrangement.
    """
    y = validate_labels(y, spec.n_classes, spec.n_sites)
    if s_y is None:
        s_y = suff_stats(spec, y, ref_class=params.ref_class)
    if order is None:
        order = site_order(spec.graph, "raster")

    theta = params.flatten()
    step = scale * (proposal_chol @ rng.standard_normal(len(block)))
    if not np.all(np.isfinite(step)):
        return params, False, None
    theta_prop = theta.copy()
    theta_prop[block] += step

    log_p_prop = prior.log_density(theta_prop)
    if not np.isfinite(log_p_prop):
        return params, False, None
    log_p_cur = prior.log_density(theta)

    prop = Params.unflatten(theta_prop, spec.p, spec.n_classes, ref_class=params.ref_class)
    z = y.copy()
    unary = class_predictors(spec, prop)
    sweeps_in_place(z, spec.graph, unary, prop.gamma, order, rng, inner_sweeps)
    s_z = suff_stats(spec, z, ref_class=params.ref_class)

    diff = theta_prop - theta
    log_alpha = (log_p_prop - log_p_cur) + float(diff @ s_y) - float(diff @ s_z)
    if np.log(rng.random()) < log_alpha:
        return prop, True, s_z
    return params, False, s_z


def run_dmh(
    spec: ModelSpec,
    y: np.ndarray,
    config: DMHConfig,
    start: Params | None = None,
    chain_id: int = 0,
    _stream: int = STREAM_CHAIN,
) -> ChainOutput:
    """Run one DMH chain; fully deterministic given (config, data, chain_id).

    ``start`` and proposal covariances default to the pseudolikelihood
    fit.  On KeyboardInterrupt the partial chain is returned with
    ``truncated=True``.
    """
    y = validate_labels(y, spec.n_classes, spec.n_sites)
    blocks = config.blocks if config.blocks is not None else default_blocks(spec)
    blocks = validate_blocks(blocks, spec.p_total)

    proposals = config.proposals
    if start is None or proposals is None:
        fit = mple_fit(spec, y)
        if start is None:
            start = fit.theta_hat
        if proposals is None:
            cov = fit.covariance if fit.covariance is not None and len(fit.free_indices) == spec.p_total else None
            proposals = ProposalSpec.from_mple_covariance(cov, blocks)
    if len(proposals.covariances) != len(blocks):
        raise ValueError("proposal spec does not match block structure")
    chols = proposals.chols()

    rng = substream(config.seed, _stream, chain_id)
    order = site_order(spec.graph, config.sweep_mode)
    s_y = suff_stats(spec, y, ref_class=start.ref_class)

    n_retained = (config.outer_iterations - config.burn_in) // config.thin
    p_total = spec.p_total
    draws = np.zeros((n_retained, p_total))
    iterations = np.zeros(n_retained, dtype=np.int64)
    log_h = np.zeros(n_retained)
    accept_flags = np.zeros((n_retained, len(blocks)), dtype=np.uint8)
    accept_counts = np.zeros(len(blocks), dtype=np.int64)

    params = start
    flags = np.zeros(len(blocks), dtype=np.uint8)
    truncated = False
    t0 = time.perf_counter()
    done = 0
    try:
        for it in range(1, config.outer_iterations + 1):
            flags[:] = 0
            for b, block in enumerate(blocks):
                params, accepted, _ = dmh_block_step(
                    spec,
                    y,
                    params,
                    block,
                    chols[b],
                    proposals.scales[b],
                    config.prior,
                    config.inner_sweeps,
                    rng,
                    s_y=s_y,
                    order=order,
                )
                if accepted:
                    flags[b] = 1
                    accept_counts[b] += 1
            done = it
            if it > config.burn_in and (it - config.burn_in) % config.thin == 0:
                r = (it - config.burn_in) // config.thin - 1
                draws[r] = params.flatten()
                iterations[r] = it
                log_h[r] = float(draws[r] @ s_y)
                accept_flags[r] = flags
    except KeyboardInterrupt:
        truncated = True
        kept = max(0, (done - config.burn_in) // config.thin)
        draws, iterations = draws[:kept], iterations[:kept]
        log_h, accept_flags = log_h[:kept], accept_flags[:kept]
    wall = time.perf_counter() - t0

    denom = max(done, 1)
    return ChainOutput(
        draws=draws,
        iterations=iterations,
        log_h=log_h,
        accept_flags=accept_flags,
        block_accept_rates=accept_counts / denom,
        param_names=spec.param_names(ref_class=start.ref_class),
        seed=config.seed,
        inner_sweeps=config.inner_sweeps,
        outer_iterations=config.outer_iterations,
        burn_in=config.burn_in,
        thin=config.thin,
        truncated=truncated,
        timings={"wall_seconds": wall, "outer_done": done},
    )


def default_bands(n_blocks: int) -> list[tuple[float, float]]:
    """Coefficient blocks target 20-30% acceptance, the gamma block 30-40%."""
    bands = [DEFAULT_BETA_BAND] * (n_blocks - 1)
    bands.append(DEFAULT_GAMMA_BAND)
    return bands


def tune_scales(
    spec: ModelSpec,
    y: np.ndarray,
    config: DMHConfig,
    targets: list[tuple[float, float]] | None = None,
    pilot_iterations: int = 500,
    max_rounds: int = 10,
    start: Params | None = None,
) -> ProposalSpec:
    """Multiplicative pilot tuning of per-block proposal scales.

    Each round runs a pilot chain on a dedicated random stream (discarded
    from inference) and multiplies a block's scale by 1.5 when its
    acceptance sits above the target band or by 0.6 when below.  Stops
    when every block is in band; otherwise returns the best round found
    with ``tuned=False``.
    """
    if pilot_iterations < 1:
        raise ValueError("pilot_iterations must be >= 1")
    blocks = config.blocks if config.blocks is not None else default_blocks(spec)
    blocks = validate_blocks(blocks, spec.p_total)
    proposals = config.proposals
    if proposals is None or start is None:
        fit = mple_fit(spec, y)
        if start is None:
            start = fit.theta_hat
        if proposals is None:
            cov = fit.covariance if fit.covariance is not None and len(fit.free_indices) == spec.p_total else None
            proposals = ProposalSpec.from_mple_covariance(cov, blocks)
    bands = targets if targets is not None else default_bands(len(blocks))
    if len(bands) != len(blocks):
        raise ValueError("need one target band per block")

    scales = list(proposals.scales)
    history = []
    best_scales, best_in_band = list(scales), -1
    for rnd in range(max_rounds):
        pilot = replace(
            config,
            outer_iterations=pilot_iterations,
            burn_in=0,
            thin=1,
            blocks=blocks,
            proposals=ProposalSpec(proposals.covariances, list(scales)),
        )
        chain = run_dmh(spec, y, pilot, start=start, chain_id=rnd, _stream=STREAM_TUNE)
        rates = chain.block_accept_rates
        history.append({"round": rnd, "scales": list(scales), "acceptance": rates.tolist()})
        in_band = sum(1 for r, (lo, hi) in zip(rates, bands) if lo <= r <= hi)
        if in_band >= best_in_band:
            best_scales, best_in_band = list(scales), in_band
        if in_band == len(blocks):
            return ProposalSpec(
                proposals.covariances, list(scales), tuned=True, tune_rounds=rnd + 1, tune_history=history
            )
        for b, (rate, (lo, hi)) in enumerate(zip(rates, bands)):
            if rate > hi:
                scales[b] *= 1.5
            elif rate < lo:
                scales[b] *= 0.6
    return ProposalSpec(
        proposals.covariances, best_scales, tuned=False, tune_rounds=max_rounds, tune_history=history
    )
