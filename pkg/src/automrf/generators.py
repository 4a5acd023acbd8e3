"""Synthetic data generators.

Two lattice-field mechanisms used to exercise the fitting pipeline on
data *not* drawn from the automultinomial model itself:

* a hierarchical multinomial-logit field whose per-class random effects
  follow a conditional autoregressive (CAR) Gaussian with sparse
  precision tau * (D - rho * A);
* a mixture of Gaussian processes sharing a gamma-exponential kernel
  exp{-(d / length)^exponent}, each cell labeled by the largest of the K
  latent fields.

Plus independent-normal covariate simulation.  All generators are
deterministic under a fixed generator state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator
from scipy.linalg import solve_triangular

from .lattice import GridSpec, NeighborhoodGraph
from .model import DesignMatrix


@dataclass(frozen=True)
class CarSpec:
    """CAR random-effect field: precision tau * (D - rho * A) over a graph."""

    graph: NeighborhoodGraph
    tau: float = 0.1
    rho: float = 0.2

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")

    def precision(self) -> np.ndarray:
        d = np.diag(self.graph.degrees().astype(np.float64))
        return self.tau * (d - self.rho * self.graph.adjacency_matrix())


@dataclass(frozen=True)
class GpSpec:
    """Gaussian-process mixture: per-class mean coefficients and kernel shape.

    ``beta`` is p x K; column k holds the mean coefficients of class k's
    latent field (a zero column gives that class a zero-mean field).
    Distances are taken between cell centroids at unit spacing unless
    ``centroids`` is supplied.
    """

    beta: np.ndarray
    length: float = 3.0
    exponent: float = 2.0
    centroids: np.ndarray | None = None

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=np.float64)
        if beta.ndim != 2:
            raise ValueError("beta must be p x K")
        object.__setattr__(self, "beta", beta)
        if self.length <= 0 or self.exponent <= 0:
            raise ValueError("kernel length and exponent must be positive")

    @property
    def n_classes(self) -> int:
        return self.beta.shape[1]


def simulate_covariates(
    n: int,
    columns: list[tuple[float, float]],
    rng: Generator,
    intercept: bool = False,
    names: list[str] | None = None,
) -> DesignMatrix:
    """Independent normal covariate columns given (mean, sd) per column."""
    for mean, sd in columns:
        if sd <= 0:
            raise ValueError(f"covariate sd must be positive, got {sd}")
    values = np.column_stack(
        [mean + sd * rng.standard_normal(n) for mean, sd in columns]
    ) if columns else np.zeros((n, 0))
    if names is None:
        names = [f"x{j + 1}" for j in range(len(columns))]
    design = DesignMatrix(values, tuple(names))
    return design.with_intercept() if intercept else design


def car_field(spec: CarSpec, rng: Generator) -> np.ndarray:
    """One zero-mean draw with covariance (1/tau) (D - rho A)^{-1}.

    Sampled by back-solving the Cholesky factor of the precision; raises
    if the precision is not positive definite (e.g. rho too large for the
    graph, or isolated sites making D - rho A singular).
    """
    q = spec.precision()
    try:
        chol = np.linalg.cholesky(q)
    except np.linalg.LinAlgError as exc:
        raise ValueError(
            f"CAR precision tau*(D - rho*A) with rho={spec.rho} is not positive definite"
        ) from exc
    z = rng.standard_normal(spec.graph.n_sites)
    return solve_triangular(chol.T, z, lower=False)


def multinomial_logit_probs(
    x: np.ndarray, beta: np.ndarray, phi: np.ndarray | None = None
) -> np.ndarray:
    """Per-site class probabilities with class 1 as the zero reference.

    ``beta`` is p x (K-1) for classes 2..K; ``phi`` (n x (K-1)) adds
    per-site random effects to the same classes.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    logits = np.zeros((n, beta.shape[1] + 1))
    logits[:, 1:] = x @ beta
    if phi is not None:
        logits[:, 1:] += phi
    logits -= logits.max(axis=1, keepdims=True)
    w = np.exp(logits)
    return w / w.sum(axis=1, keepdims=True)


def categorical_rows(probs: np.ndarray, rng: Generator) -> np.ndarray:
    """One categorical draw per row via a single uniform and prefix scan."""
    cum = np.cumsum(probs, axis=1)
    u = rng.random(probs.shape[0])
    labels = (cum < u[:, None]).sum(axis=1)
    return np.clip(labels, 0, probs.shape[1] - 1).astype(np.int32)


def multinomial_logit_sample(
    x: np.ndarray,
    beta: np.ndarray,
    phi: np.ndarray | None,
    rng: Generator,
) -> np.ndarray:
    """Independent per-site draws from the multinomial logit (0-based labels)."""
    return categorical_rows(multinomial_logit_probs(x, beta, phi), rng)


def grid_centroids(grid: GridSpec) -> np.ndarray:
    """Cell centroids at unit spacing, row-major: cell (r, c) at (c, r)."""
    rr, cc = np.meshgrid(np.arange(grid.rows), np.arange(grid.cols), indexing="ij")
    return np.column_stack([cc.ravel().astype(np.float64), rr.ravel().astype(np.float64)])


def gp_kernel(dists: np.ndarray, length: float, exponent: float) -> np.ndarray:
    """Gamma-exponential correlation exp{-(d/length)^exponent}."""
    return np.exp(-((np.asarray(dists, dtype=np.float64) / length) ** exponent))


def _chol_with_jitter_ladder(mat: np.ndarray) -> np.ndarray:
    base = float(np.trace(mat)) / mat.shape[0]
    for jitter in (0.0, 1e-12, 1e-10, 1e-8, 1e-6):
        try:
            return np.linalg.cholesky(mat + jitter * base * np.eye(mat.shape[0]))
        except np.linalg.LinAlgError:
            continue
    raise ValueError("kernel matrix not positive definite even after max jitter")


def gp_mixture_sample(grid: GridSpec, x: np.ndarray, spec: GpSpec, rng: Generator) -> np.ndarray:
    """Draw K latent Gaussian fields with shared kernel; label each cell argmax.

    Fields are Z_k ~ GP(X beta_k, Sigma) with Sigma from the
    gamma-exponential kernel on centroid distances.  Ties break to the
    lowest class index.  Returns 0-based labels.
    """
    x = np.asarray(x, dtype=np.float64)
    n = grid.n_sites
    if x.shape[0] != n:
        raise ValueError("covariate rows must match the grid size")
    pts = spec.centroids if spec.centroids is not None else grid_centroids(grid)
    diff = pts[:, None, :] - pts[None, :, :]
    dists = np.sqrt((diff**2).sum(axis=2))
    sigma = gp_kernel(dists, spec.length, spec.exponent)
    chol = _chol_with_jitter_ladder(sigma)
    means = x @ spec.beta
    fields = np.empty((n, spec.n_classes))
    for k in range(spec.n_classes):
        fields[:, k] = means[:, k] + chol @ rng.standard_normal(n)
    return np.argmax(fields, axis=1).astype(np.int32)
