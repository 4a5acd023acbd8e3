"""The automultinomial probability model.

A categorical field y over a neighborhood graph, with class-specific linear
predictors and a single spatial agreement parameter gamma:

    P(y) propto exp( sum_i x_i' beta_{y_i}  +  gamma * S(y) ),

where S(y) counts unordered neighbor pairs sharing a class (each pair once)
and one reference class has its coefficient column pinned to zero for
identifiability.  With an intercept-only design this is the K-color Potts
model; with K=2 it is the autologistic model.

Conventions
-----------
* Class labels are 1-based in I/O and 0-based internally (numpy int arrays).
* Parameter flattening is class-major: the coefficient column of the first
  non-reference class, then the next, ..., then gamma last.  Every module
  (chains, diagnostics, CSV headers) shares this order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import NeighborhoodGraph, neighbor_class_counts


@dataclass(frozen=True)
class DesignMatrix:
    """n x p covariate matrix with column names; p = 0 is allowed (pure Potts)."""

    values: np.ndarray
    column_names: tuple[str, ...] = ()

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise ValueError("design matrix must be 2-D")
        if vals.size and not np.all(np.isfinite(vals)):
            raise ValueError("design matrix has non-finite entries")
        object.__setattr__(self, "values", vals)
        names = tuple(self.column_names) or tuple(f"x{j + 1}" for j in range(vals.shape[1]))
        if len(names) != vals.shape[1]:
            raise ValueError("column_names length does not match p")
        object.__setattr__(self, "column_names", names)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @classmethod
    def intercept_only(cls, n: int) -> "DesignMatrix":
        return cls(np.ones((n, 1)), ("intercept",))

    @classmethod
    def empty(cls, n: int) -> "DesignMatrix":
        return cls(np.zeros((n, 0)), ())

    def with_intercept(self) -> "DesignMatrix":
        return DesignMatrix(
            np.column_stack([np.ones(self.n), self.values]),
            ("intercept",) + self.column_names,
        )


@dataclass(frozen=True)
class Params:
    """Coefficients beta (p x (K-1)) and spatial parameter gamma.

    Column c of ``beta`` belongs to the (c+1)-th non-reference class in
    ascending 1-based class order; the ``ref_class`` column is implicitly
    zero.  ``ref_class`` is 1 except for outputs of :func:`re_reference`.
    """

    beta: np.ndarray
    gamma: float
    ref_class: int = 1

    def __post_init__(self):
        b = np.asarray(self.beta, dtype=np.float64)
        if b.ndim != 2:
            raise ValueError("beta must be 2-D (p x (K-1))")
        if b.size and not np.all(np.isfinite(b)):
            raise ValueError("beta has non-finite entries")
        if not np.isfinite(self.gamma):
            raise ValueError("gamma must be finite")
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def p(self) -> int:
        return self.beta.shape[0]

    @property
    def n_classes(self) -> int:
        return self.beta.shape[1] + 1

    @property
    def p_total(self) -> int:
        return self.beta.size + 1

    def flatten(self) -> np.ndarray:
        """Class-major flattening: beta column by column, gamma last."""
        return np.concatenate([self.beta.ravel(order="F"), [self.gamma]])

    @classmethod
    def unflatten(cls, vec: np.ndarray, p: int, n_classes: int, ref_class: int = 1) -> "Params":
        vec = np.asarray(vec, dtype=np.float64)
        expected = p * (n_classes - 1) + 1
        if vec.shape != (expected,):
            raise ValueError(f"expected flat vector of length {expected}, got {vec.shape}")
        beta = vec[:-1].reshape((p, n_classes - 1), order="F")
        return cls(beta=beta, gamma=float(vec[-1]), ref_class=ref_class)

    @classmethod
    def zeros(cls, p: int, n_classes: int) -> "Params":
        return cls(beta=np.zeros((p, n_classes - 1)), gamma=0.0)

    def nonref_classes(self) -> list[int]:
        """1-based class labels owning the beta columns, ascending."""
        return [k for k in range(1, self.n_classes + 1) if k != self.ref_class]


@dataclass(frozen=True)
class ModelSpec:
    """Class count, neighborhood graph, and design matrix for one model."""

    n_classes: int
    graph: NeighborhoodGraph
    design: DesignMatrix

    def __post_init__(self):
        if self.n_classes < 2:
            raise ValueError("need at least 2 classes")
        if self.graph.n_sites != self.design.n:
            raise ValueError(
                f"graph has {self.graph.n_sites} sites but design has {self.design.n} rows"
            )

    @property
    def n_sites(self) -> int:
        return self.graph.n_sites

    @property
    def p(self) -> int:
        return self.design.p

    @property
    def p_total(self) -> int:
        return self.design.p * (self.n_classes - 1) + 1

    def param_names(self, ref_class: int = 1) -> list[str]:
        """Parameter names in flattening order (used by chain CSV headers)."""
        names = []
        for k in range(1, self.n_classes + 1):
            if k == ref_class:
                continue
            for col in self.design.column_names:
                names.append(f"beta_{col}_k{k}")
        names.append("gamma")
        return names


def validate_labels(y: np.ndarray, n_classes: int, n_sites: int | None = None) -> np.ndarray:
    """Check a 0-based label vector and return it as int32."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError("arrangement must be a 1-D label vector")
    if n_sites is not None and y.shape[0] != n_sites:
        raise ValueError(f"arrangement has {y.shape[0]} sites, expected {n_sites}")
    if y.size and (y.min() < 0 or y.max() >= n_classes):
        raise ValueError(f"labels must lie in 0..{n_classes - 1} (0-based)")
    return y.astype(np.int32)


def class_predictors(spec: ModelSpec, params: Params) -> np.ndarray:
    """n x K matrix of x_i' beta_k, with the reference column identically 0."""
    if params.beta.shape != (spec.p, spec.n_classes - 1):
        raise ValueError(
            f"beta shape {params.beta.shape} inconsistent with (p, K-1)="
            f"({spec.p}, {spec.n_classes - 1})"
        )
    u = np.zeros((spec.n_sites, spec.n_classes))
    nonref = [k - 1 for k in params.nonref_classes()]
    if spec.p:
        u[:, nonref] = spec.design.values @ params.beta
    return u


def agreement_count(graph: NeighborhoodGraph, y: np.ndarray) -> int:
    """S(y): number of unordered neighbor pairs with equal labels (each pair once)."""
    e = graph.edges
    if not len(e):
        return 0
    return int(np.count_nonzero(y[e[:, 0]] == y[e[:, 1]]))


def neighbor_count_matrix(graph: NeighborhoodGraph, y: np.ndarray, n_classes: int) -> np.ndarray:
    """n x K matrix: entry (i, k) counts neighbors of i holding class k."""
    counts = np.zeros((graph.n_sites, n_classes))
    e = graph.edges
    if len(e):
        np.add.at(counts, (e[:, 0], y[e[:, 1]]), 1.0)
        np.add.at(counts, (e[:, 1], y[e[:, 0]]), 1.0)
    return counts


def suff_stats(spec: ModelSpec, y: np.ndarray, ref_class: int = 1) -> np.ndarray:
    """Sufficient statistic vector s(y), length p(K-1)+1.

    First the covariate-by-class sums sum_i x_ij I(y_i = k) for the
    non-reference classes in class-major order, then S(y).
    """
    y = validate_labels(y, spec.n_classes, spec.n_sites)
    k_count = spec.n_classes
    blocks = np.zeros((k_count, spec.p))
    if spec.p:
        one_hot = np.zeros((spec.n_sites, k_count))
        one_hot[np.arange(spec.n_sites), y] = 1.0
        blocks = one_hot.T @ spec.design.values
    keep = [k for k in range(k_count) if k != ref_class - 1]
    return np.concatenate([blocks[keep].ravel(), [agreement_count(spec.graph, y)]])


def log_unnormalized(spec: ModelSpec, params: Params, y: np.ndarray) -> float:
    """log h(y | theta) = theta . s(y); the joint density up to -log Z."""
    if params.p_total != spec.p_total:
        raise ValueError("parameter dimension inconsistent with model spec")
    return float(params.flatten() @ suff_stats(spec, y, ref_class=params.ref_class))


def full_conditional(spec: ModelSpec, params: Params, y: np.ndarray, i: int) -> np.ndarray:
    """P(y_i = k | rest) for k = 1..K, as a length-K probability vector.

    Proportional to exp(x_i' beta_k + gamma * n_ik), where n_ik counts
    neighbors of i currently in class k.  Depends on y only through the
    neighbors of i (Markov property).
    """
    y = validate_labels(y, spec.n_classes, spec.n_sites)
    counts = neighbor_class_counts(spec.graph, y, i, spec.n_classes)
    u = class_predictors(spec, params)[i]
    logits = u + params.gamma * counts
    logits -= logits.max()
    w = np.exp(logits)
    return w / w.sum()


def re_reference(params: Params, new_ref: int) -> Params:
    """Re-express the coefficients with ``new_ref`` as the zero class.

    Subtracting the new reference's predictor from every class shifts the
    joint exponent by a constant, so all arrangement probabilities are
    unchanged.  The returned ``Params`` carries ``ref_class=new_ref`` and
    stores columns for the remaining classes in ascending order.
    """
    k_count = params.n_classes
    if not 1 <= new_ref <= k_count:
        raise ValueError(f"new_ref must be in 1..{k_count}")
    if new_ref == params.ref_class:
        return params
    # Full p x K matrix with the current reference column restored.
    full = np.zeros((params.p, k_count))
    for col, k in enumerate(params.nonref_classes()):
        full[:, k - 1] = params.beta[:, col]
    full = full - full[:, new_ref - 1 : new_ref]
    keep = [k - 1 for k in range(1, k_count + 1) if k != new_ref]
    return Params(beta=full[:, keep], gamma=params.gamma, ref_class=new_ref)
