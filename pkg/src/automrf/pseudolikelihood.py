"""Maximum pseudolikelihood estimation.

The pseudolikelihood is the product of the site-level full conditionals
evaluated at the observed arrangement.  Each site term is a multinomial
logistic likelihood in theta, so the negative log pseudolikelihood is
smooth and convex with closed-form gradient and Hessian; Newton's method
with a backtracking line search minimizes it.

The optimum initializes the double MH sampler and its Hessian inverse
supplies proposal covariances.  Standard errors derived from it are *not*
trustworthy under spatial dependence and are not reported as such.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import DivergenceDetected
from .model import (
    ModelSpec,
    Params,
    class_predictors,
    neighbor_count_matrix,
    validate_labels,
)

_ARMIJO_C = 1e-4
_BACKTRACK = 0.5


@dataclass
class MpleResult:
    theta_hat: Params
    neg_log_pl: float
    gradient: np.ndarray
    hessian: np.ndarray
    covariance: np.ndarray | None
    converged: bool
    iterations: int
    used_gradient_fallback: bool
    free_indices: np.ndarray

    def to_dict(self) -> dict:
        return {
            "theta_hat": self.theta_hat.flatten().tolist(),
            "neg_log_pl": self.neg_log_pl,
            "gradient_norm": float(np.linalg.norm(self.gradient)),
            "hessian": self.hessian.tolist(),
            "covariance": None if self.covariance is None else self.covariance.tolist(),
            "converged": self.converged,
            "iterations": self.iterations,
            "used_gradient_fallback": self.used_gradient_fallback,
            "free_indices": self.free_indices.tolist(),
        }


def _prepared(spec: ModelSpec, y: np.ndarray):
    y = validate_labels(y, spec.n_classes, spec.n_sites)
    counts = neighbor_count_matrix(spec.graph, y, spec.n_classes)
    return y, counts


def _logits(spec: ModelSpec, params: Params, counts: np.ndarray) -> np.ndarray:
    return class_predictors(spec, params) + params.gamma * counts


def neg_log_pseudolikelihood(
    spec: ModelSpec, params: Params, y: np.ndarray
) -> tuple[float, np.ndarray, np.ndarray]:
    """Value, gradient, and Hessian of the negative log pseudolikelihood.

    Derivatives are exact (each site term is multinomial-logistic); the
    Hessian is positive semidefinite.  Neighbor counts are taken from the
    observed arrangement, as the pseudolikelihood conditions on it.
    """
    y, counts = _prepared(spec, y)
    logits = _logits(spec, params, counts)
    lse = logsumexp(logits, axis=1)
    site_values = lse - logits[np.arange(spec.n_sites), y]
    if not np.all(np.isfinite(site_values)):
        bad = int(np.flatnonzero(~np.isfinite(site_values))[0])
        raise ValueError(f"non-finite pseudolikelihood term at site {bad}")
    value = float(site_values.sum())

    probs = np.exp(logits - lse[:, None])
    x = spec.design.values
    nonref = [k - 1 for k in params.nonref_classes()]
    p, p_total = spec.p, spec.p_total

    grad = np.zeros(p_total)
    one_hot = np.zeros((spec.n_sites, spec.n_classes))
    one_hot[np.arange(spec.n_sites), y] = 1.0
    resid = probs - one_hot
    for c, k in enumerate(nonref):
        grad[c * p : (c + 1) * p] = x.T @ resid[:, k] if p else 0.0
    cbar = np.einsum("ik,ik->i", probs, counts)
    grad[-1] = float(cbar.sum() - counts[np.arange(spec.n_sites), y].sum())

    hess = np.zeros((p_total, p_total))
    for c, k in enumerate(nonref):
        for d, l in enumerate(nonref[: c + 1]):
            w = probs[:, k] * ((1.0 if k == l else 0.0) - probs[:, l])
            if p:
                block = x.T @ (x * w[:, None])
                hess[c * p : (c + 1) * p, d * p : (d + 1) * p] = block
                if c != d:
                    hess[d * p : (d + 1) * p, c * p : (c + 1) * p] = block.T
        v = probs[:, k] * (counts[:, k] - cbar)
        if p:
            hess[c * p : (c + 1) * p, -1] = x.T @ v
            hess[-1, c * p : (c + 1) * p] = hess[c * p : (c + 1) * p, -1]
    hess[-1, -1] = float(np.einsum("ik,ik->", probs, counts**2) - (cbar**2).sum())
    return value, grad, 0.5 * (hess + hess.T)


def _value_only(spec: ModelSpec, params: Params, y: np.ndarray, counts: np.ndarray) -> float:
    logits = _logits(spec, params, counts)
    lse = logsumexp(logits, axis=1)
    return float((lse - logits[np.arange(spec.n_sites), y]).sum())


def mple_fit(
    spec: ModelSpec,
    y: np.ndarray,
    max_iter: int = 100,
    grad_tol: float = 1e-8,
    fix_gamma: float | None = None,
    divergence_bound: float = 50.0,
) -> MpleResult:
    """Newton minimization of the negative log pseudolikelihood from theta = 0.

    Convexity makes the start point immaterial; zero is reproducible.
    ``fix_gamma`` pins the spatial parameter (covariate-only baselines).
    Raises :class:`DivergenceDetected` when the iterates leave a norm ball
    with a non-vanishing gradient, the signature of a monotone
    pseudolikelihood (e.g. an all-one-class arrangement driving gamma up).
    A singular Newton system falls back to a gradient step and is flagged.
    """
    y, counts = _prepared(spec, y)
    p_total = spec.p_total
    free = np.arange(p_total) if fix_gamma is None else np.arange(p_total - 1)

    theta = np.zeros(p_total)
    if fix_gamma is not None:
        theta[-1] = float(fix_gamma)

    def unpack(vec: np.ndarray) -> Params:
        return Params.unflatten(vec, spec.p, spec.n_classes)

    used_fallback = False
    converged = False
    iterations = 0
    value, grad, hess = neg_log_pseudolikelihood(spec, unpack(theta), y)
    for iterations in range(1, max_iter + 1):
        # A pseudolikelihood driven to 1 has its optimum at infinity (the
        # gradient underflows before the norm bound can fire).
        if value < 1e-6:
            raise DivergenceDetected(
                f"pseudolikelihood saturated (neg log PL = {value:.3g}); "
                "the maximizer lies at infinity (e.g. an all-one-class arrangement)"
            )
        g = grad[free]
        if np.linalg.norm(g) <= grad_tol:
            converged = True
            iterations -= 1
            break
        if np.linalg.norm(theta) > divergence_bound:
            raise DivergenceDetected(
                f"|theta| = {np.linalg.norm(theta):.2f} exceeded {divergence_bound} with "
                f"gradient norm {np.linalg.norm(g):.3g}; pseudolikelihood appears monotone"
            )
        h = hess[np.ix_(free, free)]
        direction = None
        try:
            cand = np.linalg.solve(h, -g)
            if np.all(np.isfinite(cand)) and cand @ g < 0:
                direction = cand
        except np.linalg.LinAlgError:
            direction = None
        if direction is None:
            direction = -g
            used_fallback = True

        slope = float(g @ direction)
        step = 1.0
        while step > 1e-14:
            trial = theta.copy()
            trial[free] += step * direction
            trial_value = _value_only(spec, unpack(trial), y, counts)
            if trial_value <= value + _ARMIJO_C * step * slope:
                break
            step *= _BACKTRACK
        theta[free] += step * direction
        value, grad, hess = neg_log_pseudolikelihood(spec, unpack(theta), y)
    else:
        iterations = max_iter
        converged = bool(np.linalg.norm(grad[free]) <= grad_tol)

    h_free = hess[np.ix_(free, free)]
    try:
        covariance = np.linalg.inv(h_free)
    except np.linalg.LinAlgError:
        covariance = None
    return MpleResult(
        theta_hat=unpack(theta),
        neg_log_pl=value,
        gradient=grad[free],
        hessian=h_free,
        covariance=covariance,
        converged=converged,
        iterations=iterations,
        used_gradient_fallback=used_fallback,
        free_indices=free,
    )
