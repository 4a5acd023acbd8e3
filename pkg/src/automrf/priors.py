"""Priors over the flattened parameter vector.

Independent per-coordinate priors: normal(mean, sd) or flat, with optional
support bounds on gamma (the last coordinate).  Flat priors are improper;
they contribute zero to log densities and derivatives, which is all the
samplers and the curvature diagnostic need.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PriorSpec:
    """``kind`` is 'normal' or 'flat'; mean/sd broadcast over coordinates."""

    kind: str = "normal"
    mean: float | np.ndarray = 0.0
    sd: float | np.ndarray = 10.0
    gamma_bounds: tuple[float | None, float | None] = (None, None)

    def __post_init__(self):
        if self.kind not in ("normal", "flat"):
            raise ValueError("prior kind must be 'normal' or 'flat'")
        if self.kind == "normal" and np.any(np.asarray(self.sd) <= 0):
            raise ValueError("prior sds must be positive")
        lo, hi = self.gamma_bounds
        if lo is not None and hi is not None and lo >= hi:
            raise ValueError("gamma_bounds must satisfy lo < hi")

    def _moments(self, p_total: int) -> tuple[np.ndarray, np.ndarray]:
        mean = np.broadcast_to(np.asarray(self.mean, dtype=np.float64), (p_total,))
        sd = np.broadcast_to(np.asarray(self.sd, dtype=np.float64), (p_total,))
        return mean, sd

    def in_support(self, theta_flat: np.ndarray) -> bool:
        lo, hi = self.gamma_bounds
        gamma = theta_flat[-1]
        if lo is not None and gamma < lo:
            return False
        if hi is not None and gamma > hi:
            return False
        return True

    def log_density(self, theta_flat: np.ndarray) -> float:
        """Log prior density up to an additive constant; -inf outside support."""
        theta_flat = np.asarray(theta_flat, dtype=np.float64)
        if not self.in_support(theta_flat):
            return -np.inf
        if self.kind == "flat":
            return 0.0
        mean, sd = self._moments(theta_flat.shape[0])
        z = (theta_flat - mean) / sd
        return float(-0.5 * np.dot(z, z))

    def grad_log_density(self, theta_flat: np.ndarray) -> np.ndarray:
        theta_flat = np.asarray(theta_flat, dtype=np.float64)
        if self.kind == "flat":
            return np.zeros_like(theta_flat)
        mean, sd = self._moments(theta_flat.shape[0])
        return -(theta_flat - mean) / sd**2

    def hess_log_density(self, theta_flat: np.ndarray) -> np.ndarray:
        p_total = np.asarray(theta_flat).shape[0]
        if self.kind == "flat":
            return np.zeros((p_total, p_total))
        _, sd = self._moments(p_total)
        return np.diag(-1.0 / sd**2)

    def to_dict(self) -> dict:
        lo, hi = self.gamma_bounds
        return {
            "kind": self.kind,
            "mean": np.asarray(self.mean).tolist(),
            "sd": np.asarray(self.sd).tolist(),
            "gamma_bounds": [lo, hi],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PriorSpec":
        bounds = d.get("gamma_bounds") or [None, None]
        mean = d.get("mean", 0.0)
        sd = d.get("sd", 10.0)
        mean = np.asarray(mean) if isinstance(mean, list) else float(mean)
        sd = np.asarray(sd) if isinstance(sd, list) else float(sd)
        return cls(
            kind=d.get("kind", "normal"),
            mean=mean,
            sd=sd,
            gamma_bounds=(bounds[0], bounds[1]),
        )
