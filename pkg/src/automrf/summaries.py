"""Posterior summaries: means and equal-tailed 95% intervals."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .dmh import ChainOutput


@dataclass
class ParameterSummary:
    name: str
    mean: float
    lower: float
    upper: float


@dataclass
class PosteriorSummary:
    parameters: list[ParameterSummary]
    n_draws: int
    acceptance_rates: list[float] = field(default_factory=list)
    acd_reference: dict | None = None

    def to_dict(self) -> dict:
        return {
            "parameters": [
                {"name": p.name, "mean": p.mean, "lower": p.lower, "upper": p.upper}
                for p in self.parameters
            ],
            "n_draws": self.n_draws,
            "acceptance_rates": self.acceptance_rates,
            "acd_reference": self.acd_reference,
        }


def summarize_draws(draws: np.ndarray, names: list[str]) -> list[ParameterSummary]:
    """Mean and empirical 2.5%/97.5% quantiles per column.

    Quantiles use linear interpolation between order statistics (so a
    chain of 1..100 gets the interval [3.475, 97.525]).
    """
    draws = np.asarray(draws, dtype=np.float64)
    if draws.ndim != 2 or draws.shape[0] == 0:
        raise ValueError("need a non-empty draws matrix")
    lows, highs = np.quantile(draws, [0.025, 0.975], axis=0)
    means = draws.mean(axis=0)
    return [
        ParameterSummary(name=n, mean=float(m), lower=float(lo), upper=float(hi))
        for n, m, lo, hi in zip(names, means, lows, highs)
    ]


def summarize(chain: ChainOutput, acd_reference: dict | None = None) -> PosteriorSummary:
    if chain.n_draws == 0:
        raise ValueError("cannot summarize an empty chain")
    if chain.n_draws < 40:
        warnings.warn(f"only {chain.n_draws} draws; interval estimates will be crude", stacklevel=2)
    return PosteriorSummary(
        parameters=summarize_draws(chain.draws, chain.param_names),
        n_draws=chain.n_draws,
        acceptance_rates=chain.block_accept_rates.tolist(),
        acd_reference=acd_reference,
    )
