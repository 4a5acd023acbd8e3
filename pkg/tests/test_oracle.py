import math

import numpy as np
import pytest

from automrf import (
    DesignMatrix,
    GridSpec,
    ModelSpec,
    Params,
    PriorSpec,
    build_regular_grid,
    enumerate_log_z,
    enumerate_table,
    exact_distribution,
    exact_moments,
    exact_posterior_grid,
)
from automrf.errors import LatticeTooLargeError
from automrf.oracle import GridAxis, exact_mh_chain
from automrf.model import suff_stats
from automrf.rng import substream

from conftest import intercept_model, random_labels, random_model, random_params


def test_log_z_uniform_cases():
    spec = intercept_model(2, 2, 2)
    assert abs(enumerate_log_z(spec, Params.zeros(1, 2)) - math.log(16)) < 1e-12
    spec13 = intercept_model(1, 2, 3)
    assert abs(enumerate_log_z(spec13, Params.zeros(1, 3)) - math.log(9)) < 1e-12


def test_log_z_2x2_gamma_half():
    spec = intercept_model(2, 2, 2)
    z = math.exp(enumerate_log_z(spec, Params(np.array([[0.0]]), 0.5)))
    # S-value multiplicities over the 16 configs: 2 at S=4, 12 at S=2, 2 at S=0
    assert abs(z - (2 * math.exp(2) + 12 * math.exp(1) + 2)) < 1e-9


def test_probabilities_sum_to_one():
    for k in (2, 3):
        spec = random_model(2, 2, k, 2, seed=21 + k)
        for seed in range(5):
            dist = exact_distribution(spec, random_params(spec, seed))
            assert abs(np.exp(dist.log_probs).sum() - 1.0) < 1e-10


def test_guard_refuses_large_lattices():
    spec = intercept_model(4, 4, 3)  # 3^16 = 43 M configs
    with pytest.raises(LatticeTooLargeError):
        enumerate_log_z(spec, Params.zeros(1, 3))


def test_moments_match_finite_differences():
    spec = random_model(2, 2, 2, 2, seed=31)
    params = random_params(spec, 17)
    table = enumerate_table(spec)
    mean, cov = table.moments(params)
    theta = params.flatten()
    h = 1e-3
    p_total = theta.shape[0]

    def logz(vec):
        return table.log_partition(Params.unflatten(vec, spec.p, spec.n_classes))

    grad_fd = np.zeros(p_total)
    for j in range(p_total):
        tp, tm = theta.copy(), theta.copy()
        tp[j] += h
        tm[j] -= h
        grad_fd[j] = (logz(tp) - logz(tm)) / (2 * h)
    np.testing.assert_allclose(mean, grad_fd, rtol=1e-6, atol=1e-9)

    hess_fd = np.zeros((p_total, p_total))
    for j in range(p_total):
        for k in range(p_total):
            tpp, tpm, tmp, tmm = (theta.copy() for _ in range(4))
            tpp[[j, k]] += h
            tpm[j] += h
            tpm[k] -= h
            tmp[j] -= h
            tmp[k] += h
            tmm[[j, k]] -= h
            if j == k:
                tpp, tmm = theta.copy(), theta.copy()
                tpp[j] += 2 * h
                tmm[j] -= 2 * h
            hess_fd[j, k] = (logz(tpp) - logz(tpm) - logz(tmp) + logz(tmm)) / (4 * h * h)
    np.testing.assert_allclose(cov, hess_fd, atol=1e-4)


def test_covariance_is_symmetric_psd():
    spec = random_model(2, 2, 3, 2, seed=32)
    _, cov = exact_moments(spec, random_params(spec, 18))
    np.testing.assert_allclose(cov, cov.T, atol=1e-12)
    assert np.linalg.eigvalsh(cov).min() > -1e-10


def test_log_z_convex_along_lines():
    spec = random_model(2, 2, 2, 2, seed=33)
    table = enumerate_table(spec)
    rng = substream(7, 40)
    theta0 = rng.standard_normal(spec.p_total)
    for _ in range(5):
        direction = rng.standard_normal(spec.p_total)
        ts = np.linspace(-1, 1, 9)
        vals = [
            table.log_partition(Params.unflatten(theta0 + t * direction, spec.p, spec.n_classes))
            for t in ts
        ]
        second = np.diff(vals, 2)
        assert second.min() >= -1e-8


def test_posterior_grid_single_point():
    spec = intercept_model(2, 2, 2)
    y = np.array([0, 1, 1, 0])
    grid = exact_posterior_grid(
        spec, y, PriorSpec(kind="flat"), [GridAxis(1, [0.25])], Params.zeros(1, 2)
    )
    assert grid.probs.tolist() == [1.0]


def test_posterior_grid_mode_matches_direct_maximization():
    spec = ModelSpec(2, build_regular_grid(GridSpec(3, 3)), DesignMatrix.empty(9))
    rng = substream(9, 41)
    y = rng.integers(0, 2, 9)
    table = enumerate_table(spec)
    s_y = suff_stats(spec, y)

    values = np.linspace(-1.0, 2.0, 601)
    grid = exact_posterior_grid(
        spec, y, PriorSpec(kind="flat"), [GridAxis(0, values)], Params(np.zeros((0, 1)), 0.0),
        table=table,
    )
    grid_mode = values[np.argmax(grid.probs)]

    from scipy.optimize import minimize_scalar

    def neg_loglik(g):
        return -(g * s_y[-1] - table.log_partition(Params(np.zeros((0, 1)), g)))

    opt = minimize_scalar(neg_loglik, bounds=(-1.0, 2.0), method="bounded")
    assert abs(grid_mode - opt.x) <= (values[1] - values[0])


def test_posterior_grid_label_swap_symmetry():
    spec = intercept_model(2, 2, 2)
    y = np.array([0, 1, 1, 0])  # two sites of each class, S(y) = 0
    values = np.linspace(-2, 2, 81)
    grid = exact_posterior_grid(
        spec, y, PriorSpec(kind="normal", mean=0.0, sd=10.0),
        [GridAxis(0, values)], Params(np.array([[0.0]]), 0.3),
    )
    np.testing.assert_allclose(grid.probs, grid.probs[::-1], atol=1e-12)
    assert abs(grid.marginal_mean(0)) < (values[1] - values[0])


def test_posterior_grid_rejects_three_axes():
    spec = intercept_model(2, 2, 2)
    with pytest.raises(ValueError):
        exact_posterior_grid(
            spec,
            np.array([0, 1, 1, 0]),
            PriorSpec(),
            [GridAxis(0, [0.0]), GridAxis(1, [0.0]), GridAxis(1, [1.0])],
            Params.zeros(1, 2),
        )


def test_exact_mh_matches_grid_posterior():
    spec = ModelSpec(2, build_regular_grid(GridSpec(2, 2)), DesignMatrix.empty(4))
    y = np.array([0, 0, 1, 0])
    prior = PriorSpec(kind="flat", gamma_bounds=(-2.0, 2.0))
    table = enumerate_table(spec)
    s_y = suff_stats(spec, y)
    values = np.linspace(-2, 2, 801)
    grid = exact_posterior_grid(
        spec, y, prior, [GridAxis(0, values)], Params(np.zeros((0, 1)), 0.0), table=table
    )
    draws, rate = exact_mh_chain(
        table, s_y, prior, np.zeros(1), np.array([[0.8]]), 40_000, substream(3, 42)
    )
    assert 0.05 < rate < 0.95
    assert abs(draws[2000:, 0].mean() - grid.marginal_mean(0)) < 0.03
