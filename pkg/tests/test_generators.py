import numpy as np
import pytest
from scipy.linalg import solve_triangular

from automrf import GridSpec, build_regular_grid
from automrf.generators import (
    CarSpec,
    GpSpec,
    car_field,
    categorical_rows,
    gp_kernel,
    gp_mixture_sample,
    grid_centroids,
    multinomial_logit_probs,
    multinomial_logit_sample,
    simulate_covariates,
)
from automrf.lattice import NeighborhoodGraph
from automrf.rng import substream


def test_covariate_sd_must_be_positive():
    with pytest.raises(ValueError):
        simulate_covariates(10, [(0.0, 0.0)], substream(0, 6000))


def test_covariate_sample_mean_within_clt_bound():
    n = 100_000
    design = simulate_covariates(n, [(2.0, 1.0)], substream(1, 6001))
    assert abs(design.values[:, 0].mean() - 2.0) < 3 / np.sqrt(n)


def test_covariates_deterministic_and_intercept():
    a = simulate_covariates(50, [(2.0, 1.0), (3.0, 1.0)], substream(2, 6002), intercept=True)
    b = simulate_covariates(50, [(2.0, 1.0), (3.0, 1.0)], substream(2, 6002), intercept=True)
    assert np.array_equal(a.values, b.values)
    assert a.column_names[0] == "intercept"
    assert np.all(a.values[:, 0] == 1.0)


def test_car_isolated_site_is_singular():
    graph = NeighborhoodGraph.from_edges([(0, 1)], n_sites=3)  # site 2 isolated: D row is 0
    with pytest.raises(ValueError):
        car_field(CarSpec(graph, tau=0.1, rho=0.2), substream(3, 6003))


def test_car_two_site_covariance_matches_closed_form():
    graph = NeighborhoodGraph.from_edges([(0, 1)], n_sites=2)
    spec = CarSpec(graph, tau=0.1, rho=0.2)
    expected = np.linalg.inv(0.1 * np.array([[1.0, -0.2], [-0.2, 1.0]]))
    rng = substream(4, 6004)
    n = 100_000
    draws = np.array([car_field(spec, rng) for _ in range(n)])
    got = np.cov(draws, rowvar=False)
    # entrywise 3-sigma bounds for a Gaussian sample covariance
    for j in range(2):
        for k in range(2):
            se = np.sqrt((expected[j, j] * expected[k, k] + expected[j, k] ** 2) / n)
            assert abs(got[j, k] - expected[j, k]) < 3 * se


def test_car_deterministic():
    graph = build_regular_grid(GridSpec(4, 4))
    spec = CarSpec(graph)
    a = car_field(spec, substream(5, 6005))
    b = car_field(spec, substream(5, 6005))
    assert np.array_equal(a, b)


def test_car_precision_symmetric_pd():
    graph = build_regular_grid(GridSpec(5, 5))
    q = CarSpec(graph).precision()
    np.testing.assert_allclose(q, q.T)
    assert np.linalg.eigvalsh(q).min() > 0


def test_logit_sample_uniform_when_zero():
    n = 100_000
    labels = multinomial_logit_sample(np.zeros((n, 1)), np.zeros((1, 2)), None, substream(6, 6006))
    freq = np.bincount(labels, minlength=3) / n
    se = np.sqrt((1 / 3) * (2 / 3) / n)
    assert np.all(np.abs(freq - 1 / 3) < 3 * se)


def test_logit_sample_saturates_with_huge_intercept():
    x = np.ones((2000, 1))
    beta = np.array([[50.0, 0.0]])
    labels = multinomial_logit_sample(x, beta, None, substream(7, 6007))
    assert np.all(labels == 1)


def test_logit_probs_match_independent_softmax():
    rng = substream(8, 6008)
    x = rng.standard_normal((40, 3))
    beta = rng.standard_normal((3, 2))
    phi = rng.standard_normal((40, 2))
    probs = multinomial_logit_probs(x, beta, phi)
    for i in range(40):
        logits = np.array([0.0, x[i] @ beta[:, 0] + phi[i, 0], x[i] @ beta[:, 1] + phi[i, 1]])
        expected = np.exp(logits) / np.exp(logits).sum()
        np.testing.assert_allclose(probs[i], expected, atol=1e-12)


def test_gp_kernel_values():
    assert gp_kernel(np.array(0.0), 3.0, 2.0) == 1.0
    assert abs(gp_kernel(np.array(3.0), 3.0, 2.0) - np.exp(-1.0)) < 1e-15


def test_gp_kernel_matrix_properties():
    grid = GridSpec(5, 5)
    pts = grid_centroids(grid)
    d = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))
    k = gp_kernel(d, 3.0, 2.0)
    np.testing.assert_allclose(k, k.T)
    np.testing.assert_allclose(np.diag(k), 1.0)
    assert k.min() > 0 and k.max() <= 1.0


def test_gp_single_class_degenerate():
    grid = GridSpec(3, 3)
    x = substream(9, 6009).standard_normal((9, 1))
    labels = gp_mixture_sample(grid, x, GpSpec(beta=np.zeros((1, 1))), substream(9, 6010))
    assert np.all(labels == 0)


def test_gp_short_length_matches_independent_argmax_probabilities():
    # With length -> 0 the latent fields are independent normals, so class
    # frequencies follow the argmax law of mean-shifted independent normals.
    grid = GridSpec(60, 60)
    n = grid.n_sites
    rng = substream(10, 6011)
    x = np.column_stack([rng.normal(0, 2, n), rng.normal(1, 3, n)])
    beta = np.array([[0.0, -0.5, 2.0], [0.0, 1.0, -1.0]])
    spec = GpSpec(beta=beta, length=1e-6, exponent=2.0)
    labels = gp_mixture_sample(grid, x, spec, substream(10, 6012))
    freq = np.bincount(labels, minlength=3) / n

    # brute-force Monte Carlo of the trivariate argmax probability
    mc = substream(10, 6013)
    m = 200_000
    idx = mc.integers(0, n, m)
    z = x[idx] @ beta + mc.standard_normal((m, 3))
    ref = np.bincount(np.argmax(z, axis=1), minlength=3) / m
    assert np.all(np.abs(freq - ref) < 4 * np.sqrt(ref * (1 - ref) * (1 / n + 1 / m)))


def test_gp_deterministic():
    grid = GridSpec(6, 6)
    x = substream(11, 6014).standard_normal((36, 2))
    spec = GpSpec(beta=np.array([[0.0, 1.0], [0.0, -1.0]]), length=2.0)
    a = gp_mixture_sample(grid, x, spec, substream(11, 6015))
    b = gp_mixture_sample(grid, x, spec, substream(11, 6015))
    assert np.array_equal(a, b)


def test_categorical_rows_prefix_rule():
    probs = np.array([[0.25, 0.5, 0.25]])
    # u below the first prefix sum picks class 0, just above picks class 1

    class FakeRng:
        def __init__(self, u):
            self.u = u

        def random(self, n):
            return np.full(n, self.u)

    assert categorical_rows(probs, FakeRng(0.2499)).tolist() == [0]
    assert categorical_rows(probs, FakeRng(0.2501)).tolist() == [1]
    assert categorical_rows(probs, FakeRng(0.9999)).tolist() == [2]
