import numpy as np
import pytest

from automrf import DesignMatrix, GridSpec, ModelSpec, Params, build_regular_grid
from automrf.rng import substream


@pytest.fixture
def rook_2x2():
    return build_regular_grid(GridSpec(2, 2))


@pytest.fixture
def rook_3x3():
    return build_regular_grid(GridSpec(3, 3))


def intercept_model(rows, cols, n_classes, connectivity="rook"):
    grid = GridSpec(rows, cols, connectivity)
    graph = build_regular_grid(grid)
    return ModelSpec(n_classes, graph, DesignMatrix.intercept_only(graph.n_sites))


def random_model(rows, cols, n_classes, p, seed):
    grid = GridSpec(rows, cols)
    graph = build_regular_grid(grid)
    rng = substream(seed, 1000)
    design = DesignMatrix(rng.standard_normal((graph.n_sites, p)))
    return ModelSpec(n_classes, graph, design)


def random_params(spec, seed, scale=0.5):
    rng = substream(seed, 1001)
    beta = scale * rng.standard_normal((spec.p, spec.n_classes - 1))
    return Params(beta, float(scale * rng.standard_normal()))


def random_labels(spec, seed):
    rng = substream(seed, 1002)
    return rng.integers(0, spec.n_classes, spec.n_sites).astype(np.int32)
