"""Point-observation ingestion and majority-vote grid aggregation.

Scattered observation points (coordinates, raw class, covariates) are
recoded to 1..K classes and summarized on a regular grid: each cell takes
the majority class of its points (ties to the lowest class index) and the
per-covariate mean.  Binning is half-open [edge, next_edge) with the last
row/column closed, so every in-bounds point lands in exactly one cell;
out-of-bounds points are dropped.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyCellsError, UnmappedClassError
from .model import DesignMatrix


@dataclass(frozen=True)
class PointRecord:
    x: float
    y: float
    class_raw: str
    covariates: tuple[float, ...]


@dataclass(frozen=True)
class AggregationSpec:
    """Grid bounds and shape plus the raw-label -> 1..K recoding map."""

    bounds: tuple[float, float, float, float]  # xmin, xmax, ymin, ymax
    rows: int
    cols: int
    class_mapping: dict[str, int]
    standardize: bool = False

    def __post_init__(self):
        xmin, xmax, ymin, ymax = self.bounds
        if not (xmin < xmax and ymin < ymax):
            raise ValueError("bounds must satisfy xmin < xmax and ymin < ymax")
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid must be at least 1x1")
        ks = set(self.class_mapping.values())
        if not ks or any(not isinstance(k, int) or k < 1 for k in ks):
            raise ValueError("class_mapping values must be integer classes >= 1")

    @property
    def n_classes(self) -> int:
        return max(self.class_mapping.values())


@dataclass
class AggregationResult:
    labels: np.ndarray  # 0-based cell classes, row-major
    design: DesignMatrix
    cell_counts: np.ndarray
    standardization: dict | None


def recode_classes(points: list[PointRecord], mapping: dict[str, str | int]) -> list[PointRecord]:
    """Replace each raw class by its mapped value; error on unmapped labels."""
    out = []
    for row, pt in enumerate(points):
        if pt.class_raw not in mapping:
            raise UnmappedClassError(pt.class_raw, row)
        out.append(PointRecord(pt.x, pt.y, str(mapping[pt.class_raw]), pt.covariates))
    return out


def _bin_index(v: np.ndarray, lo: float, hi: float, n_bins: int) -> np.ndarray:
    idx = np.floor((v - lo) / (hi - lo) * n_bins).astype(np.int64)
    return np.minimum(idx, n_bins - 1)  # close the last bin at hi


def aggregate(points: list[PointRecord], spec: AggregationSpec) -> AggregationResult:
    """Majority class and covariate means per grid cell.

    Cells are row-major with row 0 at ymin.  Raises
    :class:`EmptyCellsError` listing any cell that received no point.
    """
    if not points:
        raise ValueError("no points to aggregate")
    n_cov = len(points[0].covariates)
    xs = np.array([p.x for p in points])
    ys = np.array([p.y for p in points])
    covs = np.array([p.covariates for p in points], dtype=np.float64).reshape(len(points), n_cov)
    classes = np.empty(len(points), dtype=np.int64)
    for row, p in enumerate(points):
        if p.class_raw not in spec.class_mapping:
            raise UnmappedClassError(p.class_raw, row)
        classes[row] = spec.class_mapping[p.class_raw] - 1

    xmin, xmax, ymin, ymax = spec.bounds
    inside = (xs >= xmin) & (xs <= xmax) & (ys >= ymin) & (ys <= ymax)
    xs, ys, covs, classes = xs[inside], ys[inside], covs[inside], classes[inside]

    rows_idx = _bin_index(ys, ymin, ymax, spec.rows)
    cols_idx = _bin_index(xs, xmin, xmax, spec.cols)
    cell = rows_idx * spec.cols + cols_idx
    n_cells = spec.rows * spec.cols
    k_count = spec.n_classes

    counts = np.bincount(cell, minlength=n_cells).astype(np.int64)
    if np.any(counts == 0):
        empty = [(int(c // spec.cols), int(c % spec.cols)) for c in np.flatnonzero(counts == 0)]
        raise EmptyCellsError(empty)

    class_counts = np.zeros((n_cells, k_count), dtype=np.int64)
    np.add.at(class_counts, (cell, classes), 1)
    labels = np.argmax(class_counts, axis=1).astype(np.int32)  # ties -> lowest class

    cov_sums = np.zeros((n_cells, n_cov))
    np.add.at(cov_sums, cell, covs)
    cov_means = cov_sums / counts[:, None]

    standardization = None
    if spec.standardize and n_cov:
        mu = cov_means.mean(axis=0)
        sd = cov_means.std(axis=0, ddof=0)
        if np.any(sd == 0):
            raise ValueError("cannot standardize a constant covariate column")
        cov_means = (cov_means - mu) / sd
        standardization = {"mean": mu.tolist(), "sd": sd.tolist()}

    design = DesignMatrix(cov_means, tuple(f"x{j + 1}" for j in range(n_cov)))
    return AggregationResult(
        labels=labels, design=design, cell_counts=counts, standardization=standardization
    )


def read_points_csv(path: str | Path) -> tuple[list[PointRecord], list[str]]:
    """Read ``x,y,class,<covariate columns...>`` with a header row."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if len(header) < 3 or header[0] != "x" or header[1] != "y" or header[2] != "class":
            raise ValueError(f"{path}: expected header starting with x,y,class")
        cov_names = header[3:]
        points = []
        for parts in reader:
            if not parts:
                continue
            points.append(
                PointRecord(
                    x=float(parts[0]),
                    y=float(parts[1]),
                    class_raw=parts[2],
                    covariates=tuple(float(v) for v in parts[3:]),
                )
            )
    return points, cov_names


def write_points_csv(path: str | Path, points: list[PointRecord], cov_names: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "class"] + list(cov_names))
        for p in points:
            writer.writerow([repr(p.x), repr(p.y), p.class_raw] + [repr(v) for v in p.covariates])
