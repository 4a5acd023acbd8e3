"""File formats: CSV tables, canonical JSON, and binary PPM rasters.

Everything here is byte-deterministic: floats are written with Python's
shortest round-trip repr, JSON keys are sorted, and PPM output is a fixed
function of (labels, palette, cell size).  Labels are 1-based on disk and
0-based in memory.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .dmh import ChainOutput
from .lattice import GridSpec
from .model import DesignMatrix

# Default class palette (RGB); index k-1 colors class k.
DEFAULT_PALETTE: tuple[tuple[int, int, int], ...] = (
    (31, 119, 180),
    (255, 127, 14),
    (44, 160, 44),
    (214, 39, 40),
    (148, 103, 189),
    (140, 86, 75),
    (227, 119, 194),
    (127, 127, 127),
)


def _fmt(v: float) -> str:
    return repr(float(v))


# ---------------------------------------------------------------- CSV


def write_arrangement_csv(path: str | Path, labels: np.ndarray, grid: GridSpec | None = None) -> None:
    """Grid arrangements get ``row,col,label``; general graphs ``site,label``."""
    labels = np.asarray(labels)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if grid is not None:
            if grid.n_sites != labels.shape[0]:
                raise ValueError("grid size does not match arrangement length")
            writer.writerow(["row", "col", "label"])
            for i, lab in enumerate(labels):
                writer.writerow([i // grid.cols, i % grid.cols, int(lab) + 1])
        else:
            writer.writerow(["site", "label"])
            for i, lab in enumerate(labels):
                writer.writerow([i, int(lab) + 1])


def read_arrangement_csv(path: str | Path) -> tuple[np.ndarray, tuple[int, int] | None]:
    """Returns (0-based labels in site order, (rows, cols) for grid files)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [r for r in reader if r]
    if header == ["row", "col", "label"]:
        rr = np.array([int(r[0]) for r in rows])
        cc = np.array([int(r[1]) for r in rows])
        labs = np.array([int(r[2]) - 1 for r in rows], dtype=np.int32)
        n_rows, n_cols = int(rr.max()) + 1, int(cc.max()) + 1
        labels = np.zeros(n_rows * n_cols, dtype=np.int32)
        labels[rr * n_cols + cc] = labs
        if len(rows) != n_rows * n_cols:
            raise ValueError(f"{path}: expected {n_rows * n_cols} cells, found {len(rows)}")
        return labels, (n_rows, n_cols)
    if header == ["site", "label"]:
        sites = np.array([int(r[0]) for r in rows])
        labs = np.array([int(r[1]) - 1 for r in rows], dtype=np.int32)
        labels = np.zeros(int(sites.max()) + 1, dtype=np.int32)
        labels[sites] = labs
        return labels, None
    raise ValueError(f"{path}: unrecognized arrangement header {header}")


def write_design_csv(path: str | Path, design: DesignMatrix) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(design.column_names)
        for row in design.values:
            writer.writerow([_fmt(v) for v in row])


def read_design_csv(path: str | Path) -> DesignMatrix:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        values = [[float(v) for v in row] for row in reader if row]
    return DesignMatrix(np.array(values, dtype=np.float64).reshape(len(values), len(header)), tuple(header))


def write_chain_csv(path: str | Path, chain: ChainOutput) -> None:
    """Header ``iter,<param names>,log_h,block_accepts``; one row per draw.

    ``block_accepts`` is the 0/1 accept flag per block for that outer
    iteration, concatenated in block order.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter"] + list(chain.param_names) + ["log_h", "block_accepts"])
        for r in range(chain.n_draws):
            row = [int(chain.iterations[r])]
            row += [_fmt(v) for v in chain.draws[r]]
            row.append(_fmt(chain.log_h[r]))
            row.append("".join(str(int(f)) for f in chain.accept_flags[r]))
            writer.writerow(row)


def read_chain_csv(path: str | Path) -> dict:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [r for r in reader if r]
    if header[0] != "iter" or header[-2:] != ["log_h", "block_accepts"]:
        raise ValueError(f"{path}: unrecognized chain header")
    names = header[1:-2]
    draws = np.array([[float(v) for v in r[1:-2]] for r in rows]).reshape(len(rows), len(names))
    return {
        "param_names": names,
        "iterations": np.array([int(r[0]) for r in rows], dtype=np.int64),
        "draws": draws,
        "log_h": np.array([float(r[-2]) for r in rows]),
        "accept_flags": np.array([[int(c) for c in r[-1]] for r in rows], dtype=np.uint8)
        if rows
        else np.zeros((0, 0), dtype=np.uint8),
    }


# ---------------------------------------------------------------- JSON


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path: str | Path, obj) -> None:
    Path(path).write_text(canonical_json(obj))


def sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------- PPM


def render_ppm(
    labels: np.ndarray,
    grid: GridSpec,
    palette: tuple[tuple[int, int, int], ...] = DEFAULT_PALETTE,
    cell_px: int = 8,
) -> bytes:
    """Binary PPM (P6) raster of a grid arrangement, cell_px pixels per cell."""
    labels = np.asarray(labels)
    if labels.shape[0] != grid.n_sites:
        raise ValueError("grid size does not match arrangement length")
    n_classes = int(labels.max()) + 1 if labels.size else 1
    if n_classes > len(palette):
        raise ValueError(f"palette has {len(palette)} colors but needs {n_classes}")
    if cell_px < 1:
        raise ValueError("cell_px must be >= 1")
    img = np.array(palette, dtype=np.uint8)[labels.reshape(grid.rows, grid.cols)]
    img = np.repeat(np.repeat(img, cell_px, axis=0), cell_px, axis=1)
    header = f"P6\n{grid.cols * cell_px} {grid.rows * cell_px}\n255\n".encode()
    return header + img.tobytes()


def write_ppm(path: str | Path, labels, grid, palette=DEFAULT_PALETTE, cell_px: int = 8) -> None:
    Path(path).write_bytes(render_ppm(labels, grid, palette, cell_px))
