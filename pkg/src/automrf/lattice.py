"""Neighborhood structures over regular grids and arbitrary site sets.

Sites are indexed 0..n-1; grids use row-major ordering (site = row*cols + col).
Graphs are immutable after construction and safe for concurrent reads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

_CONNECTIVITIES = ("rook", "queen")


@dataclass(frozen=True)
class GridSpec:
    """Regular lattice: ``rows x cols`` sites with rook (4) or queen (8) neighbors."""

    rows: int
    cols: int
    connectivity: str = "rook"

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.rows}x{self.cols}")
        if self.connectivity not in _CONNECTIVITIES:
            raise ValueError(f"connectivity must be one of {_CONNECTIVITIES}")

    @property
    def n_sites(self) -> int:
        return self.rows * self.cols


@dataclass(frozen=True)
class NeighborhoodGraph:
    """Symmetric, irreflexive adjacency stored in CSR form.

    ``indptr``/``indices`` give each site's sorted neighbor list;
    ``edges`` lists each unordered pair once with ``i < j``.
    """

    n_sites: int
    indptr: np.ndarray
    indices: np.ndarray
    edges: np.ndarray  # (edge_count, 2), i < j
    _coloring: np.ndarray | None = field(default=None, compare=False, repr=False)

    @property
    def edge_count(self) -> int:
        return self.edges.shape[0]

    def neighbors(self, i: int) -> np.ndarray:
        if not 0 <= i < self.n_sites:
            raise IndexError(f"site {i} out of range [0, {self.n_sites})")
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    @property
    def adjacency(self) -> list[np.ndarray]:
        return [self.neighbors(i) for i in range(self.n_sites)]

    def degrees(self) -> np.ndarray:
        """Neighbor count per site (the diagonal of the degree matrix)."""
        return np.diff(self.indptr)

    def adjacency_matrix(self) -> np.ndarray:
        """Dense 0/1 adjacency indicator matrix."""
        a = np.zeros((self.n_sites, self.n_sites))
        a[self.edges[:, 0], self.edges[:, 1]] = 1.0
        a[self.edges[:, 1], self.edges[:, 0]] = 1.0
        return a

    def coloring(self) -> np.ndarray:
        """Greedy proper coloring; same-color sites are mutually non-adjacent.

        Rook grids get the classic 2-color checkerboard.  Cached.
        """
        if self._coloring is None:
            colors = np.full(self.n_sites, -1, dtype=np.int64)
            for i in range(self.n_sites):
                used = {colors[j] for j in self.neighbors(i) if colors[j] >= 0}
                c = 0
                while c in used:
                    c += 1
                colors[i] = c
            object.__setattr__(self, "_coloring", colors)
        return self._coloring

    @classmethod
    def from_edges(cls, pairs, n_sites: int | None = None) -> "NeighborhoodGraph":
        """Build from an iterable of (i, j) pairs.

        Duplicates, reversed pairs, and self-loops are dropped; ``n_sites``
        defaults to ``max index + 1``.
        """
        seen = set()
        for i, j in pairs:
            i, j = int(i), int(j)
            if i == j:
                continue
            seen.add((min(i, j), max(i, j)))
        if seen:
            edges = np.array(sorted(seen), dtype=np.int64)
            max_idx = int(edges.max())
        else:
            edges = np.zeros((0, 2), dtype=np.int64)
            max_idx = -1
        if n_sites is None:
            n_sites = max_idx + 1
        elif max_idx >= n_sites:
            raise ValueError(f"edge references site {max_idx} but n_sites={n_sites}")
        n_sites = int(n_sites)

        both = np.concatenate([edges, edges[:, ::-1]]) if len(edges) else edges
        counts = np.bincount(both[:, 0], minlength=n_sites) if len(both) else np.zeros(n_sites, dtype=np.int64)
        indptr = np.zeros(n_sites + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        indices = np.zeros(len(both), dtype=np.int64)
        if len(both):
            order = np.lexsort((both[:, 1], both[:, 0]))
            indices = both[order, 1].astype(np.int64)
        return cls(n_sites=n_sites, indptr=indptr, indices=indices, edges=edges)


def build_regular_grid(spec: GridSpec) -> NeighborhoodGraph:
    """Neighborhood graph of a regular grid in row-major site order."""
    rows, cols = spec.rows, spec.cols
    pairs = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                pairs.append((i, i + 1))
            if r + 1 < rows:
                pairs.append((i, i + cols))
            if spec.connectivity == "queen":
                if r + 1 < rows and c + 1 < cols:
                    pairs.append((i, i + cols + 1))
                if r + 1 < rows and c - 1 >= 0:
                    pairs.append((i, i + cols - 1))
    return NeighborhoodGraph.from_edges(pairs, n_sites=rows * cols)


def neighbor_class_counts(graph: NeighborhoodGraph, y: np.ndarray, i: int, n_classes: int) -> np.ndarray:
    """Count, for site ``i``, how many neighbors hold each class 0..K-1."""
    nbrs = graph.neighbors(i)
    counts = np.zeros(n_classes, dtype=np.int64)
    for j in nbrs:
        counts[y[j]] += 1
    return counts


def read_edge_list(path: str | Path, n_sites: int | None = None) -> NeighborhoodGraph:
    """Parse the edge-list text format: one ``i j`` pair per line, 0-based."""
    pairs = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'i j', got {line!r}")
        pairs.append((int(parts[0]), int(parts[1])))
    return NeighborhoodGraph.from_edges(pairs, n_sites=n_sites)


def write_edge_list(graph: NeighborhoodGraph, path: str | Path) -> None:
    lines = [f"{i} {j}" for i, j in graph.edges]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))
