"""Graph data model: adjacency construction, self-loops, degrees, and the
symmetric normalization used by the GCN propagation rule."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp


class GraphError(ValueError):
    """Invalid graph construction input."""


def _canonical_edges(edges, n):
    """Validate, symmetrize and deduplicate an edge list into a sorted array
    of (i, j) with i < j."""
    out = set()
    for i, j in edges:
        i, j = int(i), int(j)
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"edge endpoint out of range [0, {n}): ({i}, {j})")
        if i == j:
            raise GraphError(f"self-loop not allowed: ({i}, {j})")
        out.add((min(i, j), max(i, j)))
    return sorted(out)


@dataclass(frozen=True)
class Graph:
    """Undirected graph over dense node ids [0, n) with optional node features."""

    n: int
    edges: tuple  # tuple of (i, j), i < j, sorted, deduplicated
    features: np.ndarray | None = None

    def __post_init__(self):
        canon = tuple(_canonical_edges(self.edges, self.n))
        object.__setattr__(self, "edges", canon)
        if self.features is not None:
            X = np.asarray(self.features, dtype=np.float64)
            if X.ndim != 2 or X.shape[0] != self.n:
                raise GraphError(
                    f"feature matrix must have {self.n} rows, got shape {X.shape}"
                )
            object.__setattr__(self, "features", X)

    @property
    def nodes(self):
        return range(self.n)

    @property
    def num_edges(self):
        return len(self.edges)

    def neighbors(self, v: int) -> set:
        """Nodes directly connected to v (never includes v itself)."""
        if not (0 <= v < self.n):
            raise GraphError(f"node {v} out of range [0, {self.n})")
        out = set()
        for i, j in self.edges:
            if i == v:
                out.add(j)
            elif j == v:
                out.add(i)
        return out


@dataclass(frozen=True)
class SparseAdjacency:
    """Symmetric sparse matrix in canonical (row-major sorted) COO form."""

    n: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rows, dtype=np.int64)
        c = np.asarray(self.cols, dtype=np.int64)
        v = np.asarray(self.vals, dtype=np.float64)
        order = np.lexsort((c, r))
        object.__setattr__(self, "rows", r[order])
        object.__setattr__(self, "cols", c[order])
        object.__setattr__(self, "vals", v[order])

    @classmethod
    def from_scipy(cls, m: sp.spmatrix) -> "SparseAdjacency":
        coo = sp.coo_matrix(m)
        coo.sum_duplicates()
        coo.eliminate_zeros()
        return cls(coo.shape[0], coo.row, coo.col, coo.data)

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.vals, (self.rows, self.cols)), shape=(self.n, self.n)
        )

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    @property
    def diagonal_is_zero(self) -> bool:
        return not np.any(self.rows == self.cols)


@dataclass(frozen=True)
class DegreeDiagonal:
    """Diagonal degree matrix stored as its vector of row sums."""

    n: int
    d: np.ndarray = field(default=None)

    def __post_init__(self):
        d = np.asarray(self.d, dtype=np.float64)
        if d.shape != (self.n,):
            raise GraphError(f"degree vector must have shape ({self.n},)")
        if np.any(d < 0):
            raise GraphError("negative degree")
        object.__setattr__(self, "d", d)


def build_adjacency(edges, n: int) -> SparseAdjacency:
    """Symmetric 0/1 adjacency with zero diagonal from an edge list.

    Duplicates (including reversed pairs) collapse to a single edge.
    """
    canon = _canonical_edges(edges, n)
    if not canon:
        return SparseAdjacency(n, np.empty(0, np.int64), np.empty(0, np.int64),
                               np.empty(0, np.float64))
    e = np.asarray(canon, dtype=np.int64)
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    vals = np.ones(rows.shape[0], dtype=np.float64)
    return SparseAdjacency(n, rows, cols, vals)


def adjacency_of(g: Graph) -> SparseAdjacency:
    return build_adjacency(g.edges, g.n)


def add_self_loops(a: SparseAdjacency) -> SparseAdjacency:
    """A + I. Rejects input that already carries diagonal entries."""
    if not a.diagonal_is_zero:
        raise GraphError("input already has nonzero diagonal entries")
    diag = np.arange(a.n, dtype=np.int64)
    return SparseAdjacency(
        a.n,
        np.concatenate([a.rows, diag]),
        np.concatenate([a.cols, diag]),
        np.concatenate([a.vals, np.ones(a.n)]),
    )


def degree_of(a: SparseAdjacency) -> DegreeDiagonal:
    """Row sums of a symmetric sparse matrix."""
    d = np.zeros(a.n, dtype=np.float64)
    np.add.at(d, a.rows, a.vals)
    return DegreeDiagonal(a.n, d)


def normalize_symmetric(a: SparseAdjacency, deg: DegreeDiagonal) -> SparseAdjacency:
    """D^{-1/2} A D^{-1/2} for strictly positive degrees."""
    if a.n != deg.n:
        raise GraphError("dimension mismatch between adjacency and degrees")
    if np.any(deg.d <= 0):
        raise GraphError("zero degree encountered; add self-loops first")
    inv_sqrt = 1.0 / np.sqrt(deg.d)
    vals = a.vals * inv_sqrt[a.rows] * inv_sqrt[a.cols]
    return SparseAdjacency(a.n, a.rows.copy(), a.cols.copy(), vals)


def normalized_adjacency(g: Graph) -> SparseAdjacency:
    """Self-looped, symmetrically normalized adjacency of a graph."""
    a_tilde = add_self_loops(adjacency_of(g))
    return normalize_symmetric(a_tilde, degree_of(a_tilde))


def neighbors(g: Graph, v: int) -> set:
    return g.neighbors(v)


# --- edge-list / symbol-table file formats ---

def read_edge_list(path) -> list:
    """One `src<TAB>dst` pair per line; `#` starts a comment line."""
    edges = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise GraphError(f"{path}:{lineno}: expected `src<TAB>dst`, got {line!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return edges


def write_edge_list(path, edges) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for i, j in edges:
            f.write(f"{i}\t{j}\n")


def read_symbol_table(path) -> dict:
    """`external_id<TAB>index` per line -> {external_id: index}."""
    table = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise GraphError(f"{path}:{lineno}: expected `id<TAB>index`")
        table[parts[0]] = int(parts[1])
    return table


def write_symbol_table(path, table: dict) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for name, idx in sorted(table.items(), key=lambda kv: kv[1]):
            f.write(f"{name}\t{idx}\n")
