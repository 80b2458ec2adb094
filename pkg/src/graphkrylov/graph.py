"""Graphs, graph Laplacians and counted sparse block products."""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.sparse
import scipy.sparse.csgraph
import scipy.spatial

from . import _backend
from .errors import DimensionMismatch, DuplicateNode, GraphFormatError, IndexOutOfRange

LAPLACIAN_KINDS = ("standard", "normalized")


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph with positive edge weights.

    Edges are stored once each with ``i < j``.
    """

    n: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    coords: Optional[np.ndarray] = None

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        cols = np.asarray(self.cols, dtype=np.int64)
        w = np.asarray(self.weights, dtype=np.float64)
        if not (rows.shape == cols.shape == w.shape):
            raise GraphFormatError("edge arrays differ in length")
        if rows.size:
            if min(rows.min(), cols.min()) < 0 or max(rows.max(), cols.max()) >= self.n:
                raise IndexOutOfRange("edge endpoint outside 0..n-1")
            if np.any(rows == cols):
                raise GraphFormatError("self-loops are not allowed in a simple graph")
            if np.any(~(w > 0)) or not np.all(np.isfinite(w)):
                raise GraphFormatError("edge weights must be positive and finite")
        lo, hi = np.minimum(rows, cols), np.maximum(rows, cols)
        order = np.lexsort((hi, lo))
        lo, hi, w = lo[order], hi[order], w[order]
        if lo.size > 1 and np.any((lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])):
            raise GraphFormatError("duplicate undirected edge")
        object.__setattr__(self, "rows", lo)
        object.__setattr__(self, "cols", hi)
        object.__setattr__(self, "weights", w)

    @property
    def edge_count(self):
        return int(self.rows.size)

    def adjacency(self):
        A = scipy.sparse.coo_matrix((self.weights, (self.rows, self.cols)),
                                    shape=(self.n, self.n))
        return (A + A.T).tocsr()

    def degrees(self):
        return np.asarray(self.adjacency().sum(axis=1)).ravel()

    def components(self):
        """Number of connected components and the component label per node."""
        return scipy.sparse.csgraph.connected_components(self.adjacency(), directed=False)


@dataclass
class OpCounters:
    """Tallies of length-n vector operations (one MV = one column product)."""

    mv: int = 0
    dot: int = 0
    axpy: int = 0
    eig_work: int = 0

    def snapshot(self):
        return {"mv": self.mv, "dot": self.dot, "axpy": self.axpy, "eig_work": self.eig_work}


@dataclass(frozen=True, eq=False)
class SparseSymMatrix:
    """Symmetric matrix in CSR form; immutable once built."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    kind: str = "standard"
    _scipy: scipy.sparse.csr_matrix = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "indptr", np.ascontiguousarray(self.indptr, dtype=np.int64))
        object.__setattr__(self, "indices", np.ascontiguousarray(self.indices, dtype=np.int64))
        object.__setattr__(self, "data", np.ascontiguousarray(self.data, dtype=np.float64))
        object.__setattr__(self, "_scipy", scipy.sparse.csr_matrix(
            (self.data, self.indices, self.indptr), shape=(self.n, self.n)))

    @classmethod
    def from_scipy(cls, A, kind="standard"):
        A = scipy.sparse.csr_matrix(A)
        A.sort_indices()
        return cls(A.shape[0], A.indptr, A.indices, A.data, kind)

    def to_scipy(self):
        return self._scipy.copy()

    def to_dense(self):
        return self._scipy.toarray()

    @property
    def nnz(self):
        return int(self.data.size)

    @cached_property
    def gershgorin(self):
        if self.n == 0 or self.nnz == 0:
            return 0.0
        return float(np.abs(self._scipy).sum(axis=1).max())

    @property
    def spectral_bound(self):
        return spectral_upper_bound(self)

    def matmat(self, X):
        """Uncounted ``L @ X``; prefer :func:`spmv_block` inside algorithms."""
        X = np.ascontiguousarray(X, dtype=np.float64)
        return _backend.kernels.csr_matmat(self.indptr, self.indices, self.data, X)


def _as_block(X, n):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] != n:
        raise DimensionMismatch(f"block of shape {X.shape} does not match n={n}")
    return np.ascontiguousarray(X)


def spmv_block(L, X, counters=None):
    """``L @ X`` for an ``n x N`` block; adds ``N`` to ``counters.mv``."""
    X = _as_block(X, L.n)
    if counters is not None:
        counters.mv += X.shape[1]
    return L.matmat(X)


def path_graph(n):
    if n < 1:
        raise ValueError("path graph needs n >= 1")
    i = np.arange(n - 1)
    return Graph(n, i, i + 1, np.ones(n - 1))


def proximity_graph(points, radius):
    """Unit-weight edge between every pair of points closer than ``radius``."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise GraphFormatError("points must be an (n, 2) array")
    pairs = scipy.spatial.cKDTree(pts).query_pairs(radius, output_type="ndarray")
    if pairs.size:
        dist = np.linalg.norm(pts[pairs[:, 0]] - pts[pairs[:, 1]], axis=1)
        pairs = pairs[dist < radius]
    else:
        pairs = np.zeros((0, 2), dtype=np.int64)
    return Graph(len(pts), pairs[:, 0], pairs[:, 1], np.ones(len(pairs)), coords=pts)


def build_laplacian(g, kind="standard"):
    """Standard ``D - A`` or normalized ``D^-1/2 (D - A) D^-1/2`` Laplacian.

    Isolated nodes give an all-zero row and column in the normalized form.
    """
    if kind not in LAPLACIAN_KINDS:
        raise ValueError(f"unsupported Laplacian kind {kind!r}; choose from {LAPLACIAN_KINDS}")
    A = g.adjacency()
    deg = np.asarray(A.sum(axis=1)).ravel()
    if kind == "normalized":
        # entries -w_ij / sqrt(d_i d_j): a symmetric formula, so L is exactly symmetric
        A = A.tocoo()
        off = A.data / np.sqrt(deg[A.row] * deg[A.col])
        A = scipy.sparse.csr_matrix((off, (A.row, A.col)), shape=A.shape)
        diag = (deg > 0).astype(np.float64)
    else:
        diag = deg
    L = scipy.sparse.csr_matrix(scipy.sparse.diags(diag) - A)
    L.eliminate_zeros()
    return SparseSymMatrix.from_scipy(L, kind)


def spectral_upper_bound(L, kind=None):
    """Upper bound on the largest eigenvalue: 2 for normalized Laplacians, else Gershgorin."""
    kind = L.kind if kind is None else kind
    if kind == "normalized":
        return 2.0
    return L.gershgorin


def unit_block(W, n):
    """``E_W``: column ``i`` is the canonical basis vector of node ``W[i]``."""
    W = [int(w) for w in W]
    if len(W) == 0:
        raise ValueError("node list is empty")
    if len(set(W)) != len(W):
        raise DuplicateNode(f"duplicate node in {W}")
    if min(W) < 0 or max(W) >= n:
        raise IndexOutOfRange(f"node index outside 0..{n - 1}")
    E = np.zeros((n, len(W)))
    E[W, np.arange(len(W))] = 1.0
    return E


def read_edge_list(path, n=None):
    """Parse ``i j [w]`` lines (0-based, ``#`` comments).

    ``n`` defaults to a ``# nodes N`` header line if present, else to the
    largest index + 1.
    """
    rows, cols, ws = [], [], []
    header_n = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            head = raw.strip().split()
            if len(head) == 3 and head[:2] == ["#", "nodes"] and head[2].isdigit():
                header_n = int(head[2])
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise GraphFormatError(f"{path}:{lineno}: expected 'i j [w]'")
            try:
                rows.append(int(parts[0]))
                cols.append(int(parts[1]))
                ws.append(float(parts[2]) if len(parts) == 3 else 1.0)
            except ValueError as exc:
                raise GraphFormatError(f"{path}:{lineno}: {exc}") from None
    if n is None:
        n = header_n if header_n is not None else (max(rows + cols) + 1 if rows else 0)
    return Graph(n, np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64),
                 np.array(ws))


def write_edge_list(g, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# nodes {g.n}\n")
        for i, j, w in zip(g.rows, g.cols, g.weights):
            fh.write(f"{i} {j} {w:.17g}\n")


def read_points(path):
    pts = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            try:
                pts.append((float(parts[0]), float(parts[1])))
            except (ValueError, IndexError):
                if lineno == 1:  # header row
                    continue
                raise GraphFormatError(f"{path}:{lineno}: expected 'x,y'") from None
    return np.array(pts, dtype=np.float64).reshape(-1, 2)


def write_points(points, path):
    with open(path, "w", encoding="utf-8") as fh:
        for x, y in points:
            fh.write(f"{x:.17g},{y:.17g}\n")
