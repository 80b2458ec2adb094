import numpy as np
import pytest
import scipy.sparse

from graphkrylov import OpCounters, SparseSymMatrix, spmv_block, unit_block
from graphkrylov.errors import DuplicateNode, GraphFormatError, GraphKrylovError, IndexOutOfRange
from graphkrylov.graph import (Graph, build_laplacian, path_graph, proximity_graph,
                               read_edge_list, read_points, spectral_upper_bound,
                               write_edge_list, write_points)

from conftest import random_graph


def test_path_graph_edges():
    assert path_graph(201).edge_count == 200
    assert path_graph(1).edge_count == 0
    g = path_graph(3)
    assert list(zip(g.rows.tolist(), g.cols.tolist())) == [(0, 1), (1, 2)]


def test_proximity_graph_strict_radius():
    assert proximity_graph(np.array([[0.0, 0.0], [0.005, 0.0]]), 0.01).edge_count == 1
    assert proximity_graph(np.array([[0.0, 0.0], [0.02, 0.0]]), 0.01).edge_count == 0
    # distance exactly equal to the radius is not an edge
    assert proximity_graph(np.array([[0.0, 0.0], [0.5, 0.0]]), 0.5).edge_count == 0


def test_proximity_graph_matches_pairwise_oracle():
    pts = np.random.default_rng(1).random((150, 2))
    g = proximity_graph(pts, 0.1)
    D = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    iu, ju = np.triu_indices(150, 1)
    expected = {(i, j) for i, j in zip(iu, ju) if D[i, j] < 0.1}
    assert set(zip(g.rows.tolist(), g.cols.tolist())) == expected


def test_graph_validation():
    with pytest.raises(GraphKrylovError):
        Graph(3, np.array([0]), np.array([0]), np.array([1.0]))  # loop
    with pytest.raises(ValueError):
        Graph(3, np.array([0, 1]), np.array([1, 0]), np.array([1.0, 1.0]))  # duplicate
    with pytest.raises(IndexOutOfRange):
        Graph(2, np.array([0]), np.array([2]), np.array([1.0]))
    with pytest.raises(ValueError):
        Graph(2, np.array([0]), np.array([1]), np.array([-1.0]))


def test_laplacian_examples():
    L = build_laplacian(path_graph(3), "standard")
    assert np.array_equal(L.to_dense(), [[1, -1, 0], [-1, 2, -1], [0, -1, 1]])
    for kind in ("standard", "normalized"):
        assert np.array_equal(build_laplacian(path_graph(1), kind).to_dense(), [[0.0]])
    Ln = build_laplacian(path_graph(3), "normalized").to_dense()
    s = 1 / np.sqrt(2)
    assert np.allclose(Ln, [[1, -s, 0], [-s, 1, -s], [0, -s, 1]])
    with pytest.raises(ValueError):
        build_laplacian(path_graph(3), "signless")


def test_normalized_isolated_node_gives_zero_row():
    g = Graph(3, np.array([0]), np.array([1]), np.array([1.0]))
    L = build_laplacian(g, "normalized").to_dense()
    assert np.all(L[2] == 0) and np.all(L[:, 2] == 0)


@pytest.mark.parametrize("kind", ["standard", "normalized"])
def test_laplacian_is_psd_and_bounded(kind):
    rng = np.random.default_rng(11)
    g = random_graph(rng, 60, weighted=True)
    L = build_laplacian(g, kind)
    A = L.to_dense()
    assert np.array_equal(A, A.T)
    w = np.linalg.eigvalsh(A)
    assert w.min() >= -1e-12
    assert w.max() <= L.spectral_bound + 1e-12
    off = A - np.diag(np.diag(A))
    assert np.all(off <= 0)


def test_spectral_bound_examples():
    assert spectral_upper_bound(build_laplacian(path_graph(5), "normalized")) == 2.0
    # path: max row sum |1| + |-1| + ... = 4
    assert spectral_upper_bound(build_laplacian(path_graph(5), "standard")) == 4.0


def test_spmv_counts_and_matches_dense():
    rng = np.random.default_rng(2)
    L = build_laplacian(random_graph(rng, 40), "standard")
    X = rng.standard_normal((40, 3))
    c = OpCounters()
    Y = spmv_block(L, X, c)
    assert np.allclose(Y, L.to_dense() @ X, atol=1e-13)
    assert c.mv == 3
    spmv_block(L, X[:, 0], c)
    assert c.mv == 4


def test_from_scipy_round_trip():
    A = scipy.sparse.random(20, 20, density=0.2, random_state=0)
    A = (A + A.T).tocsr()
    M = SparseSymMatrix.from_scipy(A)
    assert np.allclose(M.to_dense(), A.toarray())
    assert M.nnz == A.nnz


def test_unit_block():
    E = unit_block([2, 0], 3)
    assert np.array_equal(E, [[0, 1], [0, 0], [1, 0]])
    with pytest.raises(DuplicateNode):
        unit_block([1, 1], 3)
    with pytest.raises(IndexOutOfRange):
        unit_block([3], 3)


def test_edge_list_round_trip(tmp_path):
    rng = np.random.default_rng(4)
    g = random_graph(rng, 30, weighted=True)
    g = Graph(32, g.rows, g.cols, g.weights)  # two trailing isolated nodes
    path = tmp_path / "g.txt"
    write_edge_list(g, path)
    h = read_edge_list(path)
    assert h.n == 32
    assert np.array_equal(h.rows, g.rows) and np.array_equal(h.cols, g.cols)
    assert np.array_equal(h.weights, g.weights)


def test_edge_list_parsing(tmp_path):
    path = tmp_path / "e.txt"
    path.write_text("# comment\n0 1\n1 2 0.5  # trailing\n\n")
    g = read_edge_list(path)
    assert g.n == 3 and g.edge_count == 2 and g.weights.tolist() == [1.0, 0.5]
    path.write_text("0 1 2 3\n")
    with pytest.raises(GraphFormatError):
        read_edge_list(path)
    path.write_text("0 x\n")
    with pytest.raises(GraphFormatError):
        read_edge_list(path)


def test_points_round_trip(tmp_path):
    pts = np.random.default_rng(0).random((10, 2))
    path = tmp_path / "p.csv"
    write_points(pts, path)
    assert np.array_equal(read_points(path), pts)
    path.write_text("x,y\n0.1,0.2\n")
    assert read_points(path).tolist() == [[0.1, 0.2]]
    path.write_text("0.1,0.2\nbad\n")
    with pytest.raises(GraphFormatError):
        read_points(path)


def test_counters_snapshot_is_independent():
    c = OpCounters()
    c.mv += 2
    s = c.snapshot()
    c.mv += 1
    assert s["mv"] == 2 and c.mv == 3


def test_components():
    g = Graph(4, np.array([0, 2]), np.array([1, 3]), np.array([1.0, 1.0]))
    assert g.components()[0] == 2
