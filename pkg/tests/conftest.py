import numpy as np
import pytest

from graphkrylov import _backend
from graphkrylov.graph import Graph, build_laplacian, path_graph


def random_graph(rng, n, p=None, weighted=False):
    """Erdos-Renyi graph with a random spanning path so it is connected."""
    p = min(1.0, 4.0 / n) if p is None else p
    perm = rng.permutation(n)
    edges = {(min(a, b), max(a, b)) for a, b in zip(perm[:-1], perm[1:])}
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    edges |= set(zip(iu[keep].tolist(), ju[keep].tolist()))
    edges = sorted(edges)
    rows = np.array([e[0] for e in edges], dtype=np.int64)
    cols = np.array([e[1] for e in edges], dtype=np.int64)
    w = rng.uniform(0.5, 2.0, len(edges)) if weighted else np.ones(len(edges))
    return Graph(n, rows, cols, w)


def random_laplacian(rng, n, kind=None, weighted=None):
    kind = kind or ("normalized" if rng.random() < 0.5 else "standard")
    weighted = bool(rng.random() < 0.5) if weighted is None else weighted
    return build_laplacian(random_graph(rng, n, weighted=weighted), kind)


@pytest.fixture
def path201():
    return build_laplacian(path_graph(201), "normalized")


@pytest.fixture(params=_backend.available())
def backend(request):
    prev = _backend.name
    _backend.use(request.param)
    yield request.param
    _backend.use(prev)


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
