"""Regularized least-squares kernel predictors, exact and Krylov-approximate."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import lanczos, linalg
from .errors import DomainError, GraphFormatError, NonInvertibleCollocation, Singular
from .graph import OpCounters, unit_block
from .kernels import SpectralOracle
from .methods import approximate_block


@dataclass(frozen=True)
class TrainingSet:
    nodes: tuple
    labels: np.ndarray
    gamma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(int(w) for w in self.nodes))
        labels = np.asarray(self.labels, dtype=np.float64).ravel()
        object.__setattr__(self, "labels", labels)
        if len(self.nodes) == 0 or len(self.nodes) != labels.size:
            raise ValueError("need one label per training node (N >= 1)")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("training nodes must be distinct")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")

    @property
    def N(self):
        return len(self.nodes)


@dataclass
class Predictor:
    method: str
    m: Optional[int]
    gamma: float
    coefficients: np.ndarray
    signal: np.ndarray
    nodes: tuple
    labels: np.ndarray
    counters: Optional[OpCounters] = None

    @property
    def residual_at_W(self):
        return float(np.max(np.abs(self.signal[list(self.nodes)] - self.labels)))

    def to_json(self):
        return {
            "method": self.method,
            "m": self.m,
            "gamma": self.gamma,
            "coefficients": self.coefficients.tolist(),
            "signal": self.signal.tolist(),
            "residual_at_W": self.residual_at_W,
        }


def rls_coefficients(K, gamma, y):
    """Solve ``(K + gamma N I) c = y``."""
    K = np.asarray(K, dtype=np.float64)
    N = K.shape[0]
    try:
        return linalg.solve_linear(K + gamma * N * np.eye(N), np.asarray(y, dtype=np.float64))
    except Singular as exc:
        raise NonInvertibleCollocation(str(exc)) from None


def _check_nodes(train, n):
    unit_block(train.nodes, n)


def predict_exact(L, phi, train, oracle=None):
    """Predictor built from the dense spectral oracle."""
    _check_nodes(train, L.n)
    oracle = SpectralOracle(L) if oracle is None else oracle
    K = oracle.collocation(phi, train.nodes)
    block = oracle.kernel_block(phi, train.nodes)
    c = rls_coefficients(K, train.gamma, train.labels)
    return Predictor("exact", None, train.gamma, c, block @ c, train.nodes, train.labels)


def predict_from_block(block, train, method, m, counters=None):
    """Predictor from any approximate kernel block ``p(L) E_W``."""
    K = block[list(train.nodes)]
    c = rls_coefficients(K, train.gamma, train.labels)
    return Predictor(method, m, train.gamma, c, block @ c, train.nodes, train.labels, counters)


def predict_krylov(L, phi, train, method, m, counters=None):
    """RLS predictor whose collocation matrix is ``E_W^T`` times the approximate block."""
    approx = approximate_block(method, L, train.nodes, phi, m, counters)
    return predict_from_block(approx.block, train, approx.method, m, approx.counters)


def predict_cbl_hm_only(L, phi, train, m, counters=None):
    """cbl predictor computed from ``phi(H_m) F_1`` alone.

    The collocation matrix is the leading ``N x N`` block of ``phi(H_m)``,
    which is positive definite for positive ``phi``, so the system always has
    a unique solution; the kernel block itself is never formed.
    """
    if not phi.positive:
        raise DomainError("the H_m-only predictor requires a kernel declared positive")
    _check_nodes(train, L.n)
    counters = OpCounters() if counters is None else counters
    E = unit_block(train.nodes, L.n)
    fact = lanczos.classical_block_lanczos(L, E, m, counters)
    U = lanczos.phi_H_F1(fact, phi, counters)
    K = U[: fact.N]
    c = rls_coefficients(0.5 * (K + K.T), train.gamma, train.labels)
    signal = fact.basis @ (U @ c)
    counters.axpy += fact.basis.shape[1]
    return Predictor("cbl", m, train.gamma, c, signal, train.nodes, train.labels, counters)


def classify_sign(signal):
    """Map a predictor signal to labels in {-1, +1}; exact zeros go to +1."""
    signal = signal.signal if isinstance(signal, Predictor) else np.asarray(signal)
    return np.where(signal < 0, -1, 1)


def read_labels(path):
    """Parse ``node_index,value`` lines (an optional header row is skipped)."""
    nodes, values = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            try:
                node, value = int(parts[0]), float(parts[1])
            except (ValueError, IndexError):
                if lineno == 1:
                    continue
                raise GraphFormatError(f"{path}:{lineno}: expected 'node_index,value'") from None
            nodes.append(node)
            values.append(value)
    return nodes, np.array(values)
