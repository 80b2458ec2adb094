"""Chebyshev-Lobatto interpolation of kernel functions and its block evaluation.

The interpolant of degree ``m`` on ``[0, Lambda]`` is written in the shifted
basis ``T_k(1 - 2 lambda / Lambda)``; its nodes ``(Lambda/2)(1 - cos(pi j/m))``
are exactly the points where that argument equals ``cos(pi j / m)``.
"""
import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .errors import DomainError, NegativePhiAtNode
from .graph import OpCounters, _as_block
from . import _backend


@dataclass(frozen=True)
class ChebCoefficients:
    coef: np.ndarray
    upper: float

    @property
    def degree(self):
        return len(self.coef) - 1


def lobatto_nodes(upper, m):
    j = np.arange(m + 1)
    return 0.5 * upper * (1.0 - np.cos(np.pi * j / m))


def cheb_coefficients(phi, upper, m):
    """Coefficients of the degree-``m`` interpolant of ``phi`` at the Lobatto nodes.

    Uses a type-I DCT of the node values; the end terms and ``c_0``, ``c_m``
    carry the factor 1/2 that makes the series interpolatory.
    """
    if m < 1:
        raise ValueError("degree must be >= 1")
    if upper <= 0:
        raise ValueError("spectral bound must be positive")
    f = phi(lobatto_nodes(upper, m))
    c = scipy.fft.dct(f, type=1) / m
    c[0] *= 0.5
    c[m] *= 0.5
    return ChebCoefficients(c, float(upper))


def constant_coefficients(value, upper):
    """Degree-0 series (no matrix products needed to apply it)."""
    return ChebCoefficients(np.array([float(value)]), float(upper))


def _clenshaw(coef, x):
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    for ck in coef[:0:-1]:
        b1, b2 = 2.0 * x * b1 - b2 + ck, b1
    return x * b1 - b2 + coef[0]


def cheb_eval_scalar(c, lam):
    """Evaluate the series at ``lam`` in ``[0, upper]`` (Clenshaw)."""
    lam = np.asarray(lam, dtype=np.float64)
    tol = 1e-8 * max(1.0, c.upper)
    if lam.size and (lam.min() < -tol or lam.max() > c.upper + tol):
        raise DomainError(f"argument outside [0, {c.upper}]")
    return _clenshaw(c.coef, 1.0 - 2.0 * lam / c.upper)


def eval_series(coef, x):
    """Evaluate ``sum_k coef[k] T_k(x)`` for ``x`` in ``[-1, 1]``."""
    return _clenshaw(np.asarray(coef, dtype=np.float64), np.asarray(x, dtype=np.float64))


def cheb_apply(L, E, c, counters=None):
    """``sum_k c_k T_k(I - (2/Lambda) L) E`` via the three-term recurrence.

    Only the two most recent recurrence blocks are kept; a degree-``m``
    series costs ``m N`` matrix-vector products.
    """
    counters = OpCounters() if counters is None else counters
    T0 = _as_block(E, L.n)
    N = T0.shape[1]
    coef = c.coef
    out = coef[0] * T0
    counters.axpy += N
    if c.degree == 0:
        return out
    alpha = 2.0 / c.upper
    T1 = T0 - alpha * L.matmat(T0)
    counters.mv += N
    counters.axpy += N
    out += coef[1] * T1
    counters.axpy += N
    step = _backend.kernels.cheb_step
    for k in range(2, c.degree + 1):
        T0, T1 = T1, step(L.indptr, L.indices, L.data, T1, T0, alpha)
        counters.mv += N
        counters.axpy += 2 * N
        out += coef[k] * T1
        counters.axpy += N
    return out


def cheb_approximate(L, E, phi, m, counters=None, upper=None):
    """Degree-``m`` Chebyshev approximation of ``phi(L) E``."""
    upper = L.spectral_bound if upper is None else upper
    return cheb_apply(L, E, cheb_coefficients(phi, upper, m), counters)


def cheb_squared_apply(L, E, phi, upper, m, counters=None):
    """``p(L) (p(L) E)`` with ``p`` the degree-``floor(m/2)`` interpolant of ``sqrt(phi)``.

    ``p(L)^2`` is positive semi-definite by construction.
    """
    half = m // 2
    if half == 0:
        # degree-0 interpolant of sqrt(phi) at the single node 0
        f0 = float(phi(np.array([0.0]))[0])
        if f0 < 0:
            raise NegativePhiAtNode("phi(0) < 0")
        c = constant_coefficients(math.sqrt(f0), upper)
    else:
        nodes = lobatto_nodes(upper, half)
        vals = phi(nodes)
        if np.any(vals < 0):
            raise NegativePhiAtNode(
                f"phi negative at Lobatto node {nodes[np.argmin(vals)]:.6g}")
        c = cheb_coefficients(phi.sqrt(), upper, half)
    counters = OpCounters() if counters is None else counters
    return cheb_apply(L, cheb_apply(L, E, c, counters), c, counters)


def cheb_squared_approximate(L, E, phi, m, counters=None, upper=None):
    upper = L.spectral_bound if upper is None else upper
    return cheb_squared_apply(L, E, phi, upper, m, counters)
