"""Lanczos-type block Krylov schemes for ``phi(L) E_W``.

* classical block Lanczos (cbl): orthonormal basis of the block Krylov space,
  block-tridiagonal ``H_m`` of order ``mN``;
* global block Lanczos (gbl): Frobenius-orthonormal blocks, scalar
  tridiagonal ``H_m`` of order ``m``;
* sequential Lanczos (sbl): ordinary Lanczos on every column separately.

``m`` counts Lanczos blocks, so the returned approximants are polynomials of
degree ``m - 1`` in ``L``. When the next block is numerically rank deficient
cbl deflates it (drops the dependent directions) and carries on; the scalar
schemes, and cbl once nothing is left, stop and ``effective_m`` records how
many blocks were kept: the Krylov space is then invariant and the
approximation exact.
"""
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import linalg
from .graph import OpCounters, spmv_block

RITZ_TOL = 1e-6


@dataclass
class ClassicalFactorization:
    basis: np.ndarray          # n x d, columns q_1 .. q_d (d = mN without deflation)
    H: np.ndarray              # d x d, block tridiagonal
    N: int
    requested_m: int
    effective_m: int
    upper: float               # spectral interval [0, upper] of L
    next_block: Optional[np.ndarray] = None   # Q_{m+1}
    next_coupling: Optional[np.ndarray] = None  # H_{m+1,m}
    breakdown: bool = False    # some block lost rank (deflated or truncated)
    block_sizes: tuple = ()    # widths of Q_1 .. Q_m (all N unless deflated)

    @property
    def blocks(self):
        offs = np.concatenate([[0], np.cumsum(self.block_sizes)])
        return [self.basis[:, offs[k]:offs[k + 1]] for k in range(self.effective_m)]

    def extended_H(self):
        """``H~_m`` with the trailing ``H_{m+1,m}`` block row (empty after breakdown)."""
        dim, last = self.H.shape[0], self.block_sizes[-1]
        rows = 0 if self.next_coupling is None else self.next_coupling.shape[0]
        Ht = np.zeros((dim + rows, dim))
        Ht[:dim] = self.H
        if rows:
            Ht[dim:, dim - last:] = self.next_coupling
        return Ht


@dataclass
class GlobalFactorization:
    blocks: np.ndarray         # effective_m x n x N, Frobenius-orthonormal
    alpha: np.ndarray          # h_{k,k}
    beta: np.ndarray           # h_{k+1,k}, length effective_m (last one couples to Q_{m+1})
    start_norm: float          # ||E_W||_F (sqrt(N) for unit blocks)
    requested_m: int
    effective_m: int
    upper: float
    breakdown: bool = False

    @property
    def H(self):
        m = self.effective_m
        off = self.beta[: m - 1]
        return np.diag(self.alpha) + np.diag(off, 1) + np.diag(off, -1)


@dataclass
class SequentialResult:
    block: np.ndarray
    alphas: List[np.ndarray]   # per column diagonal of H_m^{(w_i)}
    betas: List[np.ndarray]    # per column off-diagonal
    effective_m: List[int]


def _norm_scale(L):
    # ||L||_2 <= Gershgorin bound; breakdown is judged relative to it
    return max(L.gershgorin, np.finfo(float).tiny)


def _ritz_clip(w, upper):
    # Ritz values lie in [0, upper] in exact arithmetic; rounding (and loss of
    # orthogonality) can push them slightly outside
    tol = RITZ_TOL * max(1.0, upper)
    if w.size and (w[0] < -tol or w[-1] > upper + tol):
        return w
    return np.clip(w, 0.0, upper)


def _check_orthonormal(E):
    G = E.T @ E
    if np.linalg.norm(G - np.eye(E.shape[1])) > 1e-10:
        raise ValueError("starting block must have orthonormal columns")


def classical_block_lanczos(L, E, m, counters=None, reorth=False):
    """Classical block Lanczos factorization started from ``Q_1 = E``.

    Per block: ``X = L Q_k - Q_{k-1} H_{k-1,k}``, ``H_{k,k} = Q_k^T X``
    (symmetrized), ``X -= Q_k H_{k,k}``, then ``X = Q_{k+1} H_{k+1,k}`` by
    reduced QR and ``H_{k,k+1} = H_{k+1,k}^T``.
    If ``X`` is numerically rank deficient its dependent directions are
    dropped and the iteration continues with a narrower block; it stops
    early only when nothing is left (an invariant subspace).
    With ``reorth`` every new block is re-orthogonalized against the full
    basis (not part of the basic scheme; used for orthogonality studies).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    counters = OpCounters() if counters is None else counters
    E = np.ascontiguousarray(E, dtype=np.float64)
    n, N = E.shape
    _check_orthonormal(E)
    scale = _norm_scale(L)

    blocks, diag, sub = [E], [], []
    Qk, Qprev, Bprev = E, None, None
    next_block = next_coupling = None
    breakdown = False
    for k in range(1, m + 1):
        X = spmv_block(L, Qk, counters)
        b = Qk.shape[1]
        if Qprev is not None:
            X -= Qprev @ Bprev.T
            counters.axpy += b * Qprev.shape[1]
        A = Qk.T @ X
        counters.dot += b * b
        A = 0.5 * (A + A.T)
        X -= Qk @ A
        counters.axpy += b * b
        diag.append(A)
        if reorth:
            B = np.hstack(blocks)
            for _ in range(2):
                X -= B @ (B.T @ X)
            counters.dot += 2 * B.shape[1] * b
            counters.axpy += 2 * B.shape[1] * b
        Q, R, deficient = linalg.reduced_qr(X, scale=scale)
        counters.dot += b * (b + 1) // 2
        counters.axpy += b * (b + 1) // 2
        if deficient:
            breakdown = True
            Q, R = linalg.deflated_qr(X, scale=scale)
            if Q.shape[1] == 0:
                break
        if k == m:
            next_block, next_coupling = Q, R
            break
        sub.append(R)
        Qprev, Bprev, Qk = Qk, R, Q
        blocks.append(Q)

    keff = len(diag)
    sizes = [d.shape[0] for d in diag]
    offs = np.concatenate([[0], np.cumsum(sizes)])
    H = np.zeros((offs[-1], offs[-1]))
    for k in range(keff):
        H[offs[k]:offs[k + 1], offs[k]:offs[k + 1]] = diag[k]
        if k + 1 < keff:
            H[offs[k + 1]:offs[k + 2], offs[k]:offs[k + 1]] = sub[k]
            H[offs[k]:offs[k + 1], offs[k + 1]:offs[k + 2]] = sub[k].T
    return ClassicalFactorization(
        basis=np.hstack(blocks[:keff]), H=H, N=N, requested_m=m, effective_m=keff,
        upper=L.spectral_bound, next_block=next_block, next_coupling=next_coupling,
        breakdown=breakdown, block_sizes=tuple(sizes))


def phi_H_F1(fact, phi, counters=None):
    """``U = phi(H_m) F_1``: the first ``N`` columns of ``phi(H_m)``."""
    w, V = linalg.sym_eig(fact.H)
    if counters is not None:
        counters.eig_work += fact.H.shape[0] ** 3
    values = phi.evaluate(_ritz_clip(w, fact.upper), fact.upper)
    return (V * values) @ V[: fact.N].T


def cbl_approximate(fact, phi, counters=None):
    """``[Q_1 .. Q_m] phi(H_m) F_1`` as approximation of ``phi(L) E_W``."""
    U = phi_H_F1(fact, phi, counters)
    if counters is not None:
        counters.axpy += fact.basis.shape[1] * fact.N
    return fact.basis @ U


def collocation_via_Hm(fact, phi, counters=None):
    """``F_1^T phi(H_m) F_1``, the leading ``N x N`` block of ``phi(H_m)``.

    Equals ``E_W^T`` times the cbl approximant without forming it; symmetric
    positive definite whenever ``phi`` is positive on the spectral interval.
    """
    K = phi_H_F1(fact, phi, counters)[: fact.N]
    return 0.5 * (K + K.T)


def global_block_lanczos(L, E, m, counters=None, reorth=False):
    """Global block Lanczos: ordinary Lanczos on ``R^{n x N}`` with the Frobenius product."""
    if m < 1:
        raise ValueError("m must be >= 1")
    counters = OpCounters() if counters is None else counters
    E = np.ascontiguousarray(E, dtype=np.float64)
    n, N = E.shape
    start_norm = float(np.linalg.norm(E))
    if start_norm == 0.0:
        raise ValueError("starting block is zero")
    scale = _norm_scale(L)

    Qk = E / start_norm
    counters.axpy += N
    blocks, alpha, beta = [Qk], [], []
    Qprev, hprev = None, 0.0
    breakdown = False
    for k in range(1, m + 1):
        X = spmv_block(L, Qk, counters)
        if Qprev is not None:
            X -= hprev * Qprev
            counters.axpy += N
        a = float(np.vdot(Qk, X))
        counters.dot += N
        X -= a * Qk
        counters.axpy += N
        if reorth:
            for Qj in blocks:
                X -= np.vdot(Qj, X) * Qj
            counters.dot += len(blocks) * N
            counters.axpy += len(blocks) * N
        alpha.append(a)
        h = float(np.linalg.norm(X))
        counters.dot += N
        beta.append(h)
        if h < linalg.TOL_RANK * scale:
            breakdown = k < m
            break
        if k == m:
            break
        Qprev, hprev, Qk = Qk, h, X / h
        counters.axpy += N
        blocks.append(Qk)

    keff = len(alpha)
    return GlobalFactorization(
        blocks=np.array(blocks[:keff]), alpha=np.array(alpha), beta=np.array(beta),
        start_norm=start_norm, requested_m=m, effective_m=keff,
        upper=L.spectral_bound, breakdown=breakdown)


def _tridiag_phi_e1(alpha, beta, phi, upper, counters=None):
    m = len(alpha)
    w, Z = linalg.tridiag_eig(alpha, beta[: m - 1])
    if counters is not None:
        counters.eig_work += m * m
    return Z @ (phi.evaluate(_ritz_clip(w, upper), upper) * Z[0])


def gbl_approximate(fact, phi, counters=None):
    """``sum_k u_k Q_k`` with ``u = ||E_W||_F phi(H_m) f_1``."""
    u = fact.start_norm * _tridiag_phi_e1(fact.alpha, fact.beta, phi, fact.upper, counters)
    if counters is not None:
        counters.axpy += fact.effective_m * fact.blocks.shape[2]
    return np.tensordot(u, fact.blocks, axes=1)


def _lanczos_vector(L, v, m, phi, upper, scale, counters):
    # ordinary Lanczos on one column; only this column's basis is held
    beta0 = float(np.linalg.norm(v))
    q = v / beta0
    basis, alpha, beta = [q], [], []
    qprev, hprev = None, 0.0
    counters.axpy += 1
    for k in range(1, m + 1):
        x = spmv_block(L, q, counters)[:, 0]
        if qprev is not None:
            x -= hprev * qprev
            counters.axpy += 1
        a = float(q @ x)
        counters.dot += 1
        x -= a * q
        counters.axpy += 1
        alpha.append(a)
        h = float(np.linalg.norm(x))
        counters.dot += 1
        beta.append(h)
        if h < linalg.TOL_RANK * scale or k == m:
            break
        qprev, hprev, q = q, h, x / h
        counters.axpy += 1
        basis.append(q)
    alpha, beta = np.array(alpha), np.array(beta)
    u = beta0 * _tridiag_phi_e1(alpha, beta, phi, upper, counters)
    counters.axpy += len(alpha)
    return np.array(basis).T @ u, alpha, beta


def sequential_lanczos_approximate(L, E, m, phi, counters=None):
    """Column-by-column ordinary Lanczos approximation of ``phi(L) E``.

    Column ``i`` is ``[q_1 .. q_m] phi(H_m^{(i)}) f_1`` for the Lanczos process
    started at ``E[:, i]``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    counters = OpCounters() if counters is None else counters
    E = np.asarray(E, dtype=np.float64)
    scale = _norm_scale(L)
    upper = L.spectral_bound
    out = np.empty_like(E)
    alphas, betas, eff = [], [], []
    for i in range(E.shape[1]):
        out[:, i], a, b = _lanczos_vector(L, E[:, i], m, phi, upper, scale, counters)
        alphas.append(a)
        betas.append(b)
        eff.append(len(a))
    return SequentialResult(out, alphas, betas, eff)
