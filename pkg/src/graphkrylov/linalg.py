"""Small dense linear algebra used by all approximation schemes.

All routines are pure functions of numpy arrays. LAPACK (through numpy and
scipy) does the factorizations; this module adds the sign conventions,
rank/singularity reporting and domain checks the Krylov methods rely on.
"""
import warnings
from typing import NamedTuple

import numpy as np
import scipy.linalg

from . import _backend
from .errors import DomainError, NotSymmetric, Singular, SizeExceeded

TOL_QR = 1e-12
TOL_EIG = 1e-12
TOL_RANK = 1e-10
TOL_SYM = 1e-12
GENERAL_EIG_MAX = 128


class QRResult(NamedTuple):
    Q: np.ndarray
    R: np.ndarray
    deficient: bool


class SymEig(NamedTuple):
    """Ascending eigenvalues and orthonormal eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def reduced_qr(X, scale=None):
    """Reduced Householder QR with non-negative ``diag(R)``.

    Parameters
    ----------
    X : (n, N) array with ``n >= N >= 1``
    scale : float, optional
        Reference magnitude for the rank test. Defaults to ``||X||_F``; the
        larger of the two is used when given, so that a block which is pure
        rounding noise relative to ``scale`` is reported as deficient.

    Returns
    -------
    QRResult
        ``deficient`` is True when some ``|R_ii| < TOL_RANK * scale``. Rank
        deficiency is reported, never raised.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < X.shape[1] or X.shape[1] < 1:
        raise ValueError(f"reduced_qr needs n >= N >= 1, got shape {X.shape}")
    Q, R = np.linalg.qr(X, mode="reduced")
    signs = np.where(np.diag(R) < 0.0, -1.0, 1.0)
    Q = Q * signs
    R = signs[:, None] * R
    ref = np.linalg.norm(X)
    if scale is not None:
        ref = max(ref, float(scale))
    deficient = bool(ref == 0.0 or np.any(np.abs(np.diag(R)) < TOL_RANK * ref))
    return QRResult(Q, R, deficient)


def deflated_qr(X, scale=None):
    """Column-pivoted QR keeping only the numerically independent directions.

    Returns ``(Q, C)`` with ``Q`` of shape ``(n, r)``, orthonormal, and ``C``
    of shape ``(r, N)`` such that ``X ~= Q C``; ``r`` is the numerical rank
    judged as in :func:`reduced_qr` (``r = 0`` for a negligible block).
    """
    X = np.asarray(X, dtype=np.float64)
    ref = np.linalg.norm(X)
    if scale is not None:
        ref = max(ref, float(scale))
    if ref == 0.0:
        return np.zeros((X.shape[0], 0)), np.zeros((0, X.shape[1]))
    Q, R, perm = scipy.linalg.qr(X, mode="economic", pivoting=True)
    r = int(np.count_nonzero(np.abs(np.diag(R)) >= TOL_RANK * ref))
    C = np.empty((r, X.shape[1]))
    C[:, perm] = R[:r]
    return Q[:, :r], C


def check_symmetric(S, tol=TOL_SYM):
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise NotSymmetric(f"matrix of shape {S.shape} is not square")
    norm = np.linalg.norm(S)
    if np.linalg.norm(S - S.T) > tol * max(norm, np.finfo(float).tiny):
        raise NotSymmetric("matrix is not symmetric within tolerance")
    return S


def sym_eig(S):
    """Symmetric eigendecomposition; raises ``NotSymmetric`` for asymmetric input."""
    S = check_symmetric(S)
    w, V = np.linalg.eigh(0.5 * (S + S.T))
    return SymEig(w, V)


def tridiag_eig(diag, offdiag):
    """Eigendecomposition of the symmetric tridiagonal matrix with the given bands."""
    w, Z = _backend.kernels.tridiag_eigh(np.asarray(diag, dtype=np.float64),
                                         np.asarray(offdiag, dtype=np.float64))
    return SymEig(w, Z)


def apply_function(eig, phi, upper=None):
    """Return ``V diag(phi(w)) V^T`` for a precomputed decomposition.

    When ``upper`` is given, eigenvalues are checked against ``[0, upper]``.
    """
    w, V = eig
    values = phi.evaluate(w, upper) if upper is not None else phi(w)
    return (V * values) @ V.T


def matrix_function(S, phi, upper=None):
    """``phi(S)`` for symmetric ``S`` through its spectral decomposition.

    ``phi`` is a :class:`~graphkrylov.kernels.KernelFunction` (or any callable
    with an ``evaluate(values, upper)`` method). ``DomainError`` is raised if
    ``upper`` is given and an eigenvalue falls outside ``[0, upper]`` by more
    than the kernel's spectral tolerance.
    """
    return apply_function(sym_eig(S), phi, upper)


def solve_linear(A, b):
    """Solve ``A x = b`` by pivoted LU; raises ``Singular`` on a tiny pivot."""
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"solve_linear needs a square matrix, got {A.shape}")
    norm = np.abs(A).sum(axis=1).max() if A.size else 0.0
    with warnings.catch_warnings():
        # exact zero pivots are reported through Singular below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if norm == 0.0 or pivots.min() < TOL_RANK * norm:
        raise Singular(f"matrix is numerically singular (min pivot {pivots.min():.3e}, "
                       f"norm {norm:.3e})")
    return scipy.linalg.lu_solve((lu, piv), b)


def general_eigenvalues(A):
    """All eigenvalues of a small general matrix (balanced Hessenberg QR).

    Returned sorted by real part, then imaginary part. Real inputs give exact
    conjugate pairs.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.shape[0] > GENERAL_EIG_MAX:
        raise SizeExceeded(f"general_eigenvalues limited to N <= {GENERAL_EIG_MAX}")
    w = scipy.linalg.eigvals(A, check_finite=True)
    return np.sort_complex(w.astype(np.complex128))


def check_spectrum(values, upper, tol):
    values = np.asarray(values)
    if values.size and (values.min() < -tol or values.max() > upper + tol):
        raise DomainError(
            f"spectrum [{values.min():.6g}, {values.max():.6g}] leaves [0, {upper:.6g}]")
