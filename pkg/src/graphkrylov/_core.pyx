# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the inner loops.

Every function here has a numpy/scipy twin with the same signature in
``_fallback``; ``_backend`` picks one at import time.
"""
import numpy as np
from libc.math cimport fabs, sqrt, copysign


def csr_matmat(const long[::1] indptr, const long[::1] indices,
               const double[::1] data, const double[:, ::1] X):
    """Return ``A @ X`` for a CSR matrix ``A`` and a C-contiguous block ``X``."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t ncol = X.shape[1]
    out = np.zeros((n, ncol), dtype=np.float64)
    cdef double[:, ::1] Y = out
    cdef Py_ssize_t i, p, j, c
    cdef double a
    with nogil:
        for i in range(n):
            for p in range(indptr[i], indptr[i + 1]):
                j = indices[p]
                a = data[p]
                for c in range(ncol):
                    Y[i, c] += a * X[j, c]
    return out


def cheb_step(const long[::1] indptr, const long[::1] indices,
              const double[::1] data, const double[:, ::1] Tk,
              const double[:, ::1] Tkm1, double alpha):
    """Return ``2 (Tk - alpha A Tk) - Tkm1``: one Chebyshev recurrence step."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t ncol = Tk.shape[1]
    out = np.empty((n, ncol), dtype=np.float64)
    cdef double[:, ::1] Y = out
    cdef double[::1] acc = np.empty(ncol, dtype=np.float64)
    cdef Py_ssize_t i, p, j, c
    cdef double a
    with nogil:
        for i in range(n):
            for c in range(ncol):
                acc[c] = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                j = indices[p]
                a = data[p]
                for c in range(ncol):
                    acc[c] += a * Tk[j, c]
            for c in range(ncol):
                Y[i, c] = 2.0 * (Tk[i, c] - alpha * acc[c]) - Tkm1[i, c]
    return out


cdef inline double _hypot(double a, double b) nogil:
    cdef double aa = fabs(a), bb = fabs(b), r
    if aa > bb:
        r = bb / aa
        return aa * sqrt(1.0 + r * r)
    if bb == 0.0:
        return 0.0
    r = aa / bb
    return bb * sqrt(1.0 + r * r)


def tridiag_eigh(diag, offdiag):
    """Eigen-decomposition of a symmetric tridiagonal matrix by implicit QL.

    Parameters
    ----------
    diag : (d,) array
    offdiag : (d-1,) array

    Returns
    -------
    w : (d,) ascending eigenvalues
    Z : (d, d) orthonormal eigenvectors, column ``k`` belongs to ``w[k]``
    """
    cdef Py_ssize_t d = len(diag)
    w_arr = np.array(diag, dtype=np.float64)
    e_arr = np.zeros(d, dtype=np.float64)
    if d > 1:
        e_arr[: d - 1] = offdiag
    # column-major accumulation: rows of Zt are eigenvectors
    Zt_arr = np.eye(d, dtype=np.float64)
    cdef double[::1] w = w_arr
    cdef double[::1] e = e_arr
    cdef double[:, ::1] Zt = Zt_arr
    cdef Py_ssize_t l, m, i, k, it
    cdef double dd, g, r, s, c, p, f, b, zi, zi1
    cdef int failed = 0
    with nogil:
        for l in range(d):
            it = 0
            while True:
                m = l
                while m < d - 1:
                    dd = fabs(w[m]) + fabs(w[m + 1])
                    if fabs(e[m]) <= 2.2e-16 * dd:
                        break
                    m += 1
                if m == l:
                    break
                it += 1
                if it > 60:
                    failed = 1
                    break
                g = (w[l + 1] - w[l]) / (2.0 * e[l])
                r = _hypot(g, 1.0)
                g = w[m] - w[l] + e[l] / (g + copysign(r, g))
                s = 1.0
                c = 1.0
                p = 0.0
                i = m - 1
                while i >= l:
                    f = s * e[i]
                    b = c * e[i]
                    r = _hypot(f, g)
                    e[i + 1] = r
                    if r == 0.0:
                        w[i + 1] -= p
                        e[m] = 0.0
                        break
                    s = f / r
                    c = g / r
                    g = w[i + 1] - p
                    r = (w[i] - g) * s + 2.0 * c * b
                    p = s * r
                    w[i + 1] = g + p
                    g = c * r - b
                    for k in range(d):
                        zi1 = Zt[i + 1, k]
                        zi = Zt[i, k]
                        Zt[i + 1, k] = s * zi + c * zi1
                        Zt[i, k] = c * zi - s * zi1
                    i -= 1
                else:
                    w[l] -= p
                    e[l] = g
                    e[m] = 0.0
                    continue
                if r == 0.0 and i >= l:
                    continue
            if failed:
                break
    if failed:
        raise ArithmeticError("implicit QL did not converge")
    order = np.argsort(w_arr, kind="stable")
    return w_arr[order], np.ascontiguousarray(Zt_arr[order].T)
