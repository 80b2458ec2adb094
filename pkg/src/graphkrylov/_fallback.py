"""numpy/scipy implementations of the hot kernels (used when ``_core`` is absent)."""
import numpy as np
import scipy.linalg
import scipy.sparse


def _csr(indptr, indices, data, ncols):
    n = len(indptr) - 1
    return scipy.sparse.csr_matrix((data, indices, indptr), shape=(n, ncols))


def csr_matmat(indptr, indices, data, X):
    return np.ascontiguousarray(_csr(indptr, indices, data, X.shape[0]) @ X)


def cheb_step(indptr, indices, data, Tk, Tkm1, alpha):
    AT = _csr(indptr, indices, data, Tk.shape[0]) @ Tk
    return np.ascontiguousarray(2.0 * (Tk - alpha * AT) - Tkm1)


def tridiag_eigh(diag, offdiag):
    diag = np.asarray(diag, dtype=np.float64)
    if diag.size == 1:
        return diag.copy(), np.ones((1, 1))
    w, Z = scipy.linalg.eigh_tridiagonal(diag, np.asarray(offdiag, dtype=np.float64))
    return w, Z
