"""Kernel generating functions and the dense spectral oracle."""
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import gmpy2
import numpy as np

from .errors import DomainError, SizeExceeded
from .graph import SparseSymMatrix, unit_block

TOL_SPEC = 1e-8
DEFAULT_ORACLE_CAP = 2000


def oracle_cap():
    return int(os.environ.get("GRAPHKRYLOV_ORACLE_CAP", DEFAULT_ORACLE_CAP))


@dataclass(frozen=True)
class KernelFunction:
    """A scalar function ``phi`` applied to graph Laplacians.

    Use :meth:`diffusion`, :meth:`spline` or :meth:`custom` to construct one.
    ``positive`` records whether ``phi`` is known to be positive on the
    spectral interval; only the named kernels set it automatically.
    """

    kind: str
    params: tuple = ()
    func: Optional[Callable] = field(default=None, compare=False, repr=False)
    positive: bool = True
    mp_func: Optional[Callable] = field(default=None, compare=False, repr=False)

    @classmethod
    def diffusion(cls, t):
        if t < 0:
            raise ValueError("diffusion time must be >= 0")
        return cls("diffusion", (float(t),))

    @classmethod
    def spline(cls, eps, s):
        if eps <= 0 or s <= 0:
            raise ValueError("variational spline needs eps > 0 and s > 0")
        return cls("spline", (float(eps), float(s)))

    @classmethod
    def custom(cls, func, positive, name="custom", mp_func=None):
        """Wrap a vectorized callable; ``positive`` must be declared explicitly."""
        return cls(name, (), func=func, positive=bool(positive), mp_func=mp_func)

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=np.float64)
        if self.kind == "diffusion":
            return np.exp(-self.params[0] * lam)
        if self.kind == "spline":
            eps, s = self.params
            return (eps + lam) ** (-s)
        return np.asarray(self.func(lam), dtype=np.float64)

    def evaluate(self, lam, upper):
        """Evaluate after checking ``lam`` against ``[0, upper]``."""
        lam = np.asarray(lam, dtype=np.float64)
        tol = TOL_SPEC * max(1.0, upper)
        if lam.size and (lam.min() < -tol or lam.max() > upper + tol):
            raise DomainError(
                f"{self.kind}: argument range [{lam.min():.6g}, {lam.max():.6g}] "
                f"outside [0, {upper:.6g}]")
        return self(lam)

    def mp(self, lam):
        """High-precision evaluation at a gmpy2 ``mpfr``; None if unsupported."""
        if self.kind == "diffusion":
            return gmpy2.exp(-gmpy2.mpfr(self.params[0]) * lam)
        if self.kind == "spline":
            eps, s = self.params
            return (gmpy2.mpfr(eps) + lam) ** (-gmpy2.mpfr(s))
        if self.mp_func is not None:
            return self.mp_func(lam)
        return None

    @property
    def has_mp(self):
        return self.kind in ("diffusion", "spline") or self.mp_func is not None

    def sqrt(self):
        """The function ``sqrt(phi)``, closed form where available."""
        if self.kind == "diffusion":
            return KernelFunction.diffusion(self.params[0] / 2)
        if self.kind == "spline":
            return KernelFunction.spline(self.params[0], self.params[1] / 2)
        base = self
        mp_sqrt = None
        if self.mp_func is not None:
            mp_sqrt = lambda x: gmpy2.sqrt(base.mp_func(x))  # noqa: E731
        return KernelFunction.custom(lambda x: np.sqrt(base(x)), self.positive,
                                     name=f"sqrt({self.kind})", mp_func=mp_sqrt)

    def extrema(self, upper, samples=4097):
        """``(min, max)`` of ``|phi|`` on ``[0, upper]``.

        Exact for the named kernels (both are monotone), sampled for custom ones.
        """
        if self.kind == "diffusion":
            return math.exp(-self.params[0] * upper), 1.0
        if self.kind == "spline":
            eps, s = self.params
            return (eps + upper) ** (-s), eps ** (-s)
        vals = np.abs(self(np.linspace(0.0, upper, samples)))
        return float(vals.min()), float(vals.max())

    def describe(self):
        if self.kind == "diffusion":
            return {"phi": "diffusion", "t": self.params[0]}
        if self.kind == "spline":
            return {"phi": "spline", "eps": self.params[0], "s": self.params[1]}
        return {"phi": self.kind}


def eval_phi(phi, lam, upper):
    """Scalar (or array) evaluation with the ``[0, upper]`` domain check."""
    return phi.evaluate(lam, upper)


class SpectralOracle:
    """Dense eigendecomposition of a Laplacian, reused for many kernel queries.

    This is the ground truth every Krylov approximation is compared to.
    """

    def __init__(self, L: SparseSymMatrix, cap=None):
        cap = oracle_cap() if cap is None else cap
        if L.n > cap:
            raise SizeExceeded(f"dense oracle limited to n <= {cap} (got n={L.n})")
        self.n = L.n
        self.upper = L.spectral_bound
        self.eigenvalues, self.eigenvectors = np.linalg.eigh(L.to_dense())

    def phi_values(self, phi):
        return phi.evaluate(self.eigenvalues, self.upper)

    def kernel_block(self, phi, W):
        W = np.asarray(W, dtype=np.intp)
        V = self.eigenvectors
        return (V * self.phi_values(phi)) @ V[W].T

    def collocation(self, phi, W):
        W = np.asarray(W, dtype=np.intp)
        VW = self.eigenvectors[W]
        K = (VW * self.phi_values(phi)) @ VW.T
        return 0.5 * (K + K.T)

    def apply(self, phi, X):
        V = self.eigenvectors
        return (V * self.phi_values(phi)) @ (V.T @ X)


def exact_kernel_block(L, phi, W):
    """``phi(L) E_W`` by dense functional calculus (n must not exceed the oracle cap)."""
    unit_block(W, L.n)  # validates W
    return SpectralOracle(L).kernel_block(phi, W)


def exact_collocation(L, phi, W):
    """``E_W^T phi(L) E_W`` from the dense oracle."""
    unit_block(W, L.n)
    return SpectralOracle(L).collocation(phi, W)
