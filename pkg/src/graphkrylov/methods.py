"""Uniform entry point for the five block Krylov approximations of ``phi(L) E_W``."""
from typing import NamedTuple

import numpy as np

from . import chebyshev, lanczos
from .graph import OpCounters, unit_block

METHODS = ("cbl", "gbl", "sbl", "cheb", "cheb2")
LANCZOS_METHODS = ("cbl", "gbl", "sbl")


class Approximation(NamedTuple):
    block: np.ndarray
    method: str
    m: int
    effective_m: int
    counters: OpCounters
    breakdown: bool = False    # some Krylov block lost rank


def approximate_block(method, L, W, phi, m, counters=None, reorth=False):
    """Approximate the kernel columns ``phi(L) E_W`` with ``m`` iterations of ``method``.

    For the Lanczos schemes ``m`` is the number of basis blocks (polynomial
    degree ``m - 1``); for ``cheb`` it is the interpolation degree and for
    ``cheb2`` the squared interpolant has degree ``2 floor(m/2)``. All five
    use at most ``m N`` matrix-vector products.
    """
    counters = OpCounters() if counters is None else counters
    E = unit_block(W, L.n)
    lost = False
    if method == "cbl":
        fact = lanczos.classical_block_lanczos(L, E, m, counters, reorth=reorth)
        block, eff = lanczos.cbl_approximate(fact, phi, counters), fact.effective_m
        lost = fact.breakdown
    elif method == "gbl":
        fact = lanczos.global_block_lanczos(L, E, m, counters, reorth=reorth)
        block, eff = lanczos.gbl_approximate(fact, phi, counters), fact.effective_m
        lost = fact.breakdown
    elif method == "sbl":
        res = lanczos.sequential_lanczos_approximate(L, E, m, phi, counters)
        block, eff = res.block, max(res.effective_m)
        lost = min(res.effective_m) < m
    elif method == "cheb":
        block, eff = chebyshev.cheb_approximate(L, E, phi, m, counters), m
    elif method in ("cheb2", "cheb²"):
        method = "cheb2"
        block, eff = chebyshev.cheb_squared_approximate(L, E, phi, m, counters), m
    else:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    return Approximation(block, method, m, eff, counters, lost)


def expected_mv(method, m, N):
    """Matrix-vector products a run without breakdown performs."""
    if method == "cheb2":
        return 2 * (m // 2) * N
    return m * N
