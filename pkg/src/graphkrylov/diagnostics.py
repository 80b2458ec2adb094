"""Error bounds, convergence and collocation-spectrum studies, operation-count checks."""
import csv
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Optional

import gmpy2
import numpy as np

from . import chebyshev, lanczos, linalg
from .errors import NonInvertibleCollocation
from .graph import OpCounters, unit_block
from .kernels import SpectralOracle
from .methods import LANCZOS_METHODS, METHODS, approximate_block, expected_mv
from .rls import TrainingSet, predict_exact, predict_from_block

# constants of the Stewart-Leyk bound for exp(-t lambda)
SL_B = (math.sqrt(5.0) - 1.0) / 2.0
SL_D = (math.sqrt(5.0) - 2.0) * math.exp(SL_B)

GRID_FACTOR = 64
BOUND_SLACK = 0.1
_MP_PRECISION = 160  # bits
_MP_SWITCH = 1e-9    # relative float estimate below which the extended-precision path is used


def _grid(upper, m):
    return np.linspace(0.0, upper, GRID_FACTOR * (m + 1))


def _float_interp_error(phi, upper, m, squared=False):
    lam = _grid(upper, m)
    target = phi(lam)
    base = phi.sqrt() if squared else phi
    if m == 0:
        p = np.full_like(lam, math.sqrt(max(phi(np.array([0.0]))[0], 0.0)) if squared
                         else 0.5 * (target.max() + target.min()))
    else:
        c = chebyshev.cheb_coefficients(base, upper, m)
        p = chebyshev.eval_series(c.coef, 1.0 - 2.0 * lam / upper)
    if squared:
        p = p * p
    return float(np.max(np.abs(target - p))), float(np.max(np.abs(target)))


def _mp_interp_error(phi, upper, m, squared=False):
    ctx = gmpy2.get_context()
    saved = ctx.precision
    ctx.precision = _MP_PRECISION
    try:
        pi = gmpy2.const_pi()
        up = gmpy2.mpfr(upper)
        G = GRID_FACTOR * (m + 1)
        xs = [1 - gmpy2.mpfr(2 * i) / (G - 1) for i in range(G)]
        lam = [up * (1 - x) / 2 for x in xs]
        target = [phi.mp(v) for v in lam]
        if m == 0:
            if squared:
                p0 = gmpy2.sqrt(phi.mp(gmpy2.mpfr(0)))
                vals = [p0] * G
            else:
                vals = [(max(target) + min(target)) / 2] * G
        else:
            f = [phi.mp(up * (1 - gmpy2.cos(pi * j / m)) / 2) for j in range(m + 1)]
            if squared:
                f = [gmpy2.sqrt(v) for v in f]
            coef = []
            for k in range(m + 1):
                s = (f[0] + (-1) ** k * f[m]) / 2
                s += sum(f[j] * gmpy2.cos(pi * j * k / m) for j in range(1, m))
                coef.append(2 * s / m)
            coef[0] /= 2
            coef[m] /= 2
            rc, c0 = coef[:0:-1], coef[0]
            vals = []
            for x in xs:
                b1 = b2 = gmpy2.mpfr(0)
                x2 = 2 * x
                for ck in rc:
                    b1, b2 = x2 * b1 - b2 + ck, b1
                vals.append(x * b1 - b2 + c0)
        if squared:
            vals = [v * v for v in vals]
        return float(max(abs(t - v) for t, v in zip(target, vals)))
    finally:
        ctx.precision = saved


def _interp_error(phi, upper, m, squared):
    err, scale = _float_interp_error(phi, upper, m, squared)
    if phi.has_mp and err <= _MP_SWITCH * max(scale, np.finfo(float).tiny):
        return _mp_interp_error(phi, upper, m, squared)
    return err


@lru_cache(maxsize=4096)
def _cached_interp_error(phi, upper, m, squared):
    return _interp_error(phi, upper, m, squared)


def interpolation_error(phi, upper, m, squared=False):
    """Uniform error of the degree-``m`` Lobatto interpolant of ``phi`` on a fine grid.

    With ``squared`` the interpolant of ``sqrt(phi)`` is squared first (the
    cheb2 approximant). The grid has ``64 (m + 1)`` equispaced points.
    Named kernels switch to 160-bit arithmetic once the double-precision
    estimate drops into the rounding regime.
    """
    if phi.kind in ("diffusion", "spline"):
        return _cached_interp_error(phi, float(upper), int(m), bool(squared))
    return _interp_error(phi, upper, m, squared)


def best_approx_estimate(phi, upper, m):
    """Upper proxy for the best uniform polynomial approximation error ``E_m(phi)``.

    The Lobatto interpolant is within the Lebesgue factor
    ``2 + (2/pi) log(m + 1)`` of the best approximation, so its error bounds
    ``E_m`` from above (up to grid sampling).
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    return interpolation_error(phi, upper, m)


def stewart_leyk_bound(t, upper, m):
    """Explicit bound on ``E_m(exp(-t lambda))`` over ``[0, upper]``."""
    if t <= 0 or upper <= 0 or m < 0:
        raise ValueError("need t > 0, upper > 0, m >= 0")
    tl = t * upper
    if m <= tl:
        return (2.0 * math.exp(-SL_B * (m + 1) ** 2 / tl) * (1.0 + math.sqrt(tl * math.pi / (4 * SL_B)))
                + 2.0 * SL_D ** tl / (1.0 - SL_D))
    return 2.0 * SL_D ** m / (1.0 - SL_D)


def lanczos_error_bound(N, best_err):
    return 2.0 * math.sqrt(N) * best_err


def cheb_error_bound(N, m, best_err):
    return math.sqrt(N) * (2.0 + 2.0 / math.pi * math.log(m + 1)) * best_err


def method_error_bound(method, phi, upper, N, m):
    """Frobenius error bound for the block approximant of ``method`` after ``m`` iterations.

    Lanczos schemes with ``m`` blocks build a degree ``m - 1`` polynomial, so
    they are bounded through ``E_{m-1}``. The cheb2 bound is
    ``sqrt(N) max |phi - p^2|`` with the squared interpolant measured directly.
    """
    if method in LANCZOS_METHODS:
        return lanczos_error_bound(N, best_approx_estimate(phi, upper, m - 1))
    if method == "cheb":
        return cheb_error_bound(N, m, best_approx_estimate(phi, upper, m))
    if method == "cheb2":
        return math.sqrt(N) * interpolation_error(phi, upper, m // 2, squared=True)
    raise ValueError(f"unknown method {method!r}")


def predictor_error_bound(labels, phi, upper, gamma, block_err):
    """Asymptotic bound on ``||y - y_kr||_2`` from the block error (spectral norm)."""
    phi_min, phi_max = phi.extrema(upper)
    N = len(labels)
    denom = phi_min + gamma * N
    return float(np.linalg.norm(labels)) / denom * (1.0 + phi_max / denom) * block_err


@dataclass
class ConvergenceRecord:
    method: str
    m: int
    error_fro: float
    error_uniform: float
    bound: float
    mv: int
    dot: int
    axpy: int
    predictor_error_uniform: Optional[float] = None
    status: str = "ok"
    effective_m: Optional[int] = None
    error_2: float = field(default=float("nan"), repr=False)

    def bound_holds(self, slack=BOUND_SLACK):
        return self.error_fro <= self.bound * (1.0 + slack)


CSV_FIELDS = ("method", "m", "error_fro", "error_uniform", "bound", "mv", "dot", "axpy",
              "predictor_error_uniform", "status")


def convergence_study(L, phi, W, m_range, methods=METHODS, labels=None, gamma=0.0,
                      oracle=None, upper=None):
    """Errors of every ``(method, m)`` approximation against the dense oracle.

    With ``labels`` the RLS predictor error ``||y - y_kr||_inf`` is recorded
    too; a singular collocation system is recorded as ``status='singular'``
    with an infinite predictor error.
    """
    oracle = SpectralOracle(L) if oracle is None else oracle
    upper = L.spectral_bound if upper is None else upper
    W = list(W)
    N = len(W)
    exact = oracle.kernel_block(phi, W)
    train = exact_pred = None
    if labels is not None:
        train = TrainingSet(W, labels, gamma)
        exact_pred = predict_exact(L, phi, train, oracle)
    records = []
    for method in methods:
        for m in m_range:
            counters = OpCounters()
            approx = approximate_block(method, L, W, phi, m, counters)
            diff = approx.block - exact
            rec = ConvergenceRecord(
                method=approx.method, m=m,
                error_fro=float(np.linalg.norm(diff)),
                error_uniform=float(np.max(np.abs(diff))),
                bound=method_error_bound(approx.method, phi, upper, N, m),
                mv=counters.mv, dot=counters.dot, axpy=counters.axpy,
                effective_m=approx.effective_m,
                error_2=float(np.linalg.norm(diff, 2)))
            if train is not None:
                try:
                    pred = predict_from_block(approx.block, train, approx.method, m)
                except NonInvertibleCollocation:
                    rec.status = "singular"
                    rec.predictor_error_uniform = float("inf")
                else:
                    rec.predictor_error_uniform = float(
                        np.max(np.abs(pred.signal - exact_pred.signal)))
            records.append(rec)
    return records


def write_records_csv(records, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for r in records:
            pe = "" if r.predictor_error_uniform is None else repr(r.predictor_error_uniform)
            writer.writerow([r.method, r.m, repr(r.error_fro), repr(r.error_uniform),
                             repr(r.bound), r.mv, r.dot, r.axpy, pe, r.status])


def records_to_json(records):
    out = []
    for r in records:
        d = asdict(r)
        d.pop("error_2")
        for key in ("predictor_error_uniform",):
            if d[key] is not None and not math.isfinite(d[key]):
                d[key] = None
        out.append(d)
    return out


@dataclass
class SpectrumRecord:
    method: str
    m: int
    eigenvalues: np.ndarray
    symmetry_defect: float
    norm: float

    @property
    def min_real(self):
        return float(self.eigenvalues.real.min())

    @property
    def has_complex(self):
        return bool(np.any(self.eigenvalues.imag != 0.0))

    @property
    def symmetric(self):
        return self.symmetry_defect <= 1e-10 * self.norm


def collocation_matrix(method, L, W, phi, m, counters=None):
    """``E_W^T p_kr(L) E_W`` for one method (cbl through ``phi(H_m)`` directly)."""
    if method == "cbl":
        fact = lanczos.classical_block_lanczos(L, unit_block(W, L.n), m, counters)
        return lanczos.collocation_via_Hm(fact, phi, counters)
    block = approximate_block(method, L, W, phi, m, counters).block
    return block[list(W)]


def collocation_spectrum_study(L, phi, W, m, methods=METHODS):
    """Eigenvalues of the approximate collocation matrices of each method."""
    if len(W) > linalg.GENERAL_EIG_MAX:
        raise ValueError(f"spectrum study limited to N <= {linalg.GENERAL_EIG_MAX}")
    out = []
    for method in methods:
        K = collocation_matrix(method, L, W, phi, m)
        norm = float(np.linalg.norm(K))
        defect = float(np.linalg.norm(K - K.T))
        if defect <= 1e-10 * norm:
            eig = linalg.sym_eig(0.5 * (K + K.T)).eigenvalues.astype(np.complex128)
        else:
            eig = linalg.general_eigenvalues(K)
        out.append(SpectrumRecord(method, m, eig, defect, norm))
    return out


# leading constants for the DOT/AXPY columns of the operation table
_DOT_AXPY_ORDER = {"cbl": lambda m, N: m * N * N, "gbl": lambda m, N: m * N,
                   "sbl": lambda m, N: m * N, "cheb": lambda m, N: m * N,
                   "cheb2": lambda m, N: m * N}
_ORDER_CONSTANT = 8


def check_operation_counts(method, m, N, counters, effective_m=None, breakdown=False):
    """Compare counters with the expected operation table.

    Returns a list of violation messages (empty when everything matches):
    MVs must equal ``m N`` exactly (``2 floor(m/2) N`` for cheb2, or
    ``effective_m N`` after a gbl breakdown); after a cbl deflation or a
    per-column sbl stop only ``mv <= effective_m N`` is required. DOTs and
    AXPYs must stay within a small constant of their order (``m N^2`` for
    cbl, ``m N`` else).
    """
    problems = []
    lost = method in LANCZOS_METHODS and (
        breakdown or (effective_m is not None and effective_m < m))
    if lost and method != "gbl":
        cap = (m if effective_m is None else effective_m) * N
        if counters.mv > cap:
            problems.append(f"{method}: mv={counters.mv} exceeds {cap}")
    else:
        want = effective_m * N if lost else expected_mv(method, m, N)
        if counters.mv != want:
            problems.append(f"{method}: mv={counters.mv}, expected {want}")
    order = _DOT_AXPY_ORDER[method](m, N)
    if method == "cheb" or method == "cheb2":
        if counters.dot != 0:
            problems.append(f"{method}: chebyshev schemes need no inner products")
    elif counters.dot > _ORDER_CONSTANT * order:
        problems.append(f"{method}: dot={counters.dot} exceeds O({order})")
    if counters.axpy > _ORDER_CONSTANT * order + 2 * N:
        problems.append(f"{method}: axpy={counters.axpy} exceeds O({order})")
    return problems
