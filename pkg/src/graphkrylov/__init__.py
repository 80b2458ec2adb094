"""Block Krylov approximation of graph kernels ``phi(L) E_W`` and RLS predictors."""
from . import _backend
from .chebyshev import cheb_apply, cheb_coefficients, cheb_eval_scalar, cheb_squared_apply
from .errors import (DimensionMismatch, DomainError, DuplicateNode, GraphKrylovError,
                     IndexOutOfRange, NegativePhiAtNode, NonInvertibleCollocation,
                     NotSymmetric, Singular, SizeExceeded)
from .graph import (Graph, OpCounters, SparseSymMatrix, build_laplacian, path_graph,
                    proximity_graph, spectral_upper_bound, spmv_block, unit_block)
from .kernels import (KernelFunction, SpectralOracle, eval_phi, exact_collocation,
                      exact_kernel_block)
from .lanczos import (cbl_approximate, classical_block_lanczos, collocation_via_Hm,
                      gbl_approximate, global_block_lanczos, sequential_lanczos_approximate)
from .methods import METHODS, approximate_block
from .rls import (Predictor, TrainingSet, classify_sign, predict_cbl_hm_only,
                  predict_exact, predict_krylov, rls_coefficients)

__version__ = "0.1.0"


def backend():
    """Name of the active kernel backend (``"cython"`` or ``"python"``)."""
    return _backend.name
