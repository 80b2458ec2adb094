import math

import gmpy2
import numpy as np
import pytest

from graphkrylov import KernelFunction, SpectralOracle, exact_collocation, exact_kernel_block
from graphkrylov.errors import DomainError, SizeExceeded
from graphkrylov.graph import build_laplacian, path_graph
from graphkrylov.kernels import eval_phi

from conftest import random_graph, random_laplacian


def test_eval_phi_examples():
    assert eval_phi(KernelFunction.diffusion(20), 0.0, 2.0) == 1.0
    assert math.isclose(eval_phi(KernelFunction.spline(0.05, 2), 0.0, 2.0), 400.0)
    assert math.isclose(eval_phi(KernelFunction.spline(0.001, 2), 0.999, 2.0), 1.0)


def test_eval_phi_domain():
    phi = KernelFunction.diffusion(1.0)
    eval_phi(phi, -1e-9, 2.0)  # within tolerance
    eval_phi(phi, 2.0 + 1e-9, 2.0)
    with pytest.raises(DomainError):
        eval_phi(phi, -1e-3, 2.0)
    with pytest.raises(DomainError):
        eval_phi(phi, 2.1, 2.0)


def test_kernel_parameter_validation():
    with pytest.raises(ValueError):
        KernelFunction.diffusion(-1.0)
    with pytest.raises(ValueError):
        KernelFunction.spline(0.0, 2.0)
    with pytest.raises(ValueError):
        KernelFunction.spline(0.1, -1.0)


def test_mp_evaluation_agrees_with_float():
    lam = np.linspace(0, 2, 7)
    for phi in (KernelFunction.diffusion(3.0), KernelFunction.spline(0.05, 2.0)):
        assert phi.has_mp
        mp = np.array([float(phi.mp(gmpy2.mpfr(float(x)))) for x in lam])
        assert np.allclose(mp, phi(lam), rtol=1e-14)
    assert not KernelFunction.custom(np.cos, positive=False).has_mp


def test_sqrt_kernel():
    phi = KernelFunction.spline(0.05, 2.0)
    lam = np.linspace(0, 2, 9)
    assert np.allclose(phi.sqrt()(lam) ** 2, phi(lam))
    assert phi.sqrt().has_mp


def test_extrema():
    lo, hi = KernelFunction.diffusion(2.0).extrema(2.0)
    assert math.isclose(hi, 1.0) and math.isclose(lo, math.exp(-4.0))


def test_exact_block_path2():
    L = build_laplacian(path_graph(2), "standard")
    block = exact_kernel_block(L, KernelFunction.diffusion(1.0), [0])
    e2 = math.exp(-2.0)
    assert np.allclose(block[:, 0], [0.5 * (1 + e2), 0.5 * (1 - e2)], atol=1e-15)
    K = exact_collocation(L, KernelFunction.diffusion(1.0), [0, 1])
    assert np.allclose(K, [[0.56767, 0.43233], [0.43233, 0.56767]], atol=1e-5)


def test_exact_block_identity_and_single_node():
    rng = np.random.default_rng(0)
    L = random_laplacian(rng, 30)
    W = [3, 7, 11]
    assert np.allclose(exact_kernel_block(L, KernelFunction.diffusion(0.0), W),
                       np.eye(30)[:, W], atol=1e-13)
    assert np.allclose(exact_collocation(L, KernelFunction.diffusion(0.0), W), np.eye(3),
                       atol=1e-13)
    L1 = build_laplacian(path_graph(1), "standard")
    assert exact_kernel_block(L1, KernelFunction.spline(1.0, 1.0), [0])[0, 0] == 1.0


def test_oracle_cap(monkeypatch):
    L = build_laplacian(path_graph(30), "standard")
    with pytest.raises(SizeExceeded):
        SpectralOracle(L, cap=20)
    monkeypatch.setenv("GRAPHKRYLOV_ORACLE_CAP", "10")
    with pytest.raises(SizeExceeded):
        exact_kernel_block(L, KernelFunction.diffusion(1.0), [0])


def test_collocation_symmetric_positive_definite():
    rng = np.random.default_rng(1)
    for _ in range(10):
        L = random_laplacian(rng, 50)
        W = rng.choice(50, 8, replace=False)
        K = exact_collocation(L, KernelFunction.spline(0.1, 1.5), W)
        assert np.linalg.norm(K - K.T) <= 1e-13 * np.linalg.norm(K)
        assert np.linalg.eigvalsh(K).min() > 0


def test_diffusion_semigroup():
    rng = np.random.default_rng(2)
    L = random_laplacian(rng, 80)
    oracle = SpectralOracle(L)
    W = [0, 5, 9]
    both = oracle.kernel_block(KernelFunction.diffusion(1.5), W)
    composed = oracle.apply(KernelFunction.diffusion(0.5),
                            oracle.kernel_block(KernelFunction.diffusion(1.0), W))
    assert np.allclose(both, composed, atol=1e-10)


def test_standard_diffusion_conserves_mass():
    rng = np.random.default_rng(3)
    L = build_laplacian(random_graph(rng, 70, weighted=True), "standard")
    block = exact_kernel_block(L, KernelFunction.diffusion(0.8), [1, 2, 40])
    assert np.allclose(block.sum(axis=0), 1.0, atol=1e-12)
