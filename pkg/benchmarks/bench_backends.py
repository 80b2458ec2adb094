"""Compare the compiled and pure-Python kernel backends.

Times the three hot kernels (sparse block product, Chebyshev recurrence
step, tridiagonal eigensolver) and one end-to-end cbl/cheb run on the
synthetic bunny graph, for every available backend.

    python3 benchmarks/bench_backends.py [--repeat 20] [--block 20]
"""
import argparse
import time

import numpy as np

from graphkrylov import KernelFunction, _backend, approximate_block, build_laplacian
from graphkrylov.synthetic import bunny_graph, sample_nodes


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(L, block, rng):
    X = rng.standard_normal((L.n, block))
    Y = rng.standard_normal((L.n, block))
    d60, e60 = rng.standard_normal(60), rng.standard_normal(59)
    d200, e200 = rng.standard_normal(200), rng.standard_normal(199)
    W = sample_nodes(L.n, block, 7)
    phi = KernelFunction.diffusion(20.0)
    k = lambda: _backend.kernels
    return {
        "csr_matmat": lambda: k().csr_matmat(L.indptr, L.indices, L.data, X),
        "cheb_step": lambda: k().cheb_step(L.indptr, L.indices, L.data, X, Y, 1.0),
        "tridiag_eigh(60)": lambda: k().tridiag_eigh(d60, e60),
        "tridiag_eigh(200)": lambda: k().tridiag_eigh(d200, e200),
        "cbl m=20": lambda: approximate_block("cbl", L, W, phi, 20),
        "cheb m=60": lambda: approximate_block("cheb", L, W, phi, 60),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--block", type=int, default=20, help="block width N")
    args = ap.parse_args(argv)

    L = build_laplacian(bunny_graph(), "normalized")
    backends = _backend.available()
    results = {}
    for name in backends:
        _backend.use(name)
        rng = np.random.default_rng(0)
        results[name] = {label: best_of(fn, args.repeat)
                         for label, fn in cases(L, args.block, rng).items()}
    _backend.use("auto")

    labels = list(next(iter(results.values())))
    header = f"{'case':<20}" + "".join(f"{b + ' [ms]':>16}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(f"bunny graph n={L.n}, nnz={L.nnz}, N={args.block}, best of {args.repeat}")
    print(header)
    for label in labels:
        row = f"{label:<20}" + "".join(f"{1e3 * results[b][label]:>16.3f}" for b in backends)
        if len(backends) == 2:
            row += f"{results['python'][label] / results['cython'][label]:>9.2f}x"
        print(row)
    if len(backends) == 1:
        print("compiled backend not built; only the python fallback was timed")


if __name__ == "__main__":
    main()
