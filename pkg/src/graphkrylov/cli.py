"""Command-line front end: ``graphkrylov {kernel,predict,convergence,spectrum,graph-info}``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
import argparse
import csv
import json
import os
import sys

import numpy as np

from . import _backend
from .diagnostics import (collocation_spectrum_study, convergence_study, records_to_json,
                          write_records_csv)
from .errors import GraphKrylovError, NonInvertibleCollocation, NumericalError
from .graph import (build_laplacian, path_graph, proximity_graph, read_edge_list,
                    read_points)
from .kernels import KernelFunction, SpectralOracle, oracle_cap
from .methods import METHODS, approximate_block
from .rls import (TrainingSet, classify_sign, predict_cbl_hm_only, predict_exact,
                  predict_krylov, read_labels)
from .synthetic import BUNNY_RADIUS, binary_labels, bunny_graph, sample_nodes

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
DEFAULT_SEED = 2023


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: config error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


# -- configuration -----------------------------------------------------------

def load_graph(spec, radius=BUNNY_RADIUS):
    kind, _, arg = spec.partition(":")
    if not arg:
        raise ConfigError(f"graph spec {spec!r} must look like KIND:ARG")
    if kind == "path":
        try:
            n = int(arg)
        except ValueError:
            raise ConfigError(f"path size {arg!r} is not an integer") from None
        if n < 1:
            raise ConfigError("path graph needs n >= 1")
        return path_graph(n)
    if kind == "bunny":
        try:
            return bunny_graph(int(arg), radius=radius)
        except ValueError:
            raise ConfigError(f"bunny seed {arg!r} is not an integer") from None
    if kind in ("edges", "points"):
        if not os.path.isfile(arg):
            raise ConfigError(f"file not found: {arg}")
        if kind == "edges":
            return read_edge_list(arg)
        return proximity_graph(read_points(arg), radius)
    raise ConfigError(f"unknown graph kind {kind!r} (path, edges, points, bunny)")


def make_phi(args):
    if args.phi == "diffusion":
        return KernelFunction.diffusion(args.t)
    return KernelFunction.spline(args.eps, args.s)


def parse_m_range(text):
    lo, sep, hi = text.partition("..")
    try:
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise ConfigError(f"m-range {text!r} must look like A..B") from None
    if not sep or lo < 1 or hi < lo:
        raise ConfigError(f"m-range {text!r} must satisfy 1 <= A <= B")
    return list(range(lo, hi + 1))


def parse_methods(text, allow_exact=True):
    methods = [m.strip() for m in text.split(",") if m.strip()]
    valid = METHODS + (("exact",) if allow_exact else ())
    bad = [m for m in methods if m not in valid]
    if bad or not methods:
        raise ConfigError(f"unknown method(s) {bad}; choose from {', '.join(valid)}")
    return methods


def select_nodes(args, n):
    if args.nodes is not None:
        try:
            nodes = [int(v) for v in args.nodes.split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"--nodes {args.nodes!r} is not a comma list of integers") from None
    elif args.sample is not None:
        if not 1 <= args.sample <= n:
            raise ConfigError(f"--sample must lie in 1..{n}")
        nodes = sample_nodes(n, args.sample, args.seed)
    else:
        raise ConfigError("give --nodes or --sample")
    if not nodes:
        raise ConfigError("node list is empty")
    if len(set(nodes)) != len(nodes):
        raise ConfigError("duplicate training node")
    if min(nodes) < 0 or max(nodes) >= n:
        raise ConfigError(f"node index outside 0..{n - 1}")
    return nodes


def select_labels(args, nodes):
    """Labels from ``--labels`` (matched by node index) or seeded {0, 1} labels."""
    if args.labels is None:
        return binary_labels(len(nodes), args.seed)
    if not os.path.isfile(args.labels):
        raise ConfigError(f"file not found: {args.labels}")
    lab_nodes, values = read_labels(args.labels)
    table = dict(zip(lab_nodes, values))
    missing = [w for w in nodes if w not in table]
    if missing:
        raise ConfigError(f"no label for node(s) {missing[:5]}")
    return np.array([table[w] for w in nodes])


def _setup(args):
    g = load_graph(args.graph, args.radius)
    L = build_laplacian(g, args.laplacian)
    return g, L


def _oracle(L, required):
    if L.n <= oracle_cap():
        return SpectralOracle(L)
    if required:
        raise ConfigError(f"n={L.n} exceeds the dense oracle cap {oracle_cap()} "
                          "(raise GRAPHKRYLOV_ORACLE_CAP)")
    return None


def _describe(args, L, nodes=None):
    out = {"graph": args.graph, "laplacian": args.laplacian, "n": L.n,
           "upper": L.spectral_bound}
    if hasattr(args, "phi"):
        out["phi"] = make_phi(args).describe()
    if nodes is not None:
        out["nodes"] = list(nodes)
    return out


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _out(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _finite(x):
    return None if x is None or not np.isfinite(x) else float(x)


# -- subcommands ---------------------------------------------------------------

def cmd_graph_info(args):
    g, L = _setup(args)
    deg = g.degrees()
    info = {
        "graph": args.graph, "laplacian": args.laplacian, "n": g.n,
        "edges": g.edge_count, "components": int(g.components()[0]),
        "degree_min": float(deg.min()) if g.n else 0.0,
        "degree_max": float(deg.max()) if g.n else 0.0,
        "degree_mean": float(deg.mean()) if g.n else 0.0,
        "nnz": L.nnz, "upper": L.spectral_bound, "backend": _backend.name,
    }
    _write_json(_out(args, "graph_info.json"), info)
    print(json.dumps(info, sort_keys=True))
    return EXIT_OK


def cmd_kernel(args):
    g, L = _setup(args)
    phi = make_phi(args)
    nodes = select_nodes(args, L.n)
    methods = parse_methods(args.method)
    oracle = _oracle(L, required="exact" in methods)
    exact = oracle.kernel_block(phi, nodes) if oracle is not None else None

    columns, results = [], []
    for method in methods:
        if method == "exact":
            block, entry = exact, {"method": "exact", "m": None, "effective_m": None,
                                   "mv": 0, "dot": 0, "axpy": 0}
        else:
            approx = approximate_block(method, L, nodes, phi, args.m)
            block, c = approx.block, approx.counters
            entry = {"method": method, "m": args.m, "effective_m": approx.effective_m,
                     "mv": c.mv, "dot": c.dot, "axpy": c.axpy}
        if exact is not None:
            diff = block - exact
            entry["error_fro"] = float(np.linalg.norm(diff))
            entry["error_uniform"] = float(np.max(np.abs(diff)))
        else:
            entry["error_fro"] = entry["error_uniform"] = None
        results.append(entry)
        columns.extend((f"{method}_{w}", block[:, i]) for i, w in enumerate(nodes))

    with open(_out(args, "kernel_signals.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node"] + [name for name, _ in columns])
        for v in range(L.n):
            writer.writerow([v] + [repr(float(col[v])) for _, col in columns])
    summary = _describe(args, L, nodes)
    summary["results"] = results
    _write_json(_out(args, "kernel_summary.json"), summary)
    for r in results:
        err = "n/a" if r["error_uniform"] is None else f"{r['error_uniform']:.6e}"
        print(f"{r['method']:>6} m={r['m']} uniform_error={err} mv={r['mv']}")
    return EXIT_OK


def cmd_predict(args):
    g, L = _setup(args)
    phi = make_phi(args)
    nodes = select_nodes(args, L.n)
    labels = select_labels(args, nodes)
    train = TrainingSet(nodes, labels, args.gamma)
    method = parse_methods(args.method)
    if len(method) != 1:
        raise ConfigError("predict takes a single --method")
    method = method[0]
    if args.hm_only and method != "cbl":
        raise ConfigError("--hm-only requires --method cbl")
    try:
        if method == "exact":
            pred = predict_exact(L, phi, train, _oracle(L, required=True))
        elif args.hm_only:
            pred = predict_cbl_hm_only(L, phi, train, args.m)
        else:
            pred = predict_krylov(L, phi, train, method, args.m)
    except NonInvertibleCollocation as exc:
        if not args.allow_singular:
            raise
        report = _describe(args, L, nodes)
        report.update({"method": method, "m": None if method == "exact" else args.m,
                       "gamma": args.gamma, "status": "singular", "message": str(exc)})
        _write_json(_out(args, "predictor.json"), report)
        print(f"collocation matrix not invertible: {exc}")
        return EXIT_OK

    report = _describe(args, L, nodes)
    report.update(pred.to_json())
    report["labels"] = pred.labels.tolist()
    report["status"] = "ok"
    _write_json(_out(args, "predictor.json"), report)
    classes = classify_sign(pred)
    with open(_out(args, "classification.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node", "signal", "class"])
        for v in range(L.n):
            writer.writerow([v, repr(float(pred.signal[v])), int(classes[v])])
    print(f"{pred.method} residual_at_W={pred.residual_at_W:.6e}")
    return EXIT_OK


def cmd_convergence(args):
    g, L = _setup(args)
    phi = make_phi(args)
    nodes = select_nodes(args, L.n)
    labels = select_labels(args, nodes)
    methods = parse_methods(args.method, allow_exact=False)
    m_range = parse_m_range(args.m_range)
    oracle = _oracle(L, required=True)
    records = convergence_study(L, phi, nodes, m_range, methods, labels=labels,
                                gamma=args.gamma, oracle=oracle)
    write_records_csv(records, _out(args, "convergence.csv"))
    report = _describe(args, L, nodes)
    report.update({"gamma": args.gamma, "records": records_to_json(records)})
    _write_json(_out(args, "convergence.json"), report)
    for r in records:
        pe = _finite(r.predictor_error_uniform)
        pe = "inf" if pe is None else f"{pe:.3e}"
        print(f"{r.method:>5} m={r.m:<3} error_fro={r.error_fro:.3e} bound={r.bound:.3e} "
              f"predictor={pe} mv={r.mv}")
    return EXIT_OK


def cmd_spectrum(args):
    g, L = _setup(args)
    phi = make_phi(args)
    nodes = select_nodes(args, L.n)
    methods = parse_methods(args.method, allow_exact=False)
    records = collocation_spectrum_study(L, phi, nodes, args.m, methods)
    with open(_out(args, "spectrum.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", "index", "re", "im"])
        for r in records:
            for i, ev in enumerate(r.eigenvalues):
                writer.writerow([r.method, i, repr(float(ev.real)), repr(float(ev.imag))])
    report = _describe(args, L, nodes)
    report["m"] = args.m
    report["methods"] = [{"method": r.method, "min_real": r.min_real,
                          "has_complex": r.has_complex, "symmetric": r.symmetric,
                          "negative_count": int(np.sum(r.eigenvalues.real < 0))}
                         for r in records]
    _write_json(_out(args, "spectrum.json"), report)
    for r in report["methods"]:
        print(f"{r['method']:>5} min_real={r['min_real']:.3e} complex={r['has_complex']} "
              f"negative={r['negative_count']}")
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", required=True,
                        help="path:N | edges:FILE | points:FILE | bunny:SEED")
    common.add_argument("--radius", type=float, default=BUNNY_RADIUS,
                        help="proximity radius for points:/bunny: graphs (default 0.01)")
    common.add_argument("--laplacian", choices=("standard", "normalized"), default="normalized")
    common.add_argument("--out", default=".", help="output directory (default: cwd)")

    kern = argparse.ArgumentParser(add_help=False)
    kern.add_argument("--phi", choices=("diffusion", "spline"), default="diffusion")
    kern.add_argument("--t", type=float, default=20.0, help="diffusion time")
    kern.add_argument("--eps", type=float, default=0.05, help="spline shift")
    kern.add_argument("--s", type=float, default=2.0, help="spline exponent")
    kern.add_argument("--nodes", help="comma list of 0-based node indices")
    kern.add_argument("--sample", type=int, help="sample N nodes with --seed")
    kern.add_argument("--seed", type=int, default=DEFAULT_SEED)
    kern.add_argument("--labels", help="CSV of node_index,value")
    kern.add_argument("--gamma", type=float, default=0.0)

    parser = _Parser(prog="graphkrylov", description=__doc__.splitlines()[0])
    parser.add_argument("--backend", choices=("auto", "cython", "python"), default=None)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("graph-info", parents=[common], help="graph and Laplacian summary")
    p.set_defaults(func=cmd_graph_info)

    p = sub.add_parser("kernel", parents=[common, kern], help="approximate kernel columns")
    p.add_argument("--method", default="cbl", help="comma list of methods or 'exact'")
    p.add_argument("--m", type=int, default=10)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("predict", parents=[common, kern], help="train an RLS predictor")
    p.add_argument("--method", default="exact")
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--hm-only", action="store_true",
                   help="cbl predictor from phi(H_m) only (never singular)")
    p.add_argument("--allow-singular", action="store_true",
                   help="report a singular collocation system instead of failing")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("convergence", parents=[common, kern], help="error sweep over m")
    p.add_argument("--method", default=",".join(METHODS))
    p.add_argument("--m-range", default="2..20")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("spectrum", parents=[common, kern], help="collocation eigenvalues")
    p.add_argument("--method", default=",".join(METHODS))
    p.add_argument("--m", type=int, default=6)
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "m", None) is not None and args.m < 1:
        parser.error("--m must be >= 1")
    try:
        if args.backend:
            _backend.use(args.backend)
        return args.func(args)
    except NumericalError as exc:
        print(f"graphkrylov {args.command}: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, GraphKrylovError, ValueError, OSError) as exc:
        print(f"graphkrylov {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
