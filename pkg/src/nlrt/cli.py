"""Command-line entry point: ``nlrt <command> ...``.

Exit status is 0 on success, 1 on a usage error and 2 on a data error.
"""

import argparse
import logging
import os
import sys
from contextlib import nullcontext

from . import baselines as bl
from .analysis import (
    LabeledPixels,
    knn_classify,
    residual_curve_ncpd,
    residual_curve_nlrt,
    residual_curve_ntd,
    spectral_features,
    split_per_class,
)
from .bench import BENCH_COLUMNS, ExperimentSpec, rows_as_lists, run_bench
from .datagen import add_noise_snr, case1_ground_truth, case2_random, feasible_point
from .fileio import TensorFileError, export_raw, import_raw, read_labels, read_tensor, write_csv, write_tensor
from .metrics import rel_error
from .solver import SolverConfig, nlrt_approximate

METHODS = {"nlrt": "NLRT", "ntd-mu": "NTD-MU", "ntd-hals": "NTD-HALS", "ncpd-mu": "NCPD-MU", "ncpd-hals": "NCPD-HALS"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _ints(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _thread_limit(n):
    if n is None:
        env = os.environ.get("NLRT_THREADS")
        n = int(env) if env else None
    if n is None:
        return nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def _method(name, args):
    """Resolve a method name and check its rank flag before any data is read."""
    method = METHODS.get(name.lower())
    if method is None:
        raise UsageError(f"unknown method {name!r}")
    if method.startswith("NCPD"):
        if not args.cp_rank:
            raise UsageError(f"--cp-rank is required for {method}")
    elif not args.rank:
        raise UsageError(f"--rank is required for {method}")
    return method


def _fit(method, a, args):
    """Run one method on ``a``; returns ``(estimate, model, trace_header, trace_rows, summary)``."""
    if method == "NLRT":
        res = nlrt_approximate(a, SolverConfig(ranks=args.rank, tol=args.tol, max_iters=args.max_iters))
        header = ["iteration", "rel_change", "inter_set_distance", "objective"]
        return res.approximation, res, header, res.trace.rows(), (res.iterations, res.converged)
    cfg = bl.FitConfig(tol=args.tol, max_iters=args.max_iters, seed=args.seed)
    if method.startswith("NTD"):
        f, tr = (bl.ntd_mu if method == "NTD-MU" else bl.ntd_hals)(a, args.rank, cfg)
        est = bl.reconstruct_tucker(f)
    else:
        f, tr = (bl.ncpd_mu if method == "NCPD-MU" else bl.ncpd_hals)(a, args.cp_rank, cfg)
        est = bl.reconstruct_cp(f)
    rows = [(i, c, o) for i, (c, o) in enumerate(zip(tr.rel_change, tr.objective))]
    return est, f, ["iteration", "rel_change", "objective"], rows, (tr.iterations, tr.converged)


def cmd_synth(args):
    if not args.shape:
        raise UsageError("--shape is required")
    if args.kind == "case2":
        t = case2_random(args.shape, args.seed)
    else:
        if not args.rank:
            raise UsageError("--rank is required")
        gen = case1_ground_truth if args.kind == "case1" else feasible_point
        t = gen(args.shape, args.rank, args.seed)
    if args.snr_db is not None:
        t = add_noise_snr(t, args.snr_db, args.seed + 1)
    write_tensor(args.out, t)
    print(f"wrote {args.kind} tensor {t.shape} to {args.out}")


def cmd_approx(args):
    method = _method(args.method, args)
    a = read_tensor(args.input)
    est, _, header, rows, (iters, converged) = _fit(method, a, args)
    if args.out:
        write_tensor(args.out, est)
    if args.trace:
        write_csv(args.trace, header, rows)
    print(f"method={method} iterations={iters} converged={converged}")
    print(f"rel_error_vs_input={rel_error(est, a)!r}")
    if args.truth:
        print(f"rel_error_vs_truth={rel_error(est, read_tensor(args.truth))!r}")


def cmd_bench(args):
    if args.config:
        spec = ExperimentSpec.from_json(args.config)
        if args.out:
            spec.out = args.out
    else:
        kw = {}
        for name in ("case", "shape", "ranks", "trials", "noise_trials", "seed", "tol", "max_iters", "out"):
            val = getattr(args, name)
            if val is not None:
                kw[name] = val
        if args.snr_db_list is not None:
            kw["snr_db"] = args.snr_db_list
        if args.cp_rank is not None:
            kw["cp_ranks"] = [args.cp_rank]
        if args.methods:
            kw["methods"] = [METHODS.get(m.lower(), m) for m in args.methods.split(",")]
        if args.input:
            kw["input_path"] = args.input
        spec = ExperimentSpec(**kw)
    rows = rows_as_lists(run_bench(spec))
    print(",".join(BENCH_COLUMNS))
    for r in rows:
        print(",".join(repr(v) if isinstance(v, float) else str(v) for v in r))
    if spec.out:
        write_csv(spec.out, BENCH_COLUMNS, rows)


def cmd_features(args):
    methods = [_method(name, args) for name in args.methods.split(",")]
    a = read_tensor(args.input)
    rows = []
    for method in methods:
        _, model, _, _, _ = _fit(method, a, args)
        j_max = args.j_max
        if method == "NLRT":
            curve = residual_curve_nlrt(a, model, args.mode, j_max or args.rank[args.mode])
        elif method.startswith("NTD"):
            curve = residual_curve_ntd(a, model, args.mode, j_max or args.rank[args.mode])
        else:
            curve = residual_curve_ncpd(a, model, j_max or args.cp_rank)
        rows += [(method, j, r) for _, j, r in curve.rows()]
    write_csv(args.out, ["method", "j", "relative_residual"], rows)
    print(f"wrote {len(rows)} curve points to {args.out}")


def cmd_classify(args):
    methods = [_method(name, args) for name in args.methods.split(",")]
    a = read_tensor(args.input)
    pix, cls = read_labels(args.labels)
    rows = []
    for method in methods:
        _, model, _, _, _ = _fit(method, a, args)
        feats, _ = spectral_features(model, args.mode, args.count)
        if pix.min() < 0 or pix.max() >= len(feats):
            raise ValueError(f"pixel_index outside 0..{len(feats) - 1}")
        for s in args.per_class:
            train, test = split_per_class(cls, s, args.seed)
            data = LabeledPixels(features=feats[pix], labels=cls, train=train, test=test)
            for k in args.k:
                acc = knn_classify(data, k)
                rows.append((method, s, k, acc))
                print(f"{method} s={s} {k}-NN accuracy={acc:.4f}")
    if args.out:
        write_csv(args.out, ["method", "s", "k", "accuracy"], rows)


def cmd_convert(args):
    if args.to_raw:
        export_raw(args.out, read_tensor(args.input), args.dtype)
    else:
        if not args.shape:
            raise UsageError("--shape is required when importing raw data")
        t = import_raw(args.input, args.shape, args.dtype, normalize=args.normalize, clamp=args.clamp)
        write_tensor(args.out, t)
    print(f"wrote {args.out}")


def _fit_flags(p, with_rank=True):
    if with_rank:
        p.add_argument("--rank", type=_ints, help="multilinear rank r1,r2,...")
        p.add_argument("--cp-rank", type=int, help="CP rank for NCPD methods")
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = _Parser(prog="nlrt", description="Nonnegative low multilinear rank tensor approximation")
    parser.add_argument("--threads", type=int, help="cap BLAS threads (falls back to NLRT_THREADS)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("synth", help="generate a synthetic tensor file")
    p.add_argument("kind", choices=["case1", "case2", "feasible"])
    p.add_argument("--shape", type=_ints)
    p.add_argument("--rank", type=_ints)
    p.add_argument("--snr-db", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("approx", help="fit one method to a tensor file")
    p.add_argument("method", choices=sorted(METHODS))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.add_argument("--trace", help="write the convergence trace CSV here")
    p.add_argument("--truth", help="ground-truth tensor file for an extra error line")
    _fit_flags(p)
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("bench", help="relative-error benchmark (JSON config or flags)")
    p.add_argument("--config")
    p.add_argument("--case", choices=["case1", "case2", "file"])
    p.add_argument("--in", dest="input")
    p.add_argument("--shape", type=_ints)
    p.add_argument("--rank", dest="ranks", type=_ints)
    p.add_argument("--cp-rank", type=int)
    p.add_argument("--snr-db", dest="snr_db_list", type=_floats, help="comma-separated, 'inf' for noise-free")
    p.add_argument("--trials", type=int)
    p.add_argument("--noise-trials", type=int)
    p.add_argument("--methods", help="comma-separated method names")
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("features", help="residual curves of ranked components")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--methods", default="nlrt")
    p.add_argument("--mode", type=int, default=2, help="0-based mode for NLRT/NTD curves")
    p.add_argument("--j-max", type=int)
    p.add_argument("--out", required=True)
    _fit_flags(p)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("classify", help="k-NN accuracy on spectral features")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--labels", required=True, help="CSV with header pixel_index,class")
    p.add_argument("--methods", default="nlrt")
    p.add_argument("--mode", type=int, default=2, help="0-based spectral mode")
    p.add_argument("--count", type=int, default=16)
    p.add_argument("--per-class", type=_ints, default=(10,))
    p.add_argument("--k", type=_ints, default=(1, 3, 5))
    p.add_argument("--out")
    _fit_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("convert", help="raw stack <-> tensor file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--shape", type=_ints)
    p.add_argument("--dtype", default="f32")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--clamp", action="store_true")
    p.add_argument("--to-raw", action="store_true")
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        with _thread_limit(args.threads):
            args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"nlrt: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, TensorFileError, OSError, FloatingPointError, RuntimeError) as exc:
        print(f"nlrt: data error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
