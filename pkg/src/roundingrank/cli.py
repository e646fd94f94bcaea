"""Command-line front end.

Commands: rank, minerr, nested, gen, experiment, verify.  Results go to
stdout as JSON (schema version 1) or, for experiment, to a CSV file.
Exit codes: 0 success, 2 parse/usage error, 3 method failure,
4 verification failure.

--repro zeroes the wall-time fields so that repeated runs with the same
seed produce byte-identical output.  RR_THREADS caps experiment
parallelism; RR_NO_EXT=1 forces the pure-Python LP kernel.
"""

import argparse
import json
import sys
import time

import numpy as np

from . import experiment as exp
from . import io as rio
from . import lpca, nested, perm, proj, spectral
from .bounds import spectral_lower_bound
from .datagen import GenSpec, generate
from .matrix import density, hamming_error, relative_error, rounds_to

SCHEMA = 1

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_METHOD = 3
EXIT_VERIFY = 4


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _emit(obj):
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _read_matrix(path):
    try:
        return rio.read_matrix(path)
    except (OSError, ValueError) as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc


def _maybe_zero(elapsed, args):
    return 0.0 if args.repro else elapsed


def _write_witness(args, witness):
    if witness is None or args.witness_out is None:
        return None, witness
    rio.write_factorization(args.witness_out, witness)
    return args.witness_out, rio.read_factorization(args.witness_out)


def cmd_rank(args):
    B = _read_matrix(args.matrix)
    tau = args.tau
    if args.method == "proj":
        cfg = proj.ProjConfig(epsilon=args.epsilon, d_max=args.dmax,
                              repetitions=args.reps, seed=args.seed)
        est = proj.estimate_rank(B, tau, cfg)
    elif args.method == "svd":
        est = spectral.svd_estimate_rank(B, tau)
    elif args.method == "lpca":
        cfg = lpca.LpcaConfig(max_iters=args.max_iters, tol=args.tol,
                              restarts=args.restarts, seed=args.seed,
                              k_max=args.max_k)
        est = lpca.estimate_rank(B, tau, cfg)
    elif args.method == "perm":
        est = perm.estimate_rank(B, tau, seed=args.seed,
                                 order_restarts=args.order_restarts)
    elif args.method == "nuclear":
        est = spectral.nuclear_estimate_rank(B, tau, eps=args.nuclear_eps,
                                             admm_iters=args.admm_iters)
    elif args.method == "lowerbound":
        est = spectral_lower_bound(B)
    else:
        raise CliError(EXIT_PARSE, f"unknown method {args.method!r}")

    if est is None:
        _emit({"schema": SCHEMA, "method": args.method, "status": "failed",
               "kind": None, "bound": None, "tau": tau, "seed": args.seed,
               "elapsed_s": None, "witness_path": None, "verified": False,
               "note": "solver did not produce a bound"})
        return EXIT_METHOD

    witness_path, witness = (None, est.witness)
    if est.kind == "upper":
        witness_path, witness = _write_witness(args, est.witness)
        verified = witness is not None and rounds_to(witness, B)
    else:
        verified = True
    _emit({"schema": SCHEMA, "method": est.method, "status": "ok",
           "kind": est.kind, "bound": est.value, "tau": tau, "seed": args.seed,
           "elapsed_s": _maybe_zero(est.elapsed, args),
           "witness_path": witness_path, "verified": verified, "note": est.note})
    if est.kind == "upper" and not verified:
        return EXIT_VERIFY
    return EXIT_OK


def cmd_minerr(args):
    B = _read_matrix(args.matrix)
    tau = args.tau
    t0 = time.perf_counter()
    fallbacks = []
    if args.method == "truncsvd":
        _, residual = spectral.trunc_svd_baseline(B, args.k)
        _emit({"schema": SCHEMA, "method": "truncsvd", "status": "ok",
               "k": args.k, "tau": tau, "seed": args.seed, "rounded": False,
               "error_abs": None, "error_rel": residual,
               "elapsed_s": _maybe_zero(time.perf_counter() - t0, args),
               "out": None, "witness_path": None, "verified": True,
               "fallback_columns": 0})
        return EXIT_OK

    if args.method == "proj":
        cfg = proj.ProjConfig(epsilon=args.epsilon, seed=args.seed)
        C, witness, fallbacks = proj.min_error_decomposition(B, args.k, tau, cfg)
    elif args.method == "svd":
        C, witness, _ = spectral.svd_min_error(B, args.k, tau)
    elif args.method == "lpca":
        cfg = lpca.LpcaConfig(max_iters=args.max_iters, tol=args.tol,
                              restarts=args.restarts, seed=args.seed)
        C, witness = lpca.min_error(B, args.k, tau, cfg)
    else:
        raise CliError(EXIT_PARSE, f"unknown method {args.method!r}")
    elapsed = time.perf_counter() - t0

    if args.out:
        rio.write_matrix(args.out, C)
    witness_path, witness = _write_witness(args, witness)
    verified = bool(np.array_equal(witness.round(), C))
    err = hamming_error(B, C)
    rel = relative_error(B, C) if B.sum() else None
    _emit({"schema": SCHEMA, "method": args.method, "status": "ok",
           "k": args.k, "tau": tau, "seed": args.seed, "rounded": True,
           "error_abs": err, "error_rel": rel,
           "elapsed_s": _maybe_zero(elapsed, args),
           "out": args.out, "witness_path": witness_path, "verified": verified,
           "fallback_columns": len(fallbacks)})
    return EXIT_OK if verified else EXIT_VERIFY


def cmd_nested(args):
    B = _read_matrix(args.matrix)
    t0 = time.perf_counter()
    if args.method == "check":
        ok, rp, cp = nested.is_nested(B)
        _emit({"schema": SCHEMA, "method": "check", "status": "ok", "nested": ok,
               "row_perm": rp.tolist() if ok else None,
               "col_perm": cp.tolist() if ok else None,
               "elapsed_s": _maybe_zero(time.perf_counter() - t0, args)})
        return EXIT_OK

    if args.method == "construct":
        try:
            l, r = nested.nested_rank1_construct(B)
        except ValueError as exc:
            _emit({"schema": SCHEMA, "method": "construct", "status": "failed",
                   "note": str(exc)})
            return EXIT_METHOD
        sol = nested.NestedSolution(B, l, r, 0, 0)
    elif args.method == "nexhaust":
        l0 = r0 = None
        if args.init_matrix:
            seed_matrix = _read_matrix(args.init_matrix)
            try:
                l0, r0 = nested.nested_rank1_construct(seed_matrix)
            except ValueError as exc:
                raise CliError(EXIT_PARSE, f"--init-matrix is not nested: {exc}")
        sol = nested.nexhaust(B, l0, r0, max_sweeps=args.max_sweeps)
    elif args.method == "svd1":
        sol = nested.svd_nested(B)
    else:
        raise CliError(EXIT_PARSE, f"unknown method {args.method!r}")
    elapsed = time.perf_counter() - t0

    if args.out:
        rio.write_matrix(args.out, sol.C)
    factors_path = None
    if args.factors_out:
        from .matrix import Factorization

        factors_path = args.factors_out
        rio.write_factorization(factors_path,
                                Factorization(sol.l[:, None], sol.r[:, None], 0.5))
    rel = relative_error(B, sol.C) if B.sum() else None
    _emit({"schema": SCHEMA, "method": args.method, "status": "ok",
           "error_abs": sol.error, "error_rel": rel, "sweeps": sol.sweeps,
           "flags": sol.flags,
           "elapsed_s": _maybe_zero(elapsed, args),
           "out": args.out, "factors_path": factors_path})
    return EXIT_OK


def cmd_gen(args):
    spec = GenSpec(m=args.m, n=args.n, k=args.k, dist=args.dist, mu=args.mu,
                   noise=args.noise, tau=args.tau, seed=args.seed)
    B, planted = generate(spec)
    rio.write_matrix(args.out, B, fmt=args.format)
    witness_path = None
    if args.witness_out:
        rio.write_factorization(args.witness_out, planted)
        witness_path = args.witness_out
    _emit({"schema": SCHEMA, "status": "ok", "m": args.m, "n": args.n,
           "k": args.k, "dist": args.dist, "mu": args.mu, "noise": args.noise,
           "tau": args.tau, "seed": args.seed, "density": density(B),
           "out": args.out, "witness_path": witness_path,
           "witness_certifies_noise_free": args.noise > 0})
    return EXIT_OK


def cmd_experiment(args):
    try:
        with open(args.protocol, "r", encoding="ascii") as fh:
            proto = exp.parse_protocol(fh.read())
    except (OSError, exp.ProtocolError) as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    rows = exp.run_experiment(proto, args.out, repro=args.repro)
    _emit({"schema": SCHEMA, "status": "ok", "rows": len(rows), "out": args.out,
           "failures": int(sum(r["n_failed"] for r in rows))})
    return EXIT_OK


def cmd_verify(args):
    B = _read_matrix(args.matrix)
    try:
        f = rio.read_factorization(args.factorization)
    except (OSError, ValueError) as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    if f.shape != B.shape:
        raise CliError(EXIT_PARSE,
                       f"factorization shape {f.shape} does not match matrix {B.shape}")
    mismatches = hamming_error(B, f.round())
    _emit({"schema": SCHEMA, "status": "ok", "match": mismatches == 0,
           "mismatches": mismatches, "m": B.shape[0], "n": B.shape[1],
           "k": f.k, "tau": f.tau})
    return EXIT_OK if mismatches == 0 else EXIT_VERIFY


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--repro", action="store_true",
                        help="zero wall-time fields for byte-identical reruns")

    parser = argparse.ArgumentParser(
        prog="roundingrank",
        description="Rounding-rank bounds and decompositions for binary matrices")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", parents=[common],
                       help="upper or lower bound the rounding rank")
    p.add_argument("matrix")
    p.add_argument("--method", required=True,
                   choices=["proj", "svd", "lpca", "perm", "nuclear", "lowerbound"])
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=1e-9)
    p.add_argument("--dmax", type=int, default=None)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-k", type=int, default=None)
    p.add_argument("--order-restarts", type=int, default=3)
    p.add_argument("--admm-iters", type=int, default=500)
    p.add_argument("--nuclear-eps", type=float, default=1e-3)
    p.add_argument("--witness-out")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("minerr", parents=[common],
                       help="minimum-error fixed-rank decomposition")
    p.add_argument("matrix")
    p.add_argument("--method", required=True,
                   choices=["proj", "svd", "lpca", "truncsvd"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=1e-9)
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out")
    p.add_argument("--witness-out")
    p.set_defaults(func=cmd_minerr)

    p = sub.add_parser("nested", parents=[common],
                       help="nestedness checks and closest-nested solvers")
    p.add_argument("matrix")
    p.add_argument("--method", required=True,
                   choices=["check", "construct", "nexhaust", "svd1"])
    p.add_argument("--max-sweeps", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init-matrix")
    p.add_argument("--out")
    p.add_argument("--factors-out")
    p.set_defaults(func=cmd_nested)

    p = sub.add_parser("gen", parents=[common],
                       help="generate a synthetic planted-rank matrix")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--dist", choices=["uniform", "normal"], default="uniform")
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["dense", "sparse"], default="dense")
    p.add_argument("--out", required=True)
    p.add_argument("--witness-out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("experiment", parents=[common],
                       help="run a protocol grid and write a CSV")
    p.add_argument("protocol")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("verify", parents=[common],
                       help="check that a factorization rounds to a matrix")
    p.add_argument("matrix")
    p.add_argument("factorization")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_METHOD


if __name__ == "__main__":
    sys.exit(main())
