"""Command line front end.

Five subcommands cover the desk-scale workflows: `limit` reconstructs
the limiting spectrum of a weight system, `spectrum` and `tensor`
compute nontrivial eigenvalues of sampled (tensored) lifts, `tangle`
estimates tangle statistics of sampled families, and `experiment`
bundles a limit scan with repeated lift spectra and their Hausdorff
distances.

Output files are deterministic byte-for-byte for a fixed configuration
and base seed.  Exit codes: 0 success, 1 validation or input problems,
2 solver non-convergence, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import freelimit, graphs, lift, model, presets
from .errors import LiftspecError, NoConvergence, ParseError

REPORT_FORMAT = "liftspec-report-1"


def derive_seed(base: int, index: int) -> int:
    """Stable per-task seed split of a base seed."""
    return int(np.random.SeedSequence([base, index]).generate_state(1)[0])


def _thread_count() -> int:
    env = os.environ.get("LIFTSPEC_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ParseError(f"LIFTSPEC_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def _add_system_args(p: _Parser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--preset", help="built-in system: figure1 or regular:<d>")
    g.add_argument("--ws", help="path to a weight-system JSON file")


def _resolve_system(args) -> model.WeightSystem:
    if args.preset is not None:
        return presets.parse_preset(args.preset)
    ws = model.load_weight_system(args.ws)
    problems = ws.validate()
    if problems:
        raise ParseError("; ".join(problems))
    return ws


def _sample(ws: model.WeightSystem, n: int, seed: int) -> model.PermutationFamily:
    return model.sample_symmetric(n, ws.num_free_pairs, ws.d, seed)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_spectrum_csv(path: str, eigenvalues, residuals) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "eigenvalue", "residual"])
        for i, (val, res) in enumerate(zip(eigenvalues, residuals)):
            w.writerow([i, _fmt(val), _fmt(res)])


def write_diag_csv(path: str, batch: freelimit.MembershipBatch) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["mu", "rho", "im_tr_g", "iterations", "residual"])
        for i in range(len(batch.mu)):
            w.writerow([_fmt(batch.mu[i]), _fmt(batch.rho[i]),
                        _fmt(batch.im_tr_root[i]), int(batch.iterations[i]),
                        _fmt(batch.residual[i])])


def _write_report(path: str, doc: dict) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _cmd_limit(args) -> int:
    ws = _resolve_system(args)
    scan = freelimit.limit_spectrum_scan(ws, grid_step=args.grid_step,
                                         refine_tol=args.refine_tol,
                                         eta=args.eta)
    scan.limit.save(args.out)
    if args.diag:
        write_diag_csv(args.diag, scan.grid)
    return 0


def _cmd_spectrum(args) -> int:
    ws = _resolve_system(args)
    pf = _sample(ws, args.n, args.seed)
    op = lift.LiftOperator(ws, pf)
    if args.k is None:
        m = op.reduced_dense()
        from .numerics import hermitian_eig
        eig = hermitian_eig(m)
        vals = eig.eigenvalues
        prod = m @ eig.eigenvectors
        res = np.linalg.norm(prod - eig.eigenvectors * vals, axis=0)
        write_spectrum_csv(args.out, vals, res)
    else:
        ex = lift.extreme_eigs(op, k=args.k, seed=derive_seed(args.seed, 1))
        vals = np.concatenate([ex.largest, ex.smallest])
        res = np.concatenate([ex.largest_residuals, ex.smallest_residuals])
        write_spectrum_csv(args.out, vals, res)
    return 0


def _cmd_tensor(args) -> int:
    ws = _resolve_system(args)
    pf = _sample(ws, args.n, args.seed)
    op = lift.TensorLiftOperator(ws, pf)
    ex = lift.extreme_eigs(op, k=args.k, seed=derive_seed(args.seed, 1))
    vals = np.concatenate([ex.largest, ex.smallest])
    res = np.concatenate([ex.largest_residuals, ex.smallest_residuals])
    write_spectrum_csv(args.out, vals, res)
    return 0


def _cmd_tangle(args) -> int:
    ws = _resolve_system(args)
    free = 0
    for i in range(args.samples):
        pf = _sample(ws, args.n, derive_seed(args.seed, i))
        g = graphs.build_colored_graph(pf)
        if graphs.is_tangle_free(g, args.radius):
            free += 1
    doc = {
        "format": REPORT_FORMAT,
        "command": "tangle",
        "preset": args.preset,
        "n": args.n,
        "samples": args.samples,
        "seed": args.seed,
        "radius": args.radius,
        "tangle_free_count": free,
        "tangle_free_fraction": free / args.samples,
        "tangled_fraction": (args.samples - free) / args.samples,
    }
    _write_report(args.out, doc)
    return 0


def _one_run(ws, n, seed, limit_set):
    pf = _sample(ws, n, seed)
    op = lift.LiftOperator(ws, pf)
    spec = lift.dense_spectrum(op)
    h = lift.hausdorff(spec, limit_set) if not limit_set.is_empty else None
    lo, hi = spec.bounds()
    return {"seed": seed, "min": lo, "max": hi, "hausdorff": h}


def _cmd_experiment(args) -> int:
    ws = _resolve_system(args)
    scan = freelimit.limit_spectrum_scan(ws, grid_step=args.grid_step,
                                         refine_tol=args.refine_tol)
    seeds = [derive_seed(args.seed, i) for i in range(args.samples)]
    workers = _thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(
                lambda s: _one_run(ws, args.n, s, scan.limit), seeds))
    else:
        runs = [_one_run(ws, args.n, s, scan.limit) for s in seeds]
    doc = {
        "format": REPORT_FORMAT,
        "command": "experiment",
        "preset": args.preset,
        "n": args.n,
        "samples": args.samples,
        "seed": args.seed,
        "grid_step": args.grid_step,
        "refine_tol": args.refine_tol,
        "limit": scan.limit.to_json(),
        "runs": runs,
    }
    _write_report(args.out, doc)
    return 0


def build_parser() -> _Parser:
    p = _Parser(prog="liftspec",
                description="weighted permutation lifts and their limiting spectra")
    sub = p.add_subparsers(dest="command", required=True)

    lim = sub.add_parser("limit", help="reconstruct the limiting spectrum")
    _add_system_args(lim)
    lim.add_argument("--grid-step", type=float, default=1e-2)
    lim.add_argument("--refine-tol", type=float, default=1e-3)
    lim.add_argument("--eta", type=float, default=freelimit.ETA_DEFAULT)
    lim.add_argument("--out", default="limit.json")
    lim.add_argument("--diag", default=None,
                     help="also write per-grid-point diagnostics CSV")
    lim.set_defaults(func=_cmd_limit)

    spec = sub.add_parser("spectrum", help="nontrivial spectrum of a sampled lift")
    _add_system_args(spec)
    spec.add_argument("--n", type=int, required=True)
    spec.add_argument("--seed", type=int, default=0)
    spec.add_argument("--k", type=int, default=None,
                      help="extreme pairs via iteration instead of full dense")
    spec.add_argument("--out", default="spectrum.csv")
    spec.set_defaults(func=_cmd_spectrum)

    ten = sub.add_parser("tensor", help="extreme eigenvalues of a tensored lift")
    _add_system_args(ten)
    ten.add_argument("--n", type=int, required=True)
    ten.add_argument("--seed", type=int, default=0)
    ten.add_argument("--k", type=int, default=1)
    ten.add_argument("--out", default="spectrum.csv")
    ten.set_defaults(func=_cmd_tensor)

    tan = sub.add_parser("tangle", help="tangle statistics of sampled families")
    _add_system_args(tan)
    tan.add_argument("--n", type=int, required=True)
    tan.add_argument("--samples", type=int, default=100)
    tan.add_argument("--seed", type=int, default=0)
    tan.add_argument("--l", dest="radius", type=int, default=2)
    tan.add_argument("--out", default="report.json")
    tan.set_defaults(func=_cmd_tangle)

    exp = sub.add_parser("experiment",
                         help="limit scan plus repeated lift spectra")
    _add_system_args(exp)
    exp.add_argument("--n", type=int, required=True)
    exp.add_argument("--samples", type=int, default=10)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--grid-step", type=float, default=1e-2)
    exp.add_argument("--refine-tol", type=float, default=1e-3)
    exp.add_argument("--out", default="report.json")
    exp.set_defaults(func=_cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate_common(args)
        return args.func(args)
    except ParseError as e:
        print(f"liftspec: {e}", file=sys.stderr)
        return 1
    except NoConvergence as e:
        print(f"liftspec: did not converge: {e}", file=sys.stderr)
        return 2
    except (LiftspecError, ValueError) as e:
        print(f"liftspec: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"liftspec: i/o error: {e}", file=sys.stderr)
        return 3


def _validate_common(args) -> None:
    for name in ("n", "samples", "k"):
        val = getattr(args, name, None)
        if val is not None and val < 1:
            raise ParseError(f"--{name} must be at least 1, got {val}")
    seed = getattr(args, "seed", None)
    if seed is not None and seed < 0:
        raise ParseError(f"--seed must be nonnegative, got {seed}")
    radius = getattr(args, "radius", None)
    if radius is not None and radius < 1:
        raise ParseError(f"--l must be at least 1, got {radius}")


if __name__ == "__main__":
    sys.exit(main())
