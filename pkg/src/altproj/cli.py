"""Command-line front end.

Subcommands: ``run`` (drive an iteration and write a trace CSV),
``kaczmarz`` (solve a linear system file), ``angle`` (Friedrichs cosine and
measured-vs-predicted rate CSV), ``diverge`` (build the non-convergence
construction and report it), ``thirds`` (string-thirds demonstration).

Exit codes: 0 success/converged, 2 iteration ran out of steps without
converging, 1 any input or construction error.  The JSON report goes to
stdout and is byte-deterministic for identical invocations; timing and
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import analysis, divergence, iteration, kaczmarz, linalg
from .schedules import parse_schedule

#: all numbers in CSV/JSON outputs carry 17 significant digits
FMT = "%.17g"


def _fmt(value):
    return FMT % float(value)


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage errors with exit code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


class InputError(Exception):
    pass


def _parse_vector(text):
    try:
        return np.array([float(t) for t in text.replace(",", " ").split()])
    except ValueError as exc:
        raise InputError(f"malformed vector {text!r}: {exc}") from None


def _parse_eps_list(text):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        try:
            if "/" in tok:
                num, den = tok.split("/")
                out.append(float(num) / float(den))
            else:
                out.append(float(tok))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"malformed accuracy list {text!r}: {exc}") from None
    return out


def _report(payload):
    print(json.dumps(payload, indent=2))


def _write_trace_csv(path, trace):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("n,j_n,norm,increment,residual\n")
        for t in range(trace.steps):
            residual = "" if trace.residuals is None else _fmt(trace.residuals[t + 1])
            fh.write(f"{t + 1},{trace.indices[t]},{_fmt(trace.iterate_norms[t + 1])},"
                     f"{_fmt(trace.increments[t])},{residual}\n")


def cmd_run(args):
    spaces = [linalg.load_subspace(p) for p in args.spaces]
    schedule = parse_schedule(args.schedule, J=len(spaces))
    if schedule.J != len(spaces):
        raise InputError(f"schedule alphabet 1..{schedule.J} does not match {len(spaces)} subspace files")
    x0 = _parse_vector(args.x0)
    cfg = iteration.RunConfig(max_steps=args.max_steps, stop_tol=args.tol)
    trace = iteration.run(spaces, schedule, x0, cfg, reference="auto",
                          store_iterates=args.store_iterates)
    _write_trace_csv(args.out, trace)
    _report({
        "command": "run",
        "inputs": {
            "spaces": list(args.spaces),
            "schedule": args.schedule,
            "x0": [float(v) for v in x0],
            "max_steps": args.max_steps,
            "stop_tol": float(args.tol),
            "seed": args.seed,
        },
        "steps_executed": trace.steps,
        "converged": trace.converged,
        "schedule_exhausted": trace.schedule_exhausted,
        "final_residual": float(trace.residuals[-1]),
        "final_iterate": [float(v) for v in trace.final_iterate],
        "outputs": [args.out],
    })
    return 0 if trace.converged else 2


def cmd_kaczmarz(args):
    system = kaczmarz.load_system(args.system, dense=args.dense)
    if args.min_norm:
        x0 = np.zeros(system.ambient_dim)
    elif args.x0 is not None:
        x0 = _parse_vector(args.x0)
    else:
        raise InputError("kaczmarz needs --x0 or --min-norm")
    result = kaczmarz.solve(system, x0, max_sweeps=args.sweeps, tol=args.tol)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        for v in result.x:
            fh.write(_fmt(v) + "\n")
    residuals_path = args.residuals or (args.out + ".residuals.csv")
    with open(residuals_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("sweep,residual\n")
        for i, r in enumerate(result.residual_history, start=1):
            fh.write(f"{i},{_fmt(r)}\n")
    _report({
        "command": "kaczmarz",
        "inputs": {
            "system": args.system,
            "dense": bool(args.dense),
            "x0": "min-norm" if args.min_norm else args.x0,
            "sweeps": args.sweeps,
            "tol": float(args.tol),
            "seed": args.seed,
        },
        "steps_executed": result.sweeps,
        "converged": result.converged,
        "suspected_inconsistent": result.suspected_inconsistent,
        "final_residual": float(result.residual_history[-1]),
        "outputs": [args.out, residuals_path],
    })
    return 0 if result.converged else 2


def cmd_angle(args):
    s1 = linalg.load_subspace(args.space1)
    s2 = linalg.load_subspace(args.space2)
    curve = analysis.rate_curve(s1, s2, args.n)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("n,measured,predicted,abs_err\n")
        for n, measured, predicted, err in curve.rows():
            fh.write(f"{n},{_fmt(measured)},{_fmt(predicted)},{_fmt(err)}\n")
    _report({
        "command": "angle",
        "inputs": {"space1": args.space1, "space2": args.space2, "n": args.n, "seed": args.seed},
        "steps_executed": args.n,
        "converged": True,
        "friedrichs_cosine": float(curve.c),
        "max_abs_err": max(curve.abs_errors),
        "outputs": [args.out],
    })
    return 0


def cmd_diverge(args):
    epsilons = (_parse_eps_list(args.eps) if args.eps
                else [2.0 ** (-(i + 4)) for i in range(1, args.K + 1)])
    construction = divergence.glue(args.K, epsilons, seed=args.seed,
                                   r_cap=args.r_cap, s_cap=args.s_cap)
    trace_path = args.trace or (args.out + ".trace.csv")
    report = {
        "command": "diverge",
        "inputs": {"K": args.K, "epsilons": epsilons, "seed": args.seed,
                   "r_cap": args.r_cap, "s_cap": args.s_cap},
        "ambient_dim": construction.ambient_dim,
        "K": construction.K,
        "epsilons": construction.epsilons,
        "triples": [
            {
                "k": t.quarter.k,
                "r": list(t.quarter.r),
                "s": [int(s) for s in t.s],
                "psi_length": int(t.psi.length),
            }
            for t in construction.triples
        ],
        "checkpoints": [int(c) for c in construction.checkpoints],
        "verified_bounds": {str(i + 1): a for i, a in enumerate(construction.achieved)},
        "non_cauchy_gap": construction.non_cauchy_gap,
        "caveat": construction.caveat,
        "outputs": [args.out, trace_path],
    }
    if args.sakai:
        report["sakai_constant"] = divergence.sakai_blowup(construction)
    # checkpoint trace: the full step-by-step trace is out of reach whenever
    # the schedule length is astronomical, the checkpoint states never are
    with open(trace_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("checkpoint,n,norm,err_to_target\n")
        for i, (n_k, state, err) in enumerate(zip(construction.checkpoints,
                                                  construction.checkpoint_states,
                                                  construction.achieved), start=1):
            fh.write(f"{i},{n_k},{_fmt(np.linalg.norm(state))},{_fmt(err)}\n")
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    _report(report)
    return 0


def cmd_thirds(args):
    positions, bound_ok = kaczmarz.thirds_demo(args.x, args.y, args.z, args.n)
    c = args.x + args.y + args.z
    lines = ["k,left,right,left_dev,right_dev"]
    for k, (left, right) in enumerate(positions):
        lines.append(f"{k},{_fmt(left)},{_fmt(right)},"
                     f"{_fmt(abs(left - c / 3.0))},{_fmt(abs(right - 2.0 * c / 3.0))}")
    table = "\n".join(lines)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(table + "\n")
    else:
        print(table, file=sys.stderr)
    _report({
        "command": "thirds",
        "inputs": {"x": args.x, "y": args.y, "z": args.z, "n": args.n, "seed": args.seed},
        "steps_executed": args.n,
        "converged": bool(bound_ok),
        "bound_ok": bool(bound_ok),
        "final_positions": [positions[-1][0], positions[-1][1]],
        "outputs": [args.out] if args.out else [],
    })
    return 0


def build_parser():
    parser = _Parser(prog="altproj", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0, help="PRNG seed, echoed in every report")
    parser.add_argument("--tol", type=float, default=1e-10, help="stopping tolerance")
    parser.add_argument("--max-steps", type=int, default=100_000, dest="max_steps")
    parser.add_argument("--out", default=None, dest="global_out",
                        help="output path (also accepted after the subcommand)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="drive x_n = P_{j_n} x_{n-1} and write a trace CSV")
    p.add_argument("--spaces", nargs="+", required=True, help="subspace files, one per index")
    p.add_argument("--schedule", required=True, help="periodic:1,2,3 | ruler:J | file:PATH")
    p.add_argument("--x0", required=True, help="starting vector, comma separated")
    p.add_argument("--out", default=None)
    p.add_argument("--store-iterates", action="store_true", dest="store_iterates")
    p.set_defaults(func=cmd_run, default_out="trace.csv")

    p = sub.add_parser("kaczmarz", help="solve a consistent linear system by cyclic projection")
    p.add_argument("system", help="system file (sparse rows, or dense CSV with --dense)")
    p.add_argument("--dense", action="store_true")
    p.add_argument("--x0", default=None, help="starting vector, comma separated")
    p.add_argument("--min-norm", action="store_true", dest="min_norm",
                   help="start from zero: converges to the minimal-norm solution")
    p.add_argument("--sweeps", type=int, default=100_000)
    p.add_argument("--out", default=None)
    p.add_argument("--residuals", default=None, help="residual CSV path (default OUT.residuals.csv)")
    p.set_defaults(func=cmd_kaczmarz, default_out="solution.txt")

    p = sub.add_parser("angle", help="Friedrichs cosine and measured-vs-predicted rates")
    p.add_argument("space1")
    p.add_argument("space2")
    p.add_argument("--n", type=int, default=8, help="number of alternation powers to measure")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_angle, default_out="rates.csv")

    p = sub.add_parser("diverge", help="build the non-Cauchy-window construction")
    p.add_argument("--K", type=int, default=2, help="number of glued triples")
    p.add_argument("--eps", default=None,
                   help="comma list of accuracy budgets (fractions like 1/32 allowed); "
                        "default 2^-(i+4)")
    p.add_argument("--r-cap", type=int, default=divergence.DEFAULT_R_CAP, dest="r_cap")
    p.add_argument("--s-cap", type=int, default=divergence.DEFAULT_S_CAP, dest="s_cap")
    p.add_argument("--sakai", action="store_true",
                   help="also run the schedule and report the empirical increment-sum constant")
    p.add_argument("--out", default=None)
    p.add_argument("--trace", default=None, help="checkpoint trace CSV (default OUT.trace.csv)")
    p.set_defaults(func=cmd_diverge, default_out="construction.json")

    p = sub.add_parser("thirds", help="string-thirds two-projection demonstration")
    p.add_argument("x", type=float)
    p.add_argument("y", type=float)
    p.add_argument("z", type=float)
    p.add_argument("--n", type=int, default=10, help="number of fold-and-slide iterations")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_thirds, default_out=None)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    if args.out is None:
        args.out = args.global_out if args.global_out is not None else args.default_out
    started = time.monotonic()
    try:
        code = args.func(args)
    except (InputError, OSError, ValueError, ArithmeticError,
            divergence.ExponentCapExceeded) as exc:
        print(f"altproj {args.command}: error: {exc}", file=sys.stderr)
        return 1
    finally:
        elapsed_ms = (time.monotonic() - started) * 1000.0
        print(f"altproj {getattr(args, 'command', '?')}: elapsed_ms={elapsed_ms:.3f}",
              file=sys.stderr)
    return code


def console_main():
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
