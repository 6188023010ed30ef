"""Command-line interface: ``tightcs <command> ...`` or ``python3 -m tightcs``.

Commands write Matrix Market files for matrices and vectors and print JSON
for reports.  Errors go to stderr with exit status 2.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import bounds
from .frames import FRAME_KINDS, build_frame, save_frame
from .mmio import read_matrix, read_vector, write_matrix, write_vector
from .noise import ads_lambda, alasso_mu, l2_noise_bound
from .sensing import SensingSpec, draw_sensing, drip_exact, drip_monte_carlo

__all__ = ["main", "build_parser"]


def _floats(text):
    return [float(t) for t in text.split(",") if t.strip()]


def _emit(obj):
    print(json.dumps(obj, indent=1, sort_keys=True, default=_json_default))


def _json_default(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _finite(v):
    return None if isinstance(v, float) and not math.isfinite(v) else v


def cmd_frame_gen(args):
    F = build_frame(args.kind, args.n, args.d, seed=args.seed, path=args.path)
    save_frame(args.out, F)
    _emit({"kind": F.kind, "n": F.n, "d": F.d, "tightness_residual": F.tightness_residual,
           "out": args.out})


def cmd_sense_gen(args):
    A = draw_sensing(SensingSpec(args.kind, args.m, args.n, seed=args.seed))
    write_matrix(args.out, A, comment=f"{args.kind} sensing seed={args.seed}")
    _emit({"kind": args.kind, "m": args.m, "n": args.n, "seed": args.seed, "out": args.out})


def _load_frame(path):
    return build_frame("from_file", 0, path=path)


def cmd_drip(args):
    A = read_matrix(args.A)
    F = _load_frame(args.D)
    if args.mode == "exact":
        report = drip_exact(A, F, args.s)
    else:
        report = drip_monte_carlo(A, F, args.s, trials=args.trials, seed=args.seed)
    _emit(report.to_dict())


def cmd_recover(args):
    from .solvers import RecoveryProblem, Separation, SolverConfig, solve

    A = read_matrix(args.A)
    F = _load_frame(args.D)
    y = read_vector(args.y)
    method = args.method
    base = {"sabp": "abp", "sads": "ads", "salasso": "alasso"}.get(method, method)
    separating = base != method
    omega = _load_frame(args.omega) if args.omega else None
    m = A.shape[0]
    d_total = F.d + ((omega.d if omega is not None else m) if separating else 0)

    explicit = {"ads": args.lam, "alasso": args.mu, "abp": args.eps}[base]
    if args.paper_formula:
        if args.sigma is None:
            raise ValueError("--paper-formula needs --sigma")
        param = {"ads": lambda: ads_lambda(args.sigma, d_total),
                 "alasso": lambda: alasso_mu(args.sigma, d_total),
                 "abp": lambda: l2_noise_bound(args.sigma, m)[0]}[base]()
    elif explicit is not None:
        param = explicit
    else:
        flag = {"ads": "--lambda", "alasso": "--mu", "abp": "--eps"}[base]
        raise ValueError(f"{method} needs {flag} or --paper-formula --sigma")

    cfg = {"max_iter": args.max_iter}
    if args.tol is not None:
        cfg.update(tol_primal=args.tol, tol_dual=args.tol, tol_gap=10.0 * args.tol)
    separation = Separation(omega=omega, s_prime=0) if separating else None
    problem = RecoveryProblem(sensing=A, frame=F, y=y, method=base, param=param,
                              separation=separation)
    out = solve(problem, SolverConfig(**cfg), engine=args.engine)
    write_vector(args.out, out.f_hat, comment=f"{method} estimate")
    if separating and args.e_out:
        write_vector(args.e_out, out.e_hat, comment=f"{method} sparse-noise estimate")
    _emit({"method": method, "param": param, "iterations": out.iterations,
           "objective": out.objective, "duality_gap": out.duality_gap,
           "feasibility_margin": out.feasibility_margin, "converged": out.converged,
           "out": args.out})


def cmd_bound(args):
    which = args.which
    if which in ("ads", "alasso", "separation"):
        s = args.s
        tails = _floats(args.tails) if args.tails else [0.0] * s
        inputs = bounds.BoundInputs(delta=args.delta, s=s, param=args.param, tails=tails,
                                    s_prime=args.s_prime, norm11=args.norm11)
        if which == "ads":
            report = bounds.ads_bound(inputs)
        elif which == "alasso":
            report = bounds.alasso_bound(inputs)
        else:
            report = bounds.separation_bound(args.variant, inputs, C4=args.C4, C5=args.C5)
        _emit(report.to_dict())
    elif which == "abp":
        if args.C2 is None or args.C3 is None:
            raise ValueError("abp needs --C2 and --C3 (the constants are not given in closed form)")
        value = bounds.abp_bound(args.tail, args.s, args.param, args.C2, args.C3, args.s_prime)
        _emit({"bound": value, "constants_used": {"C2": args.C2, "C3": args.C3}})
    elif which == "minimax":
        out = {"lower": None}
        if args.phi:
            tr = bounds.minimax_trace(read_matrix(args.phi), args.sigma)
            out["trace_risk"] = _finite(tr)
            out["unbounded"] = math.isinf(tr)
        value, floor = bounds.minimax_lower(args.s, args.sigma, args.delta, mode=args.mode)
        out.update(lower=value, probability_floor=floor, mode=args.mode)
        _emit(out)
    elif which == "powerlaw":
        report = bounds.power_law_risk(args.R, args.p, args.sigma, args.d, args.s, C0=args.C0)
        _emit(report.to_dict())


def cmd_probe(args):
    from .experiments import empirical_probability

    keys = ("sigma", "m", "n", "d", "alpha", "delta1", "delta")
    params = {k: getattr(args, k) for k in keys if getattr(args, k) is not None}
    result = empirical_probability(args.event, params, trials=args.trials, seed=args.seed)
    _emit(result.to_dict())


def cmd_experiment_run(args):
    from .experiments import emit_report, load_plan, run_experiment

    plan = load_plan(args.plan)
    os.makedirs(args.out_dir, exist_ok=True)
    records, aggregate = run_experiment(plan, workers=args.workers)
    outputs = dict(plan.outputs)
    timing = bool(outputs.get("timing", False))
    written = {}
    for fmt, default in (("csv", "records.csv"), ("json", "records.json"), ("plotdata", "plot.dat")):
        name = outputs.get(fmt, default)
        if not name:
            continue
        path = os.path.join(args.out_dir, name)
        emit_report(records, aggregate, fmt, path, include_timing=timing,
                    axis=outputs.get("plot_axis"))
        written[fmt] = path
    _emit({"records": len(records), "cells": len(aggregate), "outputs": written,
           "bound_violations": sum(a.bound_violations for a in aggregate),
           "converged": sum(a.converged for a in aggregate)})


def cmd_report(args):
    from .experiments import aggregate_records, emit_report, read_records

    records = read_records(args.records)
    emit_report(records, aggregate_records(records), args.format, args.out,
                include_timing=args.timing, axis=args.axis)
    _emit({"format": args.format, "records": len(records), "out": args.out})


def build_parser():
    p = argparse.ArgumentParser(prog="tightcs", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    frame = sub.add_parser("frame", help="tight frame tools")
    fsub = frame.add_subparsers(dest="action", required=True)
    g = fsub.add_parser("gen", help="generate a tight frame")
    g.add_argument("--kind", required=True, choices=FRAME_KINDS)
    g.add_argument("--n", type=int, default=0)
    g.add_argument("--d", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--path", help="input file for --kind from_file")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_frame_gen)

    sense = sub.add_parser("sense", help="measurement matrices")
    ssub = sense.add_subparsers(dest="action", required=True)
    g = ssub.add_parser("gen", help="draw a random measurement matrix")
    g.add_argument("--kind", required=True, choices=("gaussian", "bernoulli"))
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_sense_gen)

    g = sub.add_parser("drip", help="D-RIP constant (exact or Monte Carlo lower bound)")
    g.add_argument("--A", required=True)
    g.add_argument("--D", required=True)
    g.add_argument("--s", type=int, required=True)
    g.add_argument("--mode", choices=("exact", "mc"), default="exact")
    g.add_argument("--trials", type=int, default=1000)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_drip)

    g = sub.add_parser("recover", help="solve a recovery program")
    g.add_argument("--method", required=True,
                   choices=("abp", "ads", "alasso", "sabp", "sads", "salasso"))
    g.add_argument("--A", required=True)
    g.add_argument("--D", required=True)
    g.add_argument("--y", required=True)
    g.add_argument("--omega")
    g.add_argument("--lambda", dest="lam", type=float)
    g.add_argument("--mu", type=float)
    g.add_argument("--eps", type=float)
    g.add_argument("--paper-formula", action="store_true",
                   help="choose the parameter from --sigma by the noise formulas")
    g.add_argument("--sigma", type=float)
    g.add_argument("--tol", type=float)
    g.add_argument("--max-iter", type=int, default=20000)
    g.add_argument("--engine", choices=("admm", "pdhg"), default="admm",
                   help="ALASSO engine")
    g.add_argument("--out", required=True)
    g.add_argument("--e-out", help="sparse-noise estimate for separation methods")
    g.set_defaults(func=cmd_recover)

    g = sub.add_parser("bound", help="error bounds and minimax quantities")
    g.add_argument("--which", required=True,
                   choices=("ads", "alasso", "abp", "separation", "minimax", "powerlaw"))
    g.add_argument("--delta", type=float, default=0.0)
    g.add_argument("--s", type=int, default=1)
    g.add_argument("--s-prime", type=int, default=0)
    g.add_argument("--param", "--lambda", "--mu", "--eps", dest="param", type=float, default=0.0,
                   help="lambda, mu or epsilon")
    g.add_argument("--tails", help="comma-separated tails for k = 1..s")
    g.add_argument("--tail", type=float, default=0.0, help="tail at k = s (abp)")
    g.add_argument("--norm11", type=float, default=1.0)
    g.add_argument("--variant", choices=("sads", "salasso", "sabp"), default="sads")
    for c in ("C2", "C3", "C4", "C5"):
        g.add_argument(f"--{c}", type=float)
    g.add_argument("--sigma", type=float, default=1.0)
    g.add_argument("--mode", choices=("expectation", "high_probability"), default="expectation")
    g.add_argument("--phi", help="design matrix for the trace risk")
    g.add_argument("--R", type=float, default=1.0)
    g.add_argument("--p", type=float, default=1.0)
    g.add_argument("--d", type=float, default=2.0)
    g.add_argument("--C0", type=float, default=1.0)
    g.set_defaults(func=cmd_bound)

    g = sub.add_parser("probe", help="Monte Carlo probability of a noise or concentration event")
    g.add_argument("--event", required=True, choices=("lemma1", "gn", "lemma6"))
    g.add_argument("--sigma", type=float)
    g.add_argument("--m", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--d", type=int)
    g.add_argument("--alpha", type=float)
    g.add_argument("--delta1", type=float)
    g.add_argument("--delta", type=float)
    g.add_argument("--trials", type=int, default=10000)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_probe)

    exp = sub.add_parser("experiment", help="seeded experiment plans")
    esub = exp.add_subparsers(dest="action", required=True)
    g = esub.add_parser("run", help="run a plan.json")
    g.add_argument("plan")
    g.add_argument("--out-dir", required=True)
    g.add_argument("--workers", type=int)
    g.set_defaults(func=cmd_experiment_run)

    g = sub.add_parser("report", help="re-emit experiment records")
    g.add_argument("--format", required=True, choices=("csv", "json", "plotdata"))
    g.add_argument("--out", required=True)
    g.add_argument("--records", required=True, help="records.json or records.csv from a run")
    g.add_argument("--axis", choices=("m", "s", "sigma", "s_prime"))
    g.add_argument("--timing", action="store_true")
    g.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
