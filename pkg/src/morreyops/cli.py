"""Command-line interface: group info, kernel norms, operator application,
space norms, and the verification suite.

Outputs are machine readable: JSON on stdout (or --out), CSV for point
tables, and the verify path writes report.json + summary.csv + figures when
--out names a directory.  Exit status: 0 success, 1 validation or hypothesis
failure, 2 numerical divergence, 3 I/O error, 64 usage.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import functions as fns
from . import operators as ops
from . import spaces
from .errors import (
    ConfigurationError,
    ConvergenceError,
    DivergenceError,
    HypothesisError,
    InputError,
    PrecisionError,
    ResourceError,
)
from .group import parse_group, sphere_measure
from .harness import TheoremCase, run_suite
from .kernels import (
    KernelParams,
    admissible_p1_interval,
    dyadic_sum,
    kernel_gen_morrey_norm,
    kernel_lebesgue_norm,
    kernel_morrey_norm,
    sandwich_check,
)
from .plan import QuadraturePlan
from .profiles import parse_profile
from .report import report_payload, write_report_dir
from .suite import default_cases

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_DIVERGENCE = 2
EXIT_IO = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(EXIT_USAGE)


def _emit_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _plan_from_args(args) -> QuadraturePlan:
    return QuadraturePlan(tol=args.tol, mc_seed=args.seed)


def _parse_points(spec: str, n: int) -> np.ndarray:
    head, _, rest = spec.partition(":")
    if head == "grid":
        kv = {}
        for part in rest.split(":"):
            if part:
                k, _, v = part.partition("=")
                kv[k] = float(v)
        L = kv.get("L", 4.0)
        res = int(kv.get("res", 9))
        axes = [np.linspace(-L, L, res)] * n
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)
    if head == "list":
        rows = [[float(v) for v in item.split(",")] for item in rest.split(";") if item]
        return np.asarray(rows, dtype=float)
    raise InputError(f"unrecognised points spec {spec!r}")


# ----------------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------------


def _cmd_group(args) -> int:
    g = parse_group(args.group)
    plan = _plan_from_args(args)
    payload = {
        "spec": g.spec,
        "n": g.n,
        "weights": list(g.weights),
        "law": g.law,
        "norm": g.norm,
        "Q": g.Q,
        "vol1": g.vol1,
        "sigma": g.sigma,
    }
    if args.estimate:
        est = sphere_measure(g, plan)
        payload["sigma_estimate"] = {"value": est.value, "stderr": est.error}
    _emit_json(payload, args.out)
    return EXIT_OK


def _cmd_kernel(args) -> int:
    g = parse_group(args.group)
    plan = _plan_from_args(args)
    k = KernelParams(g, args.alpha, args.gamma)
    payload: dict = {
        "group": g.spec,
        "alpha": args.alpha,
        "gamma": args.gamma,
        "method": args.method,
        "tolerance": args.tol,
    }
    if args.method == "dyadic":
        payload["p1"] = args.p1
        payload["R"] = args.R
        payload["value"] = dyadic_sum(k, args.p1, args.R, tol=min(1e-9, args.tol))
        sw = sandwich_check(k, args.p1, args.R, plan)
        payload["constants"] = sw.to_dict()
    elif args.omega is not None:
        res = kernel_gen_morrey_norm(k, args.p2 if args.p2 else 1.0, parse_profile(args.omega), plan)
        payload.update({"p2": args.p2, "omega": args.omega})
        payload["value"] = res.value
        payload["error"] = res.error
        payload["constants"] = res.to_dict()
    elif args.p2 is not None:
        res = kernel_morrey_norm(k, args.p2, args.p1, plan)
        payload.update({"p1": args.p1, "p2": args.p2, "value": res.value, "error": res.error})
    else:
        res = kernel_lebesgue_norm(k, args.p1, plan)
        lo, hi = admissible_p1_interval(k)
        payload.update({
            "p1": args.p1, "value": res.value, "error": res.error,
            "constants": {"admissible_interval": [lo, hi]},
        })
    _emit_json(payload, args.out)
    return EXIT_OK


def _cmd_op(args) -> int:
    g = parse_group(args.group)
    plan = _plan_from_args(args)
    f = fns.parse_function(args.f)
    pts = _parse_points(args.points, g.n)
    if args.op in ("gbr", "gfrac", "modfrac") and args.rho is None:
        raise InputError(f"--op {args.op} needs --rho")
    if args.op == "br" and args.alpha is None:
        raise InputError("--op br needs --alpha")
    if args.op == "maximal":
        res = ops.maximal_function(f, g, pts, plan=plan)
    elif args.op == "br":
        k = KernelParams(g, args.alpha, args.gamma)
        res = ops.apply_bessel_riesz(f, g, k, pts, plan)
    elif args.op == "gbr":
        res = ops.apply_gen_bessel_riesz(f, g, parse_profile(args.rho), args.gamma, pts, plan)
    elif args.op == "gfrac":
        res = ops.apply_gen_fractional(f, g, parse_profile(args.rho), pts, plan)
    elif args.op == "modfrac":
        res = ops.apply_mod_fractional(f, g, parse_profile(args.rho), pts, plan)
    else:
        raise InputError(f"unknown operator {args.op!r}")
    rows = [
        [*map(float, p), float(v), float(e)]
        for p, v, e in zip(res.points, res.values, res.errors)
    ]
    header = [f"x{i+1}" for i in range(g.n)] + ["value", "err_estimate"]
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
    else:
        w = csv.writer(sys.stdout)
        w.writerow(header)
        w.writerows(rows)
    return EXIT_OK


def _cmd_space(args) -> int:
    g = parse_group(args.group)
    plan = _plan_from_args(args)
    f = fns.parse_function(args.f)
    payload: dict = {"group": g.spec, "space": args.space, "f": args.f, "p": args.p,
                     "tolerance": args.tol}
    if args.space == "lp":
        res = spaces.lebesgue_ball_norm(f, g, args.p, args.r, plan)
        payload["r"] = args.r
    elif args.space == "morrey":
        if args.q is None:
            raise InputError("morrey norm needs --q")
        res = spaces.morrey_norm(f, g, args.p, args.q, plan=plan)
        payload["q"] = args.q
    elif args.space == "gmorrey":
        if args.phi is None:
            raise InputError("generalised norm needs --phi")
        res = spaces.gen_morrey_norm(f, g, args.p, parse_profile(args.phi), plan=plan)
        payload["phi"] = args.phi
    elif args.space == "campanato":
        if args.phi is None:
            raise InputError("oscillation norm needs --phi")
        res = spaces.campanato_norm(f, g, args.p, parse_profile(args.phi), plan=plan,
                                    convention=args.avg)
        payload["phi"] = args.phi
        payload["avg"] = args.avg
    else:
        raise InputError(f"unknown space {args.space!r}")
    payload["value"] = res.value
    payload["error"] = res.error
    _emit_json(payload, args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    t0 = time.perf_counter()
    if args.suite:
        if args.suite != "default":
            raise InputError(f"unknown suite {args.suite!r}")
        cases = default_cases(seed=args.seed, tol=args.tol)
        if args.theorem:
            cases = [c for c in cases if c.theorem == args.theorem]
    elif args.config:
        doc = json.loads(Path(args.config).read_text())
        docs = doc if isinstance(doc, list) else [doc]
        cases = [TheoremCase.from_dict(d) for d in docs]
        if args.theorem:
            for c in cases:
                if c.theorem != args.theorem:
                    raise InputError(
                        f"config is for {c.theorem!r} but --theorem {args.theorem!r} was given"
                    )
    else:
        raise InputError("verify needs --suite or --config")
    threads = args.threads if args.threads is not None else (os.cpu_count() or 1)
    reports = run_suite(cases, threads=threads)
    meta = {"suite": args.suite or args.config, "seed": args.seed, "tol": args.tol,
            "runtime_s": time.perf_counter() - t0}
    for r in reports:
        status = "pass" if r.passed else "FAIL"
        sys.stderr.write(f"[{status}] {r.case['case_id']}: max ratio {r.max_ratio:.6g}"
                         + (f" ({r.note})" if r.note else "") + "\n")
    if args.out and (Path(args.out).is_dir() or not Path(args.out).suffix):
        write_report_dir(reports, Path(args.out), meta, figures=not args.no_figures)
    else:
        _emit_json(report_payload(reports, meta), args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VALIDATION


# ----------------------------------------------------------------------------


def build_parser() -> _Parser:
    p = _Parser(prog="morreyops",
                description="operators and Morrey-type norms on homogeneous groups")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=1e-3)
        sp.add_argument("--out", default=None)

    gp = sub.add_parser("group", help="group descriptor info")
    gsub = gp.add_subparsers(dest="action", required=True)
    gi = gsub.add_parser("info")
    gi.add_argument("--group", required=True)
    gi.add_argument("--estimate", action="store_true",
                    help="also Monte-Carlo estimate the sphere measure")
    common(gi)
    gi.set_defaults(fn=_cmd_group)

    kp = sub.add_parser("kernel", help="kernel norms")
    ksub = kp.add_subparsers(dest="action", required=True)
    kn = ksub.add_parser("norm")
    kn.add_argument("--group", required=True)
    kn.add_argument("--alpha", type=float, required=True)
    kn.add_argument("--gamma", type=float, required=True)
    kn.add_argument("--p1", type=float, required=True)
    kn.add_argument("--p2", type=float, default=None)
    kn.add_argument("--omega", default=None, help="profile spec for the weighted ball norm")
    kn.add_argument("--method", choices=["quadrature", "dyadic"], default="quadrature")
    kn.add_argument("--R", type=float, default=1.0)
    common(kn)
    kn.set_defaults(fn=_cmd_kernel)

    op = sub.add_parser("op", help="apply an operator at points")
    osub = op.add_subparsers(dest="action", required=True)
    oa = osub.add_parser("apply")
    oa.add_argument("--op", choices=["maximal", "br", "gbr", "gfrac", "modfrac"], required=True)
    oa.add_argument("--group", required=True)
    oa.add_argument("--f", required=True)
    oa.add_argument("--rho", default=None)
    oa.add_argument("--alpha", type=float, default=None)
    oa.add_argument("--gamma", type=float, default=0.0)
    oa.add_argument("--points", required=True)
    common(oa)
    oa.set_defaults(fn=_cmd_op)

    spp = sub.add_parser("space", help="space norms")
    ssub = spp.add_subparsers(dest="action", required=True)
    sn = ssub.add_parser("norm")
    sn.add_argument("--space", choices=["lp", "morrey", "gmorrey", "campanato"], required=True)
    sn.add_argument("--group", required=True)
    sn.add_argument("--f", required=True)
    sn.add_argument("--p", type=float, required=True)
    sn.add_argument("--q", type=float, default=None)
    sn.add_argument("--phi", default=None)
    sn.add_argument("--r", type=float, default=1.0)
    sn.add_argument("--avg", choices=["literal", "mean"], default="literal")
    common(sn)
    sn.set_defaults(fn=_cmd_space)

    vp = sub.add_parser("verify", help="run statement verifications")
    vp.add_argument("--suite", default=None)
    vp.add_argument("--theorem", default=None)
    vp.add_argument("--config", default=None)
    vp.add_argument("--threads", type=int, default=None,
                    help="parallel case width (default: available parallelism)")
    vp.add_argument("--no-figures", action="store_true")
    common(vp)
    vp.set_defaults(fn=_cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (DivergenceError,) as exc:
        sys.stderr.write(f"divergence: {exc}\n")
        return EXIT_DIVERGENCE
    except (InputError, HypothesisError, ConfigurationError, PrecisionError,
            ConvergenceError, ResourceError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
