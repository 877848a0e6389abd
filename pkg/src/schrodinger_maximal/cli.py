"""Command-line entry point: ``schrodinger-maximal <subcommand> ...``.

Exit codes: 0 success, 1 validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, LabError

OUT_ENV = "SCHRODINGER_MAXIMAL_OUT"

log = logging.getLogger("schrodinger_maximal")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _dump(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _complex(z: complex) -> dict:
    return {"real": z.real, "imag": z.imag, "modulus": abs(z)}


# subcommands ----------------------------------------------------------------


def cmd_params(args) -> int:
    from .params import build_params

    _dump(build_params(args.n, args.R).to_dict())
    return 0


def cmd_gauss(args) -> int:
    from .numbertheory import gauss_sum

    if args.q < 1:
        raise UsageError("q: must be >= 1")
    g = gauss_sum(args.q, args.a, args.b)
    _dump({"q": args.q, "a": args.a, "b": args.b, **_complex(g),
           "sqrt_q": math.sqrt(args.q)})
    return 0


def cmd_eval(args) -> int:
    from .datum import make_datum
    from .errors import OutOfApproximationRange
    from .propagator import propagate, propagate_approx

    if len(args.coords) != args.n + 1:
        raise UsageError(f"x... t: expected {args.n} coordinates and a time, "
                         f"got {len(args.coords)} values")
    x, t = np.array(args.coords[:-1]), args.coords[-1]
    d = make_datum(args.n, args.R)
    out = {"x": x.tolist(), "t": t, "propagate": _complex(propagate(d, x, t))}
    try:
        out["propagate_approx"] = propagate_approx(d, x, t, args.c)
    except OutOfApproximationRange as exc:
        out["propagate_approx"] = None
        out["approx_note"] = str(exc)
    _dump(out)
    return 0


def cmd_omega(args) -> int:
    from .numbertheory import make_omega_spec, omega_measure_estimate
    from .params import build_params

    spec = make_omega_spec(build_params(args.n, args.R), args.c)
    frac, se = omega_measure_estimate(spec, args.seed, args.samples)
    _dump({"n": args.n, "R": args.R, "c": args.c, "samples": args.samples,
           "moduli": list(spec.moduli), "fraction": frac, "stderr": se})
    return 0


def cmd_maximal(args) -> int:
    from .datum import make_datum
    from .experiment import STREAM_OMEGA, STREAM_UNIFORM, sample_ratios

    d = make_datum(args.n, args.R)
    kind = STREAM_OMEGA if args.points == "omega" else STREAM_UNIFORM
    ratios, evals = sample_ratios(d, kind, args.samples, c=args.c, strategy=args.strategy,
                                  budget=args.budget, seed=args.seed, threads=args.threads)
    out = {
        "n": args.n, "R": args.R, "points": args.points, "strategy": args.strategy,
        "budget": args.budget, "samples": args.samples, "evaluations": evals,
        "median": float(np.median(ratios)), "mean": float(np.mean(ratios)),
        "min": float(np.min(ratios)), "max": float(np.max(ratios)),
    }
    if args.all:
        out["ratios"] = ratios.tolist()
    _dump(out)
    return 0


def cmd_sweep(args) -> int:
    from .experiment import SweepConfig, run_sweep, summarize

    path = Path(args.config)
    if not path.is_file():
        raise UsageError(f"--config: no such file: {path}")
    try:
        cfg = SweepConfig.from_json(path).validate()
    except json.JSONDecodeError as exc:
        raise UsageError(f"--config: {path} is not valid JSON ({exc})") from exc
    except ConfigError as exc:
        raise UsageError(f"--config: {exc}") from exc
    records = run_sweep(cfg, threads=args.threads, out_dir=args.out)
    summary = summarize(records, cfg.n)
    _dump({"records": len(records), **summary})
    return 0


def cmd_validate(args) -> int:
    from .acceptance import run_all

    only = None
    if args.only:
        try:
            only = {int(v) for v in args.only.split(",")}
        except ValueError as exc:
            raise UsageError(f"--only: expected comma-separated numbers, got {args.only!r}") from exc
    checks = run_all(threads=args.threads, only=only,
                     report=lambda c: print(c.line(), flush=True))
    failed = [c.number for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} passed"
          + (f"; failed: {failed}" if failed else ""))
    return 1 if failed else 0


def cmd_calibrate(args) -> int:
    from . import calibration
    from .acceptance import approximation_deviations, calibrate_kappa

    devs = approximation_deviations(args.seed)
    _dump({
        "approx_deviation_median": float(np.median(devs)),
        "approx_deviation_max": float(np.max(devs)),
        "approx_deviation_threshold": calibration.APPROX_DEVIATION_THRESHOLD,
        "kappa_n2": calibrate_kappa(args.seed, args.threads),
        "kappa_recorded": calibration.KAPPA_N2,
    })
    return 0


# parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    from .experiment import DEFAULT_SEED
    from .maximal import DEFAULT_BUDGET, Strategy
    from .numbertheory import DEFAULT_C
    from .propagator import APPROX_C

    p = _Parser(prog="schrodinger-maximal",
                description="Numerical lab for the Schrodinger maximal function counterexample.")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"base RNG seed (default {DEFAULT_SEED})")
    p.add_argument("--threads", type=int, default=1, help="worker processes, 0 = all cores")
    p.add_argument("--out", default=None,
                   help=f"output directory (default ${OUT_ENV} or the working directory)")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("-q", "--quiet", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("params", help="print derived parameters as JSON")
    s.add_argument("n", type=int)
    s.add_argument("R", type=float)
    s.set_defaults(func=cmd_params)

    s = sub.add_parser("gauss", help="quadratic Gauss sum G(q, a, b)")
    s.add_argument("q", type=int)
    s.add_argument("a", type=int)
    s.add_argument("b", type=int)
    s.set_defaults(func=cmd_gauss)

    s = sub.add_parser("eval", help="exact and approximate evolution at (x, t)")
    s.add_argument("n", type=int)
    s.add_argument("R", type=float)
    s.add_argument("coords", type=float, nargs="+", metavar="x... t")
    s.add_argument("--c", type=float, default=APPROX_C)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("omega", help="Monte Carlo measure of the major-arc set")
    s.add_argument("n", type=int)
    s.add_argument("R", type=float)
    s.add_argument("--c", type=float, default=DEFAULT_C)
    s.add_argument("--samples", type=int, default=10_000)
    s.set_defaults(func=cmd_omega)

    s = sub.add_parser("maximal", help="pointwise ratios sup|e^{itL}f| / ||f||")
    s.add_argument("n", type=int)
    s.add_argument("R", type=float)
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--strategy", choices=[v.value for v in Strategy],
                   default=Strategy.COMBINED.value)
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--c", type=float, default=DEFAULT_C)
    s.add_argument("--points", choices=["omega", "uniform"], default="omega")
    s.add_argument("--all", action="store_true", help="include every ratio in the output")
    s.set_defaults(func=cmd_maximal)

    s = sub.add_parser("sweep", help="run a dyadic-R sweep from a JSON config")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("validate", help="run the acceptance suite")
    s.add_argument("--only", help="comma-separated criterion numbers")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("calibrate", help="recompute the recorded calibration constants")
    s.set_defaults(func=cmd_calibrate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand")
        if args.threads < 0:
            raise UsageError("--threads: must be >= 0")
    except UsageError as exc:
        print(f"schrodinger-maximal: error: {exc}", file=sys.stderr)
        return 2
    level = logging.WARNING if args.quiet else (logging.DEBUG if args.verbose > 1
                                                else logging.INFO)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    log.setLevel(level)
    args.out = args.out or os.environ.get(OUT_ENV) or "."
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"schrodinger-maximal {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (LabError, ValueError) as exc:
        print(f"schrodinger-maximal {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"schrodinger-maximal {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
