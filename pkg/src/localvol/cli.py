"""Command-line front end: ``localvol SUBCOMMAND [flags]``.

Data goes to stdout as CSV. Every run starts with a ``#`` line echoing the
resolved configuration. Exit codes: 0 success, 2 usage error, 3 consistency
fault.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from typing import Sequence, TextIO

from .boolean_model import (
    BooleanModelSpec, RadiusLaw, exact_class_probabilities, exact_estimator_mean,
    mc_field_experiment, series_estimator_mean, specific_volumes,
)
from .config_algebra import (
    ConsistencyError, coefficient_matrix, mobius_matrix, solve_weight_family,
)
from .design_based import Annulus, Disk, DiskUnion, Ellipse, mc_design_estimate
from .estimators import CATALOG, lookup_weights, predicted_asymptotics
from .lattice_image import Lattice, Window, count_pbm


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return format(float(x) + 0.0, ".12g")


def parse_radius(text: str) -> RadiusLaw:
    try:
        if ":" in text:
            lo, hi = text.split(":")
            return RadiusLaw.uniform(float(lo), float(hi))
        return RadiusLaw.point(float(text))
    except ValueError as exc:
        raise UsageError(f"bad --radius {text!r}: {exc}") from None


def parse_window_size(text: str) -> Window:
    try:
        w, h = (float(x) for x in text.lower().split("x"))
        return Window(0.0, 0.0, w, h)
    except ValueError as exc:
        raise UsageError(f"bad --window {text!r}, expected WxH: {exc}") from None


def parse_window_box(text: str) -> Window:
    try:
        x0, y0, x1, y1 = (float(x) for x in text.split(","))
        return Window(x0, y0, x1, y1)
    except ValueError as exc:
        raise UsageError(f"bad --window {text!r}, expected x0,y0,x1,y1: {exc}") from None


def parse_shape(text: str):
    kind, _, arg = text.partition(":")
    try:
        if kind == "disk":
            return Disk((0.0, 0.0), float(arg))
        if kind == "ellipse":
            a, b = (float(x) for x in arg.split(","))
            return Ellipse((0.0, 0.0), (a, b))
        if kind == "annulus":
            r_in, r_out = (float(x) for x in arg.split(","))
            return Annulus((0.0, 0.0), r_in, r_out)
        if kind == "disks":
            disks = []
            for part in arg.split(";"):
                r, _, at = part.partition("@")
                x, y = (float(v) for v in at.split(","))
                disks.append(Disk((x, y), float(r)))
            return DiskUnion(tuple(disks))
    except ValueError as exc:
        raise UsageError(f"bad --shape {text!r}: {exc}") from None
    raise UsageError(f"unknown shape {text!r}")


def resolve_weights(args, degree: int | None):
    try:
        return lookup_weights(args.weights, degree, getattr(args, "free", 0.0))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def model_spec(args) -> BooleanModelSpec:
    try:
        return BooleanModelSpec(args.gamma, parse_radius(args.radius))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def write_meta(out: TextIO, args, **extra) -> None:
    items = {k: v for k, v in vars(args).items() if k != "func"}
    items.update(extra)
    out.write("# " + " ".join(f"{k}={fmt(v) if not isinstance(v, str) else v}"
                              for k, v in items.items()) + "\n")


# -- subcommands ------------------------------------------------------------------------


def cmd_matrices(args, out: TextIO) -> None:
    write_meta(out, args)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["matrix", "row", "col1", "col2", "col3", "col4", "col5", "col6"])
    for i, row in enumerate(mobius_matrix(), 1):
        w.writerow(["B", i, *(int(x) for x in row)])
    for i, row in enumerate(coefficient_matrix(), 1):
        w.writerow(["A", i, *(fmt(x) for x in row)])


def cmd_weights_list(args, out: TextIO) -> None:
    write_meta(out, args)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["name", "degree", "w1", "w2", "w3", "w4", "w5", "w6"])
    for entry in CATALOG.values():
        w.writerow([entry.name, entry.degree, *(fmt(x) for x in entry.weights.w)])


def cmd_weights_solve(args, out: TextIO) -> None:
    particular, direction = solve_weight_family(args.degree)
    write_meta(out, args)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["vector", "w1", "w2", "w3", "w4", "w5", "w6"])
    w.writerow(["particular", *(fmt(x) for x in particular.w)])
    w.writerow(["direction", *(fmt(x) for x in direction.w)])


def cmd_weights_analyze(args, out: TextIO) -> None:
    weights = resolve_weights(args, args.degree)
    spec = model_spec(args)
    rep = predicted_asymptotics(weights, spec)
    write_meta(out, args, degree=weights.degree, resolved_weights=",".join(fmt(x) for x in weights.w))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["field", "value"])
    for name, value in vars(rep).items():
        w.writerow([name, fmt(value) if not isinstance(value, bool) else str(value).lower()])


def cmd_count(args, out: TextIO) -> None:
    if not args.spacing > 0:
        raise UsageError(f"--spacing must be positive, got {args.spacing}")
    window = parse_window_box(args.window) if args.window else None
    try:
        with open(args.input, "rb") as fh:
            hist, width, height = count_pbm(fh, Lattice(args.spacing), window)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    write_meta(out, args, width=width, height=height, n0=hist.n0)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["kind", "index", "count"])
    for l, n in enumerate(hist.n):
        w.writerow(["config", l, int(n)])
    for j, n in enumerate(hist.class_counts, 1):
        w.writerow(["class", j, int(n)])


def cmd_simulate(args, out: TextIO) -> None:
    spec = model_spec(args)
    weights = resolve_weights(args, args.degree)
    window = parse_window_size(args.window)
    if args.reps < 1:
        raise UsageError("--reps must be at least 1")
    try:
        res = mc_field_experiment(spec, args.spacing, window, weights, args.reps, args.seed, args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    exact = exact_estimator_mean(weights, args.spacing, spec)
    try:
        series = series_estimator_mean(weights, args.spacing, spec, 3)
    except ValueError:
        series = math.nan
    write_meta(out, args, degree=weights.degree, resolved_weights=",".join(fmt(x) for x in weights.w))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["replicate", "estimate"])
    for k, est in enumerate(res.estimates):
        w.writerow([k, fmt(est)])
    out.write(f"# mean={fmt(res.mean)} stderr={fmt(res.stderr)} exact_mean={fmt(exact)} "
              f"series_mean={fmt(series)} specific_value={fmt(specific_volumes(spec)[weights.degree])}\n")


def cmd_design(args, out: TextIO) -> None:
    shape = parse_shape(args.shape)
    weights = resolve_weights(args, args.degree)
    if args.reps < 1:
        raise UsageError("--reps must be at least 1")
    try:
        res = mc_design_estimate(shape, args.spacing, weights, args.reps, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    write_meta(out, args, degree=weights.degree, resolved_weights=",".join(fmt(x) for x in weights.w))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["draw", "estimate"])
    for k, est in enumerate(res.estimates):
        w.writerow([k, fmt(est)])
    out.write(f"# mean={fmt(res.mean)} stderr={fmt(res.stderr)} reference={fmt(res.reference)} "
              f"bias={fmt(res.bias)}\n")


def cmd_bias(args, out: TextIO) -> None:
    spec = model_spec(args)
    weights = resolve_weights(args, args.degree)
    try:
        spacings = [float(s) for s in args.spacings.split(",")]
    except ValueError:
        raise UsageError(f"bad --spacings {args.spacings!r}") from None
    target = specific_volumes(spec)[weights.degree]
    write_meta(out, args, degree=weights.degree, resolved_weights=",".join(fmt(x) for x in weights.w))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["a", "exact_mean", "series_mean", "specific_value", "bias"])
    for a in spacings:
        if not a > 0:
            raise UsageError(f"spacings must be positive, got {a}")
        exact = exact_estimator_mean(weights, a, spec)
        try:
            series = series_estimator_mean(weights, a, spec, 3)
        except ValueError:
            series = math.nan
        w.writerow([fmt(a), fmt(exact), fmt(series), fmt(target), fmt(exact - target)])


def cmd_probabilities(args, out: TextIO) -> None:
    spec = model_spec(args)
    write_meta(out, args)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["class", "probability"])
    for j, p in enumerate(exact_class_probabilities(args.spacing, spec), 1):
        w.writerow([j, fmt(p)])


# -- parser ------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="localvol", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def model_flags(sp):
        sp.add_argument("--gamma", type=float, required=True, help="germ intensity")
        sp.add_argument("--radius", required=True, help="R for a fixed radius, LO:HI for uniform")

    sp = sub.add_parser("matrices", help="print the matrices B and A as CSV")
    sp.set_defaults(func=cmd_matrices)

    wp = sub.add_parser("weights", help="weight catalog and optimal families")
    wsub = wp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    sp = wsub.add_parser("list")
    sp.set_defaults(func=cmd_weights_list)
    sp = wsub.add_parser("solve")
    sp.add_argument("--degree", type=int, choices=(0, 1), required=True)
    sp.set_defaults(func=cmd_weights_solve)
    sp = wsub.add_parser("analyze")
    sp.add_argument("--weights", required=True)
    sp.add_argument("--degree", type=int, choices=(0, 1, 2))
    sp.add_argument("--free", type=float, default=0.0, help="free parameter of opt1/opt2")
    model_flags(sp)
    sp.set_defaults(func=cmd_weights_analyze)

    sp = sub.add_parser("count", help="configuration counts of a P4 PBM image")
    sp.add_argument("--input", required=True)
    sp.add_argument("--spacing", type=float, required=True)
    sp.add_argument("--window", help="x0,y0,x1,y1 for minus-sampling")
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("simulate", help="Monte Carlo estimator mean for a Boolean model")
    model_flags(sp)
    sp.add_argument("--window", required=True, help="WxH")
    sp.add_argument("--spacing", type=float, required=True)
    sp.add_argument("--weights", required=True)
    sp.add_argument("--degree", type=int, choices=(0, 1, 2))
    sp.add_argument("--free", type=float, default=0.0)
    sp.add_argument("--reps", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("design", help="estimates of a fixed shape on random lattices")
    sp.add_argument("--shape", required=True,
                    help="disk:R | ellipse:A,B | disks:R1@X1,Y1;R2@X2,Y2 | annulus:RIN,ROUT")
    sp.add_argument("--spacing", type=float, required=True)
    sp.add_argument("--weights", required=True)
    sp.add_argument("--degree", type=int, choices=(0, 1))
    sp.add_argument("--free", type=float, default=0.0)
    sp.add_argument("--reps", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.set_defaults(func=cmd_design)

    sp = sub.add_parser("bias", help="exact and series estimator means over spacings")
    model_flags(sp)
    sp.add_argument("--degree", type=int, choices=(0, 1, 2))
    sp.add_argument("--weights", required=True)
    sp.add_argument("--free", type=float, default=0.0)
    sp.add_argument("--spacings", required=True, help="comma-separated lattice spacings")
    sp.set_defaults(func=cmd_bias)

    sp = sub.add_parser("probabilities", help="exact class probabilities at one spacing")
    model_flags(sp)
    sp.add_argument("--spacing", type=float, required=True)
    sp.set_defaults(func=cmd_probabilities)
    return p


def run(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        args.func(args, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return 2
    except ConsistencyError as exc:
        err.write(f"consistency fault: {exc}\n")
        return 3
    return 0


def main() -> None:
    sys.exit(run())
