"""Command-line entry point: ``entropic-bounds <subcommand> ...``.

Exit codes: 0 success, 1 accuracy failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys
import warnings

from . import bounds, prolate, search
from .errors import AccuracyFailure, InvalidArgument
from .states import STATE_GRAMMAR, parse_state

GRID_HELP = "grid as START:STOP:COUNT (linear unless --geometric) or a single value"


def parse_grid(text: str, geometric: bool = False) -> list[float]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) != 3:
            raise ValueError
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InvalidArgument(f"bad grid {text!r}; expected START:STOP:COUNT") from None
    if count < 1:
        raise InvalidArgument(f"grid {text!r} is empty")
    if count == 1:
        return [start]
    if geometric:
        return bounds.xi_grid(start, stop, count, geometric=True)
    step = (stop - start) / (count - 1)
    return [start + i * step for i in range(count - 1)] + [stop]


def parse_floats(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidArgument(f"bad number list {text!r}") from None
    if not vals:
        raise InvalidArgument("empty number list")
    return vals


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def cmd_lambda0(args) -> int:
    if (args.c is None) == (args.xi is None):
        raise InvalidArgument("give exactly one of --c or --xi")
    if args.c is not None:
        results = [prolate.lambda0(c, args.tol) for c in parse_grid(args.c, args.geometric)]
    else:
        results = [prolate.lambda0_of_xi(x, args.tol) for x in parse_grid(args.xi, args.geometric)]
    with _output(args.out) as fh:
        prolate.write_lambda0_csv(results, fh)
    for r in results:
        if r.precision_floor:
            print(f"note: c={r.c:g} is at the double-precision floor; 1 - lambda0 < {prolate.PRECISION_FLOOR:g}",
                  file=sys.stderr)
    return 0


def cmd_bounds(args) -> int:
    rows = bounds.bounds_table(args.xi_min, args.xi_max, args.steps, args.tol, args.geometric)
    with _output(args.out) as fh:
        bounds.write_bounds_csv(rows, fh)
    return 0


def cmd_scan(args) -> int:
    xis = parse_grid(args.xi_grid, args.geometric)
    offsets = parse_floats(args.offsets)
    reports = search.gaussian_scan(args.sigma, args.dx, xis, offsets, args.tol)
    with _output(args.out) as fh:
        search.write_scan_csv(reports, fh)
    return 0


def cmd_check(args) -> int:
    state = parse_state(args.state)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = search.check_state(state, args.dx, args.dp, args.offset_x, args.offset_p, args.tol)
    doc = report.to_dict()
    doc["warnings"] = [str(w.message) for w in caught]
    with _output(args.out) as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return 0


def cmd_hunt(args) -> int:
    cfg = search.HuntConfig(
        basis=args.basis, xis=tuple(args.xi), restarts=args.restarts, seed=args.seed, budget=args.budget,
        field=args.field, tol=args.tol, aspect=args.aspect, workers=args.workers,
    )
    result = search.hunt(cfg)
    with _output(args.out) as fh:
        fh.write(result.to_json())
        fh.write("\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="entropic-bounds",
        description="Entropic uncertainty bounds for binned position/momentum measurements (hbar = 1).",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("lambda0", help="largest sinc-kernel eigenvalue; CSV c,xi,lambda0,order,est_error",
                       epilog=GRID_HELP)
    s.add_argument("--c", help="bandwidth value or grid")
    s.add_argument("--xi", help="resolution product value or grid (c = pi*xi/2)")
    s.add_argument("--geometric", action="store_true", help="geometric grid spacing")
    s.add_argument("--tol", type=float, default=prolate.MIN_TOL)
    s.add_argument("--out", default="-", help="output path, '-' for stdout")
    s.set_defaults(func=cmd_lambda0)

    s = sub.add_parser("bounds", help="table of the three bounds; CSV " + ",".join(bounds.BOUNDS_CSV_HEADER))
    s.add_argument("--xi-min", type=float, default=0.05)
    s.add_argument("--xi-max", type=float, default=3.0)
    s.add_argument("--steps", type=int, default=60)
    s.add_argument("--geometric", action=argparse.BooleanOptionalAction, default=True,
                   help="geometric (default) or linear spacing")
    s.add_argument("--tol", type=float, default=prolate.MIN_TOL)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("scan", help="Gaussian entropy scan; CSV " + ",".join(search.SCAN_CSV_HEADER),
                       epilog=GRID_HELP + ". Offsets are fractions f of a bin: grids start at -f*width.")
    s.add_argument("--sigma", type=float, default=1 / math.sqrt(2))
    s.add_argument("--dx", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    s.add_argument("--xi-grid", default="0.1:12:48")
    s.add_argument("--geometric", action="store_true")
    s.add_argument("--offsets", default="0.5", help="comma-separated bin fractions, e.g. 0.5,0")
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("check", help="margin of one state as JSON", epilog=STATE_GRAMMAR,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("--state", required=True)
    s.add_argument("--dx", type=float, required=True)
    s.add_argument("--dp", type=float, required=True)
    s.add_argument("--offset-x", type=float, default=None, help="default -dx/2")
    s.add_argument("--offset-p", type=float, default=None, help="default -dp/2")
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("hunt", help="counterexample search over Hermite superpositions; JSON")
    s.add_argument("--basis", type=int, default=8)
    s.add_argument("--xi", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    s.add_argument("--restarts", type=int, default=64)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--budget", type=int, default=2000, help="objective evaluations per restart")
    s.add_argument("--field", choices=("real", "complex"), default="real")
    s.add_argument("--aspect", type=float, default=1.0, help="dx/dp ratio at fixed xi")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_hunt)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidArgument as exc:
        parser.exit(2, f"{parser.prog} {args.command}: error: {exc}\n")
    except AccuracyFailure as exc:
        msg = f"{parser.prog} {args.command}: accuracy failure: {exc}"
        if exc.best_estimate is not None:
            msg += f" (best estimate {exc.best_estimate!r})"
        if args.command == "lambda0":
            msg += f"; double precision resolves 1 - lambda0 only to about {prolate.PRECISION_FLOOR:g}"
        print(msg, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
