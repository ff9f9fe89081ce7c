"""The three lower bounds on H(x) + H(p) as functions of xi = dx*dp/h.

* ``bound_bb``: -ln(2 xi / e), negative (hence trivial) for xi >= e/2;
* ``bound_mu``: -ln lambda0(xi), positive for every finite xi;
* ``bound_conjecture``: -ln lambda0(2 xi / e), the rescaled interpolation.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .errors import InvalidArgument
from .prolate import MIN_TOL, XI_MAX, lambda0_of_xi

BB_ZERO = math.e / 2.0
CONJ_XI_MAX = XI_MAX * math.e / 2.0
BOUNDS_CSV_HEADER = ("xi", "bb", "mu", "conj", "lambda0_xi", "lambda0_scaled", "est_error")


@dataclass(frozen=True)
class BoundReport:
    xi: float
    bb: float
    mu: float
    conj: float
    lambda0_xi: float
    lambda0_scaled: float
    est_error: float

    def row(self) -> list[str]:
        return [f"{getattr(self, k):.17g}" for k in BOUNDS_CSV_HEADER]


def _check_xi(xi, upper):
    if not (isinstance(xi, (int, float, np.floating)) and math.isfinite(xi)) or not 0 < xi <= upper:
        raise InvalidArgument(f"xi must lie in (0, {upper:g}], got {xi!r}")


def bound_bb(xi: float) -> float:
    """-ln(2 xi / e) = 1 - ln 2 - ln xi."""
    if not (isinstance(xi, (int, float, np.floating)) and xi > 0 and math.isfinite(xi)):
        raise InvalidArgument(f"xi must be positive and finite, got {xi!r}")
    return 1.0 - math.log(2.0) - math.log(xi)


def bound_mu(xi: float, tol: float = MIN_TOL) -> float:
    _check_xi(xi, XI_MAX)
    return lambda0_of_xi(xi, tol).neg_log


def bound_conjecture(xi: float, tol: float = MIN_TOL) -> float:
    """-ln lambda0(2 xi / e)."""
    _check_xi(xi, CONJ_XI_MAX)
    return lambda0_of_xi(2.0 * xi / math.e, tol).neg_log


def bound_report(xi: float, tol: float = MIN_TOL) -> BoundReport:
    _check_xi(xi, XI_MAX)
    mu = lambda0_of_xi(xi, tol)
    conj = lambda0_of_xi(2.0 * xi / math.e, tol)
    # error on -ln(lambda) is est_error / lambda to first order
    err = max(mu.est_error / mu.lambda0, conj.est_error / conj.lambda0)
    return BoundReport(xi, bound_bb(xi), mu.neg_log, conj.neg_log, mu.lambda0, conj.lambda0, err)


def xi_grid(lo: float, hi: float, steps: int, geometric: bool = True) -> list[float]:
    if not (0 < lo < hi):
        raise InvalidArgument(f"need 0 < xi_min < xi_max, got {lo!r}, {hi!r}")
    if steps < 2:
        raise InvalidArgument(f"need at least 2 steps, got {steps}")
    pts = np.geomspace(lo, hi, steps) if geometric else np.linspace(lo, hi, steps)
    pts[0], pts[-1] = lo, hi
    return [float(v) for v in pts]


def bounds_table(
    xi_min: float = 0.05, xi_max: float = 3.0, steps: int = 60, tol: float = MIN_TOL, geometric: bool = True
) -> list[BoundReport]:
    """Rows of all three bounds over a geometric (default) or linear xi grid."""
    return [bound_report(xi, tol) for xi in xi_grid(xi_min, xi_max, steps, geometric)]


def write_bounds_csv(rows: Iterable[BoundReport], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(BOUNDS_CSV_HEADER)
    for r in rows:
        w.writerow(r.row())
