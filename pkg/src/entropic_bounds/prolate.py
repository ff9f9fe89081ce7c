"""Largest eigenvalue and eigenfunctions of the finite-interval sinc kernel.

The operator is

    (Q f)(x) = int_{-1}^{1} sin(c (x - y)) / (pi (x - y)) f(y) dy

discretised by a symmetric Nystrom scheme on Gauss-Legendre nodes.  The
resolution product xi = dx*dp/h maps to the bandwidth through c = pi*xi/2,
which makes lambda0 ~ xi for small xi and lambda0 -> 1 for large xi.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, TextIO

import numpy as np

from .errors import AccuracyFailure, InvalidArgument
from .numerics import gauss_legendre, symmetric_eigh

C_MAX = 40.0
XI_MAX = 25.0
MIN_TOL = 1e-13
ORDERS = (64, 128, 256, 512, 1024, 2048)
# below this, 1 - lambda0 cannot be resolved from lambda0 in double precision
PRECISION_FLOOR = 1e-13
MAX_EIGENFUNCTION_INDEX = 16

LAMBDA0_CSV_HEADER = ("c", "xi", "lambda0", "order", "est_error")


@dataclass(frozen=True)
class ProlateResult:
    c: float
    lambda0: float
    order: int
    est_error: float
    one_minus: float
    precision_floor: bool = False

    @property
    def xi(self) -> float:
        return c_to_xi(self.c)

    @property
    def neg_log(self) -> float:
        """-ln(lambda0), evaluated without cancellation near lambda0 = 1."""
        return -math.log1p(-self.one_minus)


def xi_to_c(xi: float) -> float:
    return math.pi * xi / 2.0


def c_to_xi(c: float) -> float:
    return 2.0 * c / math.pi


def kernel(c: float, x, y):
    """sin(c(x-y)) / (pi(x-y)) with the diagonal limit c/pi."""
    d = np.subtract.outer(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return (c / math.pi) * np.sinc(c * d / math.pi)


def nystrom_matrix(c: float, order: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Symmetrised Nystrom matrix sqrt(w_i) K(x_i, x_j) sqrt(w_j) and its rule."""
    rule = gauss_legendre(order)
    s = np.sqrt(rule.weights)
    A = s[:, None] * kernel(c, rule.nodes, rule.nodes) * s[None, :]
    return A, rule.nodes, rule.weights


def _validate(c, tol):
    if not (isinstance(c, (int, float, np.floating)) and math.isfinite(c)) or not 0 < c <= C_MAX:
        raise InvalidArgument(f"bandwidth c must lie in (0, {C_MAX}], got {c!r}")
    if not tol >= MIN_TOL:
        raise InvalidArgument(f"tol must be >= {MIN_TOL}, got {tol!r}")


@lru_cache(maxsize=4096)
def _lambda0_cached(c: float, tol: float) -> ProlateResult:
    prev = None
    best = None
    for order in ORDERS:
        A, _, _ = nystrom_matrix(c, order)
        vals, _ = symmetric_eigh(A)
        lam = float(vals[0])
        if prev is not None:
            diff = abs(lam - prev)
            best = (lam, order, diff, A)
            if diff < tol:
                break
        prev = lam
    else:
        lam, order, diff, _ = best
        raise AccuracyFailure(
            f"lambda0(c={c}) not converged to {tol} at order {ORDERS[-1]}",
            best_estimate=lam,
            abs_error=diff,
        )
    lam, order, diff, A = best
    est = float(max(diff, 4 * np.finfo(float).eps))
    one_minus = 1.0 - lam
    floor = False
    if one_minus < PRECISION_FLOOR:
        # resolve 1 - lambda0 directly as the smallest eigenvalue of I - A
        direct = float(np.linalg.eigvalsh(np.eye(len(A)) - A)[0])
        one_minus = max(direct, np.finfo(float).tiny)
        lam = 1.0 - one_minus if one_minus > np.finfo(float).eps else float(np.nextafter(1.0, 0.0))
        one_minus = float(one_minus)
        est = max(est, PRECISION_FLOOR)
        floor = True
    return ProlateResult(c=c, lambda0=lam, order=order, est_error=est, one_minus=one_minus, precision_floor=floor)


def lambda0(c: float, tol: float = MIN_TOL) -> ProlateResult:
    """Largest eigenvalue of the sinc-kernel operator with bandwidth ``c``.

    The Nystrom order is doubled from 64 until two successive estimates
    agree to ``tol``; results are memoised per (c, tol).
    When 1 - lambda0 drops below about 1e-13 the value is taken from the
    smallest eigenvalue of I - A and ``precision_floor`` is set: double
    precision cannot resolve -ln(lambda0) much below that level.
    """
    _validate(c, tol)
    return _lambda0_cached(round(float(c), 12), float(tol))


def lambda0_of_xi(xi: float, tol: float = MIN_TOL) -> ProlateResult:
    """lambda0 as a function of the resolution product xi = dx*dp/h."""
    if not (isinstance(xi, (int, float, np.floating)) and math.isfinite(xi)) or not 0 < xi <= XI_MAX:
        raise InvalidArgument(f"xi must lie in (0, {XI_MAX}], got {xi!r}")
    return lambda0(xi_to_c(xi), tol)


def spectrum(c: float, k: int, tol: float = MIN_TOL) -> list[float]:
    """Top-k eigenvalues of the operator, descending.

    The order is doubled until all k leading eigenvalues move by < tol.
    """
    _validate(c, tol)
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise InvalidArgument(f"k must be a positive integer, got {k!r}")
    prev = None
    for order in ORDERS:
        if k > order:
            continue
        A, _, _ = nystrom_matrix(c, order)
        vals = symmetric_eigh(A)[0][:k]
        if prev is not None and np.max(np.abs(vals - prev)) < tol:
            return [float(v) for v in vals]
        prev = vals
    if prev is None:
        raise InvalidArgument(f"k={k} exceeds the largest discretisation order {ORDERS[-1]}")
    raise AccuracyFailure(f"spectrum(c={c}, k={k}) not converged", best_estimate=list(prev))


@dataclass(frozen=True)
class ProlateEigenfunction:
    """The n-th eigenfunction, stored by its Nystrom node values.

    ``values`` are normalised so that sum(weights * values**2) == 1, i.e.
    unit L2 norm on [-1, 1].  Calling the object evaluates the Nystrom
    extension (1/eigenvalue) * int K(x, y) phi(y) dy, which is the
    band-limited continuation of the eigenfunction to the whole real line.
    """

    c: float
    n: int
    eigenvalue: float
    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1)
        out = np.empty_like(flat)
        wv = self.weights * self.values / self.eigenvalue
        step = max(1, 2**22 // len(self.nodes))
        for i in range(0, flat.size, step):
            out[i : i + step] = kernel(self.c, flat[i : i + step], self.nodes) @ wv
        return out.reshape(x.shape)

    def far_field(self, x, terms: int = 24):
        """Nystrom extension for |x| >= 4 via a multipole expansion.

        sin(c(x - y)) / (x - y) is expanded in powers of y/x, so the cost per
        point is ``terms`` instead of the Nystrom order.  With |y| <= 1 the
        truncation error is below 4**-terms relative.
        """
        x = np.asarray(x, dtype=float)
        if np.any(np.abs(x) < 4.0):
            raise InvalidArgument("far_field needs |x| >= 4")
        alpha = self.weights * self.values / (math.pi * self.eigenvalue)
        powers = self.nodes[None, :] ** np.arange(terms)[:, None]
        a_k = powers @ (alpha * np.cos(self.c * self.nodes))
        b_k = powers @ (alpha * np.sin(self.c * self.nodes))
        inv = 1.0 / x
        # Horner in 1/x for sum_k coef_k / x^(k+1)
        sa = np.zeros_like(x)
        sb = np.zeros_like(x)
        for k in range(terms - 1, -1, -1):
            sa = (sa + a_k[k]) * inv
            sb = (sb + b_k[k]) * inv
        return np.sin(self.c * x) * sa - np.cos(self.c * x) * sb

    def apply_operator(self, x, order: int | None = None):
        """(Q phi)(x) by a quadrature independent of the stored nodes."""
        rule = gauss_legendre(order or 2 * len(self.nodes))
        phi = self(rule.nodes)
        return kernel(self.c, np.asarray(x, dtype=float), rule.nodes) @ (rule.weights * phi)

    def residual(self, probes=None) -> float:
        """max |Q phi - lambda phi| over probe points in [-1, 1]."""
        if probes is None:
            probes = np.linspace(-1.0, 1.0, 50)
        return float(np.max(np.abs(self.apply_operator(probes) - self.eigenvalue * self(probes))))

    @property
    def abs_sum(self) -> float:
        """int |phi| over [-1, 1]; used for far-field envelopes."""
        return float(np.dot(self.weights, np.abs(self.values)))


@lru_cache(maxsize=256)
def _eigenfunction_cached(c: float, n: int, tol: float) -> ProlateEigenfunction:
    prev = None
    for order in ORDERS:
        A, nodes, weights = nystrom_matrix(c, order)
        vals, vecs = symmetric_eigh(A)
        lam = float(vals[n])
        if prev is not None and abs(lam - prev) < tol:
            break
        prev = lam
    else:
        raise AccuracyFailure(f"eigenvalue {n} for c={c} not converged", best_estimate=prev)
    # neighbouring eigenvalues must be resolvable for the vector to mean anything
    if lam < 1e3 * np.finfo(float).eps * order:
        raise AccuracyFailure(
            f"eigenvalue {n} for c={c} is {lam:.3e}, below what double precision resolves",
            best_estimate=lam,
        )
    values = vecs[:, n] / np.sqrt(weights)
    ef = ProlateEigenfunction(c, n, lam, nodes, weights, values)
    if ef(1.0) < 0:
        ef = ProlateEigenfunction(c, n, lam, nodes, weights, -values)
    return ef


def eigenfunction(c: float, n: int = 0, tol: float = 1e-12) -> ProlateEigenfunction:
    """n-th eigenfunction (n <= 16), signed so that phi(1) > 0."""
    _validate(c, tol)
    if not isinstance(n, (int, np.integer)) or not 0 <= n <= MAX_EIGENFUNCTION_INDEX:
        raise InvalidArgument(f"eigenfunction index must be in [0, {MAX_EIGENFUNCTION_INDEX}], got {n!r}")
    ef = _eigenfunction_cached(round(float(c), 12), int(n), float(tol))
    res = ef.residual()
    if res > 10 * tol:
        raise AccuracyFailure(f"operator residual {res:.3e} exceeds {10 * tol:.1e}", best_estimate=ef, abs_error=res)
    return ef


def write_lambda0_csv(results: Iterable[ProlateResult], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(LAMBDA0_CSV_HEADER)
    for r in results:
        w.writerow([f"{r.c:.17g}", f"{r.xi:.17g}", f"{r.lambda0:.17g}", r.order, f"{r.est_error:.17g}"])
