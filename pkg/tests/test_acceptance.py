"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with the measured
quantity.  The lines are repeated in the pytest terminal summary, and the
file can also be run directly: ``python3 tests/test_acceptance.py``.
"""
import math
import sys
import time

import numpy as np
import pytest

from entropic_bounds.bounds import bound_bb, bound_conjecture, bound_mu, bounds_table
from entropic_bounds.entropy import BinGrid, bin_probabilities, shannon_entropy
from entropic_bounds.prolate import lambda0_of_xi, spectrum
from entropic_bounds.search import HuntConfig, check_state, gaussian_scan, hunt, margin_objective
from entropic_bounds.states import POSITION, GaussianState, HermiteState

SIG = 1 / math.sqrt(2)
RESULTS: list[str] = []


def report(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  criterion {n}: {title} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_1_bb_zero_crossing():
    lo, hi = 1.0, 2.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if bound_bb(mid) > 0 else (lo, mid)
    crossing = 0.5 * (lo + hi)
    err = abs(crossing - math.e / 2)
    ok = err < 1e-6 and bound_bb(1.36) < 0
    report(1, "bb changes sign at e/2 and bb(1.36) < 0", ok,
           f"crossing {crossing:.9f}, |err| {err:.1e}, bb(1.36) {bound_bb(1.36):.3e}")


def test_criterion_2_small_xi_asymptotic():
    ratio = lambda0_of_xi(1e-3, 1e-12).lambda0 / 1e-3
    report(2, "lambda0(xi)/xi in [0.99, 1.01] at xi = 1e-3", 0.99 <= ratio <= 1.01, f"ratio {ratio:.6f}")


def test_criterion_3_large_xi_limit():
    xs = (0.25, 0.5, 1, 2, 4, 8)
    lam = [lambda0_of_xi(x).lambda0 for x in xs]
    mu = [bound_mu(x) for x in xs]
    ok = all(a < b for a, b in zip(lam, lam[1:])) and all(a > b for a, b in zip(mu, mu[1:])) and min(mu) > 0
    report(3, "lambda0 increasing, bound_mu decreasing and positive", ok,
           f"lambda0(8) = 1 - {1 - lam[-1]:.3e}, mu(8) = {mu[-1]:.3e}")


def test_criterion_4_trace_identity():
    worst, details = 0.0, []
    for c in (0.5, 2.0, 5.0):
        k = 4
        while True:
            vals = spectrum(c, k)
            if vals[-1] < 1e-12:
                break
            k *= 2
        err = abs(math.fsum(vals) - 2 * c / math.pi)
        worst = max(worst, err)
        details.append(f"c={c:g}: k={k}")
    report(4, "sum of eigenvalues equals 2c/pi within 1e-8", worst < 1e-8,
           f"{', '.join(details)}, max err {worst:.1e}")


def test_criterion_5_envelope():
    rows = bounds_table(0.05, 3.0, 60, geometric=True)
    slack = min(r.conj - max(r.bb, r.mu) for r in rows)
    pinch = bound_conjecture(1e-3) - bound_bb(1e-3)
    ok = len(rows) == 60 and slack >= -1e-9 and pinch < 0.02
    report(5, "conj >= max(bb, mu) - 1e-9 on 60 geometric points; conj - bb < 0.02 at 1e-3", ok,
           f"min slack {slack:.3e}, pinch {pinch:.3e}")


def test_criterion_6_gaussian_scan():
    xis = [float(x) for x in np.linspace(0.1, 12.0, 120)]
    dxs = (0.5, 1.0, 2.0)
    reports = gaussian_scan(SIG, dxs, xis, offsets=(0.5, 0.0))
    min_margin = min(r.margin for r in reports)
    plateau = max(abs(r.total - r.H_x) for r in reports if r.xi >= 8 and r.offset_x == -0.5 * r.dx)
    ok = min_margin > 0 and plateau < 1e-4
    report(6, "Gaussian scan margins > 0; plateau at H(x) within 1e-4 for xi >= 8", ok,
           f"{len(reports)} points, min margin {min_margin:.3e}, max |sum - H_x| {plateau:.1e}")


def test_criterion_7_small_bin_law():
    target = 0.5 * math.log(math.pi * math.e)
    errs = []
    for d in (0.1, 0.05, 0.02):
        h = shannon_entropy(bin_probabilities(GaussianState(SIG), BinGrid(d, -d / 2), POSITION))
        errs.append(abs(h + math.log(d) - target))
    ok = errs[0] > errs[1] > errs[2] and errs[2] < 5e-3
    report(7, "|H(d) + ln d - h_diff| decreasing, < 5e-3 at d = 0.02", ok,
           ", ".join(f"{e:.2e}" for e in errs))


@pytest.mark.slow
def test_criterion_8_hunt():
    cfg = HuntConfig(basis=8, xis=(0.5, 1.0, 2.0), restarts=64, seed=42)
    t0 = time.perf_counter()
    res = hunt(cfg)
    dt = time.perf_counter() - t0
    ok = res.best.margin > -1e-6 and not res.verified
    report(8, "hunt N=8, 64 restarts, seed 42: best margin > -1e-6, nothing verified", ok,
           f"best margin {res.best.margin:.4e} at xi={res.best.xi:g}, verified={res.verified}, {dt:.0f} s")


def test_criterion_9_cross_path():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 9))
        c = rng.standard_normal(n)
        c /= np.linalg.norm(c)
        xi = float(rng.uniform(0.2, 4.0))
        aspect = float(np.exp(rng.uniform(-1, 1)))
        dx, dp = math.sqrt(2 * math.pi * xi * aspect), math.sqrt(2 * math.pi * xi / aspect)
        ox, op = -float(rng.uniform(0, dx)), -float(rng.uniform(0, dp))
        fast = margin_objective(c, dx, dp, ox, op)
        slow = check_state(HermiteState(tuple(c)), dx, dp, ox, op).margin
        worst = max(worst, abs(fast - slow))
    report(9, "margin_objective equals check_state on 100 random Hermite states within 1e-10",
           worst < 1e-10, f"max diff {worst:.1e}")


if __name__ == "__main__":
    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
