"""Margins against the conjectured bound, scans, and counterexample hunting.

The margin of a state at bin widths (dx, dp) is H(x) + H(p) minus
-ln lambda0(2 xi / e) with xi = dx*dp / (2 pi).  A margin below minus its
error budget would be a counterexample; ``hunt`` searches for one over
Hermite superpositions and bin offsets with restarted Nelder-Mead.
"""
from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence, TextIO

import numpy as np
from scipy import optimize

from .bounds import CONJ_XI_MAX
from .entropy import DEFAULT_TAIL_TOL, entropy_pair_detail
from .errors import AccuracyFailure, InvalidArgument
from .numerics import erfc
from .prolate import MIN_TOL, lambda0_of_xi
from .states import GaussianState, HermiteState, StateModel, hermite_functions

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
SCAN_CSV_HEADER = (
    "dx", "dp", "xi", "offset_x", "offset_p", "H_x", "H_p", "sum", "bound", "margin", "error_budget",
)
MAX_BASIS = 32


@dataclass(frozen=True)
class CheckReport:
    state: str
    dx: float
    dp: float
    offset_x: float
    offset_p: float
    xi: float
    H_x: float
    H_p: float
    bound: float
    margin: float
    error_budget: float

    @property
    def total(self) -> float:
        return self.H_x + self.H_p

    @property
    def counterexample(self) -> bool:
        return self.margin < -self.error_budget

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sum"] = self.total
        d["counterexample"] = self.counterexample
        return d

    def row(self) -> list[str]:
        vals = [self.dx, self.dp, self.xi, self.offset_x, self.offset_p, self.H_x, self.H_p,
                self.total, self.bound, self.margin, self.error_budget]
        return [f"{v:.17g}" for v in vals]


def _conjecture(xi, tol):
    if not 0 < xi <= CONJ_XI_MAX:
        raise InvalidArgument(f"xi = dx*dp/(2 pi) = {xi:g} outside (0, {CONJ_XI_MAX:g}]")
    res = lambda0_of_xi(2.0 * xi / math.e, tol)
    return res.neg_log, res.est_error / res.lambda0


def check_state(
    state: StateModel,
    dx: float,
    dp: float,
    offset_x: float | None = None,
    offset_p: float | None = None,
    tol: float = DEFAULT_TAIL_TOL,
) -> CheckReport:
    """Evaluate H(x) + H(p) against the conjectured bound for one state.

    ``tol`` is the tail tolerance of the bin enumeration; offsets default to
    minus half a bin.  ``error_budget`` adds the entropy error brackets of
    both sides and the eigenvalue error of the bound.
    """
    if not (dx > 0 and dp > 0):
        raise InvalidArgument(f"bin widths must be positive, got dx={dx!r}, dp={dp!r}")
    offset_x = -0.5 * dx if offset_x is None else float(offset_x)
    offset_p = -0.5 * dp if offset_p is None else float(offset_p)
    xi = dx * dp / TWO_PI
    bound, bound_err = _conjecture(xi, max(MIN_TOL, tol / 10))
    pair = entropy_pair_detail(state, dx, dp, offset_x, offset_p, tail_tol=tol)
    return CheckReport(
        state=state.spec(), dx=float(dx), dp=float(dp), offset_x=offset_x, offset_p=offset_p, xi=xi,
        H_x=pair.H_x, H_p=pair.H_p, bound=bound, margin=pair.total - bound,
        error_budget=float(pair.error + bound_err),
    )


def sweep(
    states: Iterable[StateModel],
    dx_list: Sequence[float],
    xi_grid: Sequence[float],
    offsets: Sequence[float] = (0.5,),
    tol: float = DEFAULT_TAIL_TOL,
) -> list[CheckReport]:
    """check_state over states x dx x offset x xi, in that nesting order.

    ``offsets`` are fractions f of a bin: the grids start at -f*dx and -f*dp,
    so 0.5 centres a bin on the origin and 0 puts an edge there.
    """
    if not len(dx_list) or not len(xi_grid) or not len(offsets):
        raise InvalidArgument("dx list, xi grid and offsets must be non-empty")
    out = []
    for state in states:
        for dx in dx_list:
            for f in offsets:
                for xi in xi_grid:
                    dp = TWO_PI * xi / dx
                    out.append(check_state(state, dx, dp, -f * dx, -f * dp, tol))
    return out


def gaussian_scan(
    sigma_x: float,
    dx_list: Sequence[float],
    xi_grid: Sequence[float],
    offsets: Sequence[float] = (0.5,),
    tol: float = DEFAULT_TAIL_TOL,
) -> list[CheckReport]:
    """Entropy sum and margin of a minimum-uncertainty Gaussian.

    For each dx the momentum width follows from dp = 2 pi xi / dx, so a
    fixed dx traces one entropy curve against xi.
    """
    return sweep([GaussianState(sigma=sigma_x)], dx_list, xi_grid, offsets, tol)


def write_scan_csv(reports: Iterable[CheckReport], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SCAN_CSV_HEADER)
    for r in reports:
        w.writerow(r.row())


# --------------------------------------------------------------------------
# closed-form Hermite masses


def _hermite_cumulatives(nmax: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper overlap integrals of h_0..h_{nmax-1} at each x.

    Returns (L, U) of shape (len(x), nmax, nmax) with
    L_mn(x) = int_{-inf}^x h_m h_n and U_mn(x) = int_x^inf h_m h_n.
    Off the diagonal the Wronskian identity
    (h_m h_n' - h_n h_m')' = 2 (m - n) h_m h_n gives a closed form; the
    diagonal follows the recurrence
    T_{n+1} = (T_n + n T_{n-1} -/+ x h_n^2) / (n + 1).
    """
    n = nmax
    h = hermite_functions(n, x)  # one extra for the derivative
    k = np.arange(n)
    dh = np.sqrt(k / 2.0)[:, None] * np.vstack([np.zeros((1, len(x))), h[: n - 1]]) - np.sqrt(
        (k + 1) / 2.0
    )[:, None] * h[1 : n + 1]
    h = h[:n]
    wr = h.T[:, :, None] * dh.T[:, None, :] - h.T[:, None, :] * dh.T[:, :, None]
    diff = k[:, None] - k[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        low = np.where(diff != 0, wr / (2.0 * np.where(diff != 0, diff, 1)), 0.0)
    up = -low
    xh2 = x[None, :] * h**2
    dl = np.empty((n, len(x)))
    du = np.empty((n, len(x)))
    dl[0] = 0.5 * erfc(-x)
    du[0] = 0.5 * erfc(x)
    if n > 1:
        dl[1] = dl[0] - xh2[0]
        du[1] = du[0] + xh2[0]
    for m in range(1, n - 1):
        dl[m + 1] = (dl[m] + m * dl[m - 1] - xh2[m]) / (m + 1)
        du[m + 1] = (du[m] + m * du[m - 1] + xh2[m]) / (m + 1)
    idx = np.arange(n)
    low[:, idx, idx] = dl.T
    up[:, idx, idx] = du.T
    return low, up


def hermite_bin_masses(coeffs: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Probability of |sum c_n h_n|^2 in each interval between edges."""
    coeffs = np.asarray(coeffs, dtype=complex)
    low, up = _hermite_cumulatives(len(coeffs), np.asarray(edges, dtype=float))
    a_low, b_low = low[:-1], low[1:]
    a_up, b_up = up[:-1], up[1:]
    a, b = edges[:-1], edges[1:]
    M = np.where((b <= 0)[:, None, None], b_low - a_low, 0.0)
    M = np.where((a >= 0)[:, None, None], a_up - b_up, M)
    mid = (a < 0) & (b > 0)
    M[mid] = np.eye(len(coeffs)) - a_low[mid] - b_up[mid]
    m = np.einsum("m,imn,n->i", coeffs.conj(), M, coeffs).real
    return np.clip(m, 0.0, 1.0)


@lru_cache(maxsize=64)
def _hermite_cutoff(n: int, tail_tol: float) -> float:
    """X with sum_n int_X^inf h_n^2 < tail_tol / 2 (bounds every unit superposition)."""
    from .states import hermite_upper_tails

    x = 1.0
    while float(np.sum(hermite_upper_tails(n - 1, x))) >= tail_tol / 2:
        x *= 1.25
    lo, hi = x / 1.25, x
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if float(np.sum(hermite_upper_tails(n - 1, mid))) >= tail_tol / 2:
            lo = mid
        else:
            hi = mid
    return hi


def _entropy(m):
    m = m[m > 0]
    return -math.fsum(m * np.log(m))


class HermiteMargin:
    """Fast margin evaluator for Hermite superpositions at fixed (dx, dp).

    Masses come from closed-form overlap integrals, independent of the
    quadrature path used by ``check_state``.
    """

    def __init__(self, size: int, dx: float, dp: float, tol: float = DEFAULT_TAIL_TOL):
        if not 1 <= size <= 64:
            raise InvalidArgument(f"basis size must be in [1, 64], got {size}")
        if not (dx > 0 and dp > 0):
            raise InvalidArgument("bin widths must be positive")
        self.size, self.dx, self.dp, self.tol = size, float(dx), float(dp), tol
        self.xi = self.dx * self.dp / TWO_PI
        self.bound, self.bound_err = _conjecture(self.xi, max(MIN_TOL, tol / 10))
        self.cutoff = _hermite_cutoff(size, tol)
        self.phase = (-1j) ** np.arange(size)

    def _edges(self, width, offset):
        lo = math.floor((-self.cutoff - offset) / width)
        hi = math.ceil((self.cutoff - offset) / width)
        return offset + width * np.arange(lo, hi + 1)

    def entropies(self, coeffs, offset_x: float, offset_p: float) -> tuple[float, float]:
        c = np.asarray(coeffs, dtype=complex)
        mx = hermite_bin_masses(c, self._edges(self.dx, offset_x))
        mp = hermite_bin_masses(c * self.phase, self._edges(self.dp, offset_p))
        return _entropy(mx), _entropy(mp)

    def __call__(self, coeffs, offset_x: float, offset_p: float) -> float:
        hx, hp = self.entropies(coeffs, offset_x, offset_p)
        return hx + hp - self.bound


@lru_cache(maxsize=256)
def _evaluator(size, dx, dp, tol):
    return HermiteMargin(size, dx, dp, tol)


def margin_objective(coeffs, dx: float, dp: float, offset_x: float, offset_p: float,
                     tol: float = DEFAULT_TAIL_TOL) -> float:
    """Margin of the Hermite superposition with unit coefficient vector ``coeffs``."""
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1 or len(c) == 0:
        raise InvalidArgument("coefficients must be a non-empty vector")
    if abs(np.linalg.norm(c) - 1.0) > 1e-9:
        raise InvalidArgument(f"coefficient norm {np.linalg.norm(c)!r} is not 1")
    return _evaluator(len(c), float(dx), float(dp), float(tol))(c, offset_x, offset_p)


# --------------------------------------------------------------------------
# hunting


@dataclass(frozen=True)
class HuntConfig:
    basis: int = 8
    xis: tuple = (0.5, 1.0, 2.0)
    restarts: int = 64
    seed: int = 42
    budget: int = 2000
    field: str = "real"
    tol: float = DEFAULT_TAIL_TOL
    aspect: float = 1.0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "xis", tuple(float(x) for x in self.xis))
        if not 1 <= self.basis <= MAX_BASIS:
            raise InvalidArgument(f"basis size must be in [1, {MAX_BASIS}], got {self.basis}")
        if self.restarts < 1:
            raise InvalidArgument("restarts must be >= 1")
        if self.budget < 1:
            raise InvalidArgument("budget must be >= 1")
        if self.field not in ("real", "complex"):
            raise InvalidArgument(f"field must be 'real' or 'complex', got {self.field!r}")
        if not self.xis or any(not 0 < x <= CONJ_XI_MAX for x in self.xis):
            raise InvalidArgument(f"xi targets must lie in (0, {CONJ_XI_MAX:g}]")
        if not self.aspect > 0:
            raise InvalidArgument("aspect must be positive")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgument("seed must be a 64-bit unsigned integer")

    def widths(self, xi: float) -> tuple[float, float]:
        """(dx, dp) with dx*dp = 2 pi xi and dx/dp = aspect."""
        return math.sqrt(TWO_PI * xi * self.aspect), math.sqrt(TWO_PI * xi / self.aspect)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["xis"] = list(self.xis)
        return d


@dataclass
class RestartOutcome:
    xi: float
    restart: int
    margin: float
    coeffs: list
    offsets: tuple
    evaluations: int
    status: str


@dataclass
class HuntResult:
    config: HuntConfig
    best: CheckReport
    best_coeffs: list
    trajectory: dict
    per_xi: dict
    verified: bool
    verification: CheckReport | None = None
    statuses: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "best": self.best.to_dict(),
            "best_coeffs": [_json_complex(v) for v in self.best_coeffs],
            "trajectory": self.trajectory,
            "restart_status": self.statuses,
            "per_xi_best": {k: v.to_dict() for k, v in self.per_xi.items()},
            "counterexample_candidate": self.best.counterexample,
            "verified": self.verified,
            "verification": None if self.verification is None else self.verification.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _json_complex(v):
    v = complex(v)
    return v.real if v.imag == 0 else [v.real, v.imag]


def _unpack(z, size, field_):
    if field_ == "real":
        c = np.asarray(z[:size], dtype=complex)
    else:
        c = z[:size] + 1j * z[size : 2 * size]
    return c, z[-2] % 1.0, z[-1] % 1.0


def _run_restart(cfg: HuntConfig, xi_index: int, restart: int) -> RestartOutcome:
    xi = cfg.xis[xi_index]
    dx, dp = cfg.widths(xi)
    objective = _evaluator(cfg.basis, dx, dp, cfg.tol)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(xi_index, restart)))
    nparam = cfg.basis if cfg.field == "real" else 2 * cfg.basis
    z0 = np.concatenate([rng.standard_normal(nparam), rng.uniform(0.0, 1.0, 2)])
    best = {"value": math.inf, "z": z0.copy(), "n": 0}

    def fun(z):
        c, ux, up = _unpack(z, cfg.basis, cfg.field)
        norm = np.linalg.norm(c)
        if not norm > 1e-12:
            return math.inf
        # projection back onto the unit sphere
        val = objective(c / norm, -ux * dx, -up * dp)
        best["n"] += 1
        if val < best["value"]:
            best["value"], best["z"] = val, np.array(z)
        return val

    status = "converged"
    try:
        res = optimize.minimize(
            fun, z0, method="Nelder-Mead",
            options={"maxfev": cfg.budget, "xatol": 1e-10, "fatol": 1e-13, "adaptive": nparam > 4},
        )
        if not res.success:
            status = "stagnated"
    except (AccuracyFailure, FloatingPointError, ValueError) as exc:
        log.warning("restart %d at xi=%g failed: %s", restart, xi, exc)
        status = f"failed: {exc}"
    c, ux, up = _unpack(best["z"], cfg.basis, cfg.field)
    norm = np.linalg.norm(c)
    c = c / norm if norm > 0 else np.eye(cfg.basis)[0].astype(complex)
    return RestartOutcome(
        xi=xi, restart=restart, margin=float(best["value"]), coeffs=list(c),
        offsets=(-ux * dx, -up * dp), evaluations=best["n"], status=status,
    )


def _run_restart_args(args):
    return _run_restart(*args)


def _state_from(coeffs, field_):
    c = np.asarray(coeffs, dtype=complex)
    if field_ == "real":
        c = c.real
    return HermiteState.normalized(c)


def hunt(cfg: HuntConfig) -> HuntResult:
    """Restarted Nelder-Mead search for a negative margin.

    Each (xi, restart) pair draws its own seeded start, so the result does
    not depend on execution order or on ``cfg.workers``.  The best point of
    every xi is re-evaluated with ``check_state``; a negative margin beyond
    the error budget is re-checked at 10x tighter tolerance before it is
    marked verified.
    """
    tasks = [(cfg, i, r) for i in range(len(cfg.xis)) for r in range(cfg.restarts)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(_run_restart_args, tasks, chunksize=4))
    else:
        outcomes = [_run_restart(*t) for t in tasks]

    trajectory, statuses, per_xi, best_of = {}, {}, {}, {}
    for o in outcomes:
        key = repr(o.xi)
        trajectory.setdefault(key, []).append(o.margin)
        statuses.setdefault(key, []).append(o.status)
        if key not in best_of or o.margin < best_of[key].margin:
            best_of[key] = o
    for key, o in best_of.items():
        dx, dp = cfg.widths(o.xi)
        per_xi[key] = check_state(_state_from(o.coeffs, cfg.field), dx, dp, *o.offsets, tol=cfg.tol)

    best_key = min(best_of, key=lambda k: (best_of[k].margin, cfg.xis.index(float(k))))
    best = per_xi[best_key]
    verified, verification = False, None
    if best.counterexample:
        o = best_of[best_key]
        dx, dp = cfg.widths(o.xi)
        verification = check_state(
            _state_from(o.coeffs, cfg.field), dx, dp, *o.offsets, tol=max(cfg.tol / 10, 1e-15)
        )
        verified = verification.counterexample
    return HuntResult(
        config=cfg, best=best, best_coeffs=best_of[best_key].coeffs, trajectory=trajectory,
        per_xi=per_xi, verified=verified, verification=verification, statuses=statuses,
    )
