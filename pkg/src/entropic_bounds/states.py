"""Normalised pure states and their interval masses in position and momentum.

Units: hbar = 1, so h = 2*pi and the momentum amplitude is the unitary
Fourier transform psi~(p) = (2 pi)^(-1/2) int psi(x) exp(-i p x) dx.

Every state exposes, per side ("position" or "momentum"):

* ``masses(side, edges)``: the probability in each consecutive interval
  [edges[i], edges[i+1]] together with an absolute error per interval;
* ``tail_below(side, x)`` / ``tail_above(side, x)``: upper bounds on the
  probability outside a half line, used to decide how many bins to enumerate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np
from scipy import special

from . import prolate
from .errors import AccuracyFailure, InvalidArgument
from .numerics import adaptive_integrate, erfc, gauss_legendre

POSITION = "position"
MOMENTUM = "momentum"
SIDES = (POSITION, MOMENTUM)
MAX_HERMITE_INDEX = 63
EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InvalidArgument(f"interval needs lo < hi, got ({self.lo}, {self.hi})")


def _check_side(side):
    if side not in SIDES:
        raise InvalidArgument(f"side must be 'position' or 'momentum', got {side!r}")


def _masses_from_tails(edges, center, below, above):
    """Interval masses from accurate lower/upper tail functions.

    Intervals right of ``center`` are differenced with the upper tail,
    intervals left of it with the lower tail, so small masses far out keep
    their relative accuracy.
    """
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    out = np.empty(len(a))
    right = a >= center
    left = b <= center
    mid = ~(right | left)
    out[right] = above(a[right]) - above(b[right])
    out[left] = below(b[left]) - below(a[left])
    out[mid] = 1.0 - below(a[mid]) - above(b[mid])
    return np.clip(out, 0.0, 1.0)


class StateModel:
    """Base class for the state families."""

    kind: ClassVar[str] = ""

    def center(self, side: str) -> float:
        return 0.0

    def masses(self, side: str, edges) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def tail_below(self, side: str, x: float) -> float:
        raise NotImplementedError

    def tail_above(self, side: str, x: float) -> float:
        raise NotImplementedError

    def density(self, side: str, x):
        raise NotImplementedError

    def spec(self) -> str:
        raise NotImplementedError

    def max_bins(self, side: str) -> int | None:
        """Default cap on enumerated bins; None defers to the caller."""
        return None

    def is_even(self) -> bool:
        return False


# --------------------------------------------------------------------------
# Gaussian


@dataclass(frozen=True)
class GaussianState(StateModel):
    """Minimum-uncertainty Gaussian: sigma_x * sigma_p = 1/2."""

    sigma: float = 1.0 / math.sqrt(2.0)
    mu: float = 0.0
    mu_p: float = 0.0
    kind: ClassVar[str] = "gaussian"

    def __post_init__(self):
        if not self.sigma > 0 or not math.isfinite(self.sigma):
            raise InvalidArgument(f"sigma must be positive, got {self.sigma!r}")

    @property
    def sigma_p(self) -> float:
        return 0.5 / self.sigma

    def _params(self, side):
        _check_side(side)
        return (self.mu, self.sigma) if side == POSITION else (self.mu_p, self.sigma_p)

    def center(self, side):
        return self._params(side)[0]

    def tail_below(self, side, x):
        m, s = self._params(side)
        return 0.5 * erfc((m - np.asarray(x, dtype=float)) / (s * math.sqrt(2.0)))

    def tail_above(self, side, x):
        m, s = self._params(side)
        return 0.5 * erfc((np.asarray(x, dtype=float) - m) / (s * math.sqrt(2.0)))

    def masses(self, side, edges):
        m = _masses_from_tails(
            edges, self.center(side), lambda x: self.tail_below(side, x), lambda x: self.tail_above(side, x)
        )
        return m, 4 * EPS * np.maximum(m, 1e-300) + 1e-17

    def density(self, side, x):
        m, s = self._params(side)
        z = (np.asarray(x, dtype=float) - m) / s
        return np.exp(-0.5 * z * z) / (s * math.sqrt(2 * math.pi))

    def spec(self):
        s = f"gaussian:sigma={self.sigma!r}"
        if self.mu:
            s += f",mu={self.mu!r}"
        if self.mu_p:
            s += f",mu_p={self.mu_p!r}"
        return s

    def is_even(self):
        return self.mu == 0.0 and self.mu_p == 0.0


# --------------------------------------------------------------------------
# Single slit


def _sinc2_cdf_tail(u):
    """int_u^inf sin^2(t)/t^2 dt / pi for u >= 0, i.e. 1/2 - F(u)."""
    u = np.asarray(u, dtype=float)
    si, _ = special.sici(2.0 * u)
    with np.errstate(invalid="ignore", divide="ignore"):
        s2 = np.where(u > 0, np.sin(u) ** 2 / np.where(u > 0, u, 1.0), 0.0)
    return (0.5 * math.pi - si + s2) / math.pi


@dataclass(frozen=True)
class SlitState(StateModel):
    """Constant amplitude on [-a/2, a/2].

    The momentum density is (a / 2 pi) sinc^2(a p / 2); its interval masses
    use the antiderivative (Si(2u) - sin^2(u)/u) / pi with u = a p / 2.
    """

    a: float = 1.0
    kind: ClassVar[str] = "slit"

    def __post_init__(self):
        if not self.a > 0 or not math.isfinite(self.a):
            raise InvalidArgument(f"slit width must be positive, got {self.a!r}")

    def tail_below(self, side, x):
        return self.tail_above(side, -np.asarray(x, dtype=float))

    def tail_above(self, side, x):
        _check_side(side)
        x = np.asarray(x, dtype=float)
        if side == POSITION:
            h = 0.5 * self.a
            return np.clip((h - x) / self.a, 0.0, 1.0)
        u = 0.5 * self.a * x
        return np.where(u >= 0, _sinc2_cdf_tail(np.abs(u)), 1.0 - _sinc2_cdf_tail(np.abs(u)))

    def masses(self, side, edges):
        _check_side(side)
        edges = np.asarray(edges, dtype=float)
        if side == POSITION:
            h = 0.5 * self.a
            lo = np.clip(edges[:-1], -h, h)
            hi = np.clip(edges[1:], -h, h)
            m = np.maximum(hi - lo, 0.0) / self.a
            return m, 2 * EPS * m
        m = _masses_from_tails(edges, 0.0, lambda x: self.tail_below(side, x), lambda x: self.tail_above(side, x))
        # Si from the Cephes library carries ~1e-16 absolute error
        return m, np.full(len(m), 4 * EPS)

    def density(self, side, x):
        _check_side(side)
        x = np.asarray(x, dtype=float)
        if side == POSITION:
            return np.where(np.abs(x) <= 0.5 * self.a, 1.0 / self.a, 0.0)
        return self.a / (2 * math.pi) * np.sinc(self.a * x / (2 * math.pi)) ** 2

    def spec(self):
        return f"slit:a={self.a!r}"

    def is_even(self):
        return True


# --------------------------------------------------------------------------
# Hermite functions


def hermite_functions(nmax: int, x) -> np.ndarray:
    """h_0..h_nmax at x, shape (nmax+1,) + x.shape.

    L2-normalised Hermite functions by the upward recurrence
    h_{n+1} = sqrt(2/(n+1)) x h_n - sqrt(n/(n+1)) h_{n-1}.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = math.pi**-0.25 * np.exp(-0.5 * x * x)
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, nmax):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def hermite_value(n: int, x):
    """n-th normalised Hermite function (0 <= n <= 63)."""
    if not isinstance(n, (int, np.integer)) or not 0 <= n <= MAX_HERMITE_INDEX:
        raise InvalidArgument(f"Hermite index must be in [0, {MAX_HERMITE_INDEX}], got {n!r}")
    v = hermite_functions(int(n), x)[n]
    return float(v) if np.ndim(v) == 0 else v


def hermite_upper_tails(nmax: int, x) -> np.ndarray:
    """int_x^inf h_n(t)^2 dt for n = 0..nmax.

    Uses U_{n+1} = (U_n + n U_{n-1} + x h_n(x)^2) / (n+1), which follows from
    the ladder relations, with U_0 = erfc(x)/2.
    """
    x = np.asarray(x, dtype=float)
    h = hermite_functions(nmax, x)
    u = np.empty_like(h)
    u[0] = 0.5 * erfc(x)
    if nmax >= 1:
        u[1] = u[0] + x * h[0] ** 2
    for n in range(1, nmax):
        u[n + 1] = (u[n] + n * u[n - 1] + x * h[n] ** 2) / (n + 1)
    return np.clip(u, 0.0, 1.0)


@dataclass(frozen=True)
class HermiteState(StateModel):
    """Superposition sum_n c_n h_n(x) with sum |c_n|^2 = 1.

    The Hermite functions are eigenfunctions of the Fourier transform with
    eigenvalue (-i)^n, so the momentum amplitude uses coefficients
    (-i)^n c_n in the same basis.
    """

    coeffs: tuple = (1.0,)
    quad_tol: float = 1e-15
    kind: ClassVar[str] = "hermite"

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or not 1 <= len(c) <= MAX_HERMITE_INDEX + 1:
            raise InvalidArgument(f"need 1..{MAX_HERMITE_INDEX + 1} coefficients, got {len(self.coeffs)}")
        if not np.all(np.isfinite(c)):
            raise InvalidArgument("coefficients must be finite")
        norm = math.sqrt(float(np.sum(np.abs(c) ** 2)))
        if abs(norm - 1.0) > 1e-12:
            raise InvalidArgument(f"coefficient norm is {norm!r}, expected 1 (use HermiteState.normalized)")
        object.__setattr__(self, "coeffs", tuple(complex(v) if v.imag else float(v.real) for v in c))

    @classmethod
    def normalized(cls, coeffs, **kw) -> "HermiteState":
        c = np.asarray(coeffs, dtype=complex)
        norm = np.linalg.norm(c)
        if not norm > 0:
            raise InvalidArgument("coefficient vector is zero")
        c = c / norm
        if not np.any(c.imag):
            c = c.real
        return cls(tuple(c.tolist()), **kw)

    @property
    def size(self) -> int:
        return len(self.coeffs)

    def side_coeffs(self, side) -> np.ndarray:
        _check_side(side)
        c = np.asarray(self.coeffs, dtype=complex)
        if side == MOMENTUM:
            c = c * (-1j) ** np.arange(len(c))
        return c

    def amplitude(self, side, x):
        c = self.side_coeffs(side)
        return np.tensordot(c, hermite_functions(len(c) - 1, x), axes=1)

    def density(self, side, x):
        return np.abs(self.amplitude(side, x)) ** 2

    def tail_above(self, side, x):
        # Cauchy-Schwarz: |psi|^2 <= sum |c_n|^2 * sum h_n^2
        _check_side(side)
        return float(np.sum(hermite_upper_tails(self.size - 1, float(x))))

    def tail_below(self, side, x):
        return self.tail_above(side, -float(x))

    def cutoff(self) -> float:
        return math.sqrt(2 * self.size + 1) + 10.0

    def masses(self, side, edges):
        edges = np.asarray(edges, dtype=float)
        f = lambda t: self.density(side, t)
        m = np.empty(len(edges) - 1)
        err = np.empty(len(edges) - 1)
        for i, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
            est = adaptive_integrate(f, a, b, self.quad_tol)
            m[i], err[i] = est.value, est.abs_error + 4 * EPS * abs(est.value)
        return np.clip(m, 0.0, 1.0), err

    def spec(self):
        return "hermite:c=" + ",".join(_fmt_coeff(v) for v in self.coeffs)

    def is_even(self):
        return all(v == 0 for v in self.coeffs[1::2])


def _fmt_coeff(v):
    if isinstance(v, complex):
        return f"{v.real!r}{v.imag:+}j"
    return repr(v)


# --------------------------------------------------------------------------
# Prolate spheroidal states


@dataclass(frozen=True)
class ProlateState(StateModel):
    """Band-limited prolate spheroidal state.

    The position amplitude is the n-th sinc-kernel eigenfunction continued to
    the real line, whose L2(R) norm is 1/lambda_n; the state is therefore
    sqrt(lambda_n) * phi_n(x).  Its momentum amplitude vanishes outside
    [-c, c] and there |psi~(p)|^2 = phi_n(p/c)^2 / c.
    """

    c: float = 1.0
    n: int = 0
    tol: float = 1e-12
    kind: ClassVar[str] = "prolate"
    _ef: object = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)):
            raise InvalidArgument(f"prolate index must be an integer, got {self.n!r}")
        object.__setattr__(self, "_ef", prolate.eigenfunction(self.c, int(self.n), self.tol))

    @property
    def eigenfunction(self) -> prolate.ProlateEigenfunction:
        return self._ef

    @property
    def eigenvalue(self) -> float:
        return self._ef.eigenvalue

    def density(self, side, x):
        _check_side(side)
        x = np.asarray(x, dtype=float)
        if side == POSITION:
            return self.eigenvalue * self._ef(x) ** 2
        inside = np.abs(x) <= self.c
        u = np.clip(x / self.c, -1.0, 1.0)
        return np.where(inside, self._ef(u) ** 2 / self.c, 0.0)

    def _envelope_tail(self, x):
        # |phi(x)| <= S / (lambda pi (|x| - 1)) for |x| > 1, S = int |phi|
        x = abs(float(x))
        if x <= 1.0:
            return 1.0
        s = self._ef.abs_sum
        return min(1.0, s * s / (self.eigenvalue * math.pi**2 * (x - 1.0)))

    def tail_above(self, side, x):
        _check_side(side)
        x = float(x)
        if side == MOMENTUM:
            return 0.0 if x >= self.c else 1.0
        return self._envelope_tail(x) if x > 0 else 1.0

    def tail_below(self, side, x):
        _check_side(side)
        x = float(x)
        if side == MOMENTUM:
            return 0.0 if x <= -self.c else 1.0
        return self._envelope_tail(x) if x < 0 else 1.0

    def masses(self, side, edges):
        _check_side(side)
        edges = np.asarray(edges, dtype=float)
        if side == MOMENTUM:
            edges = np.clip(edges, -self.c, self.c)
        f = lambda t: self.density(side, t)
        nb = len(edges) - 1
        m = np.zeros(nb)
        err = np.zeros(nb)
        if side == MOMENTUM:
            near = np.ones(nb, dtype=bool)
        else:
            near = np.minimum(np.abs(edges[:-1]), np.abs(edges[1:])) < 8.0
            near |= edges[:-1] * edges[1:] < 0
        for i in np.flatnonzero(near):
            a, b = edges[i], edges[i + 1]
            if b > a:
                est = adaptive_integrate(f, a, b, 1e-14)
                m[i], err[i] = est.value, est.abs_error + 4 * EPS * abs(est.value)
        far = np.flatnonzero(~near)
        if len(far):
            m[far], err[far] = self._far_masses(edges, far)
        return np.clip(m, 0.0, 1.0), err

    def _far_masses(self, edges, idx):
        """Vectorised panel-wise Gauss rule for the oscillatory far field.

        Panels are at most half an oscillation period (pi/c) wide.  The error
        is estimated by comparing 8- and 16-point rules per panel.
        """
        a = edges[idx]
        b = edges[idx + 1]
        width = float(np.max(b - a))
        panels = max(1, math.ceil(width * self.c / (0.5 * math.pi)))
        lo_rule, hi_rule = gauss_legendre(8), gauss_legendre(16)
        out_lo = np.zeros(len(idx))
        out_hi = np.zeros(len(idx))
        step = max(1, 2**18 // (16 * panels * len(self._ef.nodes)))
        for s in range(0, len(idx), step):
            aa, bb = a[s : s + step], b[s : s + step]
            h = (bb - aa) / panels
            starts = aa[:, None] + h[:, None] * np.arange(panels)[None, :]
            for rule, out in ((lo_rule, out_lo), (hi_rule, out_hi)):
                x = starts[..., None] + 0.5 * h[:, None, None] * (rule.nodes + 1.0)
                vals = self.eigenvalue * self._ef.far_field(x) ** 2
                out[s : s + step] = np.sum(vals * rule.weights, axis=(1, 2)) * 0.5 * h
        return out_hi, np.abs(out_hi - out_lo) + 4 * EPS * out_hi

    def spec(self):
        return f"prolate:c={self.c!r},n={self.n}"

    def max_bins(self, side):
        # each far bin costs a panel quadrature; the 1/x tail is bounded anyway
        return 1 << 15 if side == POSITION else None

    def is_even(self):
        return self.n % 2 == 0


# --------------------------------------------------------------------------
# module-level API


def position_mass(state: StateModel, iv: Interval) -> float:
    """Probability that a position measurement falls in ``iv``."""
    return float(state.masses(POSITION, [iv.lo, iv.hi])[0][0])


def momentum_mass(state: StateModel, iv: Interval) -> float:
    """Probability that a momentum measurement falls in ``iv``."""
    return float(state.masses(MOMENTUM, [iv.lo, iv.hi])[0][0])


STATE_GRAMMAR = """\
state spec grammar:
  gaussian:sigma=S[,mu=M][,mu_p=P]     minimum-uncertainty Gaussian
  slit:a=A                             constant amplitude on [-A/2, A/2]
  hermite:c=C0,C1,...                  Hermite superposition, renormalised;
                                       complex entries as 0.6+0.2j
  prolate:c=C,n=N                      N-th prolate state of bandwidth C"""


def _parse_kv(body, allowed):
    out = {}
    for part in body.split(","):
        if "=" not in part:
            raise InvalidArgument(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        k = k.strip()
        if k not in allowed:
            raise InvalidArgument(f"unknown key {k!r}; allowed: {', '.join(allowed)}")
        out[k] = v.strip()
    return out


def parse_state(text: str) -> StateModel:
    """Build a state from a spec string such as ``slit:a=2.0``."""
    if ":" not in text:
        raise InvalidArgument(f"state spec {text!r} lacks 'kind:'\n{STATE_GRAMMAR}")
    kind, body = text.split(":", 1)
    kind = kind.strip().lower()
    try:
        if kind == "gaussian":
            kv = _parse_kv(body, ("sigma", "mu", "mu_p"))
            return GaussianState(
                sigma=float(kv.get("sigma", 1 / math.sqrt(2))),
                mu=float(kv.get("mu", 0.0)),
                mu_p=float(kv.get("mu_p", 0.0)),
            )
        if kind == "slit":
            kv = _parse_kv(body, ("a",))
            if "a" not in kv:
                raise InvalidArgument("slit needs a=WIDTH")
            return SlitState(a=float(kv["a"]))
        if kind == "hermite":
            if not body.startswith("c="):
                raise InvalidArgument("hermite needs c=C0,C1,...")
            values = [complex(v.strip().replace("i", "j")) for v in body[2:].split(",")]
            return HermiteState.normalized(values)
        if kind == "prolate":
            kv = _parse_kv(body, ("c", "n"))
            if "c" not in kv:
                raise InvalidArgument("prolate needs c=BANDWIDTH")
            return ProlateState(c=float(kv["c"]), n=int(kv.get("n", 0)))
    except InvalidArgument as exc:
        raise InvalidArgument(f"bad state spec {text!r}: {exc}\n{STATE_GRAMMAR}") from None
    except AccuracyFailure:
        raise
    except ValueError as exc:
        raise InvalidArgument(f"bad state spec {text!r}: {exc}\n{STATE_GRAMMAR}") from None
    raise InvalidArgument(f"unknown state kind {kind!r}\n{STATE_GRAMMAR}")
