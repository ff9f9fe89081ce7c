"""Binned probabilities over a uniform partition and their Shannon entropy."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .states import MOMENTUM, POSITION, StateModel

DEFAULT_TAIL_TOL = 1e-12
DEFAULT_MAX_BINS = 1 << 20


@dataclass(frozen=True)
class BinGrid:
    """Bins [offset + i*width, offset + (i+1)*width) for all integers i."""

    width: float
    offset: float | None = None

    def __post_init__(self):
        if not (self.width > 0 and math.isfinite(self.width)):
            raise InvalidArgument(f"bin width must be positive and finite, got {self.width!r}")
        if self.offset is None:
            object.__setattr__(self, "offset", -0.5 * self.width)
        elif not math.isfinite(self.offset):
            raise InvalidArgument("bin offset must be finite")

    def edge(self, i):
        return self.offset + np.asarray(i) * self.width

    def index_of(self, x: float) -> int:
        return math.floor((x - self.offset) / self.width)


@dataclass(frozen=True)
class ProbabilityVector:
    """Masses of the bins ``indices``; ``residual`` is the mass not enumerated.

    ``omitted_entropy`` bounds the entropy the residual could carry and
    ``mass_entropy_error`` propagates the per-bin mass errors into H.
    ``truncated`` is set when the bin cap stopped enumeration before the tail
    fell below the requested tolerance.
    """

    indices: np.ndarray
    masses: np.ndarray
    residual: float
    omitted_entropy: float = 0.0
    mass_entropy_error: float = 0.0
    truncated: bool = False

    @property
    def total(self) -> float:
        return math.fsum(self.masses) + self.residual

    @property
    def entropy_error(self) -> float:
        """Width of the one-sided uncertainty on ``shannon_entropy``."""
        return self.omitted_entropy + self.mass_entropy_error


def _first_below(tail, start, step, target, cap):
    """Smallest k in [0, cap] with tail(start + k*step) < target, or None."""
    if tail(start) < target:
        return 0
    hi = 1
    while tail(start + hi * step) >= target:
        if hi >= cap:
            return None
        hi = min(2 * hi, cap)
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail(start + mid * step) < target:
            hi = mid
        else:
            lo = mid
    return hi


def _omitted_entropy(tail, start, step, r):
    """Upper bound on the entropy carried by tail mass r beyond ``start``.

    The mass is confined (up to a 1e-6 relative remainder) to B bins, found
    from the same tail bound; spread uniformly it carries r*ln(B/r).
    """
    if r <= 0:
        return 0.0
    k = _first_below(tail, start, step, r * 1e-6, 1 << 60)
    bins = max(1, k or 1 << 60)
    return r * max(math.log(bins / r), 0.0) if r < bins / math.e else r


def bin_probabilities(
    state: StateModel,
    grid: BinGrid,
    side: str = POSITION,
    tail_tol: float = DEFAULT_TAIL_TOL,
    max_bins: int | None = None,
) -> ProbabilityVector:
    """Masses of the bins that carry the state's probability on one side.

    Bins are enumerated outward from the bin holding the state's centre
    until the tail bound on either side is below ``tail_tol / 2``.  Heavy
    tails (slit momentum, prolate position) may hit ``max_bins`` first; the
    result is then flagged ``truncated`` and a warning is issued.
    """
    if not 0 < tail_tol <= 1e-6:
        raise InvalidArgument(f"tail_tol must be in (0, 1e-6], got {tail_tol!r}")
    if side not in (POSITION, MOMENTUM):
        raise InvalidArgument(f"side must be 'position' or 'momentum', got {side!r}")
    if max_bins is None:
        max_bins = state.max_bins(side) or DEFAULT_MAX_BINS
    w = grid.width
    i0 = grid.index_of(state.center(side))
    half = tail_tol / 2
    per_side = max(1, max_bins // 2)
    below = lambda x: float(state.tail_below(side, x))
    above = lambda x: float(state.tail_above(side, x))
    k_lo = _first_below(below, grid.edge(i0), -w, half, per_side)
    k_hi = _first_below(above, grid.edge(i0 + 1), w, half, per_side)
    truncated = k_lo is None or k_hi is None
    if truncated:
        warnings.warn(
            f"{state.spec()} {side}: tail above {tail_tol:g} after {max_bins} bins; truncating",
            RuntimeWarning,
            stacklevel=2,
        )
    k_lo = per_side if k_lo is None else k_lo
    k_hi = per_side if k_hi is None else k_hi
    indices = np.arange(i0 - k_lo, i0 + k_hi + 1)
    edges = grid.edge(np.append(indices, indices[-1] + 1))
    masses, errors = state.masses(side, edges)

    lo_edge, hi_edge = float(edges[0]), float(edges[-1])
    r_lo, r_hi = below(lo_edge), above(hi_edge)
    residual = max(0.0, min(r_lo + r_hi, 1.0 - math.fsum(masses)))
    omitted = _omitted_entropy(below, lo_edge, -w, r_lo) + _omitted_entropy(above, hi_edge, w, r_hi)
    safe = np.maximum(masses, errors)
    with np.errstate(divide="ignore"):
        prop = float(np.sum(errors * np.abs(1.0 + np.log(np.where(safe > 0, safe, 1.0)))))
    return ProbabilityVector(indices, masses, residual, omitted, prop, truncated)


def shannon_entropy(pv: ProbabilityVector) -> float:
    """-sum m ln m in nats, with 0 ln 0 = 0; the residual is excluded."""
    m = np.asarray(pv.masses, dtype=float)
    m = m[m > 0]
    return max(0.0, -math.fsum(m * np.log(m)))


def entropy_interval(pv: ProbabilityVector) -> tuple[float, float]:
    """(lower, upper) bracket for the entropy of the full distribution."""
    h = shannon_entropy(pv)
    return max(0.0, h - pv.mass_entropy_error), h + pv.entropy_error


@dataclass(frozen=True)
class EntropyPair:
    H_x: float
    H_p: float
    position: ProbabilityVector
    momentum: ProbabilityVector

    @property
    def total(self) -> float:
        return self.H_x + self.H_p

    @property
    def error(self) -> float:
        return self.position.entropy_error + self.momentum.entropy_error


def entropy_pair_detail(
    state: StateModel,
    dx: float,
    dp: float,
    offset_x: float | None = None,
    offset_p: float | None = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
    max_bins: int | None = None,
) -> EntropyPair:
    """Position and momentum entropies together with their distributions.

    Offsets default to minus half a bin, so the origin is a bin centre.
    """
    px = bin_probabilities(state, BinGrid(dx, offset_x), POSITION, tail_tol, max_bins)
    pp = bin_probabilities(state, BinGrid(dp, offset_p), MOMENTUM, tail_tol, max_bins)
    return EntropyPair(shannon_entropy(px), shannon_entropy(pp), px, pp)


def entropy_pair(
    state: StateModel,
    dx: float,
    dp: float,
    offset_x: float | None = None,
    offset_p: float | None = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> tuple[float, float]:
    """(H_x, H_p) for bin widths dx, dp."""
    pair = entropy_pair_detail(state, dx, dp, offset_x, offset_p, tail_tol)
    return pair.H_x, pair.H_p
