"""Entropic uncertainty bounds for finite-resolution position and momentum
measurements: the sinc-kernel eigenvalue lambda0, binned Shannon entropies
of test states, and a search for states violating -ln lambda0(2 xi / e)."""

from .bounds import BoundReport, bound_bb, bound_conjecture, bound_mu, bounds_table
from .entropy import BinGrid, ProbabilityVector, bin_probabilities, entropy_pair, shannon_entropy
from .errors import AccuracyFailure, InvalidArgument
from .prolate import ProlateResult, eigenfunction, lambda0, lambda0_of_xi, spectrum
from .search import CheckReport, HuntConfig, HuntResult, check_state, gaussian_scan, hunt, margin_objective
from .states import (
    GaussianState,
    HermiteState,
    Interval,
    ProlateState,
    SlitState,
    hermite_value,
    momentum_mass,
    parse_state,
    position_mass,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyFailure", "BinGrid", "BoundReport", "CheckReport", "GaussianState", "HermiteState", "HuntConfig",
    "HuntResult", "Interval", "InvalidArgument", "ProbabilityVector", "ProlateResult", "ProlateState", "SlitState",
    "bin_probabilities", "bound_bb", "bound_conjecture", "bound_mu", "bounds_table", "check_state",
    "eigenfunction", "entropy_pair", "gaussian_scan", "hermite_value", "hunt", "lambda0", "lambda0_of_xi",
    "margin_objective", "momentum_mass", "parse_state", "position_mass", "shannon_entropy", "spectrum",
]
