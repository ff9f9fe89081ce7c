import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entropic_bounds.entropy import (
    BinGrid,
    ProbabilityVector,
    bin_probabilities,
    entropy_interval,
    entropy_pair,
    entropy_pair_detail,
    shannon_entropy,
)
from entropic_bounds.errors import InvalidArgument
from entropic_bounds.states import MOMENTUM, POSITION, GaussianState, HermiteState, SlitState

SIG = 1 / math.sqrt(2)
ERF_HALF = 0.5204998778130465
DIFF_ENTROPY = 0.5 * math.log(math.pi * math.e)  # Gaussian with sigma = 1/sqrt 2


def pv(masses, residual=0.0):
    return ProbabilityVector(np.arange(len(masses)), np.asarray(masses, float), residual)


def test_grid_defaults_and_validation():
    g = BinGrid(2.0)
    assert g.offset == -1.0
    assert g.index_of(0.0) == 0 and g.index_of(1.0) == 1 and g.index_of(-1.0) == 0
    for bad in (0.0, -1.0, math.inf):
        with pytest.raises(InvalidArgument):
            BinGrid(bad)


def test_slit_fills_one_bin():
    p = bin_probabilities(SlitState(2.0), BinGrid(2.0, -1.0), POSITION)
    nz = p.masses[p.masses > 0]
    assert list(nz) == [1.0]
    assert p.residual == 0.0
    assert shannon_entropy(p) == 0.0


def test_wide_bin_swallows_gaussian():
    p = bin_probabilities(GaussianState(SIG), BinGrid(10.0, -5.0), POSITION)
    assert p.masses.max() >= 1 - 1e-9


def test_centre_bin_is_erf_half():
    p = bin_probabilities(GaussianState(SIG), BinGrid(1.0, -0.5), POSITION)
    by_index = dict(zip(p.indices.tolist(), p.masses))
    assert by_index[0] == pytest.approx(ERF_HALF, abs=1e-14)
    assert by_index[0] == pytest.approx(0.5205, abs=1e-4)
    for k in (1, 2, 3):
        assert by_index[k] == pytest.approx(by_index[-k], abs=1e-15)


def test_entropy_trivial_values():
    assert shannon_entropy(pv([1.0])) == 0.0
    assert shannon_entropy(pv([0.5, 0.5])) == pytest.approx(math.log(2), abs=1e-15)
    assert shannon_entropy(pv([0.0, 1.0, 0.0])) == 0.0


def test_entropy_small_bins_value():
    p = bin_probabilities(GaussianState(SIG), BinGrid(0.05, -0.025), POSITION)
    assert shannon_entropy(p) == pytest.approx(DIFF_ENTROPY + math.log(20), abs=2e-3)
    assert shannon_entropy(p) == pytest.approx(4.0667, abs=2e-3)


def test_tail_tol_validation():
    g = GaussianState(SIG)
    for bad in (0.0, 1e-5, -1e-12):
        with pytest.raises(InvalidArgument):
            bin_probabilities(g, BinGrid(1.0), POSITION, bad)
    with pytest.raises(InvalidArgument):
        bin_probabilities(g, BinGrid(1.0), "energy")


def test_residual_below_tolerance_for_light_tails():
    for state in (GaussianState(SIG), GaussianState(0.2), HermiteState.normalized([1, 0.3, -0.4])):
        for side in (POSITION, MOMENTUM):
            for tol in (1e-12, 1e-8):
                p = bin_probabilities(state, BinGrid(0.7, 0.1), side, tol)
                assert p.residual < tol
                assert not p.truncated


def test_heavy_tail_is_flagged():
    with pytest.warns(RuntimeWarning, match="truncating"):
        p = bin_probabilities(SlitState(2.0), BinGrid(math.pi), MOMENTUM, max_bins=1 << 12)
    assert p.truncated
    assert p.residual > 1e-12
    assert p.omitted_entropy > 0
    lo, hi = entropy_interval(p)
    assert lo <= shannon_entropy(p) <= hi


def test_entropy_pair_examples():
    g = GaussianState(SIG)
    hx, hp = entropy_pair(g, 10.0, 10.0, -5.0, -5.0)
    assert abs(hx) < 1e-6 and abs(hp) < 1e-6
    hx, hp = entropy_pair(g, 1.0, 500.0)
    assert hp < 1e-9
    assert hx == pytest.approx(shannon_entropy(bin_probabilities(g, BinGrid(1.0), POSITION)), abs=1e-15)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        pair = entropy_pair_detail(SlitState(2.0), 2.0, math.pi, -1.0)
    assert pair.H_x == 0.0
    assert pair.H_p > 0
    assert pair.error >= 0


def test_momentum_entropy_vanishes_as_dp_grows():
    g = GaussianState(SIG)
    hps = [entropy_pair(g, 1.0, dp)[1] for dp in (2.0, 5.0, 10.0, 20.0)]
    assert all(a > b for a, b in zip(hps, hps[1:]))
    assert hps[-1] < 1e-6


@pytest.mark.parametrize("state", [GaussianState(SIG), GaussianState(1.7), SlitState(2.0)], ids=lambda s: s.spec())
def test_refinement_monotone(state):
    # ten widths, each halved on the same lattice
    for w in np.geomspace(0.05, 4.0, 10):
        coarse = shannon_entropy(bin_probabilities(state, BinGrid(w, 0.13), POSITION))
        fine = shannon_entropy(bin_probabilities(state, BinGrid(w / 2, 0.13), POSITION))
        assert fine >= coarse - 1e-12


def test_refinement_monotone_slit_momentum():
    s = SlitState(2.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for w in (8.0, 4.0):
            coarse = bin_probabilities(s, BinGrid(w, 0.0), MOMENTUM, max_bins=1 << 14)
            fine = bin_probabilities(s, BinGrid(w / 2, 0.0), MOMENTUM, max_bins=1 << 15)
            # fine grid covers the coarse window, so grouping can only lose entropy
            assert shannon_entropy(fine) >= shannon_entropy(coarse) - coarse.entropy_error


def test_offset_continuity():
    g = GaussianState(SIG)
    w = 0.8
    offs = np.linspace(0.0, w, 33)
    hs = [shannon_entropy(bin_probabilities(g, BinGrid(w, -float(o)), POSITION)) for o in offs]
    # max slope of H in the offset is at most 2 * max density * |ln m| scale; steps are small
    jumps = np.abs(np.diff(hs))
    assert jumps.max() < 0.05
    assert hs[0] == pytest.approx(hs[-1], abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.02, 5.0), st.floats(-3, 3), st.sampled_from([POSITION, MOMENTUM]))
def test_sum_rule_and_nonnegativity(sigma, width, offset, side):
    p = bin_probabilities(GaussianState(sigma), BinGrid(width, offset), side)
    assert abs(p.total - 1.0) < 1e-9
    assert np.all((p.masses >= 0) & (p.masses <= 1))
    assert shannon_entropy(p) >= 0


def test_small_bin_law():
    g = GaussianState(SIG)
    errs = []
    for d in (0.1, 0.05, 0.02):
        delta = d * SIG
        h = shannon_entropy(bin_probabilities(g, BinGrid(delta), POSITION))
        errs.append(abs(h + math.log(delta) - DIFF_ENTROPY))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 5e-3
