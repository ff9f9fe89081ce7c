import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entropic_bounds.errors import AccuracyFailure, InvalidArgument
from entropic_bounds.numerics import (
    adaptive_integrate,
    erf,
    erfc,
    gauss_legendre,
    largest_eigenpair,
    top_k_eigenvalues,
)


def simpson(f, a, b, n=10**6):
    x = np.linspace(a, b, n + 1)
    y = f(x)
    h = (b - a) / n
    return h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())


def maclaurin_erf(x, dps=40):
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        s = mpmath.mpf(0)
        for n in range(120):
            s += (-1) ** n * x ** (2 * n + 1) / (mpmath.factorial(n) * (2 * n + 1))
        return float(2 * s / mpmath.sqrt(mpmath.pi))


def test_gauss_legendre_small_rules():
    r1 = gauss_legendre(1)
    assert list(r1.nodes) == [0.0] and list(r1.weights) == [2.0]
    r2 = gauss_legendre(2)
    assert np.allclose(r2.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-15)
    assert np.allclose(r2.weights, [1.0, 1.0], atol=1e-15)


def test_gauss_legendre_x30():
    r = gauss_legendre(16)
    assert abs(np.dot(r.weights, r.nodes**30) - 2 / 31) < 1e-12


@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_gauss_legendre_exact_for_monomials(n):
    r = gauss_legendre(n)
    for m in range(2 * n):
        exact = 0.0 if m % 2 else 2.0 / (m + 1)
        assert abs(np.dot(r.weights, r.nodes**m) - exact) < 1e-12


@pytest.mark.parametrize("n", [1, 3, 7, 64, 513, 2048, 4096])
def test_gauss_legendre_invariants(n):
    r = gauss_legendre(n)
    assert len(r.nodes) == len(r.weights) == n
    assert np.all(r.weights > 0)
    assert abs(math.fsum(r.weights) - 2.0) < 1e-14
    assert np.all(np.diff(r.nodes) > 0)
    assert np.max(np.abs(r.nodes + r.nodes[::-1])) < 1e-14


def test_gauss_legendre_matches_numpy():
    x, w = np.polynomial.legendre.leggauss(100)
    r = gauss_legendre(100)
    assert np.max(np.abs(x - r.nodes)) < 1e-14
    assert np.max(np.abs(w - r.weights)) < 1e-14


@pytest.mark.parametrize("n", [0, -1, 4097, 2.5])
def test_gauss_legendre_rejects(n):
    with pytest.raises(InvalidArgument):
        gauss_legendre(n)


def test_adaptive_linear():
    est = adaptive_integrate(lambda x: x, 0.0, 1.0, 1e-10)
    assert abs(est.value - 0.5) < 1e-15
    assert est.abs_error >= 0


def test_adaptive_normal_density():
    f = lambda x: np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)
    assert abs(adaptive_integrate(f, -8.0, 8.0, 1e-12).value - 1.0) < 1e-10


def test_adaptive_against_simpson_oracle():
    f = lambda x: np.sin(x) ** 2 / x**2
    oracle = simpson(f, math.pi, 2 * math.pi)
    est = adaptive_integrate(f, math.pi, 2 * math.pi, 1e-12)
    assert abs(est.value - oracle) <= max(1e-12, est.abs_error) + 1e-14


def test_adaptive_depth_failure_carries_estimate():
    # integrable singularity: panels near 0 never agree
    with pytest.raises(AccuracyFailure) as info:
        adaptive_integrate(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0, 1e-15)
    assert info.value.best_estimate == pytest.approx(2.0, rel=1e-3)


@pytest.mark.parametrize("a,b", [(1.0, 1.0), (2.0, 1.0), (0.0, math.inf)])
def test_adaptive_rejects_bad_interval(a, b):
    with pytest.raises(InvalidArgument):
        adaptive_integrate(lambda x: x, a, b, 1e-10)


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(0.1, 3), st.floats(0.05, 0.95))
def test_adaptive_additive(a, length, frac):
    f = lambda x: np.cos(3 * x) * np.exp(-x * x)
    b = a + length
    m = a + frac * length
    whole = adaptive_integrate(f, a, b, 1e-12)
    left = adaptive_integrate(f, a, m, 1e-12)
    right = adaptive_integrate(f, m, b, 1e-12)
    slack = whole.abs_error + left.abs_error + right.abs_error + 3e-12
    assert abs(whole.value - left.value - right.value) <= slack


def test_erf_values():
    assert erf(0.0) == 0.0
    assert erf(-0.7) == -erf(0.7)
    assert abs(erf(1.0) - 0.842700792949715) < 1e-12
    assert abs(erf(1.0) - maclaurin_erf(1.0)) < 1e-14


@pytest.mark.parametrize("x", [0.01, 0.3, 0.5, 1.7, 2.5, 3.0, 3.5, 4.2])
def test_erf_against_maclaurin(x):
    assert abs(erf(x) - maclaurin_erf(x, dps=60)) < 1e-14


@settings(max_examples=100)
@given(st.floats(-30, 30))
def test_erf_properties(x):
    v = erf(x)
    assert abs(v) <= 1.0
    assert erf(-x) == -v
    assert abs(v + erfc(x) - 1.0) < 1e-14
    assert erf(x + 1e-3) >= v


def test_eigen_identity_and_2x2():
    val, vec = largest_eigenpair(np.eye(3))
    assert val == pytest.approx(1.0, abs=1e-15)
    assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-14)
    val, vec = largest_eigenpair([[2.0, 1.0], [1.0, 2.0]])
    assert val == pytest.approx(3.0, abs=1e-14)
    assert np.allclose(vec, [1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-14)


def charpoly_largest_root(A, grid=4000):
    """Largest root of det(A - tI), bracketed by a sign scan and bisected."""
    n = len(A)
    bound = np.max(np.sum(np.abs(A), axis=1)) + 1.0
    ts = np.linspace(bound, -bound, grid)
    det = lambda t: np.linalg.det(A - t * np.eye(n))
    prev = det(ts[0])
    for t0, t1 in zip(ts[:-1], ts[1:]):
        cur = det(t1)
        if np.sign(cur) != np.sign(prev):
            lo, hi = t1, t0
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if np.sign(det(mid)) == np.sign(det(hi)):
                    hi = mid
                else:
                    lo = mid
            return 0.5 * (lo + hi)
        prev = cur
    raise AssertionError("no sign change found")


def test_largest_eigenpair_random_vs_charpoly():
    rng = np.random.default_rng(12345)
    B = rng.standard_normal((8, 8))
    A = 0.5 * (B + B.T)
    val, vec = largest_eigenpair(A)
    assert abs(val - charpoly_largest_root(A)) < 1e-10
    assert np.linalg.norm(A @ vec - val * vec) <= 1e-12 * np.max(np.abs(np.linalg.eigvalsh(A)))


def test_top_k():
    assert top_k_eigenvalues(np.eye(4), 4) == pytest.approx([1, 1, 1, 1], abs=1e-15)
    assert top_k_eigenvalues(np.diag([3.0, 2.0, 1.0]), 2) == pytest.approx([3, 2], abs=1e-15)
    rng = np.random.default_rng(6)
    B = rng.standard_normal((6, 6))
    A = B + B.T
    vals = top_k_eigenvalues(A, 6)
    assert vals == sorted(vals, reverse=True)
    assert abs(sum(vals) - np.trace(A)) < 1e-12


def test_eigen_shift_invariance():
    rng = np.random.default_rng(3)
    B = rng.standard_normal((10, 10))
    A = 0.5 * (B + B.T)
    for sigma in (-2.5, 0.7, 10.0):
        assert abs(largest_eigenpair(A + sigma * np.eye(10))[0] - largest_eigenpair(A)[0] - sigma) < 1e-12


def test_eigen_rejects_asymmetric():
    with pytest.raises(InvalidArgument):
        largest_eigenpair([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(InvalidArgument):
        top_k_eigenvalues(np.eye(3), 4)
