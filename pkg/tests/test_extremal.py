import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hurwitzlab.errors import DomainError
from hurwitzlab.extremal import (
    PATIENCE,
    SearchConfig,
    el_residuals,
    euler_series_coeff,
    extremal_search,
    objective,
    telescope_check,
    unit_p,
)
from hurwitzlab.linalg import psd_power, schatten_norm

from conftest import random_psd, unitary

CASES = [(3, 1), (5, 2), (4, 2)]


def words_sum(a, b, m, k):
    """``S_{m,k}`` by summing every word with ``k`` copies of ``b``."""
    n = a.shape[0]
    total = np.zeros((n, n), dtype=np.complex128)
    for pos in itertools.combinations(range(m), k):
        w = np.eye(n, dtype=np.complex128)
        for i in range(m):
            w = w @ (b if i in pos else a)
        total += w
    return total


def residuals_by_words(a, b, m, k, p):
    ap, bp = psd_power(a, p), psd_power(b, p)
    s = words_sum(a, b, m, k)
    sa = words_sum(a, b, m - 1, k) @ a
    sb = words_sum(a, b, m - 1, k - 1) @ b
    f = np.linalg.norm
    return (
        f(sa - a @ words_sum(a, b, m - 1, k)),
        f(sa * np.trace(ap).real - ap * np.trace(sa)),
        f(sb * np.trace(bp).real - bp * np.trace(sb)),
        f(s - ((m - k) * ap + k * bp) / m * np.trace(s)),
    )


def unit_pair(n, seed, p):
    return unit_p(random_psd(n, seed), p), unit_p(random_psd(n, seed + 1), p)


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("mk", CASES)
def test_symmetry_point(p, n, mk):
    x = np.eye(n) * n ** (-1 / p)
    r = el_residuals(x, x, *mk, p)
    assert max(r.as_dict().values()) < 1e-10


@pytest.mark.parametrize("seed", range(5))
def test_diagonal_commutator(seed):
    rng = np.random.default_rng(seed)
    a = unit_p(np.diag(rng.uniform(0.1, 1, 3)), 2)
    b = unit_p(np.diag(rng.uniform(0.1, 1, 3)), 2)
    assert el_residuals(a, b, 5, 2, 2).commutator < 1e-12


@pytest.mark.parametrize("p", [1.5, 2.0])
@pytest.mark.parametrize("mk", CASES)
@pytest.mark.parametrize("seed", [3, 11])
def test_random_pair_matches_word_sums(p, mk, seed):
    a, b = unit_pair(3, seed, p)
    r = el_residuals(a, b, *mk, p)
    expected = residuals_by_words(a, b, *mk, p)
    got = (r.commutator, r.pnormA, r.pnormB, r.combined)
    assert np.allclose(got, expected, rtol=1e-9, atol=1e-13)
    # a generic pair is not extremal
    assert r.combined > 1e-3


@pytest.mark.parametrize("seed", range(3))
def test_objective_matches_word_sums(seed):
    a, b = unit_pair(3, seed, 2)
    assert objective(a, b, 5, 2) == pytest.approx(np.trace(words_sum(a, b, 5, 2)).real, rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6), p=st.sampled_from([1.0, 2.0, 4.0]))
def test_unitary_covariance(seed, p):
    a, b = unit_pair(3, seed, p)
    u = unitary(3, seed + 5)
    r0 = el_residuals(a, b, 5, 2, p)
    r1 = el_residuals(u @ a @ u.conj().T, u @ b @ u.conj().T, 5, 2, p)
    for x, y in zip(r0.as_dict().values(), r1.as_dict().values()):
        assert abs(x - y) <= 1e-9 * (1 + abs(x))


def test_rejections():
    a, b = unit_pair(2, 0, 2)
    with pytest.raises(DomainError):
        el_residuals(2 * a, b, 4, 2, 2)
    with pytest.raises(DomainError):
        el_residuals(a, b * (1 + 1e-8), 4, 2, 2)
    with pytest.raises(DomainError):
        el_residuals(a, b, 4, 2, 0.5)
    with pytest.raises(DomainError):
        el_residuals(a, b, 4, 2, math.inf)
    for k in (0, 4):
        with pytest.raises(DomainError):
            el_residuals(a, b, 4, k, 2)


def test_accepts_within_unit_tolerance():
    a, b = unit_pair(2, 0, 2)
    el_residuals(a * (1 + 1e-11), b, 4, 2, 2)


def test_config_validation():
    with pytest.raises(DomainError):
        SearchConfig(p=math.inf)
    with pytest.raises(DomainError):
        SearchConfig(mode="sideways")
    with pytest.raises(DomainError):
        SearchConfig(shrink=1.0)
    with pytest.raises(DomainError):
        SearchConfig(steps=0)
    with pytest.raises(DomainError):
        extremal_search(2, 3, 3, SearchConfig())


def test_search_deterministic():
    cfg = SearchConfig(steps=200, seed=4)
    r1, r2 = extremal_search(2, 4, 2, cfg), extremal_search(2, 4, 2, cfg)
    assert r1.objective == r2.objective
    assert np.array_equal(r1.A, r2.A) and r1.trajectory == r2.trajectory
    assert extremal_search(2, 4, 2, SearchConfig(steps=200, seed=5)).objective != r1.objective


@pytest.mark.parametrize("mode", ["maximize", "minimize"])
def test_search_monotone_and_unit(mode):
    cfg = SearchConfig(steps=300, seed=1, mode=mode, p=3.0)
    r = extremal_search(3, 5, 2, cfg)
    values = [v for _, v, _ in r.trajectory]
    diffs = np.diff(values)
    assert np.all(diffs > 0) if mode == "maximize" else np.all(diffs < 0)
    assert r.steps_accepted == len(r.trajectory) - 1
    assert schatten_norm(r.A, 3.0) == pytest.approx(1, abs=1e-12)
    assert schatten_norm(r.B, 3.0) == pytest.approx(1, abs=1e-12)
    assert r.objective == pytest.approx(objective(r.A, r.B, 5, 2), rel=1e-12)


def test_step_shrinks():
    cfg = SearchConfig(steps=10 * PATIENCE, seed=2, step_size=5.0)
    r = extremal_search(2, 4, 2, cfg)
    assert r.final_step_size < 5.0


@pytest.mark.parametrize("seed", range(3))
def test_search_reduces_residual(seed):
    r = extremal_search(2, 4, 2, SearchConfig(steps=3000, seed=seed))
    assert r.residuals.combined < r.start_residuals.combined


def test_n1():
    r = extremal_search(1, 5, 2, SearchConfig(steps=50))
    assert r.objective == pytest.approx(10.0)
    assert r.residuals.combined < 1e-12


def test_product_zero_start_minimize():
    a, b = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    r = extremal_search(2, 4, 2, SearchConfig(steps=200, mode="minimize"), start=(a, b))
    assert r.objective == 0.0
    assert r.trajectory[0][1] == 0.0


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 10**6), k=st.integers(1, 6), n=st.integers(1, 4))
def test_telescope(seed, k, n):
    rng = np.random.default_rng(seed)
    xs = [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for _ in range(k)]
    x = rng.standard_normal((n, n))
    scale = max(1.0, max(np.abs(m).max() for m in xs + [x])) ** k
    assert telescope_check(xs, x) <= 1e-12 * scale * n * k


def test_telescope_empty():
    with pytest.raises(DomainError):
        telescope_check([], np.eye(2))


@pytest.mark.parametrize("k", [0, 1, 2, 5])
def test_euler_coefficients_fft(k):
    # Cauchy integral on |tau| = 1/2 as an independent route to the coefficients
    N, r = 64, 0.5
    tau = r * np.exp(2j * np.pi * np.arange(N) / N)
    coeffs = np.fft.fft(1 / (1 - tau) ** (k + 1)) / N / r ** np.arange(N)
    for m in range(20):
        assert coeffs[m].real == pytest.approx(int(euler_series_coeff(k, m)), rel=1e-9)


def test_euler_exact():
    assert int(euler_series_coeff(3, 4)) == 35
    with pytest.raises(DomainError):
        euler_series_coeff(-1, 2)
