import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hurwitzlab.config import tolerances
from hurwitzlab.errors import CapExceeded, DomainError, PatternMismatch
from hurwitzlab.hurwitz import (
    ZERO_TRACE,
    hurwitz_row,
    hurwitz_trace,
    hurwitz_trace_enumerate,
    iter_rows,
    trace_table,
    word_trace,
)
from hurwitzlab.linalg import direct_sum, matrix_power, normalize_phone, operator_norm
from hurwitzlab.sampling import sample_pair
from hurwitzlab.words import WordPattern, binomial

from conftest import random_phone, random_psd, rel_err


def direct_words_trace(A, B, m, k):
    """Independent tr S_{m,k}: coefficient extraction from tr (A + tB)^m.

    Samples t at the (m+1)-th roots of unity and inverts the discrete Fourier
    transform, so no word is ever formed.
    """
    N = m + 1
    ts = np.exp(2j * np.pi * np.arange(N) / N)
    vals = np.array([np.trace(np.linalg.matrix_power(A + t * B, m)) for t in ts])
    coeffs = np.fft.fft(vals) / N
    return coeffs[k].real


class TestClosedForms:
    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("kappa,lam", [(1, 1), (0.5, 2)])
    def test_scalar_pair(self, n, kappa, lam):
        for m in range(21):
            for k in range(m + 1):
                t = hurwitz_trace(kappa * np.eye(n), lam * np.eye(n), m, k)
                exact = n * kappa ** (m - k) * lam**k * binomial(m, k)
                assert t.sign == 1
                assert rel_err(t.value, exact) <= 1e-12
                assert t.q == pytest.approx(1.0, rel=1e-12)

    def test_identity_example(self):
        t = hurwitz_trace(np.eye(2), np.eye(2), 4, 2)
        assert t.value == pytest.approx(12, rel=1e-14)
        assert t.q == pytest.approx(1.0)

    def test_identity_row(self):
        state = hurwitz_row(np.eye(2), np.eye(2), 4, 4)
        for k in range(5):
            assert np.allclose(state.tensor(k), np.eye(2), atol=1e-15)

    def test_projector_k0(self):
        p = np.diag([1.0, 1.0, 0.0])
        for m in range(1, 10):
            assert hurwitz_trace(p, np.eye(3), m, 0).value == pytest.approx(2.0)

    def test_empty_product(self):
        t = hurwitz_trace(np.eye(3), np.eye(3), 0, 0)
        assert t.value == pytest.approx(3.0) and t.q == 1.0


class TestOracle:
    def test_seed3_m6_k3(self, seed_pair):
        a, b = seed_pair
        state = hurwitz_row(a, b, 6, 3)
        ref = 0
        from hurwitzlab.words import all_words
        for w in all_words(6, 3):
            p = np.eye(2, dtype=complex)
            for ch in w:
                p = p @ (a if ch == "a" else b)
            ref = ref + p
        assert np.max(np.abs(state.hurwitz(3) - ref)) <= 1e-10
        assert rel_err(hurwitz_trace(a, b, 6, 3).value, np.trace(ref).real) <= 1e-10

    def test_enumerate_small(self, seed_pair):
        a, b = seed_pair
        assert hurwitz_trace_enumerate(a, b, 2, 1) == pytest.approx(2 * np.trace(a @ b).real)
        assert hurwitz_trace_enumerate(a, b, 5, 5) == pytest.approx(
            np.trace(matrix_power(b, 5)).real)
        assert hurwitz_trace_enumerate(a, b, 3, 4) == 0.0

    def test_m8_k4(self, seed_pair):
        a, b = seed_pair
        assert rel_err(hurwitz_trace(a, b, 8, 4).value, hurwitz_trace_enumerate(a, b, 8, 4)) <= 1e-10

    def test_cap(self):
        with pytest.raises(CapExceeded):
            hurwitz_trace_enumerate(np.eye(2), np.eye(2), 30, 15)
        with tolerances(enumeration_cap=5):
            with pytest.raises(CapExceeded):
                hurwitz_trace_enumerate(np.eye(2), np.eye(2), 4, 2)

    @settings(max_examples=30, deadline=None)
    @given(n=st.integers(1, 4), seed=st.integers(0, 10**6), m=st.integers(0, 9))
    def test_recurrence_vs_fourier(self, n, seed, m):
        a, b = random_psd(n, seed), random_psd(n, seed + 1)
        for k in range(m + 1):
            t = hurwitz_trace(a, b, m, k)
            ref = direct_words_trace(a, b, m, k)
            scale = np.trace(matrix_power(a + b, m)).real
            assert abs(t.value - ref) <= 1e-10 * scale

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 10**6), m=st.integers(1, 8))
    def test_recurrence_vs_enumeration(self, seed, m):
        a, b = sample_pair(3, seed)
        for k in range(m + 1):
            assert rel_err(hurwitz_trace(a, b, m, k).value,
                           hurwitz_trace_enumerate(a.matrix, b.matrix, m, k)) <= 1e-10


class TestInvariants:
    def test_polynomial_consistency(self, phone_pair):
        a, b = phone_pair
        rng = np.random.default_rng(int(1e6 * a[0, 0].real) % 2**32)
        for m in (1, 5, 17, 30):
            t0 = rng.uniform(0, 1)
            lhs = np.trace(matrix_power(a + t0 * b, m)).real
            row = hurwitz_row(a, b, m, m)
            rhs = sum(t0**k * row.hurwitz(k).trace().real for k in range(m + 1))
            assert rel_err(lhs, rhs) <= 1e-9

    def test_left_right_recurrence(self, phone_pair):
        a, b = phone_pair
        for m in (2, 6, 11):
            state = hurwitz_row(a, b, m, m, retain_previous=True)
            prev = state.previous
            assert prev.m == m - 1 and prev.previous is None
            for k in range(m + 1):
                s_k, s_k1 = prev.hurwitz(k), prev.hurwitz(k - 1) if k else 0 * a
                left = a @ s_k + b @ s_k1
                right = s_k @ a + s_k1 @ b
                assert np.max(np.abs(left - right)) <= 1e-10 * binomial(m, k)
                assert np.max(np.abs(state.hurwitz(k) - left)) <= 1e-10 * binomial(m, k)

    def test_trace_identities(self, phone_pair):
        a, b = phone_pair
        for m in (3, 9, 15):
            state = hurwitz_row(a, b, m, m, retain_previous=True)
            prev = state.previous
            for k in range(m + 1):
                tr = state.hurwitz(k).trace().real
                ta = m * np.trace(a @ prev.hurwitz(k)).real
                tb = m * np.trace(b @ prev.hurwitz(k - 1)).real if k else 0.0
                assert rel_err((m - k) * tr, ta) <= 1e-9
                assert rel_err(k * tr, tb) <= 1e-9

    @pytest.mark.parametrize("seed", range(4))
    def test_splitting(self, seed):
        a1, b1 = random_phone(2, seed).matrix, random_phone(2, seed + 10).matrix
        a2, b2 = random_phone(3, seed + 20).matrix, random_phone(3, seed + 30).matrix
        alpha, beta = 0.8, 0.6
        A, B = direct_sum(a1, alpha * a2), direct_sum(b1, beta * b2)
        for m in (4, 10, 20):
            for k in range(1, m):
                lhs = hurwitz_trace(A, B, m, k).value
                rhs = hurwitz_trace(a1, b1, m, k).value + alpha ** (m - k) * beta**k * \
                    hurwitz_trace(a2, b2, m, k).value
                assert rel_err(lhs, rhs) <= 1e-9

    def test_reality_and_hermitian(self, phone_pair):
        a, b = phone_pair
        for state in iter_rows(a, b, 6, 40):
            for k in range(min(state.m, 6) + 1):
                t = state.tensor(k)
                tr = np.trace(t)
                assert abs(tr.imag) < 1e-10 * (1 + abs(tr.real))
                assert np.max(np.abs(t - t.conj().T)) <= 1e-9
            assert np.allclose(state.tensor(0), matrix_power(a, state.m), atol=1e-12)

    def test_symmetry(self, phone_pair):
        a, b = phone_pair
        for m in (5, 12, 25):
            for k in range(m + 1):
                x, y = hurwitz_trace(a, b, m, k), hurwitz_trace(b, a, m, m - k)
                assert rel_err(x.value, y.value) <= 1e-10


class TestEdgeCases:
    def test_out_of_range(self):
        assert hurwitz_trace(np.eye(2), np.eye(2), 3, 4) == ZERO_TRACE
        assert hurwitz_trace(np.eye(2), np.eye(2), 3, -1) == ZERO_TRACE

    def test_zero_b(self):
        z = np.zeros((2, 2))
        assert hurwitz_trace(np.eye(2), z, 5, 2) == ZERO_TRACE
        assert hurwitz_trace(np.eye(2), z, 5, 0).value == pytest.approx(2.0)
        assert hurwitz_trace(z, np.eye(2), 5, 5).value == pytest.approx(2.0)
        assert hurwitz_trace(z, np.eye(2), 5, 4) == ZERO_TRACE

    def test_row_errors(self):
        with pytest.raises(DomainError):
            hurwitz_row(np.eye(2), np.eye(2), 3, 4)
        with pytest.raises(DomainError):
            hurwitz_row(np.eye(2), np.eye(2), -1, 0)
        with pytest.raises(DomainError):
            hurwitz_row(np.eye(2), np.eye(3), 3, 1)

    def test_tensors_read_only(self):
        state = hurwitz_row(np.eye(2), np.eye(2), 3, 2)
        with pytest.raises(ValueError):
            state.tensors[0, 0, 0] = 5

    def test_large_identity(self):
        t = hurwitz_trace(np.eye(2), np.eye(2), 2000, 1000)
        assert t.q == pytest.approx(1.0, rel=1e-10)
        log_c = (math.lgamma(2001) - 2 * math.lgamma(1001)) / math.log(10)
        assert t.log10_abs == pytest.approx(math.log10(2) + log_c, rel=1e-12)

    def test_deep_underflow_log_scale(self):
        eps = 1e-3
        a, b = np.diag([1, eps]), np.diag([eps, 1])
        m, k = 400, 200
        t = hurwitz_trace(a, b, m, k)
        # exact value 2 C(m, k) eps^k; entries of one tensor span more than
        # the float range here, so some paths pass through subnormals
        assert t.sign == 1
        assert t.log10_abs == pytest.approx(math.log10(2 * math.comb(m, k)) + k * math.log10(eps),
                                            abs=1e-8 / math.log(10))
        assert t.q == 0.0  # below the float range, only the log survives

    def test_scaled_inputs(self, seed_pair):
        a, b = seed_pair
        t1, t2 = hurwitz_trace(a, b, 9, 4), hurwitz_trace(3 * a, 0.25 * b, 9, 4)
        assert t2.log10_abs == pytest.approx(t1.log10_abs + 5 * math.log10(3) + 4 * math.log10(0.25))
        assert t2.q == pytest.approx(t1.q, rel=1e-12)


class TestWordTrace:
    def test_powers(self, seed_pair):
        a, b = seed_pair
        assert word_trace("a" * 5, a, b) == pytest.approx(np.trace(matrix_power(a, 5)).real)
        assert word_trace("ab" * 3, np.eye(3), np.eye(3)) == pytest.approx(3.0)

    def test_direct(self, seed_pair):
        a, b = seed_pair
        w = WordPattern.from_word("aabab")
        assert word_trace(w, a, b, m=5, k=2) == pytest.approx(np.trace(a @ a @ b @ a @ b).real)

    def test_mismatch(self, seed_pair):
        with pytest.raises(PatternMismatch):
            word_trace("aabab", *seed_pair, m=6, k=2)

    def test_chiral_word_allows_complex(self):
        a, b = sample_pair(3, 8)
        w = "aababb"
        t = np.trace(a.matrix @ a.matrix @ b.matrix @ a.matrix @ b.matrix @ b.matrix)
        assert abs(t.imag) > 1e-6
        assert word_trace(w, a.matrix, b.matrix) == pytest.approx(t.real)


class TestTraceTable:
    def test_identity(self):
        table = trace_table(np.eye(2), np.eye(2), 5)
        assert all(c.q == pytest.approx(1.0) for _, c in table.rows())
        assert len(table.cells) == 21

    def test_product_zero_pair(self):
        table = trace_table(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), 12)
        for (m, k), c in table.rows():
            if 0 < k < m:
                assert c.sign == 0 and c.q == 0.0

    def test_against_enumeration(self, seed_pair):
        a, b = seed_pair
        table = trace_table(a, b, 12)
        for (m, k), c in table.rows():
            assert rel_err(c.value, hurwitz_trace_enumerate(a, b, m, k)) <= 1e-10

    def test_q_consistency(self, seed_pair):
        a, b = 2.5 * seed_pair[0], 0.3 * seed_pair[1]
        table = trace_table(a, b, 15, 6)
        na, nb = operator_norm(a), operator_norm(b)
        assert table.norm_a == pytest.approx(na) and table.norm_b == pytest.approx(nb)
        for (m, k), c in table.rows():
            assert k <= 6
            q = c.value / (2 * binomial(m, k) * na ** (m - k) * nb**k)
            assert rel_err(q, c.q) <= 1e-8
            assert c == hurwitz_trace(a, b, m, k) or rel_err(c.value, hurwitz_trace(a, b, m, k).value) < 1e-14

    def test_errors(self):
        with pytest.raises(DomainError):
            trace_table(np.eye(2), np.eye(2), 0)
