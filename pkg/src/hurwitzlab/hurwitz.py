"""Hurwitz products and their traces.

The engine never stores ``S_{m,k}`` itself.  It propagates the normalized
tensors ``T_{m,k} = S_{m,k} / C(m, k)`` through

    T_{m,k} = ((m-k)/m) A T_{m-1,k} + (k/m) B T_{m-1,k-1},    T_{0,0} = I,

which stays bounded for phone inputs and gives ``q_{m,k} = tr T_{m,k} / n``
directly.  Raw traces are reported as ``(sign, log10 |tr S_{m,k}|)``.

Every tensor carries its own power-of-two exponent, so cells far below the
float range stay representable.  Entries of one tensor share that exponent:
entries more than about ``1e-308`` below the largest entry of their tensor
lose precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

from hurwitzlab.config import get_tolerances
from hurwitzlab.errors import CapExceeded, DomainError, NumericalError
from hurwitzlab.linalg import normalize_phone, operator_norm
from hurwitzlab.words import WordPattern, all_words, binomial

_LOG10_2 = math.log10(2.0)
# Each tensor T_{m,k} carries its own power-of-two exponent; a tensor is
# rescaled once its magnitude leaves [2**-RESCALE_BITS, 2**RESCALE_BITS].
# Rescaling by powers of two introduces no rounding.
RESCALE_BITS = 500
# Exponent shifts beyond this flush a term to zero; such a term is smaller
# than its partner by a factor below 2**-(MAX_SHIFT - 2 RESCALE_BITS).
MAX_SHIFT = 2200


def _ldexp(x: np.ndarray, e) -> np.ndarray:
    return np.ldexp(x.real, e) + 1j * np.ldexp(x.imag, e)


@dataclass(frozen=True, eq=False)
class NormalizedHurwitzState:
    """Row ``m`` of normalized Hurwitz tensors.

    ``tensors[k] * 2**exp2[k]`` equals ``T_{m,k}`` for ``k <= max_k``;
    entries with ``k > m`` are zero.  ``previous`` holds row ``m - 1`` when
    the row was built with ``retain_previous=True``.
    """

    m: int
    max_k: int
    tensors: np.ndarray
    exp2: np.ndarray
    previous: "NormalizedHurwitzState | None" = field(default=None, repr=False)

    def tensor(self, k: int) -> np.ndarray:
        """``T_{m,k}`` as an ordinary matrix (zero outside ``0 <= k <= m``)."""
        n = self.tensors.shape[1]
        if k < 0 or k > self.m:
            return np.zeros((n, n), dtype=np.complex128)
        return _ldexp(self.tensors[k], int(self.exp2[k]))

    def hurwitz(self, k: int) -> np.ndarray:
        """The unnormalized product ``S_{m,k} = C(m, k) T_{m,k}``."""
        return float(binomial(self.m, k)) * self.tensor(k)

    def trace(self, k: int) -> complex:
        """``tr T_{m,k}``; underflows to zero only for astronomically small cells."""
        if not 0 <= k <= self.m:
            return 0j
        t = complex(np.trace(self.tensors[k]))
        e = int(self.exp2[k])
        return complex(math.ldexp(t.real, e), math.ldexp(t.imag, e))

    def log10_abs_trace(self, k: int) -> float:
        """``log10 |tr T_{m,k}|`` without underflow."""
        t = float(np.trace(self.tensors[k]).real) if 0 <= k <= self.m else 0.0
        if t == 0.0:
            return -math.inf
        return math.log10(abs(t)) + int(self.exp2[k]) * _LOG10_2

    def sign(self, k: int) -> int:
        t = float(np.trace(self.tensors[k]).real) if 0 <= k <= self.m else 0.0
        return int(np.sign(t))


def _as_square(M) -> np.ndarray:
    a = np.asarray(M, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    return a


def _aligned(t: np.ndarray, e: np.ndarray):
    """Shift rows ``k`` and ``k-1`` to the common exponent ``max(e_k, e_{k-1})``.

    Zero tensors do not take part in choosing the common exponent.
    """
    if not e.any():
        return t, t[:-1], e
    live = np.any(t != 0, axis=(1, 2))
    floor = np.iinfo(np.int64).min // 4
    ev = np.where(live, e, floor)
    f = ev.copy()
    f[1:] = np.maximum(ev[1:], ev[:-1])
    f = np.where(f == floor, 0, f)
    shift_a = np.clip(np.where(live, e - f, 0), -MAX_SHIFT, 0)
    shift_b = np.clip(np.where(live[:-1], e[:-1] - f[1:], 0), -MAX_SHIFT, 0)
    ta = t if not shift_a.any() else _ldexp(t, shift_a[:, None, None])
    tb = t[:-1] if not shift_b.any() else _ldexp(t[:-1], shift_b[:, None, None])
    return ta, tb, f


def iter_rows(A, B, max_k: int, m_stop: int, retain_previous: bool = False
              ) -> Iterator[NormalizedHurwitzState]:
    """Yield normalized rows ``m = 0, 1, ..., m_stop`` for ``k <= max_k``."""
    a, b = _as_square(A), _as_square(B)
    if a.shape != b.shape:
        raise DomainError("A and B must have the same shape")
    if max_k < 0 or m_stop < 0:
        raise DomainError("indices must be non-negative")
    n = a.shape[0]
    ks = np.arange(max_k + 1)
    t = np.zeros((max_k + 1, n, n), dtype=np.complex128)
    t[0] = np.eye(n)
    exp2 = np.zeros(max_k + 1, dtype=np.int64)
    state = NormalizedHurwitzState(0, max_k, t, exp2)
    yield state
    lo, hi = 2.0**-RESCALE_BITS, 2.0**RESCALE_BITS
    for m in range(1, m_stop + 1):
        ca = np.clip((m - ks) / m, 0.0, None)[:, None, None]
        cb = (ks[1:] / m)[:, None, None]
        ta, tb, exp2 = _aligned(t, exp2)
        new = ca * (a @ ta)
        new[1:] += cb * (b @ tb)
        tops = np.max(np.abs(new), axis=(1, 2))
        out = (tops > 0.0) & ((tops < lo) | (tops > hi))
        if out.any():
            e = np.where(out, np.frexp(np.where(out, tops, 1.0))[1], 0)
            new = _ldexp(new, -e[:, None, None])
            exp2 = exp2 + e
        t = new
        t.setflags(write=False)
        exp2.setflags(write=False)
        state = NormalizedHurwitzState(
            m, max_k, t, exp2, previous=state if retain_previous else None
        )
        if retain_previous:
            object.__setattr__(state.previous, "previous", None)
        yield state


def hurwitz_row(A, B, m: int, max_k: int, retain_previous: bool = False
                ) -> NormalizedHurwitzState:
    """Row ``m`` of the normalized recurrence, for ``0 <= k <= max_k <= m``.

    Intended for phone inputs; any square matrices work, but the normalized
    tensors stay bounded only when ``||A||, ||B|| <= 1``.
    """
    if m < 0 or max_k < 0 or max_k > m:
        raise DomainError(f"need 0 <= max_k <= m, got m={m}, max_k={max_k}")
    state = None
    for state in iter_rows(A, B, max_k, m, retain_previous):
        pass
    return state


class HurwitzTrace(NamedTuple):
    """``tr S_{m,k}`` as sign and log10 magnitude, with ``q_{m,k}``."""

    sign: int
    log10_abs: float
    q: float

    @property
    def value(self) -> float:
        """The trace as a float (may overflow to inf for huge cells)."""
        if self.sign == 0:
            return 0.0
        return self.sign * 10.0**self.log10_abs


ZERO_TRACE = HurwitzTrace(0, -math.inf, 0.0)


def log10_binomial(m: int, k: int) -> float:
    return math.log10(binomial(m, k))


def _phone_or_none(H):
    h = np.asarray(H, dtype=np.complex128)
    if operator_norm(h) < get_tolerances().zero_norm:
        return None
    return normalize_phone(h)


def _cell(state: NormalizedHurwitzState, k: int, n: int, log_a: float, log_b: float
          ) -> HurwitzTrace:
    m = state.m
    sign = state.sign(k)
    if sign == 0:
        return HurwitzTrace(0, -math.inf, 0.0)
    lt = state.log10_abs_trace(k)
    log10_abs = lt + log10_binomial(m, k) + (m - k) * log_a + k * log_b
    q = state.trace(k).real / n
    return HurwitzTrace(sign, log10_abs, q)


def _prepare(A, B, m: int, k: int):
    a_ph, b_ph = _phone_or_none(A), _phone_or_none(B)
    n = np.asarray(A).shape[0]
    if (k > 0 and b_ph is None) or (k < m and a_ph is None):
        return None
    zero = np.zeros((n, n), dtype=np.complex128)
    a = a_ph.matrix if a_ph is not None else zero
    b = b_ph.matrix if b_ph is not None else zero
    log_a = math.log10(a_ph.scale) if a_ph is not None else 0.0
    log_b = math.log10(b_ph.scale) if b_ph is not None else 0.0
    return a, b, n, log_a, log_b


def hurwitz_trace(A, B, m: int, k: int) -> HurwitzTrace:
    """``tr S_{m,k}(A, B)`` for positive Hermitian ``A``, ``B``.

    Both inputs are normalized to phone form, the normalized row is computed and
    the scale factors ``||A||^(m-k) ||B||^k`` are restored in log space.
    Out-of-range indices give the exact zero trace.  ``q`` is
    ``tr S_{m,k} / (n C(m,k) ||A||^(m-k) ||B||^k)``; it is 0 whenever the trace
    vanishes identically because a needed matrix is zero.
    """
    if m < 0 or k < 0 or k > m:
        return ZERO_TRACE
    prep = _prepare(A, B, m, k)
    if prep is None:
        return ZERO_TRACE
    a, b, n, log_a, log_b = prep
    state = hurwitz_row(a, b, m, k)
    return _cell(state, k, n, log_a, log_b)


def hurwitz_trace_enumerate(A, B, m: int, k: int, cap: int | None = None) -> float:
    """Reference trace: sum of ``tr`` over all ``C(m, k)`` words, multiplied left to right."""
    if cap is None:
        cap = get_tolerances().enumeration_cap
    if m < 0 or k < 0 or k > m:
        return 0.0
    count = binomial(m, k)
    if count > cap:
        raise CapExceeded(f"C({m},{k}) = {count} words exceeds the cap {cap}")
    a, b = _as_square(A), _as_square(B)
    letters = {"a": a, "b": b}
    n = a.shape[0]
    total = 0j
    for word in all_words(m, k):
        p = np.eye(n, dtype=np.complex128)
        for ch in word:
            p = p @ letters[ch]
        total += np.trace(p)
    return float(total.real)


def _reversal_symmetric(word: str) -> bool:
    # tr of a word is real when the word is a rotation of its reversal
    rev = word[::-1]
    return len(word) == 0 or rev in word + word


def word_trace(w: WordPattern | str, A, B, m: int | None = None, k: int | None = None
               ) -> float:
    """Trace of the single matrix word obtained by ``a -> A``, ``b -> B``.

    The real part is returned.  For words that are rotations of their own
    reversal the trace is real in exact arithmetic, and an imaginary part above
    ``1e-10`` times the magnitude raises :class:`NumericalError`.  Other words
    can have genuinely complex traces.
    """
    if isinstance(w, str):
        w = WordPattern.from_word(w)
    if m is not None or k is not None:
        w.check(w.m if m is None else m, w.k if k is None else k)
    a, b = _as_square(A), _as_square(B)
    word = w.letters()
    p = np.eye(a.shape[0], dtype=np.complex128)
    for ch in word:
        p = p @ (a if ch == "a" else b)
    t = complex(np.trace(p))
    if _reversal_symmetric(word) and abs(t.imag) > 1e-10 * max(abs(t), 1.0):
        raise NumericalError(f"trace of {word!r} has imaginary part {t.imag:.3e}")
    return t.real


@dataclass
class TraceTable:
    """Cells ``(m, k) -> HurwitzTrace`` for ``0 <= k <= min(m, max_k)``."""

    max_m: int
    max_k: int
    n: int
    norm_a: float
    norm_b: float
    cells: dict[tuple[int, int], HurwitzTrace]

    def rows(self):
        for key in sorted(self.cells):
            yield key, self.cells[key]


def trace_table(A, B, max_m: int, max_k: int | None = None) -> TraceTable:
    """All traces up to ``max_m`` from a single pass of the recurrence.

    ``max_k`` restricts the sweep to the band ``k <= max_k``.
    """
    if max_m < 1:
        raise DomainError("max_m must be at least 1")
    band = max_m if max_k is None else min(max_k, max_m)
    a_ph, b_ph = _phone_or_none(A), _phone_or_none(B)
    n = np.asarray(A).shape[0]
    zero = np.zeros((n, n), dtype=np.complex128)
    a = a_ph.matrix if a_ph is not None else zero
    b = b_ph.matrix if b_ph is not None else zero
    log_a = math.log10(a_ph.scale) if a_ph is not None else 0.0
    log_b = math.log10(b_ph.scale) if b_ph is not None else 0.0
    cells = {}
    for state in iter_rows(a, b, band, max_m):
        m = state.m
        for k in range(min(m, band) + 1):
            if (k > 0 and b_ph is None) or (k < m and a_ph is None):
                cells[m, k] = ZERO_TRACE
            else:
                cells[m, k] = _cell(state, k, n, log_a, log_b)
    return TraceTable(
        max_m,
        band,
        n,
        a_ph.scale if a_ph is not None else 0.0,
        b_ph.scale if b_ph is not None else 0.0,
        cells,
    )
