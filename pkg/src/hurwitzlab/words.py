"""Exact counting of two-letter words.

Words use the letters ``a`` and ``b``; ``W(m, k)`` is the set of words with
``m - k`` letters ``a`` and ``k`` letters ``b``.  ``C(m, k, s)`` is the subset
with exactly ``s`` occurrences of the subword ``ab`` and ``D(m, k, L)`` the
words ``a^i1 b a^i2 ... a^ik b a^i(k+1)`` whose interior a-runs exceed ``L``
and whose trailing run is at least ``L``.

Counts are Python integers, so they never overflow.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple

from hurwitzlab.config import get_tolerances
from hurwitzlab.errors import CapExceeded, DomainError, PatternMismatch

BigCount = int


def binomial(n: int, k: int) -> BigCount:
    """Exact binomial coefficient, zero whenever ``k > n`` or an index is negative."""
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def log10_count(c: BigCount) -> float:
    return math.log10(c) if c > 0 else -math.inf


def count_C(m: int, k: int, s: int) -> BigCount:
    """Number of words in ``W(m, k)`` with exactly ``s`` subwords ``ab``."""
    if k > m:
        return 0
    return binomial(m - k, s) * binomial(k, s)


def count_D(m: int, k: int, L: int) -> BigCount:
    """Size of ``D(m, k, L)``, equal to ``|C(m - (k+1)L, k, k)|``."""
    if L < 0:
        raise DomainError("L must be non-negative")
    return count_C(m - (k + 1) * L, k, k)


@dataclass(frozen=True)
class WordPattern:
    """Run-length form ``b^j0 a^i1 b^j1 ... a^is b^js a^i(s+1)``.

    ``blocks`` holds the interior pairs ``(i, j)`` (both at least 1); the
    leading b-run and trailing a-run may be empty.  This form is canonical:
    every word has exactly one, and ``len(blocks)`` is its ``ab`` count.
    """

    lead_b: int
    blocks: tuple[tuple[int, int], ...]
    tail_a: int

    def __post_init__(self):
        if self.lead_b < 0 or self.tail_a < 0:
            raise PatternMismatch("outer runs must be non-negative")
        if any(i < 1 or j < 1 for i, j in self.blocks):
            raise PatternMismatch("interior runs must be positive")

    @classmethod
    def from_word(cls, word: str) -> "WordPattern":
        if set(word) - {"a", "b"}:
            raise PatternMismatch(f"not a word in a, b: {word!r}")
        runs = [(ch, len(list(g))) for ch, g in itertools.groupby(word)]
        lead_b = 0
        if runs and runs[0][0] == "b":
            lead_b = runs.pop(0)[1]
        tail_a = 0
        if runs and runs[-1][0] == "a":
            tail_a = runs.pop()[1]
        blocks = tuple((runs[t][1], runs[t + 1][1]) for t in range(0, len(runs), 2))
        return cls(lead_b, blocks, tail_a)

    @property
    def runs(self) -> tuple[int, ...]:
        flat = [self.lead_b]
        for i, j in self.blocks:
            flat += [i, j]
        flat.append(self.tail_a)
        return tuple(flat)

    @property
    def k(self) -> int:
        return self.lead_b + sum(j for _, j in self.blocks)

    @property
    def m(self) -> int:
        return self.k + self.tail_a + sum(i for i, _ in self.blocks)

    @property
    def s(self) -> int:
        return len(self.blocks)

    def letters(self) -> str:
        parts = ["b" * self.lead_b]
        parts += ["a" * i + "b" * j for i, j in self.blocks]
        parts.append("a" * self.tail_a)
        return "".join(parts)

    def check(self, m: int, k: int) -> None:
        if (self.m, self.k) != (m, k):
            raise PatternMismatch(
                f"pattern has (m, k) = ({self.m}, {self.k}), expected ({m}, {k})"
            )

    def shifted(self, L: int) -> "WordPattern":
        """Add ``L`` letters ``a`` to every a-run (interior and trailing)."""
        return WordPattern(
            self.lead_b, tuple((i + L, j) for i, j in self.blocks), self.tail_a + L
        )


def count_ab(w) -> int:
    """Number of occurrences of the subword ``ab``."""
    if isinstance(w, str):
        w = WordPattern.from_word(w)
    return w.s


def _cuts(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    # increasing s-subsets of {1, ..., total}
    return itertools.combinations(range(1, total + 1), parts)


def enumerate_class(m: int, k: int, s: int, cap: int | None = None) -> Iterator[WordPattern]:
    """Yield every word of ``C(m, k, s)`` exactly once."""
    if cap is None:
        cap = get_tolerances().enumeration_cap
    if not 0 <= k <= m or s < 0:
        raise DomainError("need 0 <= k <= m and s >= 0")
    total = count_C(m, k, s)
    if total > cap:
        raise CapExceeded(f"|C({m},{k},{s})| = {total} exceeds the cap {cap}")
    return _enumerate_class(m, k, s)


def _enumerate_class(m: int, k: int, s: int) -> Iterator[WordPattern]:
    if s == 0:
        yield WordPattern(k, (), m - k)
        return
    na = m - k
    for bj in _cuts(k, s):
        j = [bj[0] - 1] + [bj[t + 1] - bj[t] for t in range(s - 1)] + [k + 1 - bj[-1]]
        for ai in _cuts(na, s):
            i = [ai[0]] + [ai[t] - ai[t - 1] for t in range(1, s)] + [na - ai[-1]]
            yield WordPattern(j[0], tuple(zip(i[:s], j[1:])), i[s])


def all_words(m: int, k: int) -> Iterator[str]:
    """Every word of ``W(m, k)``, positions of ``b`` in lexicographic order."""
    for pos in itertools.combinations(range(m), k):
        w = ["a"] * m
        for p in pos:
            w[p] = "b"
        yield "".join(w)


def in_D(w: WordPattern, L: int) -> bool:
    """Membership in ``D(m, k, L)`` for the pattern's own ``(m, k)``."""
    if w.lead_b != 0 or w.s != w.k or any(j != 1 for _, j in w.blocks):
        return False
    return all(i > L for i, _ in w.blocks) and w.tail_a >= L


def as_fraction(eps) -> Fraction:
    if isinstance(eps, tuple):
        return Fraction(*eps)
    return Fraction(eps)


def _open_unit(eps) -> Fraction:
    e = as_fraction(eps)
    if not 0 < e < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {e}")
    return e


class DropSides(NamedTuple):
    lhs: BigCount
    rhs_num: BigCount
    rhs_den: BigCount
    hypothesis_holds: bool

    @property
    def inequality_holds(self) -> bool:
        return self.lhs * self.rhs_den >= self.rhs_num


def binom_drop_sides(m: int, k: int, L: int, eps) -> DropSides:
    """Both sides of ``C(m-L, k) >= (1 - eps) C(m, k)``.

    The right side is returned as the exact fraction ``rhs_num / rhs_den``.
    ``hypothesis_holds`` reports ``m >= L (1 + k / eps)``, under which the
    inequality is guaranteed.
    """
    e = _open_unit(eps)
    if m < 1 or L < 1 or k < 0:
        raise DomainError("need positive m, L and non-negative k")
    rhs = (1 - e) * binomial(m, k)
    hyp = m >= L * (1 + k / e)
    return DropSides(binomial(m - L, k), rhs.numerator, rhs.denominator, hyp)


class TailSides(NamedTuple):
    tail: BigCount
    bound_term: BigCount
    eps: Fraction
    hypothesis_holds: bool

    @property
    def inequality_holds(self) -> bool:
        return self.tail < self.eps * self.bound_term


def small_s_tail_sides(m: int, k: int, S: int, eps) -> TailSides:
    """Both sides of ``sum_{s<S} |C(m,k,s)| < eps |C(m,k,S)|``.

    The hypothesis is ``m > S^3/eps + 2S - 1`` together with ``k, m-k >= S``.
    """
    e = _open_unit(eps)
    if S < 1:
        raise DomainError("S must be at least 1")
    if not 0 <= k <= m:
        raise DomainError("need 0 <= k <= m")
    tail = sum(count_C(m, k, s) for s in range(S))
    hyp = m > Fraction(S**3) / e + 2 * S - 1 and k >= S and m - k >= S
    return TailSides(tail, count_C(m, k, S), e, hyp)
