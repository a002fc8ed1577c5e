"""Large-m behaviour of Hurwitz traces.

Covers the reduction to pairs with ``P_A B != 0``, explicit positivity
thresholds ``m0``, the resolvent generating function

    tr [B (1 - tau A)^-1]^k = sum_m tau^m (k/(m+k)) tr S_{m+k,k}(A, B),

its leading Laurent coefficient ``tr (P_A B)^k`` at ``tau = 1``, band checks
for ``q_{m,k}`` and the monotonicity sweep of ``q_{m+k,k}``.

All functions expect phone matrices (arrays are validated on entry).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from hurwitzlab.config import get_tolerances
from hurwitzlab.errors import (
    DomainError,
    MaxDepthExceeded,
    NumericalError,
    PoleProximity,
    ProductZero,
)
from hurwitzlab.hurwitz import HurwitzTrace, hurwitz_trace, iter_rows, log10_binomial
from hurwitzlab.linalg import (
    NoSplit,
    PhoneMatrix,
    as_phone,
    dim_shared_top_eigenspace,
    matrix_power,
    operator_norm,
    power_projector,
    product_is_zero,
    split_phone_pair,
)
from hurwitzlab.words import binomial

log = logging.getLogger(__name__)

# ||P_A B|| in this window is neither clearly zero nor clearly nonzero
BORDERLINE = (1e-10, 1e-6)
PROJECTOR_GAP = 1e-12
L_CAP = 10**6


def projector_gap(A) -> float:
    """``||A - P_A||``, the largest eigenvalue of ``A`` below 1."""
    a = as_phone(A)
    return operator_norm(a.matrix - power_projector(a).matrix)


@dataclass(frozen=True, eq=False)
class ReductionStep:
    basis: np.ndarray
    l: int
    alpha: float


@dataclass(frozen=True, eq=False)
class ReductionChain:
    """Iterated splittings ``A = 1 (+) alpha A'``, ``B = 0 (+) B'``.

    ``terminal`` is the final pair with ``P_A' B' != 0``, or ``None`` when the
    product ``AB`` vanishes.  For ``0 < k < m`` the original trace is
    ``prod(alpha)^(m-k) tr S_{m,k}(A', B')``.
    """

    n: int
    steps: tuple[ReductionStep, ...]
    terminal: tuple[PhoneMatrix, PhoneMatrix] | None

    @property
    def product_zero(self) -> bool:
        return self.terminal is None

    @property
    def log10_alpha(self) -> float:
        return sum(math.log10(s.alpha) for s in self.steps)

    def trace(self, m: int, k: int) -> HurwitzTrace:
        """``tr S_{m,k}`` of the original pair, recomposed from the terminal pair."""
        if not 0 < k < m:
            raise DomainError("recomposition is valid for 0 < k < m")
        if self.terminal is None:
            return HurwitzTrace(0, -math.inf, 0.0)
        a, b = self.terminal
        t = hurwitz_trace(a, b, m, k)
        if t.sign == 0:
            return t
        shift = (m - k) * self.log10_alpha
        q = t.q * (a.n / self.n) * 10.0**shift
        return HurwitzTrace(t.sign, t.log10_abs + shift, q)


def reduce_pair(A, B) -> ReductionChain:
    """Split off top-eigenspace blocks of ``A`` that ``B`` annihilates."""
    tol = get_tolerances()
    a, b = as_phone(A), as_phone(B)
    n = a.n
    steps = []
    for _ in range(n + 1):
        if product_is_zero(a, b):
            return ReductionChain(n, tuple(steps), None)
        sp = split_phone_pair(a, b)
        if isinstance(sp, NoSplit):
            if BORDERLINE[0] < sp.norm < BORDERLINE[1]:
                log.warning(
                    "||P_A B|| = %.3e is borderline (split_tol %.1e); reduction "
                    "and direct computation may disagree", sp.norm, tol.split_tol)
            return ReductionChain(n, tuple(steps), (a, b))
        steps.append(ReductionStep(sp.basis, sp.l, sp.alpha))
        a, b = sp.a_block, sp.b_block
    raise MaxDepthExceeded(f"reduction did not terminate after {n} steps")


def _power_norms(A, B):
    """Closure ``L -> ||A^L B||`` through the spectral decomposition of ``A``."""
    a = as_phone(A)
    w, u = a.spectrum
    w = np.clip(w, 0.0, None)
    ub = u.conj().T @ np.asarray(B)

    def norm_at(L: int) -> float:
        return operator_norm((u * w**L) @ ub)

    return norm_at


def k_small_lhs(A, B, k: int, L: int) -> float:
    """``k ||A - P_A||^L ||A^L B||^(k-1)``."""
    gap = projector_gap(A)
    return k * gap**L * _power_norms(A, B)(L) ** (k - 1)


def choose_L(A, B, k: int, epsilon: float) -> int:
    """Smallest ``L >= 1`` with ``k ||A - P_A||^L ||A^L B||^(k-1) < epsilon``.

    The left side is non-increasing in ``L``, so the search doubles ``L``
    until the inequality holds and then bisects.
    """
    if not 0 < epsilon < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    if k < 1:
        raise DomainError("k must be at least 1")
    gap = projector_gap(A)
    norm_at = _power_norms(A, B)

    def ok(L: int) -> bool:
        return k * gap**L * norm_at(L) ** (k - 1) < epsilon

    hi = 1
    while not ok(hi):
        if hi >= L_CAP:
            raise NumericalError(
                f"no L <= {L_CAP} found (gap {gap!r}, epsilon {epsilon!r}, k {k})")
        hi = min(2 * hi, L_CAP)
    lo = hi // 2  # ok(lo) is false or lo == 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def laurent_leading(A, B, k: int) -> float:
    """``tr (P_A B)^k``, the coefficient of ``(1 - tau)^-k`` at ``tau = 1``."""
    if k < 1:
        raise DomainError("k must be at least 1")
    p = power_projector(A).matrix
    return float(np.trace(matrix_power(p @ np.asarray(B), k)).real)


@dataclass(frozen=True)
class M0Estimate:
    """Explicit threshold beyond which ``tr S_{m,k}(A, B) > 0``.

    ``m0`` is the closed form for the branch named in ``branch``;
    ``m0_generic`` is ``(1 + k/epsilon)(k + kL + L)`` for the constructed
    ``epsilon`` and ``L``.  Quantities refer to the terminal pair of the
    reduction, whose dimension is ``n``.
    """

    k: int
    branch: str
    L: int
    epsilon: float
    norm_gap: float
    leading: float
    m0: float
    m0_generic: float
    n: int
    depth: int
    bound_lhs: float
    trace_zero: bool = False

    def as_dict(self) -> dict:
        return {
            "branch": self.branch,
            "L": self.L,
            "epsilon": self.epsilon,
            "norm_gap": self.norm_gap,
            "leading": self.leading,
            "m0_closed_form": self.m0,
            "m0_generic": self.m0_generic,
        }


def m0_closed_form(k: int, n: int, leading: float, norm_gap: float) -> float:
    if norm_gap < PROJECTOR_GAP:
        return (1 + 2 * k) * (1 + 3 * k * n / leading)
    return (
        (1 + k)
        * (1 + 3 * k * n / leading)
        * (2 + (math.log(leading) - math.log(3 * k * n)) / math.log(norm_gap))
    )


def m0_estimate(A, B, k: int) -> M0Estimate:
    if k < 1:
        raise DomainError("k must be at least 1")
    chain = reduce_pair(A, B)
    if chain.product_zero:
        return M0Estimate(k, "product-zero", 0, 0.0, math.nan, 0.0, 0.0, 0.0,
                          chain.n, len(chain.steps), 0.0, trace_zero=True)
    a, b = chain.terminal
    n = a.n
    leading = laurent_leading(a, b, k)
    if not leading > 0:
        raise NumericalError(f"tr (P_A B)^k = {leading!r} is not positive after reduction")
    gap = projector_gap(a)
    branch = "projector" if gap < PROJECTOR_GAP else "general"
    if chain.steps:
        branch = "reduced-then-" + branch
    eps = leading / (3 * n) * (1 - 1e-6)
    L = choose_L(a, b, k, eps)
    generic = (1 + k / eps) * (k + k * L + L)
    return M0Estimate(
        k, branch, L, eps, gap, leading, m0_closed_form(k, n, leading, gap), generic,
        n, len(chain.steps), k_small_lhs(a, b, k, L),
    )


def positivity_signs(A, B, k: int, start: int, count: int = 11) -> dict[int, int]:
    """Signs of ``tr S_{m,k}`` for ``m = start, ..., start + count - 1``.

    Evaluated on the terminal pair of the reduction: the splitting factor
    ``alpha^(m-k)`` is positive, and on the unreduced pair it would drown in
    rounding noise from the annihilated block.
    """
    chain = reduce_pair(A, B)
    stop = start + count - 1
    if chain.product_zero:
        return {m: 0 for m in range(start, stop + 1)}
    a, b = chain.terminal
    signs = {}
    for state in iter_rows(a, b, k, stop):
        if state.m >= start:
            signs[state.m] = state.sign(k)
    return signs


class ResolventSample(NamedTuple):
    tau: float
    k: int
    value: float
    imag: float


def resolvent_trace(A, B, k: int, tau: float) -> ResolventSample:
    """``tr [B (1 - tau A)^-1]^k`` through the eigendecomposition of ``A``."""
    if k < 1:
        raise DomainError("k must be at least 1")
    if not abs(tau) < 1:
        raise DomainError("need |tau| < 1")
    a = as_phone(A)
    w, u = a.spectrum
    d = 1.0 - tau * w
    if np.min(np.abs(d)) < get_tolerances().pole_tol:
        raise PoleProximity(f"1 - tau lambda = {np.min(np.abs(d)):.3e} is too close to 0")
    resolvent = (u / d) @ u.conj().T
    t = complex(np.trace(matrix_power(np.asarray(B) @ resolvent, k)))
    return ResolventSample(float(tau), k, t.real, t.imag)


def resolvent_matrix_series_target(A, B, k: int, tau: float) -> np.ndarray:
    """``(1 - tau A)^-1 [B (1 - tau A)^-1]^k``, the sum of ``tau^m S_{m+k,k}``."""
    a = as_phone(A)
    w, u = a.spectrum
    resolvent = (u / (1.0 - tau * w)) @ u.conj().T
    return resolvent @ matrix_power(np.asarray(B) @ resolvent, k)


def series_coefficients(A, B, k: int, M: int) -> np.ndarray:
    """``(k/(m+k)) tr S_{m+k,k}`` for ``m = 0, ..., M``."""
    if k < 1:
        raise DomainError("k must be at least 1")
    out = np.empty(M + 1)
    for state in iter_rows(A, B, k, M + k):
        if state.m >= k:
            m = state.m - k
            # (k/(m+k)) C(m+k, k) = C(m+k-1, k-1)
            out[m] = binomial(m + k - 1, k - 1) * state.trace(k).real
    return out


def series_tail_bound(n: int, k: int, tau: float, M: int) -> float:
    """Bound on ``|sum_{m>M} tau^m (k/(m+k)) tr S_{m+k,k}|`` for phone pairs.

    Each word trace is at most ``n`` in modulus, so coefficient ``m`` is at
    most ``n C(m+k-1, k-1)``.
    """
    t = abs(tau)
    total = 0.0
    m = M + 1
    term = n * binomial(m + k - 1, k - 1) * t**m
    while term > 0:
        total += term
        m += 1
        term = term * t * (m + k - 1) / m
        if term < 1e-30 * total:
            break
    return total


class SeriesCheck(NamedTuple):
    tau: float
    k: int
    M: int
    resolvent: float
    partial_sum: float
    tail_bound: float
    leading: float

    @property
    def error(self) -> float:
        return abs(self.resolvent - self.partial_sum)


def series_check(A, B, k: int, tau: float, M: int) -> SeriesCheck:
    """Truncated generating series against the resolvent trace."""
    a = as_phone(A)
    coeffs = series_coefficients(a, B, k, M)
    partial = float(np.polynomial.polynomial.polyval(tau, coeffs))
    return SeriesCheck(
        tau, k, M,
        resolvent_trace(a, B, k, tau).value,
        partial,
        series_tail_bound(a.n, k, tau, M),
        laurent_leading(a, B, k),
    )


def asymptotic_ratio(A, B, k: int, m: int) -> float:
    """``f_m / C(m+k-1, m)`` with ``f_m = (k/(m+k)) tr S_{m+k,k}``.

    Since ``(k/(m+k)) C(m+k, k) = C(m+k-1, m)`` this is exactly
    ``tr T_{m+k,k}``; it tends to ``tr (P_A B)^k``.
    """
    if k < 1 or m < 1:
        raise DomainError("need k >= 1 and m >= 1")
    t = hurwitz_trace(A, B, m + k, k)
    if t.sign == 0:
        return 0.0
    log_fm = math.log10(k / (m + k)) + t.log10_abs
    return t.sign * 10.0 ** (log_fm - log10_binomial(m + k - 1, m))


class BandCheck(NamedTuple):
    q: float
    d_over_n: float
    lower_ok: bool
    upper_ok: bool


def band_check(A, B, m: int, k: int, epsilon: float) -> BandCheck:
    """Compare ``q_{m,k}`` with ``dim(shared top eigenspace)/n`` at tolerance ``epsilon``.

    The upper predicate is only guaranteed for ``k, m-k`` large enough.
    """
    if not 0 <= k <= m:
        raise DomainError("need 0 <= k <= m")
    a, b = as_phone(A), as_phone(B)
    d_over_n = dim_shared_top_eigenspace(a, b) / a.n
    q = hurwitz_trace(a, b, m, k).q
    return BandCheck(q, d_over_n, q > d_over_n - epsilon, q < d_over_n + epsilon)


def middle_band_bound(A, B, m: int, k: int, epsilon: float) -> tuple[int, float] | None:
    """Largest admissible ``S`` and the bound ``epsilon + ||AB||^S`` on ``|q_{m,k}|``.

    ``S`` must satisfy ``m > S^3/epsilon + 2S - 1`` and ``k, m-k >= S``;
    returns ``None`` when no ``S >= 1`` qualifies.
    """
    best = None
    S = 1
    while S <= min(k, m - k) and m > S**3 / epsilon + 2 * S - 1:
        best = S
        S += 1
    if best is None:
        return None
    ab = operator_norm(np.asarray(A) @ np.asarray(B))
    return best, epsilon + ab**best


class ConjectureSweep(NamedTuple):
    k: int
    q: np.ndarray
    first_increase: tuple[int, float] | None


def conjecture_sweep(A, B, k: int, m_max: int) -> ConjectureSweep:
    """``q_{m+k,k}`` for ``m = 0, ..., m_max`` and its first increase, if any.

    An increase counts when it exceeds ``mono_tol``; constant stretches do not.
    """
    if k < 1:
        raise DomainError("k must be at least 1")
    a, b = as_phone(A), as_phone(B)
    if product_is_zero(a, b):
        raise ProductZero("AB = 0: every mixed trace vanishes")
    mono_tol = get_tolerances().mono_tol
    q = np.empty(m_max + 1)
    for state in iter_rows(a, b, k, m_max + k):
        if state.m >= k:
            q[state.m - k] = state.trace(k).real / a.n
    dq = np.diff(q)
    hits = np.nonzero(dq > mono_tol)[0]
    first = (int(hits[0]) + 1, float(dq[hits[0]])) if hits.size else None
    return ConjectureSweep(k, q, first)


def sparse_word_bound(A, B, k: int, L: int) -> float:
    return k_small_lhs(A, B, k, L)


def sparse_word_gap(A, B, l_list: Sequence[int], L: int) -> float:
    """``||prod_i A^{l_i} B - (P_A B)^k||`` for exponents ``l_i >= L``.

    Raises :class:`NumericalError` if the gap exceeds
    ``k ||A - P_A||^L ||A^L B||^(k-1)`` by more than ``1e-10``.
    """
    if L < 1 or any(l < L for l in l_list):
        raise DomainError("need L >= 1 and every exponent >= L")
    a = as_phone(A)
    b = np.asarray(B, dtype=np.complex128)
    k = len(l_list)
    prod = np.eye(a.n, dtype=np.complex128)
    for l in l_list:
        prod = prod @ matrix_power(a.matrix, l) @ b
    limit = matrix_power(power_projector(a).matrix @ b, k)
    gap = operator_norm(prod - limit)
    bound = sparse_word_bound(a, b, k, L)
    if gap > bound + 1e-10:
        raise NumericalError(f"sparse word gap {gap:.6e} exceeds its bound {bound:.6e}")
    return gap
