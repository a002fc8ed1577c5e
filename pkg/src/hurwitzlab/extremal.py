"""Extremality conditions for ``tr S_{m,k}`` on the unit Schatten-p sphere.

At an extremal pair ``(A, B)`` of positive matrices with ``||A||_p = ||B||_p = 1``

    S_{m-1,k} A   = A^p tr(S_{m-1,k} A),
    S_{m-1,k-1} B = B^p tr(S_{m-1,k-1} B),
    S_{m,k}       = ((m-k) A^p + k B^p)/m tr S_{m,k},

and ``S_{m-1,k}`` commutes with ``A``.  :func:`el_residuals` measures how far
a pair is from satisfying these; :func:`extremal_search` hill-climbs towards
extremal pairs so the residuals can be tested away from symmetric points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from hurwitzlab.errors import DomainError
from hurwitzlab.hurwitz import hurwitz_row
from hurwitzlab.linalg import (
    as_hermitian,
    frobenius,
    hermitian_part,
    psd_power,
    schatten_norm,
)
from hurwitzlab.words import BigCount, binomial

UNIT_NORM_TOL = 1e-9
PATIENCE = 20
MODES = ("minimize", "maximize")


@dataclass(frozen=True)
class ELResidual:
    commutator: float
    pnormA: float
    pnormB: float
    combined: float

    def as_dict(self) -> dict:
        return {
            "commutator": self.commutator,
            "pnormA": self.pnormA,
            "pnormB": self.pnormB,
            "combined": self.combined,
        }


@dataclass(frozen=True)
class SearchConfig:
    p: float = 2.0
    steps: int = 1000
    step_size: float = 0.1
    shrink: float = 0.5
    seed: int = 0
    mode: str = "maximize"

    def __post_init__(self):
        _check_p(self.p)
        if self.steps < 1:
            raise DomainError("steps must be at least 1")
        if not self.step_size > 0:
            raise DomainError("step_size must be positive")
        if not 0 < self.shrink < 1:
            raise DomainError("shrink must lie in (0, 1)")
        if self.seed < 0:
            raise DomainError("seed must be non-negative")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}")


def _check_p(p: float) -> None:
    if math.isinf(p):
        raise DomainError("p = inf is not supported: the objective is not differentiable there")
    if not p >= 1:
        raise DomainError(f"need p >= 1, got {p}")


def _check_mk(m: int, k: int) -> None:
    if not 0 < k < m:
        raise DomainError(f"need 0 < k < m, got m={m}, k={k}")


def _rows(A, B, m: int, k: int):
    # rows m and m-1 of the recurrence; S = C(m, k) T exactly
    state = hurwitz_row(A, B, m, k, retain_previous=True)
    prev = state.previous
    s_mk = state.hurwitz(k)
    s_prev_k = prev.hurwitz(k)
    s_prev_k1 = prev.hurwitz(k - 1)
    return s_mk, s_prev_k, s_prev_k1


def el_residuals(A, B, m: int, k: int, p: float) -> ELResidual:
    """Frobenius norms of the four Euler-Lagrange identities at ``(A, B)``."""
    _check_mk(m, k)
    _check_p(p)
    a, b = as_hermitian(A), as_hermitian(B)
    for name, x in (("A", a), ("B", b)):
        norm = schatten_norm(x, p)
        if abs(norm - 1.0) >= UNIT_NORM_TOL:
            raise DomainError(f"{name} must have unit {p}-norm, got {norm!r}")
    ap, bp = psd_power(a, p), psd_power(b, p)
    s_mk, s_a, s_b = _rows(a, b, m, k)
    sa, sb = s_a @ a, s_b @ b
    tr_ap, tr_bp = np.trace(ap).real, np.trace(bp).real
    return ELResidual(
        commutator=frobenius(sa - a @ s_a),
        pnormA=frobenius(sa * tr_ap - ap * np.trace(sa)),
        pnormB=frobenius(sb * tr_bp - bp * np.trace(sb)),
        combined=frobenius(s_mk - ((m - k) * ap + k * bp) / m * np.trace(s_mk)),
    )


def objective(A, B, m: int, k: int) -> float:
    """``tr S_{m,k}(A, B)`` for matrices of norm at most one."""
    return float(binomial(m, k)) * hurwitz_row(A, B, m, k).trace(k).real


def unit_p(X, p: float) -> np.ndarray:
    """``X / ||X||_p`` for positive Hermitian ``X``."""
    x = hermitian_part(X)
    norm = schatten_norm(x, p)
    if norm == 0.0:
        raise DomainError("cannot normalize the zero matrix")
    return x / norm


def _gram(c: np.ndarray) -> np.ndarray:
    return c.conj().T @ c


@dataclass
class SearchResult:
    A: np.ndarray
    B: np.ndarray
    objective: float
    residuals: ELResidual
    trajectory: list[tuple[int, float, float]] = field(repr=False)
    steps_accepted: int
    final_step_size: float
    start_residuals: ELResidual

    def as_dict(self) -> dict:
        out = {"objective": self.objective}
        out.update(self.residuals.as_dict())
        out["steps_accepted"] = self.steps_accepted
        out["final_step_size"] = self.final_step_size
        return out


def extremal_search(n: int, m: int, k: int, config: SearchConfig, start=None) -> SearchResult:
    """Derivative-free hill climbing of ``tr S_{m,k}`` over unit-p-norm pairs.

    Pairs are parameterized as ``A = N_p(C_A* C_A)``, ``B = N_p(C_B* C_B)``.
    Each step adds ``step_size`` times complex Gaussian noise to ``C_A`` and
    ``C_B`` and keeps the move only if the objective strictly improves; after
    ``PATIENCE`` consecutive rejections the step is multiplied by ``shrink``.

    ``start`` optionally gives the initial positive pair ``(A0, B0)``; the
    factors are then ``C = A0^(1/2)``.  The trajectory lists
    ``(step, objective, combined residual)`` at the start and at every accepted
    step.  Runs are deterministic in ``config.seed``.
    """
    _check_mk(m, k)
    if n < 1:
        raise DomainError("n must be at least 1")
    p = config.p
    rng = np.random.default_rng(config.seed)

    def noise():
        return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)

    if start is None:
        ca, cb = noise(), noise()
    else:
        ca, cb = psd_power(start[0], 0.5), psd_power(start[1], 0.5)
    a, b = unit_p(_gram(ca), p), unit_p(_gram(cb), p)
    best = objective(a, b, m, k)
    sign = 1.0 if config.mode == "maximize" else -1.0
    res0 = el_residuals(a, b, m, k, p)
    trajectory = [(0, best, res0.combined)]
    step = config.step_size
    rejected = 0
    accepted = 0
    for i in range(1, config.steps + 1):
        ca_new = ca + step * noise()
        cb_new = cb + step * noise()
        try:
            a_new, b_new = unit_p(_gram(ca_new), p), unit_p(_gram(cb_new), p)
        except DomainError:
            rejected += 1
            continue
        value = objective(a_new, b_new, m, k)
        if sign * (value - best) > 0:
            ca, cb, a, b, best = ca_new, cb_new, a_new, b_new, value
            accepted += 1
            rejected = 0
            trajectory.append((i, best, el_residuals(a, b, m, k, p).combined))
        else:
            rejected += 1
            if rejected >= PATIENCE:
                step *= config.shrink
                rejected = 0
    return SearchResult(
        a, b, best, el_residuals(a, b, m, k, p), trajectory, accepted, step, res0
    )


def telescope_check(X_list, X) -> float:
    """Residual of ``prod X_i - X^k = sum_i X^(i-1) (X_i - X) X_(i+1) ... X_k``."""
    xs = [np.asarray(x, dtype=np.complex128) for x in X_list]
    x = np.asarray(X, dtype=np.complex128)
    if not xs:
        raise DomainError("need at least one factor")
    n = x.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    k = len(xs)
    # suffix[i] = X_{i+1} ... X_k (0-based: xs[i+1:])
    suffix = [eye] * (k + 1)
    for i in range(k - 1, -1, -1):
        suffix[i] = xs[i] @ suffix[i + 1]
    lhs = suffix[0] - np.linalg.matrix_power(x, k)
    rhs = np.zeros_like(eye)
    power = eye
    for i in range(k):
        rhs += power @ (xs[i] - x) @ suffix[i + 1]
        power = power @ x
    return frobenius(lhs - rhs)


def euler_series_coeff(k: int, m: int) -> BigCount:
    """Coefficient of ``tau^m`` in ``1/(1 - tau)^(k+1)``, namely ``C(k+m, m)``."""
    if k < 0 or m < 0:
        raise DomainError("need k, m >= 0")
    return binomial(k + m, m)
