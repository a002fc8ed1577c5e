"""Dense complex Hermitian linear algebra.

Everything here works on plain ``numpy`` arrays of dtype ``complex128``.
A *phone* matrix is a positive Hermitian matrix whose largest eigenvalue is
exactly 1; it is the normalization unit used throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from hurwitzlab.config import get_tolerances
from hurwitzlab.errors import (
    DomainError,
    NonConvergence,
    SplitInconsistent,
    ZeroMatrix,
)


def as_hermitian(M, tol: float | None = None) -> np.ndarray:
    """Validate ``M`` as Hermitian and return its exactly symmetrized copy.

    Raises
    ------
    DomainError
        If ``M`` is not square, has non-finite entries, or deviates from
        Hermitian symmetry by more than ``herm_tol``.
    """
    if tol is None:
        tol = get_tolerances().herm_tol
    a = np.array(M, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DomainError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    dev = np.max(np.abs(a - a.conj().T))
    if dev > tol:
        raise DomainError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    h = 0.5 * (a + a.conj().T)
    h[np.diag_indices_from(h)] = h.diagonal().real
    return h


def hermitian_part(M) -> np.ndarray:
    a = np.asarray(M, dtype=np.complex128)
    return 0.5 * (a + a.conj().T)


class SpectralDecomposition(NamedTuple):
    """Eigenvalues sorted descending and matching unitary eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def eig_hermitian(H) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Pivots run in fixed row-major order over the strict upper triangle, so the
    result is deterministic for identical input.  Iteration stops once the
    off-diagonal Frobenius norm is at most ``jacobi_rel * ||H||_F``.
    """
    tol = get_tolerances()
    a = as_hermitian(H).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    threshold = tol.jacobi_rel * np.linalg.norm(a)
    offmask = ~np.eye(n, dtype=bool)

    for sweep in range(tol.jacobi_max_sweeps + 1):
        off = math.sqrt(float(np.sum(np.abs(a[offmask]) ** 2)))
        if off <= threshold:
            break
        if sweep == tol.jacobi_max_sweeps:
            raise NonConvergence(
                f"Jacobi did not converge in {tol.jacobi_max_sweeps} sweeps "
                f"(off-diagonal norm {off:.3e}, threshold {threshold:.3e})"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                # Phase-rotate the pivot to the real value r, then apply a
                # real rotation with tan(2 theta) = 2 r / (a_qq - a_pp).
                conj_phase = (apq / r).conjugate()
                theta = 0.5 * math.atan2(2.0 * r, a[q, q].real - a[p, p].real)
                c, s = math.cos(theta), math.sin(theta)
                j = np.array(
                    [[c, s], [-s * conj_phase, c * conj_phase]], dtype=np.complex128
                )
                idx = [p, q]
                a[:, idx] = a[:, idx] @ j
                a[idx, :] = j.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ j
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

    w = a.diagonal().real.copy()
    order = np.argsort(-w, kind="stable")
    return SpectralDecomposition(w[order], v[:, order])


def eigvals_hermitian(H) -> np.ndarray:
    return eig_hermitian(H).eigenvalues


def _is_hermitian(a: np.ndarray) -> bool:
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= get_tolerances().herm_tol)


def operator_norm(M) -> float:
    """Largest singular value of ``M``."""
    a = np.asarray(M, dtype=np.complex128)
    if not np.any(a):
        return 0.0
    if _is_hermitian(a):
        w = eigvals_hermitian(a)
        return float(max(abs(w[0]), abs(w[-1])))
    top = eigvals_hermitian(hermitian_part(a.conj().T @ a))[0]
    return math.sqrt(max(top, 0.0))


def frobenius(M) -> float:
    return float(np.linalg.norm(np.asarray(M)))


def _psd_eigenvalues(w: np.ndarray, what: str = "matrix") -> np.ndarray:
    psd_tol = get_tolerances().psd_tol
    if w.size and w[-1] < -psd_tol:
        raise DomainError(f"{what} is not positive semidefinite (eigenvalue {w[-1]:.3e})")
    return np.clip(w, 0.0, None)


def schatten_norm(H, p: float) -> float:
    """Schatten p-norm ``(tr H^p)^(1/p)`` of a positive Hermitian matrix.

    ``p = inf`` is the operator norm.  Eigenvalues in ``[-psd_tol, 0)`` are
    clamped to zero before taking powers.
    """
    if not p >= 1:
        raise DomainError(f"Schatten norm needs p >= 1, got {p}")
    if math.isinf(p):
        return operator_norm(as_hermitian(H))
    w = _psd_eigenvalues(eigvals_hermitian(H))
    return float(np.sum(w**p) ** (1.0 / p))


def psd_power(H, p: float) -> np.ndarray:
    """``H^p`` for positive Hermitian ``H`` and real ``p >= 0``."""
    dec = eig_hermitian(H)
    w = _psd_eigenvalues(dec.eigenvalues)
    u = dec.eigenvectors
    return hermitian_part((u * w**p) @ u.conj().T)


def matrix_power(M, i: int) -> np.ndarray:
    """``M**i`` by binary exponentiation; ``M**0`` is the identity."""
    if i < 0:
        raise DomainError("matrix_power needs a non-negative exponent")
    return np.linalg.matrix_power(np.asarray(M, dtype=np.complex128), int(i))


@dataclass(frozen=True, eq=False)
class PhoneMatrix:
    """Positive Hermitian matrix with largest eigenvalue 1.

    ``scale`` records the factor that was divided out of the original matrix
    (1.0 when the matrix was phone to begin with).
    """

    matrix: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        tol = get_tolerances()
        h = as_hermitian(self.matrix)
        h.setflags(write=False)
        object.__setattr__(self, "matrix", h)
        if not self.scale > 0:
            raise DomainError("phone scale must be positive")
        w = self.spectrum.eigenvalues
        if w[-1] < -tol.psd_tol:
            raise DomainError(f"phone matrix must be PSD (eigenvalue {w[-1]:.3e})")
        if abs(w[0] - 1.0) > tol.eig_tol:
            raise DomainError(f"phone matrix needs top eigenvalue 1, got {w[0]!r}")

    @cached_property
    def spectrum(self) -> SpectralDecomposition:
        return eig_hermitian(self.matrix)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.matrix
        return self.matrix.astype(dtype)

    def __repr__(self):
        return f"PhoneMatrix(n={self.n}, scale={self.scale!r})"


def as_phone(A) -> PhoneMatrix:
    return A if isinstance(A, PhoneMatrix) else PhoneMatrix(A)


def normalize_phone(H) -> PhoneMatrix:
    """Divide a nonzero positive Hermitian matrix by its largest eigenvalue."""
    h = as_hermitian(H)
    w = eigvals_hermitian(h)
    _psd_eigenvalues(w)
    top = float(w[0])
    if top < get_tolerances().zero_norm:
        raise ZeroMatrix(f"cannot normalize a zero matrix (norm {top:.3e})")
    return PhoneMatrix(h / top, scale=top)


@dataclass(frozen=True, eq=False)
class Projector:
    matrix: np.ndarray
    rank: int


def power_projector(A) -> Projector:
    """The power limit ``lim A^i`` of a phone matrix.

    It is the orthogonal projector onto the eigenvalue-1 eigenspace; every
    eigenvalue within ``one_tol`` of 1 counts toward that space.
    """
    a = as_phone(A)
    one_tol = get_tolerances().one_tol
    w, u = a.spectrum
    top = u[:, np.abs(w - 1.0) <= one_tol]
    p = hermitian_part(top @ top.conj().T)
    return Projector(p, top.shape[1])


def direct_sum(*blocks) -> np.ndarray:
    blocks = [np.atleast_2d(np.asarray(b, dtype=np.complex128)) for b in blocks]
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=np.complex128)
    i = 0
    for b in blocks:
        j = i + b.shape[0]
        out[i:j, i:j] = b
        i = j
    return out


@dataclass(frozen=True, eq=False)
class BlockSplit:
    """Simultaneous splitting ``A = 1 (+) alpha A'`` and ``B = 0 (+) B'``.

    ``basis`` is the unitary whose first ``sizes[0]`` columns span the
    eigenvalue-1 eigenspace of ``A``; the blocks live in that basis.
    """

    basis: np.ndarray
    sizes: tuple[int, int]
    alpha: float
    a_block: PhoneMatrix
    b_block: PhoneMatrix
    residual: float

    @property
    def l(self) -> int:
        return self.sizes[1]


@dataclass(frozen=True)
class NoSplit:
    """Returned when ``P_A B`` is nonzero; carries ``tr(P_A B)`` and ``||P_A B||``."""

    trace: float
    norm: float


def split_phone_pair(A, B) -> BlockSplit | NoSplit:
    """Split a phone pair along the top eigenspace of ``A`` when ``P_A B = 0``."""
    tol = get_tolerances()
    a, b = as_phone(A), as_phone(B)
    p = power_projector(a)
    pb = p.matrix @ b.matrix
    pb_norm = operator_norm(pb)
    if pb_norm > tol.split_tol:
        return NoSplit(float(np.trace(pb).real), pb_norm)

    n, r = a.n, p.rank
    u = a.spectrum.eigenvectors
    at = u.conj().T @ a.matrix @ u
    bt = u.conj().T @ b.matrix @ u
    res_a = max(
        np.max(np.abs(at[:r, :r] - np.eye(r))),
        np.max(np.abs(at[:r, r:]), initial=0.0),
    )
    res_b = max(
        np.max(np.abs(bt[:r, :r])),
        np.max(np.abs(bt[:r, r:]), initial=0.0),
    )
    residual = float(max(res_a, res_b))
    if residual > 10 * tol.split_tol:
        raise SplitInconsistent(
            f"||P_A B|| is below split_tol but the transformed blocks deviate "
            f"(A residual {res_a:.3e}, B residual {res_b:.3e})"
        )

    h = hermitian_part(at[r:, r:])
    alpha = float(eigvals_hermitian(h)[0]) if h.size else 0.0
    if alpha < tol.zero_norm:
        alpha = 0.0
        a_block = PhoneMatrix(np.eye(n - r))
    else:
        a_block = PhoneMatrix(h / alpha)
    b_block = PhoneMatrix(hermitian_part(bt[r:, r:]))
    return BlockSplit(u, (r, n - r), alpha, a_block, b_block, residual)


def shared_top_dimension(*mats) -> int:
    """Dimension of the intersection of the eigenvalue-1 eigenspaces.

    Counts singular values of ``P_N ... P_1`` equal to 1 within ``one_tol``;
    for two factors that is the eigenvalue-1 count of ``P_A P_B P_A``.
    """
    if not mats:
        raise DomainError("need at least one matrix")
    one_tol = get_tolerances().one_tol
    prod = None
    for m in mats:
        p = power_projector(m).matrix
        prod = p if prod is None else p @ prod
    gram = hermitian_part(prod.conj().T @ prod)
    w = eigvals_hermitian(gram)
    return int(np.sum(np.abs(w - 1.0) <= one_tol))


def dim_shared_top_eigenspace(A, B) -> int:
    return shared_top_dimension(A, B)


def product_zero_predicates(A, B, k: int = 1, tol: float | None = None) -> dict:
    """The four equivalent vanishing tests for a phone pair.

    ``AB = 0``, ``tr AB = 0``, ``tr (AB)^k = 0`` and ``ABA = 0``, each decided
    at absolute tolerance ``tol`` (default ``product_zero_tol``).
    """
    if tol is None:
        tol = get_tolerances().product_zero_tol
    a = np.asarray(A, dtype=np.complex128)
    b = np.asarray(B, dtype=np.complex128)
    ab = a @ b
    return {
        "AB": operator_norm(ab) <= tol,
        "trAB": abs(np.trace(ab)) <= tol,
        "trABk": abs(np.trace(matrix_power(ab, k))) <= tol,
        "ABA": operator_norm(ab @ a) <= tol,
    }


def product_is_zero(A, B) -> bool:
    """``AB = 0`` for positive matrices, decided through ``tr AB``."""
    ab = np.asarray(A) @ np.asarray(B)
    return abs(np.trace(ab)) <= get_tolerances().product_zero_tol
