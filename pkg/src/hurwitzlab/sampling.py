"""Deterministic random phone matrices.

Kinds
-----
``wishart``
    ``C* C`` for a complex Gaussian ``C``, divided by its top eigenvalue.
``diag-gap``
    ``U diag(1, u_2, ..., u_n) U*`` with Haar-random ``U`` and ``u_i`` uniform
    on (0, 1).
``shared-top``
    Like ``diag-gap`` but the top eigenvector is always the flat vector
    ``(1, ..., 1)/sqrt(n)`` and the remaining eigenvalues lie in
    (0, ``SHARED_TOP_CEILING``).  Two samples of this kind share exactly one
    top eigenvector, whatever their seeds.
"""

from __future__ import annotations

import numpy as np

from hurwitzlab.errors import DomainError
from hurwitzlab.linalg import PhoneMatrix, hermitian_part, normalize_phone

KINDS = ("wishart", "diag-gap", "shared-top")
SHARED_TOP_CEILING = 0.9


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_unitary(n: int, rng: np.random.Generator, first_column=None) -> np.ndarray:
    """Haar unitary by QR with phase correction; optionally pin column 0."""
    z = _complex_gaussian(rng, (n, n))
    if first_column is not None:
        z[:, 0] = first_column
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def sample_phone(n: int, seed: int, kind: str = "wishart") -> PhoneMatrix:
    if n < 1:
        raise DomainError("n must be at least 1")
    if kind not in KINDS:
        raise DomainError(f"unknown kind {kind!r}; choose from {', '.join(KINDS)}")
    rng = np.random.default_rng([int(seed), KINDS.index(kind), n])
    if kind == "wishart":
        c = _complex_gaussian(rng, (n, n))
        return normalize_phone(hermitian_part(c.conj().T @ c))
    if kind == "diag-gap":
        u = random_unitary(n, rng)
        d = np.concatenate([[1.0], rng.uniform(0.0, 1.0, n - 1)])
    else:
        u = random_unitary(n, rng, first_column=np.full(n, 1.0 / np.sqrt(n)))
        d = np.concatenate([[1.0], SHARED_TOP_CEILING * rng.uniform(0.0, 1.0, n - 1)])
    return normalize_phone(hermitian_part((u * d) @ u.conj().T))


def sample_pair(n: int, seed: int, kind: str = "wishart") -> tuple[PhoneMatrix, PhoneMatrix]:
    """Two independent samples of one kind, from seeds ``2 seed`` and ``2 seed + 1``."""
    return sample_phone(n, 2 * seed, kind), sample_phone(n, 2 * seed + 1, kind)
