"""Centralized numerical tolerances.

Defaults live in :class:`Tolerances`; a block of code can run with overrides::

    with tolerances(one_tol=1e-8):
        ...
"""

from __future__ import annotations

import contextlib
import contextvars
import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    herm_tol: float = 1e-12
    psd_tol: float = 1e-10
    eig_tol: float = 1e-10
    one_tol: float = 1e-9
    proj_tol: float = 1e-9
    split_tol: float = 1e-8
    zero_norm: float = 1e-14
    product_zero_tol: float = 1e-10
    mono_tol: float = 1e-11
    pole_tol: float = 1e-12
    near_zero_abs: float = 1e-12
    jacobi_rel: float = 1e-13
    jacobi_max_sweeps: int = 100
    enumeration_cap: int = 200_000

    def replace(self, **overrides) -> "Tolerances":
        return dataclasses.replace(self, **overrides)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


_current: contextvars.ContextVar[Tolerances] = contextvars.ContextVar(
    "hurwitzlab_tolerances", default=Tolerances()
)


def get_tolerances() -> Tolerances:
    return _current.get()


@contextlib.contextmanager
def tolerances(**overrides):
    """Temporarily override selected tolerances."""
    token = _current.set(_current.get().replace(**overrides))
    try:
        yield _current.get()
    finally:
        _current.reset(token)
