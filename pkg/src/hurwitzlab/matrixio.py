"""Matrix JSON files: ``{"n": <int>, "re": [[...]], "im": [[...]]}``.

Writers emit reals with 17 significant digits, which round-trips float64
bit-exactly.  Readers ignore leading ``#`` comment lines, so files produced
by the CLI (which start with a provenance comment) load directly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from hurwitzlab.errors import DomainError
from hurwitzlab.linalg import as_hermitian


def fmt_real(x: float) -> str:
    x = float(x)
    if x == 0.0:
        return "-0.0" if np.signbit(x) else "0"
    return format(x, ".17g")


def _rows(a: np.ndarray) -> str:
    return "[" + ", ".join("[" + ", ".join(fmt_real(v) for v in row) + "]" for row in a) + "]"


def dumps_matrix(M) -> str:
    a = np.asarray(M, dtype=np.complex128)
    return '{"n": %d, "re": %s, "im": %s}\n' % (a.shape[0], _rows(a.real), _rows(a.imag))


def strip_comments(text: str) -> str:
    return "\n".join(line for line in text.splitlines() if not line.lstrip().startswith("#"))


def loads_matrix(text: str) -> np.ndarray:
    """Parse the matrix schema, symmetrize and validate as Hermitian."""
    try:
        obj = json.loads(strip_comments(text))
        n = int(obj["n"])
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj["im"], dtype=float)
    except (ValueError, KeyError, TypeError) as exc:
        raise DomainError(f"malformed matrix JSON: {exc}") from exc
    if re.shape != (n, n) or im.shape != (n, n):
        raise DomainError(f"matrix JSON declares n={n} but has shapes {re.shape}, {im.shape}")
    return as_hermitian(re + 1j * im)


def read_matrix(path) -> np.ndarray:
    return loads_matrix(Path(path).read_text())


def write_matrix(path, M, header: str | None = None) -> None:
    text = dumps_matrix(M)
    if header:
        text = header.rstrip("\n") + "\n" + text
    Path(path).write_text(text)
