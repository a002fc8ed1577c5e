import numpy as np
import pytest

from hurwitzlab.linalg import normalize_phone
from hurwitzlab.sampling import random_unitary, sample_pair


def random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (z + z.conj().T) / 2


def random_psd(n, seed, rank=None):
    rng = np.random.default_rng(seed)
    r = n if rank is None else rank
    c = rng.standard_normal((r, n)) + 1j * rng.standard_normal((r, n))
    return c.conj().T @ c


def random_phone(n, seed):
    return normalize_phone(random_psd(n, seed))


def unitary(n, seed):
    return random_unitary(n, np.random.default_rng(seed))


def rel_err(x, y, floor=1e-12):
    """Relative error that switches to absolute near zero."""
    scale = max(abs(x), abs(y))
    return abs(x - y) if scale < floor else abs(x - y) / scale


@pytest.fixture
def seed_pair():
    """A fixed random n=2 phone pair."""
    a, b = sample_pair(2, 3, "wishart")
    return a.matrix, b.matrix


@pytest.fixture(params=[(2, s) for s in range(4)] + [(3, s) for s in range(4)])
def phone_pair(request):
    n, s = request.param
    a, b = sample_pair(n, 100 + s, "wishart")
    return a.matrix, b.matrix


def zero_product_pair(n, r, seed, rotate=True):
    """Phone pair with AB = 0: A lives on the first r coordinates, B on the rest.

    With ``rotate`` both are conjugated by one random unitary, otherwise by a
    random permutation, which keeps the zero pattern exact.
    """
    rng = np.random.default_rng(seed)
    a = np.zeros((n, n), dtype=complex)
    b = np.zeros((n, n), dtype=complex)
    a[:r, :r] = random_psd(r, seed + 1)
    b[r:, r:] = random_psd(n - r, seed + 2)
    if rotate:
        u = random_unitary(n, rng)
    else:
        u = np.eye(n)[rng.permutation(n)]
    a = u @ a @ u.conj().T
    b = u @ b @ u.conj().T
    return normalize_phone((a + a.conj().T) / 2).matrix, normalize_phone((b + b.conj().T) / 2).matrix


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
