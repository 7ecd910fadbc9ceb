import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def kron_all(mats):
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def embed(u, targets, n):
    """Full 2^n matrix of u on targets, built entry by entry from basis kets."""
    dim = 2**n
    k = len(targets)
    full = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (n - 1 - i)) & 1 for i in range(n)]
        sub = sum(bits[t] << (k - 1 - j) for j, t in enumerate(targets))
        for r in range(2**k):
            out = list(bits)
            for j, t in enumerate(targets):
                out[t] = (r >> (k - 1 - j)) & 1
            row = sum(b << (n - 1 - i) for i, b in enumerate(out))
            full[row, col] += u[r, sub]
    return full
