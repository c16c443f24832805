"""Shared helpers for the test suite."""

import numpy as np
import pytest

from sepfactory import Prng


def fro(m) -> float:
    return float(np.linalg.norm(np.asarray(m)))


def hermitize(m):
    return 0.5 * (m + m.conj().T)


def random_hermitian(seed: int, n: int) -> np.ndarray:
    return hermitize(Prng(seed).complex_matrix(n, n))


def random_psd(seed: int, n: int, rank: int | None = None) -> np.ndarray:
    g = Prng(seed).complex_matrix(n, rank if rank is not None else n)
    return g @ g.conj().T


def unitarity_defect(v) -> float:
    v = np.asarray(v)
    return fro(v.conj().T @ v - np.eye(v.shape[1]))


@pytest.fixture
def prng():
    return Prng(0)
