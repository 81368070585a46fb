"""Shared oracles and strategies.

The oracles here deliberately avoid the package's own eigensolver and
closed-form square roots: they use numpy.linalg.eigh so that agreement is
evidence rather than self-consistency.
"""
import math

import numpy as np
import pytest
from hypothesis import strategies as st

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def np_sqrtm(m):
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def np_luders(rho, elements):
    out = np.zeros((4, 4), dtype=complex)
    for e in elements:
        r = np_sqrtm(e)
        out += r @ rho @ r
    return out


def np_log_negativity(rho):
    pt = rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    w = np.linalg.eigvalsh(pt)
    return math.log2(1.0 - 2.0 * np.sum(w[w < 0]))


def random_unitary2(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pure(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(rng, dim=4, rank=None):
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (g + g.conj().T)


def random_separable(rng, terms=None):
    terms = terms or int(rng.integers(1, 5))
    weights = rng.dirichlet(np.ones(terms))
    rho = np.zeros((4, 4), dtype=complex)
    for w in weights:
        a, b = random_pure(rng, 2), random_pure(rng, 2)
        psi = np.kron(a, b)
        rho += w * np.outer(psi, psi.conj())
    return rho


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


unit_open = st.floats(min_value=1e-3, max_value=1 - 1e-3, allow_nan=False)
unit_closed = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
theta_any = st.floats(min_value=1e-3, max_value=math.pi / 2, allow_nan=False)
theta_high = st.floats(min_value=math.pi / 4 + 1e-3, max_value=math.pi / 2 - 1e-3, allow_nan=False)
seeds = st.integers(min_value=0, max_value=2**32 - 1)
