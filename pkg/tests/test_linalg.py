import math

import numpy as np
import pytest
from hypothesis import given, settings

from ssdse import linalg
from ssdse.linalg import I2, SIGMA_X, SIGMA_Y, SIGMA_Z

from conftest import random_density, random_hermitian, seeds

PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
BELL = np.outer(PHI_PLUS, PHI_PLUS.conj())


def test_tensor_identity():
    assert np.array_equal(linalg.tensor(I2, I2), np.eye(4))


def test_tensor_zz_is_diagonal():
    assert np.array_equal(linalg.tensor(SIGMA_Z, SIGMA_Z), np.diag([1, -1, -1, 1]))


def test_tensor_xz_blocks():
    m = linalg.tensor(SIGMA_X, SIGMA_Z)
    z = np.zeros((2, 2))
    d = np.diag([1.0, -1.0])
    assert np.array_equal(m, np.block([[z, d], [d, z]]))


def test_tensor_matches_np_kron(rng):
    for _ in range(20):
        a, b = random_hermitian(rng, 2), random_hermitian(rng, 2)
        assert np.array_equal(linalg.tensor(a, b), np.kron(a, b))


def test_tensor_rejects_wrong_shape():
    with pytest.raises(linalg.LinalgError):
        linalg.tensor(np.eye(4), I2)


def test_partial_transpose_of_product(rng):
    ra, rb = random_density(rng, 2), random_density(rng, 2)
    got = linalg.partial_transpose(np.kron(ra, rb), "B")
    np.testing.assert_allclose(got, np.kron(ra, rb.T), atol=1e-15)
    got = linalg.partial_transpose(np.kron(ra, rb), "A")
    np.testing.assert_allclose(got, np.kron(ra.T, rb), atol=1e-15)


def test_partial_transpose_bell_spectrum():
    w = linalg.eigvalsh(linalg.partial_transpose(BELL, "B"))
    np.testing.assert_allclose(w, [0.5, 0.5, 0.5, -0.5], atol=1e-12)


def test_partial_transpose_maximally_mixed():
    assert np.array_equal(linalg.partial_transpose(np.eye(4) / 4, "A"), np.eye(4) / 4)


def test_partial_transpose_bad_subsystem():
    with pytest.raises(linalg.LinalgError):
        linalg.partial_transpose(BELL, "C")


@given(seeds)
def test_partial_transpose_involution_exact(seed):
    m = random_hermitian(np.random.default_rng(seed), 4) + 0.3j
    for side in "AB":
        assert np.array_equal(linalg.partial_transpose(linalg.partial_transpose(m, side), side), m)


def test_eig_diagonal():
    dec = linalg.hermitian_eig(np.diag([3.0, 1.0, 1.0, 0.0]))
    np.testing.assert_allclose(dec.eigenvalues, [3, 1, 1, 0], atol=1e-15)


def test_eig_pauli():
    for s in (SIGMA_X, SIGMA_Y, SIGMA_Z):
        np.testing.assert_allclose(linalg.eigvalsh(s), [1, -1], atol=1e-15)


def test_eig_bell_partial_transpose_has_one_negative():
    w = linalg.eigvalsh(linalg.partial_transpose(BELL))
    assert np.count_nonzero(w < -1e-12) == 1
    assert w[-1] == pytest.approx(-0.5, abs=1e-12)


def test_eig_rejects_non_hermitian():
    with pytest.raises(linalg.LinalgError):
        linalg.hermitian_eig(np.array([[0, 1], [0, 0]]))


@settings(max_examples=200)
@given(seeds)
def test_eig_against_numpy(seed):
    rng = np.random.default_rng(seed)
    dim = 2 if seed % 3 == 0 else 4
    m = random_hermitian(rng, dim) * 10 ** rng.uniform(-3, 2)
    dec = linalg.hermitian_eig(m)
    scale = max(1.0, np.abs(m).max())
    np.testing.assert_allclose(dec.eigenvalues, np.linalg.eigvalsh(m)[::-1], atol=1e-12 * scale)
    assert np.abs(dec.reconstruct() - m).max() <= 1e-12 * scale
    v = dec.eigenvectors
    assert np.abs(v.conj().T @ v - np.eye(dim)).max() <= 1e-12


def test_eig_degenerate_spectrum(rng):
    # rotated diag(1, 1, -2, -2): repeated eigenvalues must still give orthonormal vectors
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    m = q @ np.diag([1.0, 1.0, -2.0, -2.0]) @ q.conj().T
    dec = linalg.hermitian_eig(m)
    np.testing.assert_allclose(dec.eigenvalues, [1, 1, -2, -2], atol=1e-12)
    assert np.abs(dec.eigenvectors.conj().T @ dec.eigenvectors - np.eye(4)).max() < 1e-12


def test_psd_sqrt_projector(rng):
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    p = np.outer(psi, psi.conj())
    np.testing.assert_allclose(linalg.psd_sqrt(p), p, atol=1e-12)


def test_psd_sqrt_scalar():
    np.testing.assert_allclose(linalg.psd_sqrt(2.5 * np.eye(4)), math.sqrt(2.5) * np.eye(4), atol=1e-14)


def test_psd_sqrt_unsharp_closed_form():
    lam = 0.6
    q = lam * np.diag([1.0, 0.0]) + (1 - lam) * I2 / 2
    plus = (math.sqrt(1 + lam) + math.sqrt(1 - lam)) / (2 * math.sqrt(2))
    minus = (math.sqrt(1 + lam) - math.sqrt(1 - lam)) / (2 * math.sqrt(2))
    np.testing.assert_allclose(linalg.psd_sqrt(q), np.diag([plus + minus, plus - minus]), atol=1e-14)


def test_psd_sqrt_clamps_roundoff():
    m = np.diag([1.0, -5e-11, 0.25, 0.0])
    np.testing.assert_allclose(linalg.psd_sqrt(m), np.diag([1.0, 0.0, 0.5, 0.0]), atol=1e-15)


def test_psd_sqrt_rejects_negative():
    with pytest.raises(linalg.NotPSDError):
        linalg.psd_sqrt(np.diag([1.0, -1e-6]))


@given(seeds)
def test_psd_sqrt_squares_back(seed):
    m = random_density(np.random.default_rng(seed), 4, rank=1 + seed % 4)
    r = linalg.psd_sqrt(m)
    assert np.abs(r @ r - m).max() <= 1e-10


def test_trace_product_examples(rng):
    rho = random_density(rng)
    assert linalg.trace_product(np.eye(4), rho) == pytest.approx(1.0, abs=1e-14)
    zz = linalg.tensor(SIGMA_Z, SIGMA_Z)
    assert linalg.trace_product(zz, BELL) == pytest.approx(1.0, abs=1e-15)
    ket01 = np.zeros(4)
    ket01[1] = 1
    assert linalg.trace_product(zz, np.outer(ket01, ket01)) == -1


@given(seeds)
def test_trace_product_conjugate_symmetry(seed):
    rng = np.random.default_rng(seed)
    a, b = random_hermitian(rng, 4), random_hermitian(rng, 4)
    lhs = linalg.trace_product(a, b)
    rhs = np.conj(linalg.trace_product(b.conj().T, a.conj().T))
    assert abs(lhs - rhs) <= 1e-12


@given(seeds)
def test_tensor_spectrum_is_products(seed):
    rng = np.random.default_rng(seed)
    a, b = random_hermitian(rng, 2), random_hermitian(rng, 2)
    wa, wb = linalg.eigvalsh(a), linalg.eigvalsh(b)
    prods = np.sort(np.outer(wa, wb).ravel())[::-1]
    np.testing.assert_allclose(linalg.eigvalsh(linalg.tensor(a, b)), prods, atol=1e-10)


def test_pauli_pair():
    assert np.array_equal(linalg.pauli_pair(3, 3), np.kron(SIGMA_Z, SIGMA_Z))
    assert np.array_equal(linalg.pauli_pair(0, 1), np.kron(I2, SIGMA_X))
