"""Small complex linear algebra for 2x2 and 4x4 Hermitian matrices.

Matrices are plain ``numpy`` complex arrays.  Two-qubit operators use the
row-major Kronecker convention ``(a ⊗ b)[2i+k, 2j+l] = a[i, j] * b[k, l]`` and
the computational basis order |00>, |01>, |10>, |11>; every other module
relies on this.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_CLAMP = 1e-10
JACOBI_TOL = 1e-14
_MAX_SWEEPS = 64

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# sigma_0 = identity, so PAULI[p] is the p-th Pauli with the usual labels.
PAULI = (I2, SIGMA_X, SIGMA_Y, SIGMA_Z)


class LinalgError(ValueError):
    """Raised when an input violates a shape or structure precondition."""


class NotPSDError(LinalgError):
    """Raised when a matrix expected to be PSD has a clearly negative eigenvalue."""


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # real, descending
    eigenvectors: np.ndarray  # orthonormal columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_cmatrix(m, dims=(2, 4)) -> np.ndarray:
    """Return ``m`` as a square complex array whose size is in ``dims``."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in dims:
        raise LinalgError(f"expected a square matrix of size in {dims}, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def kron2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Unchecked a ⊗ b for 2x2 arrays; np.kron is slow at this size."""
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(4, 4)


def tensor(a, b) -> np.ndarray:
    a = as_cmatrix(a, (2,))
    b = as_cmatrix(b, (2,))
    return kron2(a, b)


def partial_transpose(rho, subsystem: str = "B") -> np.ndarray:
    """Transpose one tensor factor of a 4x4 operator.

    ``subsystem`` is ``"A"`` (first qubit) or ``"B"`` (second qubit).  The
    operation only permutes entries, so applying it twice is exact.
    """
    r = as_cmatrix(rho, (4,)).reshape(2, 2, 2, 2)  # (i, k, j, l)
    if subsystem == "A":
        out = r.transpose(2, 1, 0, 3)
    elif subsystem == "B":
        out = r.transpose(0, 3, 2, 1)
    else:
        raise LinalgError(f"subsystem must be 'A' or 'B', got {subsystem!r}")
    return np.ascontiguousarray(out.reshape(4, 4))


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(m)
    return bool(np.max(np.abs(a - dagger(a))) <= tol)


def hermitian_eig(m, tol: float = JACOBI_TOL) -> EigenDecomposition:
    """Eigendecomposition of a small Hermitian matrix by cyclic Jacobi sweeps.

    Each rotation first removes the phase of the pivot ``a[p, q]`` and then
    applies a real Givens rotation that zeroes it.  Sweeps stop once the
    off-diagonal Frobenius norm is below ``tol * max(1, ||m||_F)``.
    """
    a = as_cmatrix(m)
    if not is_hermitian(a):
        raise LinalgError("hermitian_eig: input is not Hermitian")
    n = a.shape[0]
    # Plain Python scalars: numpy call overhead dominates at this size.
    h = (0.5 * (a + dagger(a))).tolist()
    v = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]
    stop2 = (tol * max(1.0, float(np.linalg.norm(a)))) ** 2
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]

    for _ in range(_MAX_SWEEPS):
        off2 = 2.0 * sum(abs(h[p][q]) ** 2 for p, q in pairs)
        if off2 <= stop2:
            break
        for p, q in pairs:
            apq = h[p][q]
            mag = abs(apq)
            if mag == 0.0:
                continue
            cph = apq.conjugate() / mag
            ang = 0.5 * math.atan2(2.0 * mag, h[q][q].real - h[p][p].real)
            c, s = math.cos(ang), math.sin(ang)
            # G = diag(1, cph) @ [[c, s], [-s, c]]; A <- G^H A G, V <- V G
            g10, g11 = -s * cph, c * cph
            for row in h:
                x, y = row[p], row[q]
                row[p] = c * x + g10 * y
                row[q] = s * x + g11 * y
            hp, hq = h[p], h[q]
            g10c, g11c = g10.conjugate(), g11.conjugate()
            for j in range(n):
                x, y = hp[j], hq[j]
                hp[j] = c * x + g10c * y
                hq[j] = s * x + g11c * y
            hp[q] = hq[p] = 0j
            for row in v:
                x, y = row[p], row[q]
                row[p] = c * x + g10 * y
                row[q] = s * x + g11 * y
    else:
        raise LinalgError("hermitian_eig: Jacobi sweeps did not converge")

    w = np.array([h[i][i].real for i in range(n)])
    vecs = np.array(v, dtype=complex)
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(w[order], vecs[:, order])


def eigvalsh(m) -> np.ndarray:
    return hermitian_eig(m).eigenvalues


def psd_sqrt(m, clamp: float = PSD_CLAMP) -> np.ndarray:
    """Principal square root of a PSD matrix.

    Eigenvalues in ``[-clamp, 0)`` are treated as round-off and set to zero;
    anything more negative raises :class:`NotPSDError`.
    """
    dec = hermitian_eig(m)
    w = dec.eigenvalues
    if w[-1] < -clamp:
        raise NotPSDError(f"psd_sqrt: eigenvalue {w[-1]:.3e} below -{clamp:g}")
    root = np.sqrt(np.clip(w, 0.0, None))
    v = dec.eigenvectors
    r = (v * root) @ dagger(v)
    return 0.5 * (r + dagger(r))


def trace_product(a, b) -> complex:
    """Tr[a b] as a complex number."""
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    if a.shape != b.shape:
        raise LinalgError(f"trace_product: shape mismatch {a.shape} vs {b.shape}")
    return complex(np.sum(a * b.T))


def expectation(op, rho) -> float:
    """Real part of Tr[op rho] for Hermitian ``op`` and ``rho``."""
    return trace_product(op, rho).real


def pauli_pair(p: int, q: int) -> np.ndarray:
    return np.kron(PAULI[p], PAULI[q])
