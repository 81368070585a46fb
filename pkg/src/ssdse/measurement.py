"""Sharp and unsharp one-way LOCC POVMs for both ensemble families."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linalg
from .linalg import I2
from .states import KET0, KET1, projector, varsigma

COMPLETENESS_TOL = 1e-12
PSD_TOL = 1e-10
PRODUCT_TOL = 1e-12


class MeasurementError(ValueError):
    pass


@dataclass(frozen=True)
class PovmSet:
    """Four product elements O_j = A_j ⊗ B_j with an explicit guess map.

    ``projectors`` keeps the sharp projector behind each unsharp local factor
    (when the set was built from one) so closed-form square roots can be used.
    """

    elements: tuple
    local_factors: tuple  # ((A_1, B_1), ..., (A_4, B_4))
    guess_map: tuple  # guess_map[j] in {1, 2}
    sharpness: float
    projectors: Optional[tuple] = field(default=None, compare=False)

    def guess_operator(self, b: int) -> np.ndarray:
        """Sum of the elements after which state ``b`` is guessed."""
        return sum(e for e, g in zip(self.elements, self.guess_map) if g == b)


@dataclass(frozen=True)
class PovmReport:
    completeness_residual: float
    min_eigenvalues: tuple
    factorization_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return (
            self.completeness_residual <= self.tol
            and min(self.min_eigenvalues) >= -self.tol
            and self.factorization_residual <= self.tol
        )


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise MeasurementError(f"sharpness must lie in [0, 1], got {lam}")
    return lam


def _is_rank1_projector(p: np.ndarray, tol: float = 1e-12) -> bool:
    return (
        np.max(np.abs(p - p.conj().T)) <= tol
        and np.max(np.abs(p @ p - p)) <= tol
        and abs(np.trace(p).real - 1.0) <= tol
    )


def unsharp(p, lam: float) -> np.ndarray:
    """λP + (1-λ)I/2 for a rank-1 qubit projector P."""
    p = linalg.as_cmatrix(p, (2,))
    if not _is_rank1_projector(p):
        raise MeasurementError("unsharp: input is not a rank-1 projector")
    lam = _check_lambda(lam)
    return lam * p + (1.0 - lam) * I2 / 2.0


def unsharp_sqrt(p, lam: float) -> np.ndarray:
    """Closed-form √(λP + (1-λ)I/2).

    With σ = 2P - I the root is [(√(1+λ)+√(1-λ)) I + (√(1+λ)-√(1-λ)) σ] / (2√2).
    """
    lam = _check_lambda(lam)
    p = np.asarray(p, dtype=complex)
    sp, sm = math.sqrt(1.0 + lam), math.sqrt(1.0 - lam)
    return ((sp + sm) * I2 + (sp - sm) * (2.0 * p - I2)) / (2.0 * math.sqrt(2.0))


def _build(proj_pairs, guess_map, lam: float) -> PovmSet:
    lam = _check_lambda(lam)
    factors = tuple((unsharp(pa, lam), unsharp(pb, lam)) for pa, pb in proj_pairs)
    elements = tuple(linalg.kron2(a, b) for a, b in factors)
    return PovmSet(
        elements=elements,
        local_factors=factors,
        guess_map=tuple(guess_map),
        sharpness=lam,
        projectors=tuple(proj_pairs),
    )


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not 0.0 < theta <= math.pi / 2:
        raise MeasurementError(f"theta must lie in (0, pi/2], got {theta}")
    return theta


def general_projectors(theta: float):
    """(A, B) projector pairs for O1..O4: A0⊗B0|0, A0⊗B1|0, A1⊗B0|1, A1⊗B1|1."""
    theta = _check_theta(theta)
    a0, a1 = projector(KET0), projector(KET1)
    sig, sig_perp = varsigma(theta)
    return (
        (a0, projector(KET0)),
        (a0, projector(KET1)),
        (a1, projector(sig)),
        (a1, projector(sig_perp)),
    )


# Outcomes A0⊗B0|0 and A1⊗B0|1 name ρ1; the other two name ρ2.
GENERAL_GUESS = (1, 2, 1, 2)


def sharp_general_povm(theta: float) -> PovmSet:
    return _build(general_projectors(theta), GENERAL_GUESS, 1.0)


def unsharp_general_povm(theta: float, lam: float) -> PovmSet:
    return _build(general_projectors(theta), GENERAL_GUESS, lam)


SPECIAL_PROJECTORS = (
    (projector(KET0), projector(KET1)),  # |01>
    (projector(KET0), projector(KET0)),  # |00>
    (projector(KET1), projector(KET0)),  # |10>
    (projector(KET1), projector(KET1)),  # |11>
)
SPECIAL_GUESS = (1, 2, 1, 2)


def unsharp_special_povm(lam: float) -> PovmSet:
    """Ō1..Ō4, diagonal in the computational basis."""
    return _build(SPECIAL_PROJECTORS, SPECIAL_GUESS, lam)


def sqrt_factors(povm: PovmSet) -> tuple:
    """√O_j = √A_j ⊗ √B_j for every element.

    Closed forms are used when the set records its sharp projectors; other
    sets fall back to an eigendecomposition of each local factor.
    """
    out = []
    if povm.projectors is not None:
        for pa, pb in povm.projectors:
            out.append(linalg.kron2(unsharp_sqrt(pa, povm.sharpness), unsharp_sqrt(pb, povm.sharpness)))
    else:
        for a, b in povm.local_factors:
            out.append(linalg.kron2(linalg.psd_sqrt(a), linalg.psd_sqrt(b)))
    return tuple(out)


def sqrt_factors_numeric(povm: PovmSet) -> tuple:
    """Eigendecomposition-only route to the same factors."""
    return tuple(linalg.kron2(linalg.psd_sqrt(a), linalg.psd_sqrt(b)) for a, b in povm.local_factors)


def _eig2(m) -> tuple:
    """Eigenvalues (low, high) of a 2x2 Hermitian matrix."""
    a, d = m[0, 0].real, m[1, 1].real
    r = math.hypot(0.5 * (a - d), abs(m[0, 1]))
    mid = 0.5 * (a + d)
    return mid - r, mid + r


def _product_min_eig(a, b) -> float:
    # spectrum of A ⊗ B is every product of a factor eigenvalue pair
    ea, eb = _eig2(a), _eig2(b)
    return min(x * y for x in ea for y in eb)


def assert_povm(povm: PovmSet, tol: float = COMPLETENESS_TOL) -> PovmReport:
    """Completeness, positivity and product-form residuals of ``povm``.

    Positivity is read off the local factors, which is exact once the
    factorization residual is small.
    """
    total = sum(povm.elements)
    completeness = float(np.max(np.abs(total - np.eye(4))))
    for a, b in povm.local_factors:
        if not (linalg.is_hermitian(a, tol) and linalg.is_hermitian(b, tol)):
            raise MeasurementError("local POVM factor is not Hermitian")
    mins = tuple(_product_min_eig(a, b) for a, b in povm.local_factors)
    fact = max(
        float(np.max(np.abs(e - linalg.kron2(a, b))))
        for e, (a, b) in zip(povm.elements, povm.local_factors)
    )
    return PovmReport(completeness, mins, fact, tol)
