"""The two ensemble families, Pauli correlators and Schmidt-form rotations."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .linalg import I2, PAULI, SIGMA_X, dagger

SCHMIDT_MIN = 1e-12

KET0 = np.array([1.0, 0.0], dtype=complex)
KET1 = np.array([0.0, 1.0], dtype=complex)


class ParameterError(ValueError):
    """A family parameter lies outside its entangled range."""


@dataclass(frozen=True)
class GeneralFamilyParams:
    """|Φ1> = √μ1|00> + √(1-μ1)|1ς>,  |Φ2> = √μ2|01> + √(1-μ2)|1ς⊥>."""

    mu1: float
    mu2: float
    theta: float

    def __post_init__(self):
        for name in ("mu1", "mu2"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ParameterError(f"{name} must lie in (0, 1), got {v}")
        if not 0.0 < self.theta <= math.pi / 2:
            raise ParameterError(f"theta must lie in (0, pi/2], got {self.theta}")


@dataclass(frozen=True)
class SpecialFamilyParams:
    """|κ1> = √γ1|01> + √(1-γ1)|10>,  |κ2> = √γ2|00> + √(1-γ2)|11>."""

    gamma1: float
    gamma2: float

    def __post_init__(self):
        for name in ("gamma1", "gamma2"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ParameterError(f"{name} must lie in (0, 1), got {v}")

    @property
    def vartheta1(self) -> float:
        return math.sqrt(self.gamma1 * (1.0 - self.gamma1))

    @property
    def vartheta2(self) -> float:
        return math.sqrt(self.gamma2 * (1.0 - self.gamma2))

    @property
    def varthetas(self) -> tuple[float, float]:
        """Off-diagonal weights ϑ_b = √(γ_b(1-γ_b)), one per ensemble state."""
        return self.vartheta1, self.vartheta2


FamilyParams = Union[GeneralFamilyParams, SpecialFamilyParams]


@dataclass(frozen=True)
class EnsembleSpec:
    params: FamilyParams
    priors: tuple[float, float] = (0.5, 0.5)

    def __post_init__(self):
        if tuple(self.priors) != (0.5, 0.5):
            raise ParameterError("only equal priors (1/2, 1/2) are supported")

    @property
    def family(self) -> str:
        return "special" if isinstance(self.params, SpecialFamilyParams) else "general"

    def kets(self) -> tuple[np.ndarray, np.ndarray]:
        if isinstance(self.params, SpecialFamilyParams):
            return special_kets(self.params)
        return general_kets(self.params)

    def states(self) -> tuple[np.ndarray, np.ndarray]:
        k1, k2 = self.kets()
        return projector(k1), projector(k2)


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def varsigma(theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Bob's rotated basis (|ς>, |ς⊥>) at angle θ."""
    c, s = math.cos(theta), math.sin(theta)
    return c * KET0 + s * KET1, -s * KET0 + c * KET1


def general_kets(p: GeneralFamilyParams) -> tuple[np.ndarray, np.ndarray]:
    sig, sig_perp = varsigma(p.theta)
    phi1 = math.sqrt(p.mu1) * np.kron(KET0, KET0) + math.sqrt(1 - p.mu1) * np.kron(KET1, sig)
    phi2 = math.sqrt(p.mu2) * np.kron(KET0, KET1) + math.sqrt(1 - p.mu2) * np.kron(KET1, sig_perp)
    return phi1, phi2


def special_kets(p: SpecialFamilyParams) -> tuple[np.ndarray, np.ndarray]:
    k1 = math.sqrt(p.gamma1) * np.kron(KET0, KET1) + math.sqrt(1 - p.gamma1) * np.kron(KET1, KET0)
    k2 = math.sqrt(p.gamma2) * np.kron(KET0, KET0) + math.sqrt(1 - p.gamma2) * np.kron(KET1, KET1)
    return k1, k2


def general_pair(p: GeneralFamilyParams) -> tuple[np.ndarray, np.ndarray]:
    phi1, phi2 = general_kets(p)
    return projector(phi1), projector(phi2)


def special_pair(p: SpecialFamilyParams) -> tuple[np.ndarray, np.ndarray]:
    k1, k2 = special_kets(p)
    return projector(k1), projector(k2)


def correlators(rho) -> np.ndarray:
    """4x4 table T[p, q] = Tr[σ_p ⊗ σ_q ρ] with σ_0 = I."""
    rho = np.asarray(rho, dtype=complex)
    table = np.empty((4, 4))
    for p in range(4):
        for q in range(4):
            op = np.kron(PAULI[p], PAULI[q])
            table[p, q] = np.sum(op * rho.T).real
    return table


@dataclass(frozen=True)
class SchmidtRotation:
    u_a: np.ndarray
    u_b: np.ndarray
    m: float  # smaller Schmidt coefficient, in (0, 1/2]

    @property
    def unitary(self) -> np.ndarray:
        return np.kron(self.u_a, self.u_b)

    def apply(self, rho) -> np.ndarray:
        u = self.unitary
        return u @ np.asarray(rho, dtype=complex) @ dagger(u)


def schmidt_rotation(psi) -> SchmidtRotation:
    """Local unitaries taking ``psi`` to √m|01> + √(1-m)|10>, m <= 1/2.

    With amplitude matrix C = U diag(s1, s2) V^H, U_A = X U^H and U_B = V^T
    give U_A C U_B^T = X diag(s1, s2) = [[0, s2], [s1, 0]], which is the
    target with real positive amplitudes.  When s1 = s2 the SVD is not unique;
    then U_A is fixed to the identity and U_B solved for.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape != (4,):
        raise ParameterError("schmidt_rotation expects a 4-component state vector")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise ParameterError(f"state is not normalized (norm {norm})")
    amp = psi.reshape(2, 2)
    u, svals, vh = np.linalg.svd(amp)
    m = float(svals[1] ** 2)
    if m < SCHMIDT_MIN:
        raise ParameterError("product state: no entangled Schmidt form")

    if abs(svals[0] - svals[1]) < 1e-12:
        # amp * sqrt(2) is unitary W;  I @ amp @ U_B^T = X / sqrt(2)  =>  U_B^T = W^H X
        w = amp * math.sqrt(2.0)
        u_a = I2.copy()
        u_b = (dagger(w) @ SIGMA_X).T
    else:
        u_a = SIGMA_X @ dagger(u)
        u_b = vh.conj()
    return SchmidtRotation(u_a=u_a, u_b=u_b, m=m)
