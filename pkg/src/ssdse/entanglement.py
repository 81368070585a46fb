"""Logarithmic negativity, the one-parameter witness family and the adaptive
sharpness rule built on it."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .linalg import SIGMA_Y, SIGMA_Z

NEG_CUTOFF = 1e-12
DENOM_MIN = 1e-12

ZZ = np.kron(SIGMA_Z, SIGMA_Z)
YY = np.kron(SIGMA_Y, SIGMA_Y)
IDENTITY4 = np.eye(4, dtype=complex)


@dataclass(frozen=True)
class WitnessParams:
    """W = (I⊗I + σ3⊗σ3 - g2 σ2⊗σ2) / 4, i.e. g1 = 0, g3 = 1."""

    g2: float

    def __post_init__(self):
        if not 0.0 <= self.g2 <= 1.0:
            raise ValueError(f"g2 must lie in [0, 1], got {self.g2}")

    def operator(self) -> np.ndarray:
        return 0.25 * (IDENTITY4 + ZZ - self.g2 * YY)


@dataclass(frozen=True)
class EpsilonRule:
    """ε_{k+1} = max(bound + margin, margin), bound from :func:`epsilon_feasible_bound`."""

    epsilon0: float = 0.1
    margin: float = 0.01

    def __post_init__(self):
        if self.epsilon0 <= 0:
            raise ValueError("epsilon0 must be positive")
        if self.margin <= 0:
            raise ValueError("margin must be positive")

    def next(self, t_k: float, t_k1: float, eps_k: float) -> float:
        bound = epsilon_feasible_bound(t_k, t_k1, eps_k)
        return max(bound + self.margin, self.margin)


def negativity(rho) -> float:
    """Absolute sum of the negative partial-transpose eigenvalues."""
    w = linalg.eigvalsh(linalg.partial_transpose(rho, "B"))
    return float(-np.sum(w[w < -NEG_CUTOFF]))


def log_negativity(rho) -> float:
    return math.log2(2.0 * negativity(rho) + 1.0)


def negativity_special_closed(vartheta_b: float, s_k: float) -> float:
    """log2(1 + 2ϑ_b(1 - S_k)) for the special family."""
    if not 0.0 < vartheta_b <= 0.5:
        raise ValueError(f"vartheta must lie in (0, 1/2], got {vartheta_b}")
    if not 0.0 <= s_k <= 1.0:
        raise ValueError(f"S_k must lie in [0, 1], got {s_k}")
    return math.log2(1.0 + 2.0 * vartheta_b * (1.0 - s_k))


def witness_value(rho, w: WitnessParams | float) -> float:
    if not isinstance(w, WitnessParams):
        w = WitnessParams(float(w))
    zz = linalg.expectation(ZZ, rho)
    yy = linalg.expectation(YY, rho)
    return 0.25 * (1.0 + zz - w.g2 * yy)


def g2_threshold(rho) -> Optional[float]:
    """Smallest-g2 boundary (1 + <σ3σ3>) / <σ2σ2>, or ``None`` when no g2 in
    [0, 1] can work (non-positive denominator or ratio outside [0, 1])."""
    zz = linalg.expectation(ZZ, rho)
    yy = linalg.expectation(YY, rho)
    if yy <= DENOM_MIN:
        return None
    ratio = (1.0 + zz) / yy
    # 1 + zz >= 0 for any state; tiny negatives are round-off
    if -1e-12 < ratio < 0.0:
        ratio = 0.0
    if not 0.0 <= ratio <= 1.0:
        return None
    return ratio


def threshold_max(t1: Optional[float], t2: Optional[float]) -> Optional[float]:
    if t1 is None or t2 is None:
        return None
    return max(t1, t2)


def next_lambda(rho1, rho2, epsilon: float) -> Optional[float]:
    """(1 + ε) max_b threshold(ρ_b), or ``None`` if infeasible."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return lambda_from_threshold(threshold_max(g2_threshold(rho1), g2_threshold(rho2)), epsilon)


def lambda_from_threshold(t: Optional[float], epsilon: float) -> Optional[float]:
    if t is None:
        return None
    lam = (1.0 + epsilon) * t
    if not 0.0 <= lam <= 1.0:
        return None
    return lam


def epsilon_feasible_bound(t_k: float, t_k1: float, eps_k: float) -> float:
    """Infimum T_k(1 + ε_k)/T_{k+1} - 1 for ε_{k+1}; strictly above it keeps λ increasing."""
    if t_k1 <= 0:
        raise ValueError(f"T_(k+1) must be positive, got {t_k1}")
    return t_k * (1.0 + eps_k) / t_k1 - 1.0
