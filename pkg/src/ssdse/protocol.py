"""Sequential discrimination chain: Lüders updates, per-round success
probabilities, the S_k recursion and the special-family closed forms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import entanglement as ent
from . import linalg
from .measurement import (
    PovmSet,
    assert_povm,
    sqrt_factors,
    unsharp_general_povm,
    unsharp_special_povm,
)
from .states import EnsembleSpec, SchmidtRotation, SpecialFamilyParams, schmidt_rotation

STATE_TOL = 1e-10
CLOSED_FORM_TOL = 1e-10


class ProtocolError(RuntimeError):
    pass


class StateInvariantError(ProtocolError):
    pass


class ScheduleInfeasible(ProtocolError):
    """The witness-driven rule produced no admissible λ; ``trace`` holds the
    rounds completed before the failure."""

    def __init__(self, message: str, trace: "ProtocolTrace"):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class SharpnessSchedule:
    mode: str  # "fixed" or "witness"
    rounds: int
    lambdas: tuple = ()
    lambda1: float = 1e-3
    epsilon_rule: ent.EpsilonRule = field(default_factory=ent.EpsilonRule)
    schmidt_basis: bool = False

    def __post_init__(self):
        if self.mode not in ("fixed", "witness"):
            raise ValueError(f"unknown schedule mode {self.mode!r}")
        if self.rounds < 1:
            raise ValueError("rounds must be a positive integer")
        if self.mode == "fixed":
            if len(self.lambdas) != self.rounds:
                raise ValueError(
                    f"fixed schedule needs {self.rounds} lambdas, got {len(self.lambdas)}"
                )
            for lam in self.lambdas:
                if not 0.0 <= lam <= 1.0:
                    raise ValueError(f"sharpness {lam} outside [0, 1]")
        elif not 0.0 < self.lambda1 < 1.0:
            raise ValueError(f"lambda1 must lie in (0, 1), got {self.lambda1}")

    @classmethod
    def fixed(cls, lambdas: Sequence[float], **kw) -> "SharpnessSchedule":
        lambdas = tuple(float(x) for x in lambdas)
        return cls(mode="fixed", rounds=len(lambdas), lambdas=lambdas, **kw)

    @classmethod
    def witness_driven(cls, rounds: int, lambda1: float = 1e-3, epsilon0: float = 0.1,
                       margin: float = 0.01, schmidt_basis: bool = True) -> "SharpnessSchedule":
        return cls(mode="witness", rounds=rounds, lambda1=lambda1,
                   epsilon_rule=ent.EpsilonRule(epsilon0, margin), schmidt_basis=schmidt_basis)


@dataclass
class RoundRecord:
    k: int
    lam: float
    success_prob: float
    post_states: tuple
    negativities: tuple
    witness_values: tuple
    witness_g2: float
    thresholds: tuple  # g2 thresholds of the post states (None = infeasible)
    s_k: Optional[float] = None
    epsilon: Optional[float] = None


@dataclass
class ProtocolTrace:
    ensemble: EnsembleSpec
    schedule: SharpnessSchedule
    records: list = field(default_factory=list)

    @property
    def lambdas(self) -> list:
        return [r.lam for r in self.records]

    @property
    def success(self) -> list:
        return [r.success_prob for r in self.records]


def luders_update(rho, povm: PovmSet, check: bool = True, roots=None) -> np.ndarray:
    """Outcome-averaged Lüders channel Σ_j √O_j ρ √O_j.

    ``roots`` may carry precomputed ``sqrt_factors(povm)`` when the same set
    is applied to several states.
    """
    if check and not assert_povm(povm, STATE_TOL).passed:
        raise ProtocolError("luders_update: POVM invariants violated")
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros((4, 4), dtype=complex)
    for r in roots if roots is not None else sqrt_factors(povm):
        out += r @ rho @ r
    return 0.5 * (out + out.conj().T)


def success_probability(rho1, rho2, povm: PovmSet) -> float:
    """Equal-prior average ½ Σ_b Tr[(Σ_{j→b} O_j) ρ_b]."""
    p = 0.5 * (
        linalg.expectation(povm.guess_operator(1), rho1)
        + linalg.expectation(povm.guess_operator(2), rho2)
    )
    return float(p)


def s_sequence(lambdas: Sequence[float]) -> list:
    """S_1 = λ_1², S_l = λ_l² + S_{l-1}(1 - λ_l²)."""
    out = []
    s = 0.0
    for lam in lambdas:
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"sharpness {lam} outside [0, 1]")
        l2 = lam * lam
        s = l2 + s * (1.0 - l2)
        out.append(s)
    return out


_SWAP_01_10 = np.zeros((4, 4))
_SWAP_01_10[1, 2] = _SWAP_01_10[2, 1] = 1.0
_SWAP_00_11 = np.zeros((4, 4))
_SWAP_00_11[0, 3] = _SWAP_00_11[3, 0] = 1.0


def special_closed_states(params: SpecialFamilyParams, s_k: float) -> tuple:
    """Special-family states after rounds with cumulative S_k: the initial
    states with their coherences shrunk by S_k ϑ_b."""
    if not 0.0 <= s_k <= 1.0:
        raise ValueError(f"S_k must lie in [0, 1], got {s_k}")
    from .states import special_pair

    r1, r2 = special_pair(params)
    v1, v2 = params.varthetas
    return r1 - s_k * v1 * _SWAP_01_10, r2 - s_k * v2 * _SWAP_00_11


def check_density_matrix(rho, tol: float = STATE_TOL) -> None:
    if not linalg.is_hermitian(rho, tol):
        raise StateInvariantError("state is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise StateInvariantError(f"state trace {tr} != 1")
    w = linalg.eigvalsh(rho)
    if w[-1] < -tol:
        raise StateInvariantError(f"state has negative eigenvalue {w[-1]:.3e}")


def povm_for(ensemble: EnsembleSpec, lam: float) -> PovmSet:
    if ensemble.family == "special":
        return unsharp_special_povm(lam)
    return unsharp_general_povm(ensemble.params.theta, lam)


def witness_frames(ensemble: EnsembleSpec, schmidt_basis: bool):
    """Per-state rotations used before thresholding/witnessing (None = as given)."""
    if not schmidt_basis:
        return None, None
    k1, k2 = ensemble.kets()
    return schmidt_rotation(k1), schmidt_rotation(k2)


def _framed(rho, frame: Optional[SchmidtRotation]):
    return rho if frame is None else frame.apply(rho)


def run(ensemble: EnsembleSpec, schedule: SharpnessSchedule) -> ProtocolTrace:
    """Run ``schedule.rounds`` rounds on both ensemble states.

    Each round builds the family POVM at λ_k, scores it on the incoming pair,
    applies the Lüders update to both states and records negativities and
    witness values.  Witness-driven schedules derive λ_{k+1} from the round-k
    states; special-family runs are checked against the closed forms.
    """
    trace = ProtocolTrace(ensemble=ensemble, schedule=schedule)
    rho1, rho2 = ensemble.states()
    frames = witness_frames(ensemble, schedule.schmidt_basis)
    special = ensemble.family == "special"
    rule = schedule.epsilon_rule

    lam = schedule.lambdas[0] if schedule.mode == "fixed" else schedule.lambda1
    s_k = 0.0
    eps_prev = rule.epsilon0
    t_prev = lam / (1.0 + eps_prev)  # virtual T_0 so that λ_1 = (1 + ε_0) T_0

    for k in range(1, schedule.rounds + 1):
        povm = povm_for(ensemble, lam)
        if not assert_povm(povm, STATE_TOL).passed:
            raise ProtocolError(f"round {k}: POVM invariants violated")
        p = success_probability(rho1, rho2, povm)
        roots = sqrt_factors(povm)
        rho1 = luders_update(rho1, povm, check=False, roots=roots)
        rho2 = luders_update(rho2, povm, check=False, roots=roots)
        for rho in (rho1, rho2):
            check_density_matrix(rho)

        s_rec = None
        if special:
            l2 = lam * lam
            s_k = l2 + s_k * (1.0 - l2)
            s_rec = s_k
            c1, c2 = special_closed_states(ensemble.params, s_k)
            dev = max(np.linalg.norm(rho1 - c1), np.linalg.norm(rho2 - c2))
            if dev > CLOSED_FORM_TOL:
                raise StateInvariantError(
                    f"round {k}: closed-form states deviate from Lüders states by {dev:.3e}"
                )

        w1, w2 = _framed(rho1, frames[0]), _framed(rho2, frames[1])
        thresholds = (ent.g2_threshold(w1), ent.g2_threshold(w2))

        eps_rec = None
        if schedule.mode == "witness":
            t_k = ent.threshold_max(*thresholds)
            if t_k is None or t_k <= 0.0:
                raise ScheduleInfeasible(
                    f"round {k}: witness threshold infeasible or non-positive ({t_k})", trace
                )
            eps_k = rule.next(t_prev, t_k, eps_prev)
            nxt = ent.lambda_from_threshold(t_k, eps_k)
            if nxt is None or not lam < nxt < 1.0:
                raise ScheduleInfeasible(
                    f"round {k}: next sharpness {(1 + eps_k) * t_k!r} not in ({lam}, 1)", trace
                )
            g2 = nxt
            eps_rec = eps_k
        else:
            g2 = 1.0

        wp = ent.WitnessParams(g2)
        trace.records.append(
            RoundRecord(
                k=k,
                lam=lam,
                success_prob=p,
                post_states=(rho1, rho2),
                negativities=(ent.log_negativity(rho1), ent.log_negativity(rho2)),
                witness_values=(ent.witness_value(w1, wp), ent.witness_value(w2, wp)),
                witness_g2=g2,
                thresholds=thresholds,
                s_k=s_rec,
                epsilon=eps_rec,
            )
        )

        if k == schedule.rounds:
            break
        if schedule.mode == "fixed":
            lam = schedule.lambdas[k]
        else:
            t_prev, eps_prev, lam = t_k, eps_k, g2
    return trace


def special_success_closed(lam: float) -> float:
    return 0.5 + 0.5 * lam * lam


def general_success_round1(theta: float, lam: float) -> float:
    """½ + ¼[λ + λ² - (λ - 1)λ cos 2θ]."""
    return 0.5 + 0.25 * (lam + lam * lam - (-1.0 + lam) * lam * math.cos(2.0 * theta))
