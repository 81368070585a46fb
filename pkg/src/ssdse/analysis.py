"""Coefficient recursions behind the general-family success probability.

The Heisenberg-picture action of one unsharp round on the four correlators
⟨σ3σ3⟩, ⟨Iσ3⟩, ⟨σ3σ1⟩, ⟨Iσ1⟩ is linear, so after k rounds each correlator is a
fixed combination of the initial ones.  The combination weights R_j^k and
R'_j^k obey a closed recursion, which drives the six-term decomposition of the
success probability and the f/g/t/s/h scan functions.

Every function here is written with numpy broadcasting so that whole scan
grids are evaluated in one pass.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .linalg import SIGMA_X, SIGMA_Z, I2

SCAN_DELTA = 1e-3
SCAN_POINTS = 50
SUCCESS_SCALE = 0.5
FUNCTION_IDS = ("f", "g", "t", "s", "h", "Q")

_IDENTITY_R = (1.0, 0.0, 0.0, 0.0)

CORRELATOR_OPS = (
    np.kron(SIGMA_Z, SIGMA_Z),
    np.kron(I2, SIGMA_Z),
    np.kron(SIGMA_Z, SIGMA_X),
    np.kron(I2, SIGMA_X),
)
CORRELATOR_LABELS = ("ZZ", "IZ", "ZX", "IX")


class AnalysisError(ValueError):
    pass


def _check_lambdas(lambdas) -> None:
    arr = np.asarray(lambdas, dtype=float)
    if arr.size and (not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0):
        raise AnalysisError("sharpness values must lie in [0, 1]")


def _check_theta(theta, low: float = 0.0, open_low: bool = True) -> None:
    arr = np.asarray(theta, dtype=float)
    bad = (arr <= low) if open_low else (arr < low)
    if np.any(bad) or np.any(arr > math.pi / 2 + 1e-15) or not np.all(np.isfinite(arr)):
        raise AnalysisError(f"theta outside ({low:.6g}, pi/2]")


@dataclass(frozen=True)
class RState:
    """R_1..R_4 and R'_1..R'_4 after ``k`` rounds.

    ``r`` and ``r_prime`` have shape (4, ...) where the trailing shape is the
    broadcast shape of θ and the λ arrays, so one object can describe a grid.
    """

    r: np.ndarray
    r_prime: np.ndarray
    k: int
    theta: object
    lambdas: tuple = ()

    @classmethod
    def initial(cls, theta) -> "RState":
        shape = np.shape(theta)
        r = np.zeros((4,) + shape)
        r[0] = 1.0
        return cls(r=r, r_prime=r.copy(), k=0, theta=theta)


def step_coefficients(theta, lam, printed: bool = False) -> tuple:
    """(d, d', e, f, g) for one round at sharpness ``lam``.

    ``printed=True`` reuses d for the primed block. That variant is wrong
    and exists only so the oracle has a defect to catch.
    """
    a = np.sqrt(1.0 - np.asarray(lam, dtype=float) ** 2)
    c4 = np.cos(4.0 * np.asarray(theta, dtype=float))
    s4 = np.sin(4.0 * np.asarray(theta, dtype=float))
    d = (1.0 + a) / 2.0 + (1.0 - a) / 4.0 * (1.0 + c4)
    dp = d if printed else (1.0 + a) / 2.0 - (1.0 - a) / 4.0 * (1.0 + c4)
    e = (1.0 - a) / 4.0 * s4
    f = lam * (1.0 - a) / 4.0 * (1.0 - c4)
    g = lam * (1.0 - a) / 4.0 * s4
    return d, dp, e, f, g


def r_step(state: RState, lambda_next, printed: bool = False) -> RState:
    _check_lambdas(lambda_next)
    d, dp, e, f, g = step_coefficients(state.theta, lambda_next, printed)
    r1, r2, r3, r4 = state.r
    p1, p2, p3, p4 = state.r_prime
    nr = np.array([
        d * r1 + e * p3 + f * r2 - g * p4,
        d * r2 + e * p4 + f * r1 - g * p3,
        d * r3 + e * p1 + f * r4 - g * p2,
        d * r4 + e * p2 + f * r3 - g * p1,
    ])
    npr = np.array([
        dp * p1 + e * r3 - f * p2 - g * r4,
        dp * p2 + e * r4 - f * p1 - g * r3,
        dp * p3 + e * r1 - f * p4 - g * r2,
        dp * p4 + e * r2 - f * p3 - g * r1,
    ])
    lam_t = lambda_next if np.ndim(lambda_next) else float(lambda_next)
    return RState(r=nr, r_prime=npr, k=state.k + 1, theta=state.theta,
                  lambdas=state.lambdas + (lam_t,))


def r_state(theta, lambdas: Sequence, printed: bool = False) -> RState:
    """RState after applying every sharpness in ``lambdas`` in order."""
    st = RState.initial(theta)
    for lam in lambdas:
        st = r_step(st, lam, printed)
    return st


def initial_correlators(rho) -> np.ndarray:
    """(⟨σ3σ3⟩, ⟨Iσ3⟩, ⟨σ3σ1⟩, ⟨Iσ1⟩) of ``rho``."""
    return np.array([linalg.expectation(op, rho) for op in CORRELATOR_OPS])


def correlators_via_r(initial, state: RState) -> np.ndarray:
    """Correlators after ``state.k`` rounds as linear combinations of ``initial``.

    ``initial`` is either the four values (ZZ, IZ, ZX, IX) or a full 4x4
    Pauli table T[p, q] with σ_0 = I, σ_1 = X, σ_3 = Z.
    """
    init = np.asarray(initial, dtype=float)
    if init.shape == (4, 4):
        init = np.array([init[3, 3], init[0, 3], init[3, 1], init[0, 1]])
    if init.shape[:1] != (4,):
        raise AnalysisError("initial correlators must be four values or a 4x4 table")
    zz, iz, zx, ix = init
    r1, r2, r3, r4 = state.r
    p1, p2, p3, p4 = state.r_prime
    return np.array([
        r1 * zz + r2 * iz + r3 * zx + r4 * ix,
        r2 * zz + r1 * iz + r4 * zx + r3 * ix,
        p1 * zx + p2 * ix + p3 * zz + p4 * iz,
        p2 * zx + p1 * ix + p4 * zz + p3 * iz,
    ])


SIGN_TABLE_HIGH = {
    # θ ∈ (π/4, π/2]
    "R1+R2>0": lambda r, p: r[0] + r[1] > 0,
    "R1-R2>0": lambda r, p: r[0] - r[1] > 0,
    "R3-R4<0": lambda r, p: r[2] - r[3] < 0,
    "R'1-R'2>0": lambda r, p: p[0] - p[1] > 0,
    "R'3+R'4<0": lambda r, p: p[2] + p[3] < 0,
    "R'3-R'4<0": lambda r, p: p[2] - p[3] < 0,
}
SIGN_TABLE_LOW = {
    # θ ∈ (0, π/4]
    "R1+R2>0": lambda r, p: r[0] + r[1] > 0,
    "R1-R2>0": lambda r, p: r[0] - r[1] > 0,
    "R3-R4>0": lambda r, p: r[2] - r[3] > 0,
    "R'1-R'2>0": lambda r, p: p[0] - p[1] > 0,
    "R'3+R'4>0": lambda r, p: p[2] + p[3] > 0,
    "R'3-R'4>0": lambda r, p: p[2] - p[3] > 0,
}


def sign_table(state: RState) -> dict:
    """Which sign claims hold for a k >= 1 state with scalar θ."""
    if state.k < 1:
        raise AnalysisError("sign claims apply from the first round on")
    theta = float(state.theta)
    _check_theta(theta)
    table = SIGN_TABLE_HIGH if theta > math.pi / 4 else SIGN_TABLE_LOW
    return {name: bool(test(state.r, state.r_prime)) for name, test in table.items()}


@dataclass(frozen=True)
class QBreakdown:
    terms: tuple  # (A, B, C, D, E, F)
    q: float
    k: int
    b: int

    @property
    def labels(self) -> tuple:
        return ("A", "B", "C", "D", "E", "F")


def q_terms(mu, theta, lam, prev: RState) -> tuple:
    """The six terms from the R state one round before sharpness ``lam``."""
    c, s = np.cos(2.0 * np.asarray(theta)), np.sin(2.0 * np.asarray(theta))
    r1, r2, r3, r4 = prev.r
    p1, p2, p3, p4 = prev.r_prime
    w_plus = 1.0 + lam + (1.0 - lam) * c
    w_minus = 1.0 - lam + (1.0 + lam) * c
    a_t = lam * mu / 4.0 * (r1 + r2) * w_plus
    b_t = lam * (1.0 - lam) * mu / 4.0 * s * (p3 + p4)
    c_t = lam / 4.0 * s * (1.0 - mu) * (r3 - r4) * w_minus
    d_t = lam / 4.0 * s * s * (1.0 - mu) * (1.0 + lam) * (p1 - p2)
    e_t = lam / 4.0 * c * (1.0 - mu) * (r1 - r2) * w_minus
    f_t = lam / 4.0 * s * c * (1.0 - mu) * (1.0 + lam) * (p3 - p4)
    return a_t, b_t, c_t, d_t, e_t, f_t


def q_breakdown(k: int, b: int, mu_b: float, theta: float, lambdas: Sequence[float],
                printed: bool = False) -> QBreakdown:
    """Six-term split of Q_k^b, the excess of round-k success over ½ carried by state b.

    The success probability at round k is ½ + SUCCESS_SCALE · (Q_k^1 + Q_k^2).
    """
    if k < 1:
        raise AnalysisError("k must be at least 1")
    if b not in (1, 2):
        raise AnalysisError("b must be 1 or 2")
    if not 0.0 < mu_b < 1.0:
        raise AnalysisError(f"mu must lie in (0, 1), got {mu_b}")
    _check_theta(theta)
    if len(lambdas) < k:
        raise AnalysisError(f"need {k} sharpness values, got {len(lambdas)}")
    _check_lambdas(lambdas[:k])
    prev = r_state(theta, lambdas[: k - 1], printed)
    terms = tuple(float(t) for t in q_terms(mu_b, theta, lambdas[k - 1], prev))
    return QBreakdown(terms=terms, q=math.fsum(terms), k=k, b=b)


def success_via_q(mu1: float, mu2: float, theta: float, lambdas: Sequence[float], k: int,
                  scale: float = SUCCESS_SCALE) -> float:
    q1 = q_breakdown(k, 1, mu1, theta, lambdas).q
    q2 = q_breakdown(k, 2, mu2, theta, lambdas).q
    return 0.5 + scale * (q1 + q2)


def calibrate_success_scale(mu1: float = 0.5, mu2: float = 0.5, theta: float = math.pi / 4,
                            lam: float = 0.5) -> float:
    """Measure the Q-to-success constant from one brute-force round."""
    from .protocol import success_probability
    from .measurement import unsharp_general_povm
    from .states import GeneralFamilyParams, general_pair

    rho1, rho2 = general_pair(GeneralFamilyParams(mu1, mu2, theta))
    brute = success_probability(rho1, rho2, unsharp_general_povm(theta, lam))
    total = q_breakdown(1, 1, mu1, theta, [lam]).q + q_breakdown(1, 2, mu2, theta, [lam]).q
    if abs(total) < 1e-12:
        raise AnalysisError("calibration point has vanishing Q; pick another")
    return (brute - 0.5) / total


# Scan functions.  ``prev`` holds the R state after rounds 1..k-1 and ``lam``
# is λ_k; the two share a broadcast shape with θ.

def f_function(theta, lam, prev: RState):
    c, s = np.cos(2.0 * theta), np.sin(2.0 * theta)
    r, p = prev.r, prev.r_prime
    return (r[0] + r[1]) * (1.0 + lam + (1.0 - lam) * c) + (1.0 - lam) * s * (p[2] + p[3])


def g_function(theta, lam, prev: RState):
    c, s = np.cos(2.0 * theta), np.sin(2.0 * theta)
    r, p = prev.r, prev.r_prime
    return (r[2] - r[3]) * (1.0 - lam + (1.0 + lam) * c) + (1.0 + lam) * s * (p[0] - p[1])


def t_function(theta, lam, prev: RState):
    c, s = np.cos(2.0 * theta), np.sin(2.0 * theta)
    r, p = prev.r, prev.r_prime
    return c * ((r[0] - r[1]) * (1.0 - lam + (1.0 + lam) * c) + (1.0 + lam) * s * (p[2] - p[3]))


def s_function(theta, lam, prev: RState):
    return t_function(theta, lam, prev) + np.sin(2.0 * theta) * g_function(theta, lam, prev)


def h_value(lambda_k, lambda_km1, theta):
    """Closed small-λ positivity expression in (λ_k, λ_{k-1}, θ)."""
    l3 = np.asarray(lambda_k, dtype=float)
    l2 = np.asarray(lambda_km1, dtype=float)
    theta = np.asarray(theta, dtype=float)
    _check_lambdas(l3)
    _check_lambdas(l2)
    _check_theta(theta, math.pi / 4)
    a2, a3 = np.sqrt(1.0 - l2 ** 2), np.sqrt(1.0 - l3 ** 2)
    c2, s2 = np.cos(2.0 * theta), np.sin(2.0 * theta)
    c4, s4 = np.cos(4.0 * theta), np.sin(4.0 * theta)
    return (
        (-1.0 + l3 - (1.0 + l3) * c2)
        * (1.0 + a2 + 0.5 * (-1.0 - a2) + 0.25 * (1.0 - a2) * (1.0 - l2 + (1.0 + l2) * c4))
        - 0.25 * (1.0 + l3) * (1.0 + l2) * (1.0 - a2) * s2 * s4
        + (1.0 / (1.0 + l2)) * np.abs(1.0 - l2 + (1.0 + l2) * c2) / s2
        * (
            (1.0 + l3) * (0.5 * (1.0 + a3) - 0.25 * (1.0 - a2) * (1.0 - l2 + (1.0 + l2) * c4)) * s2
            + 0.25 * (1.0 + l2) * (1.0 - a2) * (1.0 - l3 + (1.0 + l3) * c2) * s4
        )
    )


def h_value_terms(lambda_k: float, lambda_km1: float, theta: float) -> float:
    """Scalar h accumulated term by term, as an independent check on :func:`h_value`."""
    _check_lambdas([lambda_k, lambda_km1])
    _check_theta(theta, math.pi / 4)
    l3, l2 = float(lambda_k), float(lambda_km1)
    a2 = math.sqrt(1.0 - l2 * l2)
    a3 = math.sqrt(1.0 - l3 * l3)
    csc2 = 1.0 / math.sin(2.0 * theta)
    cos2, sin2 = math.cos(2.0 * theta), math.sin(2.0 * theta)
    cos4, sin4 = math.cos(4.0 * theta), math.sin(4.0 * theta)
    mix2 = 1.0 - l2 + (1.0 + l2) * cos4
    parts = []
    # -(1 - λ3 + (1 + λ3) cos2θ) * ((1 + α2)/2 + (1 - α2)/4 * mix2)
    lead = (1.0 + a2) / 2.0 + (1.0 - a2) / 4.0 * mix2
    parts.append(-(1.0 - l3 + (1.0 + l3) * cos2) * lead)
    parts.append(-(1.0 + l3) * (1.0 + l2) * (1.0 - a2) * sin2 * sin4 / 4.0)
    weight = abs(1.0 - l2 + (1.0 + l2) * cos2) * csc2 / (1.0 + l2)
    parts.append(weight * (1.0 + l3) * ((1.0 + a3) / 2.0 - (1.0 - a2) * mix2 / 4.0) * sin2)
    parts.append(weight * (1.0 + l2) * (1.0 - a2) * (1.0 - l3 + (1.0 + l3) * cos2) * sin4 / 4.0)
    return math.fsum(parts)


def _pqxryzw(theta, lam):
    """Auxiliary p, q, X, r, Y, W, Z at one sharpness."""
    lam = np.asarray(lam, dtype=float)
    c2, s2 = np.cos(2.0 * theta), np.sin(2.0 * theta)
    c4 = np.cos(4.0 * theta)
    alpha = np.sqrt(1.0 - lam ** 2)
    p = c2 * (1.0 - lam + (1.0 + lam) * c2)
    q = (1.0 + lam) * s2 * c2
    x = (1.0 - alpha) * (1.0 + lam) / 4.0
    shift = lam * (1.0 - alpha) / 4.0 * (1.0 - c4)
    r = (1.0 + alpha) / 2.0 + (1.0 - alpha) / 4.0 * (1.0 + c4) - shift
    y = (1.0 + alpha) / 2.0 - (1.0 - alpha) / 4.0 * (1.0 + c4) - shift
    w = (1.0 + lam) * s2 ** 2
    z = s2 * (1.0 - lam + (1.0 + lam) * c2)
    return p, q, x, r, y, w, z


def a_bound(lambda_k, lambda_km1, theta):
    """Coefficient multiplying R'_1 - R'_2 in the lower bound on E + F."""
    pk, _, xk, rk, yk, wk, zk = _pqxryzw(theta, lambda_k)
    _, _, xm, rm, ym, wm, zm = _pqxryzw(theta, lambda_km1)
    return np.sign(pk * rm) * wm + zm * xk + wm * yk


def c_bound(lambda_k, lambda_km1, theta):
    """Coefficient multiplying R'_3 - R'_4 in the lower bound on E + F."""
    pk, _, xk, rk, yk, wk, zk = _pqxryzw(theta, lambda_k)
    _, _, xm, rm, ym, wm, zm = _pqxryzw(theta, lambda_km1)
    return np.sign(pk * rm) * zm + zm * rk + xm * wk


@dataclass
class ScanGrid:
    function_id: str
    k_context: int
    axes: dict  # name -> 1-D array, in evaluation order
    values: np.ndarray
    params: dict = field(default_factory=dict)

    def summary(self) -> dict:
        v = self.values
        out = {
            "min": float(v.min()),
            "max": float(v.max()),
            "n_cells": int(v.size),
            "n_negative": int(np.count_nonzero(v < 0)),
            "n_positive": int(np.count_nonzero(v > 0)),
            "sign_change_cells": int(self._sign_changes()),
        }
        if self.function_id == "h":
            # positivity is claimed only where λ_k > λ_{k-1}
            mask = self._increasing_mask()
            if np.any(mask):
                out["min_increasing"] = float(v[mask].min())
        return out

    def _sign_changes(self) -> int:
        sign = np.sign(self.values)
        total = 0
        for ax in range(sign.ndim):
            a = np.swapaxes(sign, 0, ax)
            total += int(np.count_nonzero(a[1:] * a[:-1] < 0))
        return total

    def _increasing_mask(self) -> np.ndarray:
        names = list(self.axes)
        prev = self.axes[names[1]][None, :, None]
        cur = self.axes[names[2]][None, None, :]
        return np.broadcast_to(cur > prev, self.values.shape)

    def nearest(self, target: float) -> float:
        """Smallest |value - target| over the grid."""
        return float(np.min(np.abs(self.values - target)))

    def rows(self):
        names = list(self.axes)
        mesh = np.meshgrid(*[self.axes[n] for n in names], indexing="ij")
        flat = [m.ravel() for m in mesh]
        vals = self.values.ravel()
        for i in range(vals.size):
            yield tuple(float(col[i]) for col in flat) + (float(vals[i]),)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(self.axes) + [self.function_id])
        for row in self.rows():
            w.writerow([format_float(x) for x in row])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "schema": 1,
            "config": {"function": self.function_id, "k": self.k_context, **self.params},
            "axes": {n: [float(x) for x in a] for n, a in self.axes.items()},
            "values": [float(x) for x in self.values.ravel()],
            "summary": self.summary(),
        }
        return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise AnalysisError(f"non-finite value {x!r} in output")
    return f"{x:.17g}"


def default_axis(kind: str, points: int = SCAN_POINTS, delta: float = SCAN_DELTA) -> np.ndarray:
    """Inset sample of the open scan domain: θ over (π/4, π/2), λ over (0, 1)."""
    if points < 2:
        raise AnalysisError("an axis needs at least 2 points")
    if kind == "theta":
        return np.linspace(math.pi / 4 + delta, math.pi / 2 - delta, points)
    return np.linspace(delta, 1.0 - delta, points)


def _check_axis(name: str, arr: np.ndarray) -> None:
    if arr.ndim != 1 or arr.size == 0 or not np.all(np.isfinite(arr)):
        raise AnalysisError(f"axis {name} must be a non-empty finite 1-D array")
    if name == "theta":
        if arr.min() <= math.pi / 4 or arr.max() > math.pi / 2:
            raise AnalysisError("theta axis must lie in (pi/4, pi/2]")
    elif arr.min() <= 0.0 or arr.max() >= 1.0:
        raise AnalysisError(f"axis {name} must lie in (0, 1)")


def scan_function(function_id: str, k_context: int = 2, axes: Optional[dict] = None,
                  points: int = SCAN_POINTS, prefix: Sequence[float] = (), mu: float = 0.5,
                  printed: bool = False) -> ScanGrid:
    """Evaluate a scan function over a (θ, λ_{k-1}, λ_k) grid.

    For f, g, t, s and Q the R state is built from ``prefix`` (λ_1..λ_{k-2},
    held fixed) followed by the λ_{k-1} axis; λ_k is the last axis.  At
    k = 1 there is no λ_{k-1} axis.  ``h`` always uses the (θ, λ_{k-1}, λ_k)
    grid and ignores ``prefix``.  Axis names are ``theta``, ``lambda<k-1>``
    and ``lambda<k>``.
    """
    if function_id not in FUNCTION_IDS:
        raise AnalysisError(f"unknown function {function_id!r}; choose from {FUNCTION_IDS}")
    if k_context < 1:
        raise AnalysisError("k must be at least 1")
    if function_id == "h" and k_context < 2:
        raise AnalysisError("h compares two consecutive rounds; use k >= 2")
    prefix = tuple(float(x) for x in prefix)
    if function_id != "h" and len(prefix) != max(k_context - 2, 0):
        raise AnalysisError(f"k = {k_context} needs {max(k_context - 2, 0)} fixed prefix values")
    _check_lambdas(prefix)
    if function_id == "Q" and not 0.0 < mu < 1.0:
        raise AnalysisError("mu must lie in (0, 1)")

    names = ["theta"] + ([f"lambda{k_context - 1}"] if k_context >= 2 else []) + [f"lambda{k_context}"]
    axes = dict(axes or {})
    unknown = set(axes) - set(names)
    if unknown:
        raise AnalysisError(f"unknown axes {sorted(unknown)}; expected {names}")
    grid_axes = {}
    for n in names:
        arr = np.asarray(axes[n], dtype=float) if n in axes else default_axis(
            "theta" if n == "theta" else "lambda", points)
        _check_axis(n, arr)
        grid_axes[n] = arr

    mesh = np.meshgrid(*grid_axes.values(), indexing="ij", sparse=True)
    theta, lam = mesh[0], mesh[-1]
    if function_id == "h":
        values = h_value(lam, mesh[1], theta)
    else:
        steps = list(prefix) + ([mesh[1]] if k_context >= 2 else [])
        prev = r_state(theta, steps, printed)
        if function_id == "Q":
            values = sum(q_terms(mu, theta, lam, prev))
        else:
            fn = {"f": f_function, "g": g_function, "t": t_function, "s": s_function}[function_id]
            values = fn(theta, lam, prev)
    shape = tuple(a.size for a in grid_axes.values())
    values = np.broadcast_to(values, shape).astype(float)
    if not np.all(np.isfinite(values)):
        raise AnalysisError("scan produced non-finite values")
    params = {"prefix": list(prefix)}
    if function_id == "Q":
        params["mu"] = mu
    return ScanGrid(function_id, k_context, grid_axes, values, params)


@dataclass(frozen=True)
class ScheduleReport:
    passed: bool
    rounds: int
    first_violation: Optional[str] = None
    violations: tuple = ()


def increasing_schedule_check(trace) -> ScheduleReport:
    """Check λ strictly increasing, success > ½ and both negativities > 0."""
    problems = []
    prev = None
    for rec in trace.records:
        if prev is not None and not rec.lam > prev:
            problems.append(f"round {rec.k}: lambda {rec.lam!r} not above {prev!r}")
        if not rec.success_prob > 0.5:
            problems.append(f"round {rec.k}: success {rec.success_prob!r} not above 1/2")
        for b, e in enumerate(rec.negativities, start=1):
            if not e > 0.0:
                problems.append(f"round {rec.k}: negativity of state {b} is {e!r}")
        prev = rec.lam
    return ScheduleReport(
        passed=not problems,
        rounds=len(trace.records),
        first_violation=problems[0] if problems else None,
        violations=tuple(problems),
    )
