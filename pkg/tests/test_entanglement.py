import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssdse import entanglement as ent
from ssdse import protocol
from ssdse.states import SpecialFamilyParams

from conftest import np_log_negativity, random_density, random_separable, seeds, unit_closed, unit_open

S2 = 1 / math.sqrt(2)


def proj(*amps):
    v = np.array(amps, dtype=complex)
    return np.outer(v, v.conj())


def schmidt_state(m):
    return proj(0, math.sqrt(m), math.sqrt(1 - m), 0)


def test_log_negativity_examples():
    assert ent.log_negativity(np.eye(4) / 4) == 0.0
    assert ent.log_negativity(proj(S2, 0, 0, S2)) == pytest.approx(1.0, abs=1e-12)
    r1, _ = protocol.special_closed_states(SpecialFamilyParams(0.5, 0.5), 0.36)
    assert ent.log_negativity(r1) == pytest.approx(math.log2(1.64), abs=1e-12)
    assert ent.log_negativity(r1) == pytest.approx(0.7137, abs=1e-4)


@given(seeds)
def test_log_negativity_against_numpy(seed):
    rho = random_density(np.random.default_rng(seed), rank=1 + seed % 4)
    assert ent.log_negativity(rho) == pytest.approx(np_log_negativity(rho), abs=1e-10)


def test_negativity_closed_examples():
    assert ent.negativity_special_closed(0.3, 1.0) == 0.0
    assert ent.negativity_special_closed(0.5, 0.0) == 1.0
    assert ent.negativity_special_closed(0.5, 0.5904) == pytest.approx(math.log2(1.4096), abs=1e-15)
    assert ent.negativity_special_closed(0.5, 0.5904) == pytest.approx(0.4953, abs=1e-4)


def test_negativity_closed_validation():
    with pytest.raises(ValueError):
        ent.negativity_special_closed(0.6, 0.1)
    with pytest.raises(ValueError):
        ent.negativity_special_closed(0.3, 1.1)


@given(unit_open, unit_closed)
def test_negativity_closed_matches_states(gamma, s_k):
    p = SpecialFamilyParams(gamma, 1 - gamma / 2)
    for rho, vt in zip(protocol.special_closed_states(p, s_k), p.varthetas):
        assert ent.log_negativity(rho) == pytest.approx(ent.negativity_special_closed(vt, s_k), abs=1e-10)


def test_witness_params_range():
    with pytest.raises(ValueError):
        ent.WitnessParams(1.5)
    with pytest.raises(ValueError):
        ent.WitnessParams(-0.1)


def test_witness_singlet_not_detected():
    singlet = proj(0, S2, -S2, 0)
    assert ent.witness_value(singlet, 1.0) == pytest.approx(0.25, abs=1e-15)


@given(st.floats(0.01, 0.5), st.floats(0.01, 1.0))
def test_witness_on_schmidt_form(m, g2):
    expect = -g2 * math.sqrt(m * (1 - m)) / 2
    assert ent.witness_value(schmidt_state(m), ent.WitnessParams(g2)) == pytest.approx(expect, abs=1e-14)


def test_witness_operator_matches_value(rng):
    rho = random_density(rng)
    w = ent.WitnessParams(0.4)
    assert np.trace(w.operator() @ rho).real == pytest.approx(ent.witness_value(rho, w), abs=1e-14)


@settings(max_examples=200)
@given(seeds, unit_closed)
def test_witness_never_fires_on_separable(seed, g2):
    rho = random_separable(np.random.default_rng(seed))
    assert ent.witness_value(rho, g2) >= -1e-12


@given(seeds)
def test_witness_soundness_on_random_states(seed):
    rho = random_density(np.random.default_rng(seed), rank=1 + seed % 3)
    for g2 in (0.2, 0.7, 1.0):
        if ent.witness_value(rho, g2) < 0:
            assert ent.log_negativity(rho) > 0


@pytest.mark.parametrize("m", [0.5, 0.1])
def test_threshold_schmidt_form_zero(m):
    assert ent.g2_threshold(schmidt_state(m)) == pytest.approx(0.0, abs=1e-15)


def test_threshold_infeasible_cases():
    assert ent.g2_threshold(np.eye(4) / 4) is None
    assert ent.g2_threshold(proj(0, S2, -S2, 0)) is None  # <YY> negative


def test_threshold_value_on_mixed_state():
    rho = 0.7 * schmidt_state(0.5) + 0.3 * np.eye(4) / 4
    # <ZZ> = -0.7, <YY> = 0.7
    assert ent.g2_threshold(rho) == pytest.approx(0.3 / 0.7, abs=1e-14)


def test_next_lambda_arithmetic():
    assert ent.lambda_from_threshold(ent.threshold_max(0.02, 0.03), 0.1) == pytest.approx(0.033)
    assert ent.lambda_from_threshold(ent.threshold_max(0.95, 0.99), 0.1) is None
    assert ent.lambda_from_threshold(ent.threshold_max(None, 0.5), 0.1) is None


def test_next_lambda_schmidt_round_zero():
    assert ent.next_lambda(schmidt_state(0.3), schmidt_state(0.5), 0.1) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        ent.next_lambda(schmidt_state(0.3), schmidt_state(0.5), 0.0)


def test_epsilon_bound_examples():
    assert ent.epsilon_feasible_bound(0.2, 0.2, 0.1) == pytest.approx(0.1)
    assert ent.epsilon_feasible_bound(0.2, 0.4, 0.1) == pytest.approx(-0.45)
    with pytest.raises(ValueError):
        ent.epsilon_feasible_bound(0.2, 0.0, 0.1)


@given(st.floats(1e-4, 0.5), st.floats(1e-4, 0.5), st.floats(1e-3, 1.0))
def test_epsilon_rule_keeps_lambda_increasing(t_k, t_k1, eps_k):
    rule = ent.EpsilonRule(margin=0.01)
    eps = rule.next(t_k, t_k1, eps_k)
    assert eps > ent.epsilon_feasible_bound(t_k, t_k1, eps_k)
    assert eps > 0
    assert (1 + eps) * t_k1 > (1 + eps_k) * t_k


def test_epsilon_rule_validation():
    with pytest.raises(ValueError):
        ent.EpsilonRule(epsilon0=0.0)
    with pytest.raises(ValueError):
        ent.EpsilonRule(margin=-1.0)
