"""Tests for shared state types, parameter records, and constants."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gravsim.core import (
    DEFAULT_G,
    DEFAULT_K_EFF,
    HBAR,
    RB87_MASS,
    PhysicalConstants,
    PulseParams,
    SequenceParams,
    ThreeLevelState,
    TwoLevelState,
    state_probability,
)
from gravsim.errors import InvalidSequenceError, InvalidStateError


def test_constant_values():
    # [TRIVIAL] pinned default constants
    assert HBAR == 1.054571817e-34
    assert DEFAULT_G == 9.81
    assert RB87_MASS == 1.443e-25
    assert DEFAULT_K_EFF == 1.610e7


def test_physical_constants_defaults_and_validation():
    c = PhysicalConstants()
    assert c.hbar == HBAR
    assert c.default_g == DEFAULT_G
    assert c.atom_mass == RB87_MASS
    with pytest.raises(ValueError):
        PhysicalConstants(hbar=-1.0)
    with pytest.raises(ValueError):
        PhysicalConstants(atom_mass=0.0)


def test_two_level_state_builders():
    g = TwoLevelState.ground()
    e = TwoLevelState.excited()
    assert g.c_a == 1.0 and g.c_b == 0.0
    assert e.c_a == 0.0 and e.c_b == 1.0


def test_two_level_state_rejects_unnormalized():
    with pytest.raises(InvalidStateError):
        TwoLevelState(c_a=1.0, c_b=1.0)
    with pytest.raises(InvalidStateError):
        TwoLevelState(c_a=0.5, c_b=0.5)


def test_three_level_state_norm_and_momentum():
    s = ThreeLevelState.ground(p=1.2e-27)
    assert s.c_g == 1.0 and s.c_i == 0.0 and s.c_e == 0.0
    assert s.p == 1.2e-27
    with pytest.raises(InvalidStateError):
        ThreeLevelState(c_g=1.0, c_i=1.0, c_e=0.0)


def test_pulse_params_validation_and_properties():
    with pytest.raises(ValueError):
        PulseParams(rabi_mod=-1.0, detuning=0.0, duration=1.0)
    with pytest.raises(ValueError):
        PulseParams(rabi_mod=1.0, detuning=0.0, duration=0.0)
    p = PulseParams(
        rabi_mod=2.0, detuning=0.0, duration=1.0, rabi_arg=math.pi / 2, laser_phase=0.3
    )
    assert p.rabi == pytest.approx(2.0j)
    # A complex drive amplitude acts as a shift of the laser phase.
    assert p.effective_phase == pytest.approx(0.3 - math.pi / 2)


def test_sequence_params_validation_and_derived():
    with pytest.raises(InvalidSequenceError):
        SequenceParams(t_interrogation=-0.1, tau_p=1e-5)
    with pytest.raises(InvalidSequenceError):
        SequenceParams(t_interrogation=0.1, tau_p=0.0)
    seq = SequenceParams(t_interrogation=0.1, tau_p=1e-5, phases=(0.1, 0.2, 0.7))
    # [TRIVIAL] phi_1 - 2 phi_2 + phi_3
    assert seq.dphi_laser == pytest.approx(0.1 - 0.4 + 0.7)
    assert seq.span == pytest.approx(0.2 + 2e-5)


def test_state_probability_two_level_labels():
    # [PAPER] a state with amplitude sqrt(1/10) on the excited level is found
    # excited in 10% of measurements
    s = TwoLevelState(c_a=math.sqrt(9.0 / 10.0), c_b=math.sqrt(1.0 / 10.0))
    assert state_probability(s, "b") == pytest.approx(0.1, abs=1e-12)
    assert state_probability(s, "a") == pytest.approx(0.9, abs=1e-12)


def test_state_probability_equal_moduli_phases_ignored():
    # [PAPER] amplitudes (1+i)/2 and (1-i)/2 both give probability 1/2
    s = TwoLevelState(c_a=0.5 + 0.5j, c_b=0.5 - 0.5j)
    assert state_probability(s, "a") == pytest.approx(0.5, abs=1e-12)
    assert state_probability(s, "b") == pytest.approx(0.5, abs=1e-12)


def test_state_probability_three_level_and_errors():
    s = ThreeLevelState(c_g=0.6, c_i=0.0, c_e=0.8)
    assert state_probability(s, "g") == pytest.approx(0.36)
    assert state_probability(s, "e") == pytest.approx(0.64)
    assert state_probability(s, "i") == 0.0
    with pytest.raises(ValueError):
        state_probability(s, "x")
    with pytest.raises(TypeError):
        state_probability(object(), "a")  # type: ignore[arg-type]


@st.composite
def normalized_two_level(draw):
    parts = [
        draw(st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False))
        for _ in range(4)
    ]
    c_a = complex(parts[0], parts[1])
    c_b = complex(parts[2], parts[3])
    norm = math.sqrt(abs(c_a) ** 2 + abs(c_b) ** 2)
    if norm < 1e-3:
        c_a, c_b, norm = 1.0 + 0.0j, 0.0j, 1.0
    return TwoLevelState(c_a=c_a / norm, c_b=c_b / norm)


@given(normalized_two_level())
def test_probabilities_sum_to_one(state):
    total = state_probability(state, "a") + state_probability(state, "b")
    assert total == pytest.approx(1.0, abs=1e-12)
