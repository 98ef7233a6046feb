import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from complementarity import states
from complementarity.qcore import same_up_to_phase


def test_named_sources():
    assert np.allclose(states.phi_state().amplitudes, [0.5] * 4)
    assert np.allclose(states.bell_state().amplitudes, np.array([1, 0, 0, 1]) / np.sqrt(2))


def test_psi_theta_endpoints():
    # θ = π/2 collapses to |+>|+>, θ = -π/2 to the Bell-like (|0>|+> + |1>|->)/√2
    assert same_up_to_phase(states.psi_theta(np.pi / 2).amplitudes, states.phi_state().amplitudes, 1e-12)
    expected = np.array([1, 1, 1, -1]) / 2
    assert same_up_to_phase(states.psi_theta(-np.pi / 2).amplitudes, expected, 1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(-4, 4), st.floats(-4, 4))
def test_psi_pair_amplitudes(t1, t2):
    a = states.psi_pair(t1, t2).amplitudes * np.sqrt(2)
    assert np.allclose(a, [np.cos(t1 / 2), np.sin(t1 / 2), np.cos(t2 / 2), np.sin(t2 / 2)], atol=1e-14)


def test_complex_example_state_normalized():
    assert abs(np.linalg.norm(states.complex_example_state().amplitudes) - 1) < 1e-14


def test_w_state_places_coefficient_on_qubit_excitation():
    w = states.w_state([0.6, 0.0, 0.8])
    # qubit 1 excited: |100> = index 4; qubit 3 excited: |001> = index 1
    assert w.amplitudes[4] == pytest.approx(0.6)
    assert w.amplitudes[1] == pytest.approx(0.8)


def test_ghz_and_bipartite_layout():
    g = states.ghz_state(4, 0.6, 0.8)
    assert g.amplitudes[0] == pytest.approx(0.6) and g.amplitudes[15] == pytest.approx(0.8)
    b = states.bipartite_r_st(0.6, 0.8, r=2)  # qubits 1 and 3 entangled: |101> = 5
    assert b.amplitudes[5] == pytest.approx(0.8)


@pytest.mark.parametrize("call", [
    lambda: states.ghz_state(1, 1, 0),
    lambda: states.ghz_state(3, 1, 1),
    lambda: states.w_state([1.0]),
    lambda: states.bipartite_r_st(0.6, 0.8, r=4),
])
def test_state_constructor_errors(call):
    with pytest.raises(ValueError):
        call()
