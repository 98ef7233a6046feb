import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from complementarity.qcore import (
    SX,
    BlochVector,
    DensityMatrix,
    PureState,
    UnitaryOperator,
    apply_unitary,
    bloch_vector,
    embed,
    partial_trace,
    purity,
    random_mixed_state,
    random_pure_state,
    random_unitary,
    same_up_to_phase,
    tensor,
)
from complementarity import states

import oracles

seeds = st.integers(min_value=0, max_value=2**32 - 1)


# ---------------------------------------------------------------- value types

def test_pure_state_rejects_unnormalized():
    with pytest.raises(ValueError):
        PureState(np.array([1.0, 1.0]))


def test_pure_state_rejects_bad_length():
    with pytest.raises(ValueError):
        PureState(np.array([1.0, 0.0, 0.0]))


def test_pure_state_is_immutable():
    s = PureState.basis("01")
    with pytest.raises(ValueError):
        s.amplitudes[0] = 1


def test_density_matrix_validation():
    with pytest.raises(ValueError, match="Hermitian"):
        DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]))
    with pytest.raises(ValueError, match="trace"):
        DensityMatrix(np.eye(2))
    with pytest.raises(ValueError, match="semidefinite"):
        DensityMatrix(np.diag([1.5, -0.5]))


def test_unitary_validation():
    with pytest.raises(ValueError):
        UnitaryOperator(np.array([[1, 1], [0, 1]]))


def test_bloch_vector_too_long():
    with pytest.raises(ValueError):
        BlochVector(1.0, 0.5, 0.0)


# ---------------------------------------------------------------- tensor

def test_tensor_basis_states():
    out = tensor(PureState.basis("0"), PureState.basis("1"))
    assert np.array_equal(out.amplitudes, [0, 1, 0, 0])


def test_tensor_plus_plus_is_phi():
    assert np.allclose(tensor(states.plus(), states.plus()).amplitudes, [0.5] * 4, atol=1e-15)


def test_tensor_identity():
    eye = UnitaryOperator.identity(2)
    assert np.array_equal(tensor(eye, eye).matrix, np.eye(4))


def test_tensor_mixed_kinds_rejected():
    with pytest.raises(TypeError):
        tensor(PureState.basis("0"), UnitaryOperator.identity(2))


# ---------------------------------------------------------------- apply / embed

def test_sigma_x_on_qubit_two():
    out = apply_unitary(PureState.basis("00"), SX, [2])
    assert np.array_equal(out.amplitudes, PureState.basis("01").amplitudes)


def test_transducer_maps_plus_to_zero():
    u = oracles.transducer_oracle(0.0)
    out = apply_unitary(states.plus(), u, [1])
    assert same_up_to_phase(out.amplitudes, [1, 0], 1e-12)


def test_apply_rejects_duplicates_and_mismatch():
    psi = PureState.basis("000")
    with pytest.raises(ValueError, match="duplicate"):
        apply_unitary(psi, np.eye(4), [1, 1])
    with pytest.raises(ValueError):
        apply_unitary(psi, np.eye(4), [1])
    with pytest.raises(ValueError):
        apply_unitary(psi, np.eye(2), [4])


@pytest.mark.parametrize("targets", [[1], [3], [2, 1], [1, 3], [3, 1], [2, 3, 1]])
def test_embed_matches_swap_oracle(targets):
    rng = np.random.default_rng(len(targets) * 7 + targets[0])
    u = random_unitary(2 ** len(targets), rng).matrix
    assert np.allclose(embed(u, targets, 3).matrix, oracles.embed_oracle(u, targets, 3), atol=1e-13)


def test_apply_on_density_matrix_matches_pure():
    rng = np.random.default_rng(3)
    psi = random_pure_state(3, 11)
    u = random_unitary(4, rng)
    pure = apply_unitary(psi, u, [3, 1])
    mixed = apply_unitary(psi.density_matrix(), u, [3, 1])
    assert np.allclose(mixed.matrix, pure.density_matrix().matrix, atol=1e-13)


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 4))
def test_norm_preserved(seed, n):
    rng = np.random.default_rng(seed)
    psi = random_pure_state(n, rng)
    k = int(rng.integers(1, n + 1))
    targets = list(rng.permutation(np.arange(1, n + 1))[:k])
    out = apply_unitary(psi, random_unitary(2**k, rng), targets)
    assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-12


# ---------------------------------------------------------------- partial trace

def test_bell_marginal_is_maximally_mixed():
    assert np.allclose(partial_trace(states.bell_state(), [1]).matrix, np.eye(2) / 2, atol=1e-15)


def test_trace_out_first_of_01():
    assert np.allclose(partial_trace(PureState.basis("01"), [2]).matrix, [[0, 0], [0, 1]])


def test_w_marginal():
    w = states.w_state([1 / np.sqrt(3)] * 3)
    rho = partial_trace(w, [1]).matrix
    assert np.allclose(rho, np.diag([2 / 3, 1 / 3]), atol=1e-15)


def test_partial_trace_empty_keep():
    with pytest.raises(ValueError):
        partial_trace(PureState.basis("00"), [])


@pytest.mark.parametrize("keep", [[1], [2], [3], [1, 3], [2, 3], [1, 2]])
def test_partial_trace_matches_loop_oracle(keep):
    rho = random_mixed_state(3, 5)
    assert np.allclose(partial_trace(rho, keep).matrix,
                       oracles.partial_trace_oracle(rho.matrix, keep, 3), atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 5))
def test_complementary_marginals_share_spectrum(seed, n):
    rng = np.random.default_rng(seed)
    psi = random_pure_state(n, rng)
    cut = int(rng.integers(1, n))
    a = np.sort(partial_trace(psi, range(1, cut + 1)).eigenvalues())
    b = np.sort(partial_trace(psi, range(cut + 1, n + 1)).eigenvalues())
    m = min(a.size, b.size)
    assert np.allclose(a[-m:], b[-m:], atol=1e-10)


# ---------------------------------------------------------------- Bloch / purity

@pytest.mark.parametrize("rho, expected", [
    (np.diag([1, 0]), (0, 0, 1)),
    (np.eye(2) / 2, (0, 0, 0)),
    (np.full((2, 2), 0.5), (1, 0, 0)),
])
def test_bloch_vector_examples(rho, expected):
    assert np.allclose(bloch_vector(DensityMatrix(rho)).to_array(), expected, atol=1e-15)


def test_bloch_needs_one_qubit():
    with pytest.raises(ValueError):
        bloch_vector(PureState.basis("00"))


@settings(max_examples=100, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_bloch_round_trip(x, y, z):
    norm = np.sqrt(x * x + y * y + z * z)
    if norm > 1:
        x, y, z = x / norm, y / norm, z / norm
    v = BlochVector(x, y, z)
    assert np.allclose(bloch_vector(v.density_matrix()).to_array(), v.to_array(), atol=1e-12)


@pytest.mark.parametrize("rho, expected", [
    (np.diag([1, 0]), 1.0), (np.eye(2) / 2, 0.5), (np.diag([2 / 3, 1 / 3]), 5 / 9)])
def test_purity_examples(rho, expected):
    assert purity(DensityMatrix(rho)) == pytest.approx(expected, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 3))
def test_purity_bounds(seed, n):
    p = purity(random_mixed_state(n, seed))
    assert 1 / 2**n - 1e-10 <= p <= 1 + 1e-10


@settings(max_examples=40, deadline=None)
@given(seeds, st.floats(0, 2 * np.pi))
def test_symmetric_transducer_bloch_map(seed, phi):
    psi = random_pure_state(1, seed)
    s = bloch_vector(psi).to_array()
    out = bloch_vector(apply_unitary(psi, oracles.transducer_oracle(phi), [1])).to_array()
    expected = (-s[2], s[0] * np.sin(phi) + s[1] * np.cos(phi), s[0] * np.cos(phi) - s[1] * np.sin(phi))
    assert np.allclose(out, expected, atol=1e-10)


# ---------------------------------------------------------------- random states

def test_random_state_determinism_and_norm():
    a, b = random_pure_state(3, 42), random_pure_state(3, 42)
    assert np.array_equal(a.amplitudes, b.amplitudes)
    assert abs(np.linalg.norm(random_pure_state(1, 7).amplitudes) - 1) < 1e-12


def test_random_state_rejects_zero_qubits():
    with pytest.raises(ValueError):
        random_pure_state(0, 1)


def test_random_mixed_state_is_mixed():
    rho = random_mixed_state(2, 3)
    assert rho.n_qubits == 2 and purity(rho) < 1 - 1e-3
