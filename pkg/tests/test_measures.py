import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from complementarity import measures as ms
from complementarity import states
from complementarity.qcore import (
    DensityMatrix,
    PureState,
    apply_unitary,
    mix,
    partial_trace,
    random_mixed_state,
    random_pure_state,
    random_unitary,
)

import oracles

seeds = st.integers(min_value=0, max_value=2**32 - 1)
SQ = 1 / math.sqrt(2)


# ---------------------------------------------------------------- single particle

def test_visibility_product_and_bell():
    assert ms.visibility_single(states.phi_state(), 1) == pytest.approx(1, abs=1e-15)
    assert ms.visibility_single(states.phi_state(), 2) == pytest.approx(1, abs=1e-15)
    assert ms.visibility_single(states.bell_state(), 1) == pytest.approx(0, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_visibility_matches_amplitude_form(seed):
    g = random_pure_state(2, seed).amplitudes
    psi = PureState(g)
    assert ms.visibility_single(psi, 1) == pytest.approx(
        2 * abs(g[0] * np.conj(g[2]) + g[1] * np.conj(g[3])), abs=1e-12)
    assert ms.visibility_single(psi, 2) == pytest.approx(
        2 * abs(g[0] * np.conj(g[1]) + g[2] * np.conj(g[3])), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_predictability_matches_amplitude_form(seed):
    g = np.abs(random_pure_state(2, seed).amplitudes) ** 2
    psi = random_pure_state(2, seed)
    assert ms.predictability(psi, 1) == pytest.approx(abs(g[0] + g[1] - g[2] - g[3]), abs=1e-12)
    assert ms.predictability(psi, 2) == pytest.approx(abs(g[0] - g[1] + g[2] - g[3]), abs=1e-12)


def test_predictability_examples():
    assert ms.predictability(states.product_state([0.0, 1.3]), 1) == pytest.approx(1)
    for theta in np.linspace(0, np.pi, 7):
        assert ms.predictability(states.phi_theta(theta), 2) == pytest.approx(abs(np.cos(theta)), abs=1e-12)


@pytest.mark.parametrize("k", [0, 3, 1.0])
def test_invalid_qubit_index(k):
    with pytest.raises(ValueError):
        ms.visibility_single(states.bell_state(), k)
    with pytest.raises(ValueError):
        ms.predictability(states.bell_state(), k)


def test_single_particle_character():
    prof = ms.single_particle_character(states.product_state([0.4, 2.0, 1.0]), 2)
    assert prof.character == pytest.approx(1, abs=1e-12)
    assert prof.character**2 == pytest.approx(prof.visibility**2 + prof.predictability**2, abs=1e-12)
    a1, a2 = 0.6, 0.8
    ghz = states.ghz_state(3, a1, a2)
    assert ms.single_particle_character(ghz, 1).character ** 2 == pytest.approx((a1**2 - a2**2) ** 2)


# ---------------------------------------------------------------- θ-pair family

TABLE_GRID = [(-np.pi / 4 + m * np.pi / 8, 3 * np.pi / 4 - m * np.pi / 8) for m in range(9)] + [
    (0.3, 1.2), (1.9, -0.4), (2.5, 0.1)]


@pytest.mark.parametrize("t1, t2", TABLE_GRID)
def test_theta_pair_closed_forms_closed_forms(t1, t2):
    psi = states.psi_pair(t1, t2)
    ref = oracles.theta_pair_closed_forms(t1, t2)
    got = {
        "C": ms.concurrence_pure(psi),
        "V1": ms.visibility_single(psi, 1), "V2": ms.visibility_single(psi, 2),
        "P1": ms.predictability(psi, 1), "P2": ms.predictability(psi, 2),
        "S1": ms.single_particle_character(psi, 1).character,
        "S2": ms.single_particle_character(psi, 2).character,
        "D1": ms.distinguishability(psi, 1).D, "D2": ms.distinguishability(psi, 2).D,
    }
    for key, value in ref.items():
        assert got[key] == pytest.approx(value, abs=1e-10), key


def test_cos_form_of_d1_violates_complementarity():
    # D1 = |cos((θ1-θ2)/2)| would give D1² + V1² = 2cos² ≠ 1; the sin form is the consistent one
    t1, t2 = 0.3, 1.2
    v1 = abs(np.cos((t1 - t2) / 2))
    assert abs(v1**2 + v1**2 - 1) > 0.1
    psi = states.psi_pair(t1, t2)
    assert ms.distinguishability(psi, 1).D ** 2 + v1**2 == pytest.approx(1, abs=1e-12)


# ---------------------------------------------------------------- concurrence

def test_concurrence_pure_examples():
    assert ms.concurrence_pure(states.bell_state()) == pytest.approx(1, abs=1e-15)
    assert ms.concurrence_pure(states.phi_state()) == pytest.approx(0, abs=1e-15)
    assert ms.concurrence_pure(states.complex_example_state()) == pytest.approx(0.2110, abs=5e-4)


def test_concurrence_pure_rejects_other_sizes():
    with pytest.raises(ValueError):
        ms.concurrence_pure(states.plus())
    with pytest.raises(ValueError):
        ms.concurrence_pure(states.ghz_state(3, SQ, SQ))


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_concurrence_pure_closed_form(seed):
    g = random_pure_state(2, seed).amplitudes
    assert ms.concurrence_pure(PureState(g)) == pytest.approx(2 * abs(g[0] * g[3] - g[1] * g[2]), abs=1e-12)


def test_concurrence_mixed_examples():
    assert ms.concurrence_mixed(states.bell_state().density_matrix()) == pytest.approx(1, abs=1e-9)
    assert ms.concurrence_mixed(DensityMatrix.maximally_mixed(2)) == pytest.approx(0, abs=1e-12)
    w = states.w_state([1 / math.sqrt(3)] * 3)
    rho12 = partial_trace(w, [1, 2])
    assert ms.concurrence_mixed(rho12) == pytest.approx(2 / 3, abs=1e-12)
    assert oracles.wootters_oracle(rho12.matrix) == pytest.approx(2 / 3, abs=1e-9)


def test_werner_threshold():
    # p|Ψ><Ψ| + (1-p) 1/4 has C = max(0, (3p-1)/2)
    for p in (0.2, 1 / 3, 0.5, 0.9):
        rho = mix([states.bell_state(), DensityMatrix.maximally_mixed(2)], [p, 1 - p])
        assert ms.concurrence_mixed(rho) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_concurrence_mixed_matches_eigen_oracle(seed):
    # the oracle takes square roots of near-zero eigenvalues of a rank-2 product, so ~1e-8 roundoff
    rho = random_mixed_state(2, seed, env_qubits=1)
    assert ms.concurrence_mixed(rho) == pytest.approx(oracles.wootters_oracle(rho.matrix), abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_concurrence_mixed_agrees_on_pure(seed):
    psi = random_pure_state(2, seed)
    assert abs(ms.concurrence_mixed(psi.density_matrix()) - ms.concurrence_pure(psi)) < 1e-9


# ---------------------------------------------------------------- distinguishability

def test_distinguishability_product_equals_predictability():
    for theta in np.linspace(0, np.pi, 5):
        psi = states.phi_theta(theta)
        assert ms.distinguishability(psi, 2).D == pytest.approx(ms.predictability(psi, 2), abs=1e-12)


def test_distinguishability_bell():
    for k in (1, 2):
        assert ms.distinguishability(states.bell_state(), k).D == pytest.approx(1, abs=1e-12)


def test_distinguishability_degenerate_component():
    psi = states.product_state([0.0, 1.1])  # qubit 1 sits in |0>
    r = ms.distinguishability(psi, 1)
    assert r.a_minus == pytest.approx(0, abs=1e-15)
    assert r.D == pytest.approx(1, abs=1e-15)
    assert r.axis is not None and np.allclose(r.axis.to_array(), r.m_plus.to_array())


def test_distinguishability_axis_undefined_when_zero():
    r = ms.distinguishability(states.phi_state(), 1)
    assert r.D == pytest.approx(0, abs=1e-15)
    assert r.axis is None and not r.axis_defined


def test_distinguishability_rejects_mixed_and_three_qubits():
    with pytest.raises(ValueError):
        ms.distinguishability(states.bell_state().density_matrix(), 1)
    with pytest.raises(ValueError):
        ms.distinguishability(states.ghz_state(3, SQ, SQ), 1)


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([1, 2]))
def test_distinguishability_matches_brute_force(seed, k):
    psi = random_pure_state(2, seed)
    r = ms.distinguishability(psi, k)
    best, axis = oracles.distinguishability_oracle(psi.amplitudes, k)
    assert r.D == pytest.approx(best, abs=1e-8)
    # the optimum axis is unique up to sign
    assert abs(abs(np.dot(axis, r.axis.to_array())) - 1) < 1e-5


@settings(max_examples=60, deadline=None)
@given(seeds, st.sampled_from([1, 2]))
def test_distinguishability_invariants(seed, k):
    psi = random_pure_state(2, seed)
    r = ms.distinguishability(psi, k)
    assert r.a_plus**2 + r.a_minus**2 == pytest.approx(1, abs=1e-10)
    v = r.a_plus**2 * r.m_plus.to_array() - r.a_minus**2 * r.m_minus.to_array()
    assert r.D == pytest.approx(np.linalg.norm(v), abs=1e-10)
    assert r.axis.norm == pytest.approx(1, abs=1e-10)
    assert r.D == pytest.approx(ms.distinguishability_closed_form(psi, k), abs=1e-10)


def _polar_mod_pi(axis) -> float:
    return math.remainder(math.atan2(axis[0], axis[2]), math.pi)


# θ = π/2 is the product |++>, where D = 0 and no axis exists
@pytest.mark.parametrize("theta", [t for t in np.linspace(-np.pi / 4, 3 * np.pi / 4, 9) if abs(t - np.pi / 2) > 1e-9])
def test_optimal_axis_angle_for_psi_theta(theta):
    # optimal ancilla axis has polar angle κ modulo π in the x-z plane
    r = ms.distinguishability(states.psi_theta(theta), 2)
    kappa = math.atan(-1 / math.cos(math.pi / 4 - theta / 2))
    assert abs(r.axis.sy) < 1e-12
    assert abs(math.remainder(_polar_mod_pi(r.axis.to_array()) - kappa, math.pi)) < 1e-9


@pytest.mark.parametrize("t1", np.linspace(-np.pi / 4, 3 * np.pi / 4, 9)[:4])
def test_optimal_axis_angle_for_psi_pair(t1):
    t2 = np.pi / 2 - t1
    r = ms.distinguishability(states.psi_pair(t1, t2), 1)
    kappa = (t1 + t2) / 2 - math.pi / 2
    assert abs(math.remainder(_polar_mod_pi(r.axis.to_array()) - kappa, math.pi)) < 1e-9


# ---------------------------------------------------------------- multi-qubit

def test_bipartite_concurrence_examples():
    ghz = states.ghz_state(3, SQ, SQ)
    assert all(ms.bipartite_concurrence(ghz, k) == pytest.approx(1, abs=1e-12) for k in (1, 2, 3))
    prod = states.product_state([0.3, 1.0, 2.0])
    assert ms.bipartite_concurrence(prod, 2) == pytest.approx(0, abs=1e-7)
    w = states.w_state([1 / math.sqrt(3)] * 3)
    assert ms.bipartite_concurrence(w, 1) == pytest.approx(2 * math.sqrt(2) / 3, abs=1e-12)


def test_bipartite_concurrence_errors():
    with pytest.raises(ValueError):
        ms.bipartite_concurrence(states.plus(), 1)
    with pytest.raises(ValueError):
        ms.bipartite_concurrence(states.ghz_state(3, SQ, SQ), 4)


def test_pairwise_tangle_examples():
    a1, a2 = 0.6, 0.8j
    assert ms.pairwise_tangle(states.ghz_state(3, a1, a2), 1) == pytest.approx(0, abs=1e-12)
    r_st = states.bipartite_r_st(a1, a2, r=2)
    assert ms.pairwise_tangle(r_st, 2) == pytest.approx(0, abs=1e-12)
    for k in (1, 3):
        assert ms.pairwise_tangle(r_st, k) == pytest.approx(4 * abs(a1 * a2) ** 2, abs=1e-12)


def test_three_tangle_examples():
    assert ms.three_tangle(states.ghz_state(3, 0.6, 0.8)) == pytest.approx(4 * 0.36 * 0.64, abs=1e-12)
    assert ms.three_tangle(states.w_state([0.5, 0.5, SQ])) == pytest.approx(0, abs=1e-12)
    assert ms.three_tangle(states.product_state([0.1, 0.2, 0.3])) == pytest.approx(0, abs=1e-9)


def test_three_tangle_needs_three_qubits():
    with pytest.raises(ValueError):
        ms.three_tangle(states.bell_state())


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_three_tangle_matches_hyperdeterminant(seed):
    psi = random_pure_state(3, seed)
    ref = oracles.three_tangle_oracle(psi.amplitudes)
    for k in (1, 2, 3):
        assert ms.three_tangle(psi, k) == pytest.approx(ref, abs=1e-9)


# ---------------------------------------------------------------- families

def test_generalized_families_examples():
    ghz4 = states.generalized_state_families("GHZ_n", [SQ, SQ], 4)
    for k in range(1, 5):
        assert ms.pairwise_tangle(ghz4, k) == pytest.approx(0, abs=1e-12)
        assert ms.single_particle_character(ghz4, k).character == pytest.approx(0, abs=1e-12)
        assert ms.bipartite_concurrence(ghz4, k) == pytest.approx(1, abs=1e-12)
    w4 = states.generalized_state_families("W_n", [0.5] * 4, 4)
    assert ms.pairwise_tangle(w4, 2) == pytest.approx(3 / 4, abs=1e-12)
    assert ms.single_particle_character(w4, 2).character ** 2 == pytest.approx(1 / 4, abs=1e-12)


def test_ghz3_family_equals_ghz_state():
    a = states.generalized_state_families("ghz", [0.6, 0.8], 3).amplitudes
    assert np.array_equal(a, states.ghz_state(3, 0.6, 0.8).amplitudes)


def test_generalized_families_errors():
    with pytest.raises(ValueError):
        states.generalized_state_families("GHZ_n", [0.6, 0.7], 4)
    with pytest.raises(ValueError):
        states.generalized_state_families("W_n", [0.5] * 4, 2)
    with pytest.raises(ValueError):
        states.generalized_state_families("cluster", [1.0], 3)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_family_closed_forms_and_conjecture(n):
    rng = np.random.default_rng(n)
    c = oracles.haar_state(n, rng)
    w = states.w_state(c)
    g2 = oracles.haar_state(2, rng)
    ghz = states.ghz_state(n, *g2)
    for k in range(1, n + 1):
        cf = ms.family_closed_forms("W_n", c, k)
        assert ms.pairwise_tangle(w, k) == pytest.approx(cf["tau2"], abs=1e-9)
        s2 = ms.single_particle_character(w, k).character ** 2
        assert s2 == pytest.approx(cf["S2"], abs=1e-9)
        assert cf["tau2"] + cf["tau_n"] + s2 == pytest.approx(1, abs=1e-9)
        cg = ms.family_closed_forms("GHZ_n", g2, k)
        sg = ms.single_particle_character(ghz, k).character ** 2
        assert sg == pytest.approx(cg["S2"], abs=1e-9)
        assert ms.bipartite_concurrence(ghz, k) ** 2 == pytest.approx(cg["tau_n"], abs=1e-9)
        assert cg["tau2"] + cg["tau_n"] + sg == pytest.approx(1, abs=1e-9)


# ---------------------------------------------------------------- relation report

def test_verify_relations_pure_two_qubit():
    report = ms.verify_relations(random_pure_state(2, 9))
    assert report.passed
    assert abs(report.residuals["C^2+V_1^2+P_1^2=1"]) < 1e-10
    assert report.relation("V12_max=C").verdict == "pass"


def test_verify_relations_mixed_reports_only_inequalities():
    rho = mix([states.bell_state(), DensityMatrix.maximally_mixed(2)], [0.5, 0.5])
    report = ms.verify_relations(rho)
    assert report.passed and not report.pure
    active = [r for r in report if r.kind != "skip"]
    assert active and all(r.kind == "le" for r in active)
    assert any(r.verdict == "skip" for r in report)
    lhs = report.relation("C^2+V_1^2+P_1^2<=1").lhs
    assert lhs == pytest.approx(ms.concurrence_mixed(rho) ** 2, abs=1e-12)


def test_verify_relations_single_qubit():
    report = ms.verify_relations(states.qubit(1.0, 0.3))
    assert report.passed
    assert report.relation("P_1^2+V_1^2=1").residual == pytest.approx(0, abs=1e-12)


def test_verify_relations_three_qubit_ghz():
    report = ms.verify_relations(states.ghz_state(3, SQ, SQ))
    q = report.quantities()
    assert q["tau3_1"] == pytest.approx(1, abs=1e-12)
    assert q["tau2_1"] == pytest.approx(0, abs=1e-12)
    assert q["S_1"] == pytest.approx(0, abs=1e-7)
    assert abs(report.residuals["tau3+tau2_1+S_1^2=1"]) < 1e-9


def test_verify_relations_pure_density_matrix_is_treated_as_pure():
    report = ms.verify_relations(states.bell_state().density_matrix())
    assert report.pure and report.passed


def test_relation_check_verdicts():
    assert ms.RelationCheck("x", "eq", 1.0, 1.0 + 2e-10, 1e-10).verdict == "fail"
    assert ms.RelationCheck("x", "le", 1.0 + 5e-10, 1.0, 1e-9).verdict == "pass"
    assert ms.RelationCheck("x", "le", 1.1, 1.0, 1e-9).verdict == "fail"
    assert ms.RelationCheck("x", "skip", math.nan, math.nan, math.nan).passed


def test_tolerance_override_must_be_positive():
    with pytest.raises(ValueError):
        ms.verify_relations(states.bell_state(), tolerance=0)


# ---------------------------------------------------------------- local unitaries

def test_local_unitary_invariance_of_character_and_concurrence():
    rng = np.random.default_rng(17)
    changed = False
    for _ in range(20):
        psi = random_pure_state(2, rng)
        out = psi
        for q in (1, 2):
            out = apply_unitary(out, random_unitary(2, rng), [q])
        assert ms.concurrence_pure(out) == pytest.approx(ms.concurrence_pure(psi), abs=1e-10)
        for k in (1, 2):
            before, after = ms.single_particle_character(psi, k), ms.single_particle_character(out, k)
            assert after.character == pytest.approx(before.character, abs=1e-10)
            changed |= abs(after.visibility - before.visibility) > 1e-3
            changed |= abs(after.predictability - before.predictability) > 1e-3
    assert changed
