import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from complementarity import experiments as ex
from complementarity import measures, states
from complementarity.qcore import fidelity

import oracles


@pytest.fixture(scope="module")
def ideal():
    return ex.run_theta_grid(ex.ThetaGridConfig())


def test_grid_layout(ideal):
    t1 = ideal.column("theta1")
    assert np.allclose(t1, -np.pi / 4 + np.arange(9) * np.pi / 8)
    assert np.allclose(t1 + ideal.column("theta2"), np.pi / 2)
    assert tuple(f for f in ex.THETA_COLUMNS) == tuple(ex.ThetaGridRow.__dataclass_fields__)


def test_ideal_rows_match_closed_forms(ideal):
    for row in ideal.rows:
        ref = oracles.theta_pair_closed_forms(row.theta1, row.theta2)
        for key in ("V1", "V2", "P1", "P2", "S1", "S2", "D1", "D2"):
            assert getattr(row, key) == pytest.approx(ref[key], abs=1e-9), key
        assert row.V12 == pytest.approx(ref["C"], abs=1e-9)


def test_ideal_circle_radii(ideal):
    for name, r in ideal.radii().items():
        assert r == pytest.approx(1, abs=1e-9), name


def test_ideal_concurrence_columns(ideal):
    expected = np.abs(np.sin(ideal.column("theta1") - np.pi / 4))
    for col in ("C", "C_D1", "C_D2"):
        assert np.allclose(ideal.column(col), expected, atol=1e-9)


def test_prepared_states_match_direct_construction():
    for t1 in np.linspace(-1, 2, 5):
        assert fidelity(ex.prepare(t1, 0.3), states.psi_pair(t1, 0.3)) == pytest.approx(1, abs=1e-12)


def test_noisy_runs_are_seeded():
    cfg = ex.ThetaGridConfig(points=3, noise=0.03, seed=11)
    a, b = ex.run_theta_grid(cfg), ex.run_theta_grid(cfg)
    assert [r.values() for r in a.rows] == [r.values() for r in b.rows]
    c = ex.run_theta_grid(ex.ThetaGridConfig(points=3, noise=0.03, seed=12))
    assert [r.values() for r in a.rows] != [r.values() for r in c.rows]


def test_noisy_radii_stay_near_one():
    r = ex.run_theta_grid(ex.ThetaGridConfig(noise=0.03, seed=3)).radii()
    assert all(0.85 < v < 1.15 for v in r.values())


def test_config_validation():
    with pytest.raises(ValueError):
        ex.ThetaGridConfig(points=0)
    with pytest.raises(ValueError):
        ex.ThetaGridConfig(noise=-1)
    with pytest.raises(ValueError):
        ex.circle_radius([], [])


@settings(max_examples=100, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1))
def test_concurrence_from_lines_matches_naive_form(a, b):
    d, p = abs(a) + abs(b), abs(a + b)
    assert ex.concurrence_from_lines((a, b)) == pytest.approx(math.sqrt(max(0.0, d * d - p * p)), abs=1e-7)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 2), st.floats(0, 2 * np.pi))
def test_circle_radius_on_exact_circle(r, offset):
    t = offset + np.linspace(0, np.pi / 2, 7)
    assert ex.circle_radius(r * np.cos(t), r * np.sin(t)) == pytest.approx(r, abs=1e-12)


def test_measured_d_squared_is_p_squared_plus_c_squared(ideal):
    for row in ideal.rows:
        for k in (1, 2):
            d, p, c = getattr(row, f"D{k}"), getattr(row, f"P{k}"), getattr(row, f"C_D{k}")
            assert d**2 == pytest.approx(p**2 + c**2, abs=1e-9)
            psi = states.psi_pair(row.theta1, row.theta2)
            assert c == pytest.approx(measures.concurrence_pure(psi), abs=1e-9)
