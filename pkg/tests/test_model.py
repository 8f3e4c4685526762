import numpy as np
import pytest

from stafshape import model
from stafshape.model import (DopplerGrid, InterferenceMap, check_unimodular,
                             disturbance_power, doppler_value, shift_apply,
                             shift_apply_adjoint, sir, staf, staf_grid,
                             staf_to_db, steering_vector)
from stafshape.quartic import QuarticObjective, cost
from stafshape.scenarios import SceneId, p4_code, random_unimodular, scene_map

import oracles


def test_steering_vector_examples():
    assert np.allclose(steering_vector(0.0, 3), [1, 1, 1])
    assert np.allclose(steering_vector(0.25, 2), [1, 1j])
    assert np.allclose(steering_vector(0.5, 3), [1, -1, 1])


def test_steering_vector_unimodular():
    v = steering_vector(0.37, 64)
    assert np.max(np.abs(np.abs(v) - 1)) < 1e-15


def test_shift_apply_examples():
    x = np.array([1.0, 2.0, 3.0], dtype=complex)
    assert np.allclose(shift_apply(1, x), [0, 1, 2])
    assert np.allclose(shift_apply(0, x), x)
    assert np.allclose(shift_apply_adjoint(1, x), [2, 3, 0])


def test_shift_out_of_range():
    with pytest.raises(ValueError):
        shift_apply(3, np.ones(3))
    with pytest.raises(ValueError):
        shift_apply(-1, np.ones(3))


@pytest.mark.parametrize("r", [0, 1, 3])
def test_shift_matches_dense_matrix(r):
    rng = np.random.default_rng(r)
    x = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    J = oracles.dense_shift(r, 6)
    assert np.allclose(shift_apply(r, x), J @ x)
    assert np.allclose(shift_apply_adjoint(r, x), J.conj().T @ x)


def test_shift_adjoint_identity():
    # <J_r x, y> = <x, J_r^H y>
    rng = np.random.default_rng(5)
    x = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    y = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    lhs = np.vdot(y, shift_apply(4, x))
    rhs = np.vdot(shift_apply_adjoint(4, y), x)
    assert abs(lhs - rhs) < 1e-12


def test_staf_hand_values():
    s = np.array([1.0, 1.0], dtype=complex)
    assert staf(s, 0, 0.0) == pytest.approx(2.0)
    assert staf(s, 1, 0.0) == pytest.approx(0.5)


def test_staf_matches_dense_evaluation():
    s = p4_code(4)
    assert staf(s, 2, 0.25) == pytest.approx(oracles.dense_staf(s, 2, 0.25),
                                             rel=1e-12)


def test_staf_mainlobe_is_k():
    for seed in range(5):
        s = random_unimodular(13, seed)
        assert staf(s, 0, 0.0) == pytest.approx(13.0, rel=1e-12)


def test_staf_global_phase_invariance():
    s = random_unimodular(10, 3)
    for theta in (0.3, 1.7, -2.2):
        assert staf(np.exp(1j * theta) * s, 3, 0.21) == pytest.approx(
            staf(s, 3, 0.21), rel=1e-10)


def test_staf_bounds():
    s = random_unimodular(12, 9)
    grid = staf_grid(s, 16)
    assert np.all(grid >= 0)
    assert np.all(grid <= 12 + 1e-9)


def test_staf_grid_matches_pointwise():
    s = random_unimodular(7, 11)
    grid = staf_grid(s, 5)
    for r in range(7):
        for h in range(5):
            assert grid[r, h] == pytest.approx(
                staf(s, r, doppler_value(h, 5)), rel=1e-12, abs=1e-15)


def test_doppler_grid_values():
    g = DopplerGrid(4)
    assert np.allclose(g.values(), [-0.5, -0.25, 0.0, 0.25])
    assert g.value(3) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        doppler_value(4, 4)


def test_interference_map_canonical_order_and_validation():
    imap = InterferenceMap(4, 3, ((2, 1, 1.0), (0, 2, 0.5), (2, 0, 2.0)))
    assert imap.support == ((0, 2, 0.5), (2, 0, 2.0), (2, 1, 1.0))
    with pytest.raises(ValueError):
        InterferenceMap(4, 3, ((0, 0, 1.0), (0, 0, 2.0)))
    with pytest.raises(ValueError):
        InterferenceMap(4, 3, ((4, 0, 1.0),))
    with pytest.raises(ValueError):
        InterferenceMap(4, 3, ((0, 0, -1.0),))


def test_disturbance_power_single_bin():
    s = np.array([1.0, 1.0], dtype=complex)
    imap = InterferenceMap(2, 2, ((1, 1, 1.0),))  # h=1 -> v=0
    assert disturbance_power(s, imap, 1.0) == pytest.approx(3.0)


def test_disturbance_power_dimension_mismatch():
    imap = InterferenceMap(4, 4, ((1, 1, 1.0),))
    with pytest.raises(ValueError):
        disturbance_power(np.ones(3, dtype=complex), imap)


def test_disturbance_power_equals_cost_without_noise():
    imap = scene_map(SceneId.SCENE1)
    obj = QuarticObjective.from_map(imap)
    s = p4_code(50)
    dp = disturbance_power(s, imap, 0.0)
    assert abs(dp - cost(s, obj)) / dp < 1e-12


def test_sir_single_bin_and_identity():
    s = np.array([1.0, 1.0], dtype=complex)
    imap = InterferenceMap(2, 2, ((1, 1, 1.0),))
    assert sir(s, imap) == pytest.approx(4.0)
    for seed in range(5):
        s = random_unimodular(12, seed)
        m = InterferenceMap(12, 8, ((2, 3, 1.0), (5, 6, 0.7)))
        obj = QuarticObjective.from_map(m)
        assert sir(s, m) * cost(s, obj) == pytest.approx(144.0, rel=1e-12)


def test_sir_scene1_regression():
    # frozen from the dense STAF-grid oracle
    assert sir(p4_code(50), scene_map(SceneId.SCENE1)) == pytest.approx(
        0.555541353303470, rel=1e-12)


def test_sir_zero_denominator():
    imap = InterferenceMap(2, 2, ((1, 1, 0.0),))
    with pytest.raises(ValueError, match="infinite"):
        sir(np.array([1.0, 1.0], dtype=complex), imap)


def test_staf_to_db():
    db = staf_to_db(np.array([50.0, 0.05, 0.0]), 50)
    assert db[0] == pytest.approx(0.0)
    assert db[1] == pytest.approx(-30.0)
    assert db[2] == -np.inf


def test_check_unimodular():
    check_unimodular(np.exp(1j * np.linspace(0, 3, 8)))
    with pytest.raises(ValueError):
        check_unimodular(np.array([1.0, 0.5 + 0j]))
    with pytest.raises(ValueError):
        check_unimodular(np.zeros((2, 2), dtype=complex))
