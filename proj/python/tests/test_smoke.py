import math

import numpy as np
import pytest

import pygems


def two_arm():
    arms = np.array([[1.0, 0.0], [0.0, 1.0]])
    return pygems.Instance.linear(arms, np.empty((0, 0)), np.array([1.0, 0.5]), 2)


def test_hard_instance_shape():
    inst = pygems.make_hard_instance(3, 0.1)
    assert inst.dim == 4
    assert inst.num_arms == 4
    assert inst.best_target == 2
    assert inst.intrinsic_dim == 3


def test_complexities():
    inst = pygems.make_hard_instance(3, 0.1)
    rho3 = pygems.compute_rho(inst, 3)
    rho4 = pygems.compute_rho(inst, 4)
    assert rho3 <= 6.0 * 1.03
    assert rho4 >= 25.0 * 0.97
    assert pygems.compute_iota(inst, 3) > 0.0
    assert pygems.iota_star(inst, 4) > 0.0


def test_two_arm_rho():
    assert pygems.compute_rho(two_arm(), 2) == pytest.approx(16.0, rel=0.03)


def test_rounding_helpers():
    assert pygems.r_d(3, 0.25) == 56.0
    assert pygems.r_d(1, 0.25) == 16.0
    assert pygems.w_of(8.0) == pytest.approx(2.0, abs=1e-9)

    inst = two_arm()
    sol = pygems.solve_rho_design(inst, 2)
    dirs = [np.array([1.0, -0.5])]
    counts = pygems.round_design(np.asarray(sol["weights"]), 64, inst.arms(), dirs, 0.25)
    assert counts.sum() == 64


def test_misspec_path():
    arms = np.array([[1.0, 0.0], [0.0, 1.0]])
    rewards = np.array([1.0, 0.3])
    inst = pygems.Instance(arms, rewards, np.empty((0, 0)), rewards)
    theta, gamma_tilde = pygems.chebyshev_fit(inst, 1)
    assert gamma_tilde == pytest.approx(0.3, abs=1e-7)
    assert pygems.compute_gamma(inst, 2, 0.25) <= 2.0
    assert pygems.compute_d_star(inst, 0.5, 0.25) <= 2


def test_run_batch_deterministic():
    config = {
        "instance": {
            "arms": [[1.0, 0.0], [0.0, 1.0]],
            "theta": [1.0, 0.5],
            "intrinsic_dim": 2,
        },
        "algorithm": {"name": "oracle_static", "n_pulls": 64, "d": 2},
        "trials": 3,
        "seed": 7,
        "noise": "none",
    }
    first = pygems.run_batch(config)
    second = pygems.run_batch(config)
    assert first == second
    assert first["error_rate"] == 0.0
    assert first["trials"] == 3
    assert math.isclose(first["reference_bounds"]["rho_star"], 16.0, rel_tol=0.03)


def test_unverifiable_fixture():
    inst = pygems.make_unverifiable_instance(3)
    config = {
        "instance": {"generator": "unverifiable", "dim": 3},
        "algorithm": {"name": "oracle_static", "n_pulls": 60, "d": 2},
        "trials": 2,
        "seed": 1,
        "noise": "none",
    }
    rep = pygems.run_batch(config)
    assert inst.best_target == 2
    assert all(r["recommendation"] == 0 for r in rep["results"])
