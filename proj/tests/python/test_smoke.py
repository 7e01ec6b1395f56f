"""Smoke tests for the contact_hj python module."""

import math

import pytest

import contact_hj as chj


@pytest.fixture(scope="module")
def grid():
    return chj.TorusGrid(1, 128)


def test_model_evaluations():
    m = chj.build_model("quadratic")
    assert m.lambda_bound == 0.0
    assert m.H([0.3], 0.0, [0.5]) == pytest.approx(0.25)
    assert m.L([0.3], 0.0, [2.0]) == pytest.approx(1.0)

    mt = chj.build_model("quadratic_plus_f", {"f": "tanh"})
    assert mt.lambda_bound == pytest.approx(1.0)
    assert mt.H([0.0], 0.5, [1.0]) == pytest.approx(1.0 + math.tanh(0.5))

    with pytest.raises(chj.ChjError):
        chj.build_model("septic")


def test_legendre_transform():
    m = chj.build_model("quadratic")
    value, argmax = chj.legendre(m, [0.0], 0.0, [2.0])
    assert value == pytest.approx(1.0, abs=1e-8)
    assert argmax[0] == pytest.approx(1.0, abs=1e-7)


def test_grid_function_roundtrip(grid):
    f = chj.GridFunction.from_values(grid, [float(i) for i in range(grid.node_count())])
    assert f.values[5] == 5.0
    assert f.interpolate([2.5 * grid.h]) == pytest.approx(2.5)


def test_one_step_and_drift(grid):
    m = chj.build_model("quadratic")
    cfg = chj.SemigroupConfig()
    cfg.c = 0.3
    w0 = chj.GridFunction.constant(grid, 0.0)
    out = chj.evolve(m, cfg, w0, 100.0)
    assert out["stop"] == "diverged_up"
    assert out["measured_rate"] == pytest.approx(0.3, rel=0.05)


def test_classify_bounded(grid):
    m = chj.build_model("quadratic_plus_f", {"f": "tanh"})
    res = chj.classify(m, 0.0, grid, t_max=120.0)
    assert res["outcome"] == "bounded"
    assert res["residual"] < 5e-2
    assert res["limit"].sup_norm() < 5e-2


def test_flow_stays_on_level_set():
    m = chj.build_model("quadratic")
    s0 = chj.CharacteristicState(0.0, [0.1], 0.0, [0.5])
    out = chj.flow(m, s0, 1.0, 1e-3, 0.25)
    assert not out["blow_up"]
    end = out["states"][-1]
    assert end.u == pytest.approx(0.5, abs=1e-9)
    assert chj.h_decay_check(m, s0, 1.0, 1e-3, 0.25) < 1e-8


def test_optimizer_bands(grid):
    m = chj.build_model("quadratic_plus_f", {"f": "sin"})
    cl, _ = chj.minmax_cl(m, grid)
    cr, _ = chj.maxmin_cr(m, grid)
    assert -1.0 - 1e-9 <= cl <= -0.95
    assert 0.95 <= cr <= 1.0 + 1e-9


def test_action_stay_put(grid):
    m = chj.build_model("quadratic")
    out = chj.forward_action(m, grid, [0.5], 0.0, 0.7, 5e-3, 200, 16.0)
    assert out["time"] == pytest.approx(1.0)
    assert out["final_layer"].interpolate([0.5]) == pytest.approx(0.7, abs=0.05)
