import math
from pathlib import Path

import numpy as np
import pytest

import perron

CONFIGS = Path(__file__).resolve().parents[2] / "configs"


@pytest.fixture(scope="module")
def quadratic():
    return perron.load_model(str(CONFIGS / "P1.json"))


@pytest.fixture(scope="module")
def quartic():
    return perron.load_model(str(CONFIGS / "P2.json"))


def test_split():
    s = perron.split(np.diag([-1.0, 2.0]))
    assert s.morse_index == 1
    assert s.gap == pytest.approx(1.0)
    np.testing.assert_allclose(perron.flow_exponential(s, 1.0), np.diag([math.e, math.exp(-2)]), rtol=1e-14)


def test_ladder(quadratic):
    L = quadratic.ladder
    assert L.T1 == pytest.approx(math.log(10) / 0.5)
    assert L.T0 == max(L.T1, L.T2, 1.0)
    assert L.violations() == []
    assert perron.horizon_T2(0.6) == pytest.approx(4 * math.log(8) / 0.6)


def test_nonlinearity(quartic):
    np.testing.assert_allclose(quartic.h(np.array([0.1, 0.1])), [-5e-4, -5e-4], rtol=1e-12)


def test_flat_graphs(quadratic):
    for g in (perron.graph_F_inf(quadratic, 5), perron.graph_G_inf(quadratic, 5)):
        assert np.abs(g["values"]).max() <= 1e-10
        assert g["points"].shape == (5, 2)


def test_stable_graph_matches_oracle(quartic):
    zp = np.array([0.0, 0.5 * quartic.ladder.R])
    lp = perron.stable_graph_point(quartic, zp)
    shot = perron.stable_point_oracle(quartic, zp, 40.0 / quartic.ladder.lam, 1e-8)
    assert np.linalg.norm(lp - shot) <= 1e-6


def test_mixed_problem_matches_oracle(quartic):
    zm = quartic.split.proj_minus @ perron.descending_sphere(quartic, quartic.ladder.epsilon, 2)[0]
    zp = np.array([0.0, 0.8 * quartic.ladder.R])
    T = quartic.ladder.T0
    a = perron.graph_point_T(quartic, T, zm, zp)
    b = perron.mixed_bvp_oracle(quartic, T, zm, zp)
    assert np.linalg.norm(a - b) <= 1e-6


def test_c0_report(quartic):
    r = perron.c0_convergence(quartic)
    assert r["pass"]
    assert r["fitted_rate"] >= quartic.ladder.lam / 8
    assert len(r["rows"]) > 0


def test_errors_carry_their_kind():
    with pytest.raises(perron.PerronError) as info:
        perron.split(np.array([[-1.0, 0.5], [0.0, 2.0]]))
    assert info.value.kind == "NotSymmetric"
    with pytest.raises(perron.PerronError) as info:
        perron.model_from_json('{"dimension": 2, "objective": [[[1, 0], 1.0]]}')
    assert info.value.kind == "InvalidConfig"


def test_integrate_forward(quadratic):
    times, states = perron.integrate_forward(quadratic, np.array([0.01, 0.3]), 1.0, 1e-12)
    assert times[-1] == pytest.approx(1.0)
    np.testing.assert_allclose(states[-1], [0.01 * math.e, 0.3 * math.exp(-2)], rtol=1e-9)
