import math

import numpy as np
import pytest

from bellscope.data import bundled_inequality
from bellscope.errors import ScenarioError
from bellscope.polytope import Inequality
from bellscope.rational import QQ
from bellscope.scenario import ParamTag, Scenario
from bellscope.quantumeval import (QuantumSetup, correlations,
                                   distribution_residuals, evaluate,
                                   ghz_state, optimize_symmetric_angles,
                                   visibility_threshold, w_state)


def _chsh_fullcorr():
    return Inequality(Scenario(2, 2, 2), ParamTag.FULL_CORRELATOR_ONLY,
                      (QQ(1), QQ(1), QQ(1), QQ(-1)), QQ(2))


def test_zero_visibility_gives_uniform():
    sc = Scenario(2, 2, 2)
    setup = QuantumSetup(sc, ghz_state(2), [[0.0, 1.0], [0.5, 2.0]], visibility=0.0)
    p = correlations(setup)
    assert np.allclose(p.coords, 0.25)


def test_ghz_x_measurements_full_correlator_one():
    # all angles zero: product of sigma_x on the balanced GHZ state
    sc = Scenario(3, 2, 2)
    setup = QuantumSetup(sc, ghz_state(3), [[0.0, 0.0]] * 3)
    p = correlations(setup)
    # direct 8x8 matrix oracle
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    obs = np.kron(np.kron(sx, sx), sx)
    expected = np.trace(ghz_state(3) @ obs).real
    from bellscope.quantumeval import point_in_param
    fc = point_in_param(p, ParamTag.FULL_CORRELATOR_ONLY)
    assert abs(fc[0] - expected) < 1e-12
    assert abs(fc[0] - 1.0) < 1e-12


def test_correlations_no_signalling_residuals():
    sc = Scenario(3, 2, 2)
    setup = QuantumSetup(sc, w_state(3), [[0.3, 1.2], [0.1, -0.4], [2.0, 0.9]],
                         visibility=0.7)
    res = distribution_residuals(correlations(setup))
    assert res["normalization"] < 1e-12
    assert res["no_signalling"] < 1e-12
    assert res["negativity"] < 1e-12


def test_evaluate_on_local_vertex_never_violates(local222, sc222):
    ch = bundled_inequality("CH")
    from bellscope.scenario import CorrelationVector
    for v in local222.vertices:
        p = CorrelationVector(sc222, ParamTag.NO_SIGNALLING, v)
        assert evaluate(ch, p) <= 0


def test_chsh_tsirelson_and_visibility():
    chsh = _chsh_fullcorr()
    angles, value = optimize_symmetric_angles(chsh, ghz_state(2), grid_points=361)
    assert abs(value - 2 * math.sqrt(2)) < 1e-9
    ang = [[angles[0], angles[1]]] * 2
    setup = QuantumSetup(Scenario(2, 2, 2), ghz_state(2), ang)
    thr = visibility_threshold(chsh, setup)
    assert abs(thr - 1 / math.sqrt(2)) < 1e-6


def test_w4_inequality_value_is_one_sixteenth():
    iw = bundled_inequality("I_W")
    phi1 = math.acos(0.25) - 2 * math.asin(0.25)
    phi2 = math.acos(0.25)
    phi3 = -2 * math.asin(0.25)
    angles = [[0.0, phi2], [phi1, phi3], [0.0, phi2], [phi1, phi3]]
    setup = QuantumSetup(Scenario(4, 2, 2), w_state(4), angles)
    val = evaluate(iw, correlations(setup))
    assert abs(val - 1 / 16) < 1e-9


def test_no_violation_returns_none():
    ch = _chsh_fullcorr()
    setup = QuantumSetup(Scenario(2, 2, 2), ghz_state(2), [[0.0, 0.0]] * 2)
    assert visibility_threshold(ch, setup) is None


def test_invalid_state_rejected():
    bad = np.eye(4, dtype=complex)   # trace 4
    with pytest.raises(ScenarioError):
        QuantumSetup(Scenario(2, 2, 2), bad, [[0.0, 0.0]] * 2)
    psi = np.zeros((4, 4), dtype=complex)
    psi[0, 3] = psi[3, 0] = 0.6
    psi[0, 0] = psi[3, 3] = 0.5
    with pytest.raises(ScenarioError):
        QuantumSetup(Scenario(2, 2, 2), psi, [[0.0, 0.0]] * 2)  # not PSD


def test_rationalize_bridge():
    sc = Scenario(2, 2, 2)
    setup = QuantumSetup(sc, ghz_state(2), [[0.0, math.pi / 2], [math.pi / 4, -math.pi / 4]])
    p = correlations(setup)
    exact = p.rationalize(10 ** 9)
    for a, b in zip(p.coords, exact.coords):
        assert abs(a - float(b)) < 1e-9
