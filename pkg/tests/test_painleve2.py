import math

import numpy as np
import pytest
from scipy.special import airy as scipy_airy

from rmtlab.errors import AccuracyError, DomainError
from rmtlab.painleve2 import (
    asymptotic_state,
    determinant_drift,
    hastings_mcleod_shooting,
    load_solution,
    psi_eval,
    psi_grid,
    psi_s_derivative_check,
    q_at,
    real_system_matrix,
    solve_hastings_mcleod,
)

# Hastings-McLeod reference values from the shooting oracle
Q0 = 0.3670615515
R0 = -0.2953721054


def test_residual_off_mesh(hm):
    rng = np.random.default_rng(0)
    s = rng.uniform(hm.s_min, hm.s_max, 4000)
    assert np.max(np.abs(hm.residual(s))) < 1e-8


def test_residual_wide(hm_wide):
    s = np.linspace(-30, 6, 7919)
    assert np.max(np.abs(hm_wide.residual(s))) < 1e-8
    assert q_at(hm_wide, 0.0)[0] == pytest.approx(Q0, abs=1e-8)


def test_reference_values(hm):
    q, r = q_at(hm, 0.0)
    assert q == pytest.approx(Q0, abs=1e-8)
    assert r == pytest.approx(R0, abs=1e-8)


def test_shooting_oracle(hm):
    s = np.array([-2.0, -1.0, 0.0, 1.0, 3.0])
    q_ref, r_ref = hastings_mcleod_shooting(s)
    q, r = q_at(hm, s)
    assert np.max(np.abs(q - q_ref)) < 1e-6
    assert np.max(np.abs(r - r_ref)) < 1e-6


def test_positivity_and_boundaries(hm):
    assert np.all(hm.q > 0)
    assert hm.q[-1] == pytest.approx(scipy_airy(6.0)[0], rel=1e-12)
    assert hm(5.0)[0] / scipy_airy(5.0)[0] == pytest.approx(1.0, abs=1e-3)
    assert hm(-8.0)[0] / 2.0 == pytest.approx(1.0, abs=1e-3)
    # two-term asymptote imposed at the left end
    assert hm.q[0] == pytest.approx(math.sqrt(5.0) * (1 - 1 / 8000), rel=1e-12)


def test_q_at_nodes_and_lipschitz(hm):
    idx = [0, 137, 800, len(hm.s_grid) - 1]
    for i in idx:
        q, r = q_at(hm, hm.s_grid[i])
        assert q == hm.q[i] and r == hm.qp[i]
    s = np.linspace(-10, 5.99, 500)
    h = 1e-3
    bound = np.max(np.abs(hm.qp)) + 1
    assert np.all(np.abs(q_at(hm, s + h)[0] - q_at(hm, s)[0]) <= bound * h)
    with pytest.raises(DomainError):
        q_at(hm, 6.5)


def test_save_load_roundtrip(hm, tmp_path):
    path = tmp_path / "hm.csv"
    hm.save(path)
    back = load_solution(path)
    assert np.array_equal(back.s_grid, hm.s_grid)
    assert np.array_equal(back.q, hm.q)
    assert back.tolerance == hm.tolerance
    assert back(0.123)[0] == hm(0.123)[0]


@pytest.mark.parametrize("bounds", [(-5.0, 6.0), (-10.0, 4.0), (-10.0, 31.0)])
def test_solver_domain(bounds):
    with pytest.raises(DomainError):
        solve_hastings_mcleod(*bounds)


def test_solver_accuracy_error():
    with pytest.raises(AccuracyError):
        solve_hastings_mcleod(-10.0, 6.0, 1e-15, nodes=(64,))


def test_real_system_is_trace_free():
    A = real_system_matrix(1.3, -0.7, 0.4, -0.2)
    assert np.trace(A) == 0.0


@pytest.mark.parametrize("s", [-2.0, 0.0, 2.0])
def test_parity(hm, s):
    z = np.linspace(0, 4, 41)
    p1, p2 = psi_grid(hm, np.concatenate([z, -z]), [s])
    a1, b1 = p1[0, :41], p1[0, 41:]
    a2, b2 = p2[0, :41], p2[0, 41:]
    assert np.max(np.abs(a1 - b1)) < 1e-6
    assert np.max(np.abs(a2 + b2)) < 1e-6


def test_phi2_vanishes_at_origin(hm):
    p1, p2 = psi_grid(hm, [0.0], [-2.0, 0.0, 2.0])
    assert np.all(np.abs(p2) < 1e-8)


@pytest.mark.parametrize("method", ["inward", "through-origin", "outward"])
def test_methods_agree(hm, method):
    z = np.linspace(-3, 3, 13)
    ref1, ref2 = psi_grid(hm, z, [-1.0, 0.5], method="auto")
    p1, p2 = psi_grid(hm, z, [-1.0, 0.5], method=method)
    assert np.max(np.abs(p1 - ref1)) < 1e-7
    assert np.max(np.abs(p2 - ref2)) < 1e-7


def test_inward_outward_deep_sigma(hm_wide):
    # outward integration is the well-conditioned route for very negative s
    z = np.linspace(0, 3, 7)
    a1, a2 = psi_grid(hm_wide, z, [-6.0], method="inward")
    b1, b2 = psi_grid(hm_wide, z, [-6.0], method="outward")
    assert np.max(np.abs(a1 - b1)) < 1e-6
    assert np.max(np.abs(a2 - b2)) < 1e-6


def test_large_zeta_modulus(hm):
    z = np.array([6.0, 7.0, 8.0])
    p1, p2 = psi_grid(hm, z, [0.0])
    dev = np.abs(p1**2 + p2**2 - 1.0)[0]
    assert np.all(dev < 0.5 / z)


def test_decoupled_limit(hm):
    z = np.linspace(0, 2, 21)
    p1, p2 = psi_grid(hm, z, [6.0])
    theta = 4 * z**3 / 3 + 6 * z
    assert np.max(np.abs(p1[0] - np.cos(theta))) < 1e-3
    assert np.max(np.abs(p2[0] + np.sin(theta))) < 1e-3


def test_asymptotic_state_matches_integration(hm):
    # integrate from zeta = 12 down to 9 and compare with the series at 9
    q, r = q_at(hm, 0.5)
    p1, p2 = psi_grid(hm, [9.0], [0.5], zeta_asym=12.0)
    a1, a2 = asymptotic_state(9.0, 0.5, q, r)
    assert abs(p1[0, 0] - a1) < 1e-9
    assert abs(p2[0, 0] - a2) < 1e-9


def test_determinant_drift(hm):
    for s in (-2.0, 0.0, 2.0):
        assert determinant_drift(hm, s, 8.0) < 1e-8


def test_s_derivative_second_order(hm):
    r1 = psi_s_derivative_check(hm, 1.0, 0.0, h=1e-2)
    r2 = psi_s_derivative_check(hm, 1.0, 0.0, h=5e-3)
    assert r1 < 1e-3
    assert r1 / r2 == pytest.approx(4.0, rel=0.1)
    with pytest.raises(DomainError):
        psi_s_derivative_check(hm, 1.0, 5.995, h=1e-2)


def test_s_derivative_at_origin(hm):
    # at zeta = 0 the s-system reduces to dPhi1/ds = q Phi1
    h = 1e-3
    p1, _ = psi_grid(hm, [0.0], [0.7 - h, 0.7, 0.7 + h])
    fd = (p1[2, 0] - p1[0, 0]) / (2 * h)
    assert fd == pytest.approx(hm(0.7)[0] * p1[1, 0], abs=1e-6)


def test_psi_eval_derivatives(hm):
    v = psi_eval(hm, 1.2, -0.5)
    h = 1e-5
    lo = psi_eval(hm, 1.2 - h, -0.5)
    hi = psi_eval(hm, 1.2 + h, -0.5)
    assert v.dphi1 == pytest.approx((hi.phi1 - lo.phi1) / (2 * h), abs=1e-5)
    assert v.dphi2 == pytest.approx((hi.phi2 - lo.phi2) / (2 * h), abs=1e-5)
