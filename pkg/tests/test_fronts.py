import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from satflux import (DualState, FrontState, InsufficientDataError, ModelParams, ParameterError,
                     SchemeConfig, SupportCollapseError, advance_fronts, center_diagnostics,
                     extrapolate_collapse, make_classical_flux, mu_bar, predict_support, reconstruct,
                     run, steady_jump_profile)
from satflux.fronts import rh_residual_series

FLUX = make_classical_flux(1.0, 1.0)


def P(M=1.0, a=1.0):
    return ModelParams(a=a, m=0.0, M=M, flux=FLUX)


def linear_state(N=400):
    eta = (np.arange(N) + 0.5) / N
    return DualState(0.0, P(), 1.0 + eta)


def test_mu_bar_examples():
    assert mu_bar(DualState(0.0, P(2.0), np.ones(50))) == pytest.approx(1.0, abs=1e-15)
    assert mu_bar(steady_jump_profile(P(2.0), 1.0, 400)) == pytest.approx(1.0, abs=1e-13)
    # midpoint rule: error h^2/12 * int f'' over the ell denominator
    assert mu_bar(linear_state()) == pytest.approx(5 / 9, abs=1e-5)


def test_advance_fronts_examples():
    f0 = FrontState(0.0, 0.0, 1.0)
    f1 = advance_fronts(f0, 0.5, P(1.0), 0.1)
    assert f1.sigma_minus == pytest.approx(-0.05)
    assert f1.sigma_plus == pytest.approx(1.05)
    f2 = advance_fronts(f0, 2.0, P(4.0), 0.1)
    assert (f2.sigma_minus, f2.sigma_plus) == pytest.approx((0.1, 0.9))
    assert f1.t == 0.1


@settings(max_examples=100, deadline=None)
@given(mb=st.floats(0.01, 3.99), dt=st.floats(1e-6, 0.1), M=st.floats(0.5, 4.0))
def test_length_change_is_independent_of_mu_bar(mb, dt, M):
    mb = mb * M / 4.0
    f0 = FrontState(0.0, -1.0, 1.0)
    f1 = advance_fronts(f0, mb, P(M), dt)
    assert (f1.ell - f0.ell) == pytest.approx((2.0 - M) * dt, abs=1e-14)


def test_advance_fronts_errors():
    f0 = FrontState(0.0, 0.0, 1.0)
    with pytest.raises(ParameterError):
        advance_fronts(f0, 0.5, P(), 0.0)
    with pytest.raises(ParameterError):
        advance_fronts(f0, 1.5, P(), 0.1)
    with pytest.raises(SupportCollapseError):
        advance_fronts(FrontState(0.0, 0.0, 0.1), 2.0, P(4.0), 0.1)


def test_reconstruct_identity_map():
    N = 100
    s = DualState(0.0, P(), np.ones(N))
    snap = reconstruct(s, 0.0)
    np.testing.assert_allclose(snap.x, s.eta, atol=1e-15)
    np.testing.assert_array_equal(snap.u, 1.0)
    assert snap.ell == pytest.approx(1.0)


def test_reconstruct_linear_example():
    s = linear_state()
    snap = reconstruct(s, 0.0)
    eta = s.eta
    np.testing.assert_allclose(snap.x, eta + eta ** 2 / 2, atol=1e-5)
    np.testing.assert_allclose(snap.u, 1 / (1 + eta))
    assert snap.ell == pytest.approx(1.5, abs=1e-12)
    cd = center_diagnostics(snap, s.params)
    assert cd.identity_residual <= 1e-8
    assert cd.sigma_c_rate == pytest.approx(1 / 9, abs=1e-4)


def test_center_symmetric():
    s = steady_jump_profile(P(2.0), 1.0, 400)
    snap = reconstruct(s, -0.5)
    cd = center_diagnostics(snap, s.params)
    assert cd.mass_center == pytest.approx(cd.sigma_c, abs=1e-12)
    assert cd.sigma_c_rate == pytest.approx(0.0, abs=1e-12)


def test_predict_support():
    sp = predict_support(P(1.0), 1.0)
    assert (sp.slope, sp.regime, sp.t_star) == (1.0, "spreading", None)
    bl = predict_support(P(4.0), 1.0)
    assert bl.regime == "concentrating" and bl.t_star == pytest.approx(0.5)
    assert predict_support(P(2.0), 1.0).regime == "critical"
    with pytest.raises(ParameterError):
        predict_support(P(), 0.0)


def test_rh_residual_requires_three_points():
    with pytest.raises(InsufficientDataError):
        rh_residual_series([0.0, 1.0], [0, 0], [1, 1], [0.5, 0.5], P())


def test_rh_residual_weak_attraction():
    traj = run(P(1.0, a=1e-9), SchemeConfig(N=64, eps=1e-3, t_end=0.2, snapshot_dt=0.05), 1.0)
    r = rh_residual_series(traj.times, [f.sigma_minus for f in traj.fronts],
                           [f.sigma_plus for f in traj.fronts], [r.mu_bar for r in traj.rows],
                           traj.params)
    assert np.max(r.r_plus) <= 1e-3
    speed = np.gradient([f.sigma_plus for f in traj.fronts], traj.times)
    np.testing.assert_allclose(speed, 1.0, atol=1e-3)


def test_extrapolate_collapse():
    t = np.linspace(0, 0.4, 9)
    assert extrapolate_collapse(t, 1 - 2 * t) == pytest.approx(0.5)
    assert extrapolate_collapse(t, 1 + t) == float("inf")


positive_v = arrays(np.float64, st.integers(8, 64), elements=st.floats(0.05, 20.0))


@settings(max_examples=100, deadline=None)
@given(v=positive_v, sm=st.floats(-5, 5), M=st.floats(0.2, 5.0))
def test_reconstruction_properties(v, sm, M):
    s = DualState(0.0, P(M), v)
    snap = reconstruct(s, sm)
    assert np.all(np.diff(snap.x) > 0)
    assert snap.sigma_minus < snap.x[0] and snap.x[-1] < snap.sigma_plus
    assert abs(snap.ell - s.ell) <= 1e-12 * max(1.0, s.ell)
    assert 0 < snap.mu_bar < M
    cd = center_diagnostics(snap, s.params)
    assert cd.identity_residual <= 1e-10 * M * (1 + abs(snap.sigma_plus) + snap.ell)
    gap = cd.sigma_c - cd.mass_center
    if abs(gap) > 1e-9 * (1 + snap.ell):
        assert np.sign(gap) == np.sign(cd.sigma_c_rate)


@settings(max_examples=50, deadline=None)
@given(v=positive_v)
def test_mu_bar_symmetric_input(v):
    sym = np.concatenate([v, v[::-1]])
    assert mu_bar(DualState(0.0, P(2.0), sym)) == pytest.approx(1.0, rel=1e-12)
