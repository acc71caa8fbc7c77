import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satflux import (AdmissibilityError, ModelParams, NumericError, ParameterError,
                     UnrepresentableError, admissibility, continuous_profile, entropic_speed,
                     generic_copy, jump_profile, make_classical_flux, to_dual_state)

# mpmath at 30 digits, by direct quadrature of the profile ODE solution
U_HALF_M1 = 0.517638090205041525
ELL_M1 = 2.98031798343361316
ELL_JUMP = np.pi - 2.0
ELL_M2 = 1.73493775667155882
U_HALF_M2 = 0.737985627424726985

FLUX = make_classical_flux(1.0, 1.0)
MID = 800  # kappa = 1/2 on the default 1601-node grid


def P(M=1.0, a=1.0, m=1.0, flux=FLUX):
    return ModelParams(a=a, m=m, M=M, flux=flux)


@pytest.fixture(scope="module")
def entropic_m1():
    return continuous_profile(P(), 1.0, -0.5)


@pytest.fixture(scope="module")
def jump_m0():
    return jump_profile(P(M=2.0, m=0.0), 1.0)


def test_admissibility_examples():
    rep = admissibility(P(), 1.0, -0.5)
    assert rep.admissible and rep.entropic and rep.kappa_star == pytest.approx(0.0)
    bad_mass = admissibility(P(M=3.0), 3.0, -1.0)
    assert not bad_mass.mass_ok and not bad_mass.admissible
    inner_zero = admissibility(P(), 1.0, -0.6)
    assert inner_zero.kappa_star > 0 and not inner_zero.admissible
    non_entropic = admissibility(P(), 1.0, -0.3)
    assert non_entropic.admissible and not non_entropic.entropic
    with pytest.raises(ParameterError):
        admissibility(P(), 0.0, -0.5)


def test_entropic_speed_examples():
    assert entropic_speed(0.75, 1.0, 2.0) == pytest.approx(0.5)
    assert entropic_speed(0.0, 1.0, 1.0) == pytest.approx(-0.5)
    with pytest.raises(ParameterError):
        entropic_speed(1.5, 1.0, 1.0)


def test_entropic_profile_matches_oracle(entropic_m1):
    p = entropic_m1
    assert p.kappa[MID] == pytest.approx(0.5, abs=1e-15)
    assert abs(p.U[MID] - U_HALF_M1) <= 1e-6
    assert p.U[0] <= 1e-8 and p.U[-1] <= 1e-8
    assert abs(p.kappa_bar - 0.5) <= 1e-8
    assert abs(p.sigma) <= 1e-8
    assert p.residual <= 1e-6
    assert p.ell == pytest.approx(ELL_M1, rel=1e-8)
    assert p.entropic


def test_entropic_profile_shape(entropic_m1):
    p = entropic_m1
    np.testing.assert_allclose(p.U, p.U[::-1], atol=1e-10)
    assert np.all(np.diff(p.U[: MID + 1]) > 0)
    assert np.all(np.diff(p.U[MID:]) < 0)
    assert np.all(np.diff(p.xi) > 0)
    assert p.mass_trapezoid() == pytest.approx(1.0, abs=1e-6)


def test_xi_minus_shifts_only(entropic_m1):
    q = continuous_profile(P(), 1.0, -0.5, xi_minus=3.0)
    np.testing.assert_allclose(q.xi - 3.0, entropic_m1.xi, atol=1e-13)
    assert q.sigma == entropic_m1.sigma


def test_m2_profile_oracle_and_slope():
    p = continuous_profile(P(m=2.0), 1.0, -0.5)
    assert abs(p.U[MID] - U_HALF_M2) <= 1e-6
    assert p.ell == pytest.approx(ELL_M2, rel=1e-7)
    # for m > 1 the slope dU/dxi blows up at the support ends
    slope = np.abs(np.diff(p.U[-12:]) / np.diff(p.xi[-12:]))
    assert np.all(np.diff(slope) > 0)


def test_non_entropic_profile():
    p = continuous_profile(P(), 1.0, -0.3)
    assert not p.entropic
    assert p.U[0] > 0.1 and p.U[-1] == 0.0
    assert p.sigma == pytest.approx(-0.3 + p.kappa_bar)


def test_m0_continuous_profile_has_unbounded_support():
    with pytest.raises(NumericError):
        continuous_profile(P(m=0.0), 1.0, -0.5)


def test_inadmissible_raises():
    with pytest.raises(AdmissibilityError):
        continuous_profile(P(), 1.0, -0.6)


def test_jump_profile_closed_form(jump_m0):
    p = jump_m0
    k = p.kappa
    np.testing.assert_allclose(p.U, 1.0 + np.sqrt(k * (2.0 - k)), rtol=1e-13)
    assert p.U[MID] == pytest.approx(2.0, abs=1e-14)
    assert p.ell == pytest.approx(ELL_JUMP, rel=1e-10)
    assert abs(p.kappa_bar - 1.0) <= 1e-10 and abs(p.sigma) <= 1e-10
    assert p.residual <= 1e-8


def test_jump_profile_errors():
    with pytest.raises(ParameterError):
        jump_profile(P(M=1.5, m=0.0), 1.0)
    with pytest.raises(ParameterError):
        jump_profile(P(M=2.0, m=0.0), 0.0)


def test_to_dual_state_round_trip(jump_m0):
    s = to_dual_state(jump_m0, N=800)
    faces = jump_m0.xi[0] + s.d_eta * np.concatenate([[0.0], np.cumsum(s.v)])
    eta_f = np.linspace(0.0, 2.0, 801)
    k = jump_m0.kappa
    exact = np.interp(eta_f, k, jump_m0.xi)
    fine = np.abs(faces - exact)
    assert fine[0] == 0.0 and fine[-1] <= 1e-12
    assert s.ell == pytest.approx(jump_m0.ell, rel=1e-12)
    assert s.v[400] == pytest.approx(0.5, abs=1e-5)
    with pytest.raises(UnrepresentableError):
        to_dual_state(continuous_profile(P(), 1.0, -0.5))


def test_quadrature_family_matches_closed_form(entropic_m1):
    q = continuous_profile(P(flux=generic_copy(FLUX)), 1.0, -0.5, N=401)
    ref = continuous_profile(P(), 1.0, -0.5, N=401)
    np.testing.assert_allclose(q.U, ref.U, atol=1e-7)
    assert q.kappa_bar == pytest.approx(0.5, abs=1e-7)
    assert q.ell == pytest.approx(ELL_M1, rel=1e-6)


@settings(max_examples=15, deadline=None)
@given(a=st.floats(0.3, 3.0), M=st.floats(0.2, 1.0), m=st.sampled_from([1.0, 1.5, 2.0]))
def test_entropic_profiles_are_symmetric_and_stationary(a, M, m):
    M = M * 2.0 / a  # keep aM <= 2c
    p = continuous_profile(P(M=M, a=a, m=m), M, -a * M / 2, N=401)
    np.testing.assert_allclose(p.U, p.U[::-1], atol=1e-9 * max(1.0, p.U.max()))
    assert abs(p.kappa_bar - M / 2) <= 1e-8 * M
    assert abs(p.sigma) <= 1e-8 * max(1.0, a * M)
    assert p.mass_trapezoid() == pytest.approx(M, rel=1e-3)
