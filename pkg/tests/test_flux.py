import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satflux import (DomainError, G_eval, ParameterError, g_eval, generic_copy, make_classical_flux,
                     make_flux, phi_eval, phi_prime, validate_hypotheses)

# Oracle values below were computed with mpmath at 30 digits (closed forms
# and independent quadrature of g) and frozen.
ORACLE_NU2_C3 = {
    "phi(2.5)": 2.57247877713763256,
    "dphi(2.5)": 0.272380105814572859,
    "g(0.9)": 0.471728176524863233,
    "G(1.7)": 0.792237871707517427,
}

finite_y = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


def test_constructor_rejects_bad_parameters():
    for nu, c in [(0, 1), (-1, 1), (1, 0), (1, float("nan"))]:
        with pytest.raises(ParameterError):
            make_classical_flux(nu, c)


def test_classical_examples(flux):
    assert phi_eval(flux, 0.0) == 0.0
    assert phi_eval(flux, 1.0) == pytest.approx(0.7071067811, abs=1e-10)
    assert phi_eval(flux, -2.0) == -phi_eval(flux, 2.0)
    assert abs(phi_eval(flux, 1e6) - (1 - 5e-13)) <= 1e-12
    assert phi_eval(flux, 1e6) >= flux.c - flux.K_tail / 1e6
    assert phi_prime(flux, 0.0) == 1.0
    assert phi_prime(flux, 100.0) / phi_prime(flux, 200.0) == pytest.approx(8.0, rel=0.02)
    assert g_eval(flux, 0.0) == 0.0
    assert g_eval(flux, 2 ** -0.5) == pytest.approx(1.0, rel=1e-14)
    assert G_eval(flux, 0.0) == 0.0
    assert G_eval(flux, 0.5) == G_eval(flux, -0.5)
    assert G_eval(flux, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert flux.alpha == 2.0


def test_nonunit_parameters_match_oracle():
    f = make_classical_flux(2.0, 3.0)
    assert phi_eval(f, 2.5) == pytest.approx(ORACLE_NU2_C3["phi(2.5)"], rel=1e-14)
    assert phi_prime(f, 2.5) == pytest.approx(ORACLE_NU2_C3["dphi(2.5)"], rel=1e-14)
    assert g_eval(f, 0.9) == pytest.approx(ORACLE_NU2_C3["g(0.9)"], rel=1e-14)
    assert G_eval(f, 1.7) == pytest.approx(ORACLE_NU2_C3["G(1.7)"], rel=1e-13)
    assert G_eval(f, 3.0) == pytest.approx(9.0 / 2.0, rel=1e-14)


def test_domain_errors(flux):
    with pytest.raises(DomainError):
        g_eval(flux, 1.0)
    with pytest.raises(DomainError):
        g_eval(flux, -1.5)
    with pytest.raises(DomainError):
        G_eval(flux, 1.0 + 1e-9)
    for bad in (float("nan"), float("inf")):
        with pytest.raises(DomainError):
            phi_eval(flux, bad)
        with pytest.raises(DomainError):
            phi_prime(flux, bad)


def test_array_input_returns_array(flux):
    y = np.linspace(-3, 3, 7)
    out = phi_eval(flux, y)
    assert isinstance(out, np.ndarray) and out.shape == y.shape


def test_generic_route_matches_closed_form(flux):
    gen = generic_copy(flux)
    assert not gen.closed_form
    u = np.linspace(-1.0, 1.0, 101)
    np.testing.assert_allclose(gen.G(u), flux.G(u), atol=1e-10, rtol=0)
    r = np.linspace(-0.999, 0.999, 41)
    np.testing.assert_allclose(gen.g(r), flux.g(r), rtol=1e-10)


def test_G_diff_handles_saturated_endpoints(flux):
    assert float(flux.G_diff(1.0, -1.0)) == 0.0
    assert float(flux.G_diff(1.0, 0.0)) == pytest.approx(1.0)
    # G(1) - G(x) = sqrt((1-x)(1+x)); cancellation-free when the gaps are supplied
    h = 1e-12
    got = float(flux.G_diff(1.0, 1.0 - h, gap=h, x_dist=(h, 2.0 - h)))
    assert got == pytest.approx(math.sqrt(h * (2.0 - h)), rel=1e-14)


def test_validator_accepts_builtin(flux):
    rep = validate_hypotheses(flux)
    assert rep.passed, rep.to_dict()
    assert set(rep.checks) == {"odd", "monotone", "saturation", "tail_exponent", "round_trip"}
    assert abs(rep.checks["tail_exponent"][1] - 2.0) <= 0.2


def test_validator_rejects_linear():
    lin = make_flux(lambda y: np.asarray(y, float), c=1.0, alpha=2.0, K_tail=1.0,
                    dphi=lambda y: np.ones_like(np.asarray(y, float)))
    rep = validate_hypotheses(lin)
    assert not rep.passed
    assert not rep.checks["saturation"][0]


def test_validator_rejects_shifted():
    sh = make_flux(lambda y: np.asarray(y) / np.sqrt(1 + np.asarray(y) ** 2) + 0.1, c=1.0,
                   alpha=2.0, K_tail=0.5)
    rep = validate_hypotheses(sh)
    assert not rep.checks["odd"][0]
    assert "odd" in rep.failed()


def test_validator_preconditions(flux):
    with pytest.raises(ParameterError):
        validate_hypotheses(flux, n_samples=4)
    with pytest.raises(ParameterError):
        validate_hypotheses(flux, y_max=0.0)


@settings(max_examples=200, deadline=None)
@given(y=finite_y, nu=st.floats(0.1, 10), c=st.floats(0.1, 10))
def test_phi_odd_bounded(y, nu, c):
    f = make_classical_flux(nu, c)
    p = phi_eval(f, y)
    assert abs(p + phi_eval(f, -y)) <= 1e-12 * max(1.0, abs(p))
    assert abs(p) <= c
    if nu / c * abs(y) <= 1e6:
        assert abs(p) < c
    assert phi_prime(f, y) >= 0


@settings(max_examples=200, deadline=None)
@given(y1=finite_y, y2=finite_y)
def test_phi_strictly_increasing(flux, y1, y2):
    if abs(y1 - y2) < 1e-6 * max(1.0, abs(y1)) or max(abs(y1), abs(y2)) > 1e3:
        return
    lo, hi = sorted((y1, y2))
    assert phi_eval(flux, lo) < phi_eval(flux, hi)


@settings(max_examples=200, deadline=None)
@given(y=st.floats(-1e3, 1e3), nu=st.floats(0.2, 5), c=st.floats(0.2, 5))
def test_round_trip(y, nu, c):
    # beyond (nu/c)|y| ~ 1e3 phi sits within 1e-6 c of saturation and one
    # rounding of phi already moves g by more than 1e-8 relative
    if nu / c * abs(y) > 1e3:
        y = math.copysign(1e3 * c / nu, y)
    f = make_classical_flux(nu, c)
    assert abs(g_eval(f, phi_eval(f, y)) - y) <= 1e-8 * max(1.0, abs(y))


@settings(max_examples=200, deadline=None)
@given(u=st.floats(0, 1), w=st.floats(0, 1))
def test_G_even_nondecreasing(flux, u, w):
    assert G_eval(flux, u) == G_eval(flux, -u)
    lo, hi = sorted((u, w))
    assert G_eval(flux, lo) <= G_eval(flux, hi)
    assert G_eval(flux, u) >= 0


def test_tail_bound_holds_on_grid(flux):
    y = np.logspace(0, 6, 500)
    assert np.all(flux.phi(y) >= flux.c - flux.K_tail / y)
