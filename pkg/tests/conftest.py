"""Shared fixtures. The three reference runs are computed once per session."""
import numpy as np
import pytest

from satflux import ModelParams, SchemeConfig, make_classical_flux, run, steady_jump_profile


@pytest.fixture(scope="session")
def flux():
    return make_classical_flux(1.0, 1.0)


def _params(flux, M, m=0.0, a=1.0):
    return ModelParams(a=a, m=m, M=M, flux=flux)


@pytest.fixture(scope="session")
def spreading_run(flux):
    return run(_params(flux, 1.0), SchemeConfig(N=400, eps=1e-3, t_end=1.0), 1.0)


@pytest.fixture(scope="session")
def blow_up_run(flux):
    cfg = SchemeConfig(N=400, eps=1e-3, t_end=1.0, ell_floor_frac=0.1)
    return run(_params(flux, 4.0), cfg, 0.25)


@pytest.fixture(scope="session")
def jump_run(flux):
    p = _params(flux, 2.0)
    return run(p, SchemeConfig(N=400, eps=1e-3, t_end=1.0), steady_jump_profile(p, 1.0, 400).v)


@pytest.fixture(scope="session")
def acceptance_runs(spreading_run, blow_up_run, jump_run):
    return {"spreading": spreading_run, "blow_up": blow_up_run, "jump": jump_run}


@pytest.fixture
def small_params(flux):
    return _params(flux, 1.0)


def linear_v(M=1.0, N=400):
    eta = (np.arange(N) + 0.5) * M / N
    return eta, 1.0 + eta


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get(
        "tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
