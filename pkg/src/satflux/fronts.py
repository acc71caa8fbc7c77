"""Physical-space reconstruction, front motion and the support laws."""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import InsufficientDataError, ParameterError, SupportCollapseError

if TYPE_CHECKING:
    from .solver import DualState, ModelParams, Trajectory


@dataclass(frozen=True)
class FrontState:
    t: float
    sigma_minus: float
    sigma_plus: float

    @property
    def ell(self) -> float:
        return self.sigma_plus - self.sigma_minus


@dataclass(frozen=True)
class PhysicalSnapshot:
    t: float
    x: np.ndarray
    u: np.ndarray
    mu: np.ndarray
    mu_bar: float
    sigma_minus: float
    sigma_plus: float
    sigma_c: float
    mass_center: float
    ell: float


@dataclass(frozen=True)
class SupportForecast:
    slope: float
    regime: str
    t_star: float | None = None


@dataclass(frozen=True)
class CenterDiagnostics:
    sigma_c: float
    mass_center: float
    identity_residual: float
    sigma_c_rate: float


def mu_bar(state: DualState) -> float:
    """Support average of the cumulative mass, ``int eta v / int v`` (midpoint rule)."""
    v = state.v
    return float(np.dot(state.eta, v) / np.sum(v))


def advance_fronts(fronts: FrontState, mu_bar: float, params: ModelParams, dt: float,
                   c_eff: float | None = None) -> FrontState:
    """One forward-Euler step of the front ODEs.

    ``c_eff`` replaces ``c`` as the saturation speed; the solver passes the
    regularised boundary value ``c - eps**kappa_bc`` so that the fronts stay
    exactly consistent with the discrete mass law.
    """
    if not dt > 0:
        raise ParameterError("dt must be positive")
    M = params.M
    if not 0.0 < mu_bar < M:
        raise ParameterError(f"mu_bar must lie in (0, M), got {mu_bar}")
    c = params.flux.c if c_eff is None else c_eff
    a = params.a
    sm = fronts.sigma_minus + dt * (-c + a * mu_bar)
    sp = fronts.sigma_plus + dt * (c - a * (M - mu_bar))
    if sp <= sm:
        raise SupportCollapseError(f"support collapsed at t={fronts.t + dt}")
    return FrontState(fronts.t + dt, sm, sp)


def reconstruct(state: DualState, sigma_minus: float,
                sigma_plus: float | None = None) -> PhysicalSnapshot:
    """Map the dual state back to positions ``x_i`` and densities ``u_i = 1/v_i``."""
    v = state.v
    d = state.d_eta
    faces = np.concatenate(([0.0], np.cumsum(v)))
    x = sigma_minus + d * (faces[:-1] + 0.5 * v)
    if sigma_plus is None:
        sigma_plus = sigma_minus + d * faces[-1]
    M = state.params.M
    mb = mu_bar(state)
    return PhysicalSnapshot(
        t=state.t, x=x, u=1.0 / v, mu=state.eta.copy(), mu_bar=mb,
        sigma_minus=float(sigma_minus), sigma_plus=float(sigma_plus),
        sigma_c=0.5 * (sigma_minus + sigma_plus),
        mass_center=float(d * np.sum(x) / M),
        ell=float(sigma_plus - sigma_minus),
    )


def predict_support(params: ModelParams, ell0: float, tol: float = 1e-12) -> SupportForecast:
    """Linear support law ``ell(t) = ell0 + (2c - aM) t`` and its zero crossing."""
    if not ell0 > 0:
        raise ParameterError("ell0 must be positive")
    c, a, M = params.flux.c, params.a, params.M
    slope = 2.0 * c - a * M
    if abs(slope) <= tol * max(c, 1.0):
        return SupportForecast(slope=slope, regime="critical")
    if slope > 0:
        return SupportForecast(slope=slope, regime="spreading")
    return SupportForecast(slope=slope, regime="concentrating", t_star=ell0 / (a * M - 2 * c))


def center_diagnostics(snapshot: PhysicalSnapshot, params: ModelParams) -> CenterDiagnostics:
    M = params.M
    resid = abs(M * snapshot.mass_center - M * snapshot.sigma_plus + snapshot.ell * snapshot.mu_bar)
    return CenterDiagnostics(
        sigma_c=snapshot.sigma_c,
        mass_center=snapshot.mass_center,
        identity_residual=float(resid),
        sigma_c_rate=params.a * (2.0 * snapshot.mu_bar - M),
    )


@dataclass(frozen=True)
class RHResidual:
    t: np.ndarray
    r_minus: np.ndarray
    r_plus: np.ndarray


def rh_residual_series(t, sigma_minus, sigma_plus, mu_bars, params: ModelParams) -> RHResidual:
    """Front speeds by (non-uniform) central differences against the front laws."""
    t = np.asarray(t, dtype=float)
    if t.size < 3:
        raise InsufficientDataError("need at least 3 snapshots for front speeds")
    c, a, M = params.flux.c, params.a, params.M
    mb = np.asarray(mu_bars, dtype=float)
    dm = np.gradient(np.asarray(sigma_minus, dtype=float), t)
    dp = np.gradient(np.asarray(sigma_plus, dtype=float), t)
    return RHResidual(t=t, r_minus=np.abs(dm - (-c + a * mb)),
                      r_plus=np.abs(dp - (c - a * (M - mb))))


def rh_residual(traj: Trajectory) -> RHResidual:
    fr = traj.fronts
    return rh_residual_series([f.t for f in fr], [f.sigma_minus for f in fr],
                              [f.sigma_plus for f in fr], [mu_bar(s) for s in traj.states],
                              traj.params)


def extrapolate_collapse(t, ell) -> float:
    """Zero crossing of the least-squares line through ``(t, ell)``."""
    slope, intercept = np.polyfit(np.asarray(t, float), np.asarray(ell, float), 1)
    if slope >= 0:
        return float("inf")
    return float(-intercept / slope)
