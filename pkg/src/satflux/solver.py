"""Explicit finite-volume solver for the dual (mass-coordinate) equation.

The unknown ``v = 1/u`` lives on cell centres ``eta_i = (i + 1/2) d_eta`` of
``(0, M)`` and obeys

    v_t = d/deta [phi(v_eta / v^(2+m)) + eps v_eta] - a

with the boundary fluxes pinned to ``-/+ (c - eps**kappa_bc)``. Conservation
form makes the discrete mass law exact up to roundoff.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Union

import numpy as np

from . import kernels
from .errors import (CompatibilityError, DegenerateProfileError, NoSteadyStateError,
                     ParameterError, PositivityLossError)
from .flux import FluxModel
from .fronts import FrontState, center_diagnostics, mu_bar, reconstruct, rh_residual

log = logging.getLogger(__name__)

Sampler = Union[Callable[[np.ndarray], np.ndarray], np.ndarray, float]


@dataclass(frozen=True)
class ModelParams:
    a: float
    m: float
    M: float
    flux: FluxModel

    def __post_init__(self):
        if not self.a > 0:
            raise ParameterError(f"a must be positive, got {self.a}")
        if not self.m >= 0:
            raise ParameterError(f"m must be >= 0, got {self.m}")
        if not self.M > 0:
            raise ParameterError(f"M must be positive, got {self.M}")

    def to_dict(self) -> dict:
        return {"a": self.a, "m": self.m, "M": self.M, "flux": self.flux.to_dict()}


@dataclass(frozen=True)
class SchemeConfig:
    """Grid, regularisation and output cadence for one run.

    ``eps=None`` ties the regularisation to the grid (``eps = d_eta``).
    """

    N: int = 400
    eps: float | None = None
    kappa_bc: float = 1.5
    lambda_env: float = 0.3
    cfl: float = 0.9
    t_end: float = 1.0
    snapshot_dt: float = 0.05
    mean: str = "arithmetic"
    ell_floor_frac: float = 0.05
    max_steps: int = 50_000_000

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 8:
            raise ParameterError(f"N must be an integer >= 8, got {self.N}")
        if self.eps is not None and not self.eps > 0:
            raise ParameterError("eps must be positive")
        if not self.kappa_bc > 0:
            raise ParameterError("kappa_bc must be positive")
        if not self.lambda_env > 0:
            raise ParameterError("lambda_env must be positive")
        if not 0 < self.cfl <= 1:
            raise ParameterError("cfl must lie in (0, 1]")
        if not self.t_end > 0 or not self.snapshot_dt > 0:
            raise ParameterError("t_end and snapshot_dt must be positive")
        if self.mean not in kernels.MEAN_KINDS:
            raise ParameterError(f"mean must be one of {sorted(kernels.MEAN_KINDS)}")
        if not 0 <= self.ell_floor_frac < 1:
            raise ParameterError("ell_floor_frac must lie in [0, 1)")

    def eps_for(self, M: float) -> float:
        return M / self.N if self.eps is None else float(self.eps)

    def c_eff(self, c: float, M: float) -> float:
        """Regularised boundary flux magnitude ``c - eps**kappa_bc``."""
        return c - self.eps_for(M) ** self.kappa_bc

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class DualState:
    t: float
    params: ModelParams
    v: np.ndarray

    def __post_init__(self):
        v = np.array(self.v, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    @property
    def N(self) -> int:
        return self.v.shape[0]

    @property
    def d_eta(self) -> float:
        return self.params.M / self.N

    @property
    def eta(self) -> np.ndarray:
        return (np.arange(self.N) + 0.5) * self.d_eta

    @property
    def ell(self) -> float:
        return float(self.d_eta * np.sum(self.v))


@dataclass(frozen=True)
class DiagnosticsRow:
    t: float
    sigma_minus: float
    sigma_plus: float
    ell: float
    mu_bar: float
    sigma_c: float
    mass_center: float
    vmin: float
    vmax: float
    mass_law_residual: float
    bv_seminorm: float
    rh_minus: float = float("nan")
    rh_plus: float = float("nan")

    COLUMNS = ("t", "sigma_minus", "sigma_plus", "ell", "mu_bar", "sigma_c", "mass_center",
               "vmin", "vmax", "mass_law_residual", "bv_seminorm", "rh_minus", "rh_plus")

    def values(self) -> tuple:
        return tuple(getattr(self, k) for k in self.COLUMNS)


@dataclass
class Trajectory:
    params: ModelParams
    config: SchemeConfig
    states: list = field(default_factory=list)
    fronts: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    termination: str = "reached_t_end"
    termination_time: float = float("nan")
    meta: dict = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    def __len__(self) -> int:
        return len(self.states)


# ---------------------------------------------------------------------------
# initial data


def sample(v0: Sampler, eta: np.ndarray) -> np.ndarray:
    if callable(v0):
        out = np.asarray(v0(eta), dtype=float)
        return np.broadcast_to(out, eta.shape).copy()
    arr = np.asarray(v0, dtype=float)
    if arr.ndim == 0:
        return np.full(eta.shape, float(arr))
    if arr.shape != eta.shape:
        raise ParameterError(f"initial array has shape {arr.shape}, grid needs {eta.shape}")
    return arr.copy()


@dataclass(frozen=True)
class CompatibilityRamp:
    """Boundary-layer replacement making an initial datum satisfy the regularised BCs."""

    v0: Callable[[np.ndarray], np.ndarray]
    M: float
    B: float
    delta_left: float
    delta_right: float
    residual_left: float
    residual_right: float

    def __call__(self, eta):
        eta = np.asarray(eta, dtype=float)
        out = np.array(self.v0(eta), dtype=float, copy=True)
        out = np.broadcast_to(out, eta.shape).copy()
        dl, dr, B, M = self.delta_left, self.delta_right, self.B, self.M
        left = eta < dl
        right = eta > M - dr
        out[left] = float(self.v0(np.array(dl))) + B * (dl - eta[left])
        out[right] = float(self.v0(np.array(M - dr))) + B * (eta[right] - (M - dr))
        return out


def compatibility_ramp(v0: Callable, params: ModelParams, eps: float, kappa_bc: float,
                       delta0: float) -> CompatibilityRamp:
    """Solve for the boundary-layer widths by bisection (to 1e-10) at both ends."""
    M = params.M
    if not 0 < delta0 < M / 2:
        raise ParameterError("delta0 must lie in (0, M/2)")
    flux, p = params.flux, 2.0 + params.m
    target = flux.c - eps ** kappa_bc
    if not target > 0:
        raise CompatibilityError(f"eps**kappa_bc >= c for eps={eps}; choose a smaller eps")
    B = target / (2.0 * eps)

    def v0s(x):
        return float(np.asarray(v0(np.array(x)), dtype=float))

    def solve(edge_value):
        def F(delta):
            return float(flux.phi(B / (edge_value(delta) + delta * B) ** p)) + eps * B - target

        lo, hi = 0.0, float(delta0)
        f_lo, f_hi = F(lo), F(hi)
        if not (f_lo > 0 > f_hi):
            raise CompatibilityError(
                f"no boundary-layer width in (0, {delta0}] for eps={eps:g}; try a smaller eps")
        while hi - lo > 1e-10:
            mid = 0.5 * (lo + hi)
            if F(mid) > 0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    dl = solve(lambda d: v0s(d))
    dr = solve(lambda d: v0s(M - d))
    vl = v0s(dl) + dl * B
    vr = v0s(M - dr) + dr * B
    res_l = abs(float(flux.phi(-B / vl ** p)) - eps * B + target)
    res_r = abs(float(flux.phi(B / vr ** p)) + eps * B - target)
    return CompatibilityRamp(v0=v0, M=M, B=B, delta_left=dl, delta_right=dr,
                             residual_left=res_l, residual_right=res_r)


def compatibilize_initial(v0: Callable, params: ModelParams, eps: float, kappa_bc: float,
                          delta0: float, N: int = 400) -> DualState:
    ramp = compatibility_ramp(v0, params, eps, kappa_bc, delta0)
    eta = (np.arange(N) + 0.5) * params.M / N
    return DualState(0.0, params, ramp(eta))


def steady_jump_profile(params: ModelParams, v_edge: float, N: int) -> DualState:
    """Stationary dual state at critical mass: the reciprocal of the jump wave.

    ``U(eta)^(m+1) = v_edge^(m+1) + (m+1)/a [G(c) - G(c - a eta)]`` sampled at
    cell centres, ``v = 1/U``.
    """
    c, a, M, m = params.flux.c, params.a, params.M, params.m
    if abs(a * M - 2.0 * c) > 1e-12 * c:
        raise NoSteadyStateError(f"steady jump profile needs aM = 2c (aM={a * M}, 2c={2 * c})")
    if v_edge == 0:
        raise DegenerateProfileError("v_edge = 0 makes v unbounded at the ends")
    if not v_edge > 0:
        raise ParameterError("v_edge must be positive")
    eta = (np.arange(N) + 0.5) * M / N
    U = (v_edge ** (m + 1) + (m + 1) / a * params.flux.G_diff(c, c - a * eta)) ** (1.0 / (m + 1))
    return DualState(0.0, params, 1.0 / U)


# ---------------------------------------------------------------------------
# one step


def numerical_flux(state: DualState, i: int, eps: float, kappa_bc: float,
                   mean: str = "arithmetic") -> float:
    """Flux through interface ``i - 1/2`` for ``i`` in ``0..N``."""
    N = state.N
    if not 0 <= i <= N:
        raise ParameterError(f"interface index must lie in [0, {N}]")
    c_eff = state.params.flux.c - eps ** kappa_bc
    if i == 0:
        return -c_eff
    if i == N:
        return c_eff
    v = state.v
    d = state.d_eta
    s = (v[i] - v[i - 1]) / d
    vt = kernels._pykernel.interface_means(v[i - 1:i + 1], kernels.MEAN_KINDS[mean])[0]
    return float(state.params.flux.phi(s / vt ** (2.0 + state.params.m))) + eps * s


def stable_dt(state: DualState, config: SchemeConfig) -> float:
    p = state.params
    return float(kernels._pykernel.stable_dt(
        state.v, state.d_eta, p.m, float(p.flux.dphi(np.array(0.0))),
        config.eps_for(p.M), config.cfl, kernels.MEAN_KINDS[config.mean]))


def step(state: DualState, config: SchemeConfig, dt: float | None = None) -> DualState:
    """Advance one explicit step (``dt`` defaults to the stability bound)."""
    p = state.params
    eps = config.eps_for(p.M)
    if dt is None:
        dt = stable_dt(state, config)
    F = kernels._pykernel.interface_fluxes(state.v, state.d_eta, p.m, eps,
                                           config.c_eff(p.flux.c, p.M), p.flux.phi,
                                           kernels.MEAN_KINDS[config.mean])
    v_new = state.v + dt * ((F[1:] - F[:-1]) / state.d_eta - p.a)
    if np.any(v_new <= 0):
        raise PositivityLossError(f"v <= 0 after step at t={state.t + dt}")
    return DualState(state.t + dt, p, v_new)


# ---------------------------------------------------------------------------
# full run


def bv_seminorm(state: DualState) -> float:
    return float(np.sum(np.abs(np.diff(state.v))))


def _diagnostics(state: DualState, fr: FrontState, ell0_dual: float, slope: float) -> DiagnosticsRow:
    snap = reconstruct(state, fr.sigma_minus, fr.sigma_plus)
    cd = center_diagnostics(snap, state.params)
    return DiagnosticsRow(
        t=state.t, sigma_minus=fr.sigma_minus, sigma_plus=fr.sigma_plus, ell=fr.ell,
        mu_bar=snap.mu_bar, sigma_c=cd.sigma_c, mass_center=cd.mass_center,
        vmin=float(state.v.min()), vmax=float(state.v.max()),
        mass_law_residual=abs(state.ell - ell0_dual - slope * state.t),
        bv_seminorm=bv_seminorm(state),
    )


def run(params: ModelParams, config: SchemeConfig, v0: Sampler, sigma_minus: float = 0.0,
        backend: str | None = None) -> Trajectory:
    """Integrate to ``t_end`` or until positivity loss / support collapse.

    Fronts advance with the same time step (forward Euler) using the
    regularised speed ``c - eps**kappa_bc``; snapshots land exactly on
    multiples of ``snapshot_dt``. Termination events are recorded, not raised.
    """
    N, M = int(config.N), params.M
    d = M / N
    eta = (np.arange(N) + 0.5) * d
    v = sample(v0, eta)
    if not np.all(np.isfinite(v)) or np.any(v <= 0):
        raise ParameterError("initial dual datum must be finite and positive")

    flux = params.flux
    eps = config.eps_for(M)
    c_eff = config.c_eff(flux.c, M)
    slope = 2.0 * c_eff - params.a * M
    nu = float(flux.dphi(np.array(0.0)))
    kw = dict(M=M, a=params.a, c=flux.c, nu=nu, m=params.m, eps=eps, c_eff=c_eff,
              cfl=config.cfl, mean_kind=kernels.MEAN_KINDS[config.mean], flux=flux,
              backend=backend)

    traj = Trajectory(params=params, config=config)
    state = DualState(0.0, params, v)
    ell0 = state.ell
    ell_floor = config.ell_floor_frac * ell0
    fr = FrontState(0.0, float(sigma_minus), float(sigma_minus) + ell0)
    traj.states.append(state)
    traj.fronts.append(fr)

    t, t_comp, sm, sp = 0.0, 0.0, fr.sigma_minus, fr.sigma_plus
    total_steps = 0
    status = kernels.REACHED
    n_snap = int(np.floor(config.t_end / config.snapshot_dt + 1e-9))
    targets = [k * config.snapshot_dt for k in range(1, n_snap + 1)]
    if not targets or targets[-1] < config.t_end * (1 - 1e-12):
        targets.append(config.t_end)

    # C5 envelope monitor rate: max drift over the first 10 steps
    v_start = v.copy()
    t, t_comp, sm, sp, k, status = kernels.advance(
        v, t, targets[0], sm, sp, ell_floor=ell_floor, max_steps=10, t_comp=t_comp, **kw)
    total_steps += k
    c5 = float(max(0.0, np.max(v - v_start) / t)) if t > 0 else 0.0
    if status == kernels.MAX_STEPS:
        status = kernels.REACHED

    for target in targets:
        if status == kernels.REACHED and t < target:
            t, t_comp, sm, sp, k, status = kernels.advance(
                v, t, target, sm, sp, ell_floor=ell_floor,
                max_steps=config.max_steps - total_steps, t_comp=t_comp, **kw)
            total_steps += k
        if t > traj.states[-1].t:
            traj.states.append(DualState(t, params, v))
            traj.fronts.append(FrontState(t, sm, sp))
        if status != kernels.REACHED:
            break

    traj.termination = {kernels.REACHED: "reached_t_end",
                        kernels.POSITIVITY_LOSS: "positivity_loss",
                        kernels.BLOW_UP: "blow_up_threshold",
                        kernels.MAX_STEPS: "max_steps"}[status]
    traj.termination_time = t
    traj.rows = [_diagnostics(s, f, ell0, slope) for s, f in zip(traj.states, traj.fronts)]
    if len(traj.states) >= 3:
        rh = rh_residual(traj)
        traj.rows = [replace(r, rh_minus=float(a), rh_plus=float(b))
                     for r, a, b in zip(traj.rows, rh.r_minus, rh.r_plus)]
    traj.meta = {
        "backend": backend or kernels.BACKEND if flux.closed_form else "python",
        "steps": total_steps,
        "eps": eps,
        "c_eff": c_eff,
        "mass_slope": slope,
        "ell0": ell0,
        "ell_floor": ell_floor,
        "c5_estimate": c5,
        "sigma1": float(v_start.min()),
        "vmax0": float(v_start.max()),
    }
    log.info("run finished: %s at t=%.6g after %d steps", traj.termination, t, total_steps)
    return traj
