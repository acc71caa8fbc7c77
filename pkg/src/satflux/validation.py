"""Invariant checks over trajectories and the grid-convergence study.

Every check is a pure function of a :class:`~satflux.solver.Trajectory` and
returns :class:`InvariantEntry` records; tolerances live in ``TOLERANCES``
and are echoed into reports.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import ConfigError
from .fronts import center_diagnostics, extrapolate_collapse, reconstruct, rh_residual
from .solver import (ModelParams, SchemeConfig, Trajectory, bv_seminorm, run,
                     steady_jump_profile)

TOLERANCES = {
    "mass_law": 1e-10,          # times (1 + t_end)
    "envelope_slack": 10.0,     # times d_eta
    "support_law_abs": 1e-9,    # plus 2 eps**kappa_bc * t
    "blow_up_rel": 0.05,
    "center_identity": 1e-6,    # times M (1 + |sigma_plus|)
    "center_sign_gap": 1e-6,
    "positivity_frac": 0.9,     # of sigma1 / a
    "rh": 1e-3,
    "steady": 5e-3,
    "order": 0.8,
    "refine_growth": 1.10,
    "envelope_B0_margin": 1.01,
}

__all__ = [
    "TOLERANCES", "EnvelopeParams", "InvariantEntry", "InvariantReport", "ObservedOrderReport",
    "envelope_params", "check_mass_law", "check_bounds", "check_support_law",
    "check_blow_up_forecast", "check_center_identity", "check_positivity", "check_rh",
    "check_steady", "check_bv", "bv_seminorm", "validate", "convergence_study",
]


@dataclass(frozen=True)
class InvariantEntry:
    name: str
    residual: float
    tolerance: float
    passed: bool
    t: float | None = None
    eta: float | None = None
    note: str = ""

    def to_dict(self) -> dict:
        # JSON has no nan/inf; they become null
        return {k: (None if isinstance(v, float) and not np.isfinite(v) else v)
                for k, v in asdict(self).items()}


@dataclass
class InvariantReport:
    entries: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def __getitem__(self, name: str) -> InvariantEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def to_json(self) -> str:
        return json.dumps([e.to_dict() for e in self.entries], indent=2)


@dataclass(frozen=True)
class EnvelopeParams:
    sigma1: float
    lambda_env: float
    A: float
    h: np.ndarray
    B0: float
    C5: float

    def B(self, t):
        return self.C5 * np.asarray(t, dtype=float) + self.B0


def _eps(traj: Trajectory) -> float:
    return traj.config.eps_for(traj.params.M)


def envelope_params(traj: Trajectory, C5: float | None = None) -> EnvelopeParams:
    """Sub/super-solution data for a run; ``C5`` defaults to the run's 10-step estimate."""
    p, cfg = traj.params, traj.config
    c, M = p.flux.c, p.M
    v0 = traj.states[0].v
    eps = _eps(traj)
    shift = c - eps ** cfg.lambda_env
    A = 2.0 * shift / M
    eta = traj.states[0].eta
    h = p.flux.G_diff(A * eta - shift, shift) / A
    B0 = TOLERANCES["envelope_B0_margin"] * max(M * float(p.flux.G(np.array(c))) / c, float(v0.max()))
    if C5 is None:
        C5 = float(traj.meta.get("c5_estimate", 0.0))
    return EnvelopeParams(sigma1=float(v0.min()), lambda_env=cfg.lambda_env, A=A,
                          h=np.asarray(h, dtype=float), B0=B0, C5=float(C5))


def check_mass_law(traj: Trajectory) -> InvariantEntry:
    p = traj.params
    eps = _eps(traj)
    slope = 2.0 * (p.flux.c - eps ** traj.config.kappa_bc) - p.a * p.M
    d = p.M / traj.states[0].N
    m0 = d * np.sum(traj.states[0].v)
    res = np.array([abs(d * np.sum(s.v) - m0 - slope * s.t) for s in traj.states])
    k = int(np.argmax(res))
    tol = TOLERANCES["mass_law"] * (1.0 + traj.config.t_end)
    # a total over the grid: the violation is located in time only
    return InvariantEntry("mass_law", float(res[k]), tol, bool(res[k] <= tol),
                          t=float(traj.states[k].t))


def check_bounds(traj: Trajectory, env: EnvelopeParams | None = None) -> list[InvariantEntry]:
    """Lower envelope ``sigma1 - a t`` and upper envelope ``B(t) + max h``."""
    env = env or envelope_params(traj)
    p = traj.params
    slack = TOLERANCES["envelope_slack"] * p.M / traj.states[0].N
    hmax = float(np.max(env.h))
    lo_viol, hi_viol = [], []
    for s in traj.states:
        lo_viol.append((env.sigma1 - p.a * s.t - slack) - float(s.v.min()))
        hi_viol.append(float(s.v.max()) - (float(env.B(s.t)) + hmax + slack))
    out = []
    for name, viol, key in (("lower_envelope", lo_viol, np.argmin), ("upper_envelope", hi_viol, np.argmax)):
        viol = np.array(viol)
        k = int(np.argmax(viol))
        st = traj.states[k]
        eta = float(st.eta[int(key(st.v))])
        out.append(InvariantEntry(name, float(max(viol[k], 0.0)), 0.0, bool(viol[k] <= 0.0),
                                  t=float(st.t), eta=eta,
                                  note=f"C5={env.C5:.6g}, B0={env.B0:.6g}" if name == "upper_envelope" else ""))
    return out


def check_support_law(traj: Trajectory) -> InvariantEntry:
    p = traj.params
    eps = _eps(traj)
    ell0 = traj.fronts[0].ell
    slope = 2.0 * p.flux.c - p.a * p.M
    res = np.array([abs(f.ell - ell0 - slope * f.t) - 2.0 * eps ** traj.config.kappa_bc * f.t
                    for f in traj.fronts])
    k = int(np.argmax(res))
    tol = TOLERANCES["support_law_abs"]
    return InvariantEntry("support_law", float(max(res[k], 0.0)), tol, bool(res[k] <= tol),
                          t=float(traj.fronts[k].t), note="excess over 2 eps^kappa_bc t")


def check_blow_up_forecast(traj: Trajectory) -> InvariantEntry:
    p = traj.params
    slope = 2.0 * p.flux.c - p.a * p.M
    tol = TOLERANCES["blow_up_rel"]
    if slope >= 0:
        return InvariantEntry("blow_up_forecast", 0.0, tol, True, note="not concentrating")
    ell = np.array([f.ell for f in traj.fronts])
    t = np.array([f.t for f in traj.fronts])
    if ell[-1] > 0.1 * ell[0] * (1 + 1e-9):
        return InvariantEntry("blow_up_forecast", 0.0, tol, True,
                              note="run stopped before ell <= 0.1 ell0; forecast not assessed")
    t_star = ell[0] / (p.a * p.M - 2.0 * p.flux.c)
    t_fit = extrapolate_collapse(t, ell)
    rel = abs(t_fit - t_star) / t_star
    return InvariantEntry("blow_up_forecast", float(rel), tol, bool(rel <= tol),
                          note=f"fit={t_fit:.8g}, T*={t_star:.8g}")


def check_center_identity(traj: Trajectory) -> list[InvariantEntry]:
    p = traj.params
    M = p.M
    worst, worst_t = 0.0, 0.0
    sign_bad, sign_t = 0, None
    gap = TOLERANCES["center_sign_gap"]
    for s, f in zip(traj.states, traj.fronts):
        snap = reconstruct(s, f.sigma_minus, f.sigma_plus)
        cd = center_diagnostics(snap, p)
        rel = cd.identity_residual / (M * (1.0 + abs(snap.sigma_plus)))
        if rel > worst:
            worst, worst_t = rel, s.t
        diff = cd.sigma_c - cd.mass_center
        if abs(diff) > gap and np.sign(diff) != np.sign(cd.sigma_c_rate):
            sign_bad += 1
            sign_t = s.t if sign_t is None else sign_t
    tol = TOLERANCES["center_identity"]
    return [
        InvariantEntry("center_identity", float(worst), tol, bool(worst <= tol), t=float(worst_t)),
        InvariantEntry("center_sign", float(sign_bad), 0.0, sign_bad == 0, t=sign_t,
                       note="count of snapshots with sign(sigma_c_rate) != sign(sigma_c - m)"),
    ]


def check_positivity(traj: Trajectory) -> InvariantEntry:
    """No positivity loss before ``0.9 * sigma1 / a``."""
    sigma1 = float(traj.states[0].v.min())
    horizon = TOLERANCES["positivity_frac"] * sigma1 / traj.params.a
    lost = traj.termination == "positivity_loss"
    ok = (not lost) or traj.termination_time >= horizon
    return InvariantEntry("positivity", float(traj.termination_time if lost else 0.0), horizon,
                          bool(ok), t=float(traj.termination_time) if lost else None,
                          note=f"termination={traj.termination}")


def check_rh(traj: Trajectory) -> list[InvariantEntry]:
    tol = TOLERANCES["rh"]
    if len(traj.states) < 3:
        return [InvariantEntry("rh_residual", float("nan"), tol, True, note="fewer than 3 snapshots")]
    r = rh_residual(traj)
    out = []
    for name, arr in (("rh_minus", r.r_minus), ("rh_plus", r.r_plus)):
        k = int(np.argmax(arr))
        out.append(InvariantEntry(name, float(arr[k]), tol, bool(arr[k] <= tol), t=float(r.t[k])))
    return out


def check_steady(traj: Trajectory) -> InvariantEntry:
    v0, v1 = traj.states[0].v, traj.states[-1].v
    diff = np.abs(v1 - v0)
    k = int(np.argmax(diff))
    tol = TOLERANCES["steady"]
    return InvariantEntry("steady_state", float(diff[k]), tol, bool(diff[k] <= tol),
                          t=float(traj.states[-1].t), eta=float(traj.states[-1].eta[k]))


def check_bv(traj: Trajectory) -> InvariantEntry:
    vals = np.array([bv_seminorm(s) for s in traj.states])
    return InvariantEntry("bv_finite", float(np.max(vals)), float("inf"),
                          bool(np.all(np.isfinite(vals))), note="diagnostic only")


def validate(traj: Trajectory, *, steady: bool = False,
             env: EnvelopeParams | None = None) -> InvariantReport:
    """Run every applicable check; ``steady`` adds the stationarity and RH entries."""
    entries = [check_mass_law(traj), *check_bounds(traj, env), check_support_law(traj),
               check_blow_up_forecast(traj), *check_center_identity(traj), check_positivity(traj),
               check_bv(traj)]
    if steady:
        entries += [check_steady(traj), *check_rh(traj)]
    return InvariantReport(entries)


# ---------------------------------------------------------------------------
# convergence


@dataclass(frozen=True)
class ObservedOrderReport:
    grids: tuple
    errors: tuple
    orders: tuple
    order: float
    monotone_ok: bool
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def convergence_study(params: ModelParams, base_config: SchemeConfig, grids,
                      v_edge: float = 1.0, backend: str | None = None) -> ObservedOrderReport:
    """Steady jump-wave preservation error ``||v(t_end) - v(0)||_inf`` over doubling grids."""
    grids = [int(n) for n in grids]
    if len(grids) < 3:
        raise ConfigError("convergence study needs at least 3 grids")
    if any(b != 2 * a for a, b in zip(grids, grids[1:])):
        raise ConfigError(f"grids must double successively, got {grids}")
    errors = []
    for n in grids:
        cfg = replace(base_config, N=n, snapshot_dt=base_config.t_end)
        v0 = steady_jump_profile(params, v_edge, n).v
        traj = run(params, cfg, v0, backend=backend)
        errors.append(float(np.max(np.abs(traj.states[-1].v - v0))))
    e = np.array(errors)
    orders = tuple(float(np.log2(e[i] / e[i + 1])) for i in range(len(e) - 1))
    order = float(-np.polyfit(np.log(grids), np.log(e), 1)[0])
    monotone = all(b <= TOLERANCES["refine_growth"] * a for a, b in zip(e, e[1:]))
    return ObservedOrderReport(grids=tuple(grids), errors=tuple(errors), orders=orders, order=order,
                               monotone_ok=bool(monotone),
                               passed=bool(order >= TOLERANCES["order"] and monotone))
