"""Traveling-wave profiles in mass coordinates.

Profiles are built on the cumulative-mass variable ``kappa in [0, M]``:

* continuous kind, parameterised by the reduced speed ``tau = sigma - a*kappa_bar``::

      U^(m+1) = (m+1)/a [G(aM + tau) - G(a kappa + tau)]

* jump kind, at critical mass ``M = 2c/a``::

      U^(m+1) = v_edge^(m+1) + (m+1)/a [G(c) - G(c - a kappa)]

Space positions follow from ``dxi/dkappa = 1/U``; ``kappa_bar`` and the wave
speed are computed afterwards from the emitted profile.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from .errors import AdmissibilityError, NumericError, ParameterError, UnrepresentableError
from .solver import DualState, ModelParams

N_PROBES = 64
N_PROFILE = 1601
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class AdmissibilityReport:
    mass_ok: bool
    sigma_range_ok: bool
    kappa_star: float
    entropic: bool
    h_positive: bool
    messages: tuple = ()

    @property
    def admissible(self) -> bool:
        return self.mass_ok and self.sigma_range_ok and self.kappa_star <= 0 and self.h_positive


@dataclass(frozen=True)
class WaveProfile:
    kind: str
    params: ModelParams
    kappa: np.ndarray
    U: np.ndarray
    xi: np.ndarray
    sigma: float
    kappa_bar: float
    tau: float | None = None
    v_edge: float | None = None
    K_const: float = 0.0
    entropic: bool = False
    residual: float = float("nan")
    meta: dict = field(default_factory=dict)

    @property
    def M(self) -> float:
        return self.params.M

    @property
    def ell(self) -> float:
        return float(self.xi[-1] - self.xi[0])

    def mass_trapezoid(self) -> float:
        return float(np.trapezoid(self.U, self.xi))


def admissibility(params: ModelParams, M: float, tau: float, tol: float = 1e-12) -> AdmissibilityReport:
    """Existence conditions for a continuous profile, written in ``tau``."""
    if not M > 0:
        raise ParameterError("M must be positive")
    a, c = params.a, params.flux.c
    msgs = []
    mass_ok = M <= 2 * c / a * (1 + tol)
    if not mass_ok:
        msgs.append(f"M={M} exceeds 2c/a={2 * c / a}")
    sigma_range_ok = -c - tol * c <= tau <= c - a * M + tol * c
    if not sigma_range_ok:
        msgs.append(f"tau={tau} outside [-c, c - aM] = [{-c}, {c - a * M}]")
    kappa_star = -M - 2.0 * tau / a
    if kappa_star > 0:
        msgs.append(f"kappa_star={kappa_star} > 0: profile vanishes inside the support")
    entropic = abs(tau + a * M / 2) <= tol * max(1.0, a * M)

    h_positive = False
    lo, hi = tau, a * M + tau
    if -c * (1 + tol) <= lo and hi <= c * (1 + tol):
        probes = M * (np.arange(N_PROBES) + 1) / (N_PROBES + 1)
        top = np.clip(hi, -c, c)
        H = params.flux.G_diff(np.full_like(probes, top), np.clip(a * probes + tau, -c, c))
        h_positive = bool(np.all(H > 0))
        if not h_positive:
            msgs.append("H = G(aM+tau) - G(a kappa+tau) is not positive inside (0, M)")
    return AdmissibilityReport(mass_ok=bool(mass_ok), sigma_range_ok=bool(sigma_range_ok),
                               kappa_star=float(kappa_star), entropic=bool(entropic),
                               h_positive=h_positive, messages=tuple(msgs))


def entropic_speed(kappa_bar: float, M: float, a: float) -> float:
    if not 0 <= kappa_bar <= M:
        raise ParameterError("kappa_bar must lie in [0, M]")
    return a * (kappa_bar - M / 2)


# ---------------------------------------------------------------------------
# helpers


def _cheb_nodes(M: float, N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    theta = np.pi * np.arange(N) / (N - 1)
    kappa = M * np.sin(0.5 * theta) ** 2
    rest = M * np.cos(0.5 * theta) ** 2
    kappa[0], kappa[-1] = 0.0, M
    rest[0], rest[-1] = M, 0.0
    return theta, kappa, rest


def _cumulative(U_of_kappa, theta: np.ndarray, M: float) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative ``int dkappa/U`` and ``int kappa dkappa/U`` at the nodes.

    Integrates in the angle ``theta`` (``kappa = M sin^2(theta/2)``). Interior
    cells use Gauss-Legendre, since the integrand is analytic there; the two
    end cells carry the power-law singularities and go to adaptive QUADPACK.
    """
    def f(th):
        k = M * np.sin(0.5 * th) ** 2
        val = 0.5 * M * np.sin(th) / U_of_kappa(k, M * np.cos(0.5 * th) ** 2)
        return val, val * k

    n_cells = theta.size - 1
    i0 = np.empty(n_cells)
    i1 = np.empty(n_cells)
    if n_cells > 2:
        lo, hi = theta[1:-2], theta[2:-1]
        half = 0.5 * (hi - lo)
        pts = 0.5 * (hi + lo)[:, None] + half[:, None] * _GL_X[None, :]
        v0, v1 = f(pts)
        i0[1:-1] = half * (v0 @ _GL_W)
        i1[1:-1] = half * (v1 @ _GL_W)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for j in {0, n_cells - 1}:
            try:
                for out, w in ((i0, 0), (i1, 1)):
                    out[j] = integrate.quad(lambda th: float(f(np.array(th))[w]), theta[j], theta[j + 1],
                                            epsabs=1e-15, epsrel=1e-13, limit=200)[0]
            except integrate.IntegrationWarning as exc:
                raise NumericError(f"profile quadrature did not converge on end cell {j}: {exc}") from exc
    zero = np.zeros(1)
    return np.concatenate((zero, np.cumsum(i0))), np.concatenate((zero, np.cumsum(i1)))


def _derivative(fun, x: np.ndarray, r: np.ndarray, closed_form: bool) -> np.ndarray:
    """``d fun(x, r) / dx`` along ``r = M - x``.

    Complex step for closed forms, a 5-point stencil otherwise.
    """
    if closed_form:
        h = 1e-30 * np.maximum(1.0, np.abs(x))
        return np.imag(fun(x + 1j * h, r - 1j * h)) / h
    h = 1e-3 * np.minimum(x, r)
    return (fun(x - 2 * h, r + 2 * h) - 8 * fun(x - h, r + h)
            + 8 * fun(x + h, r - h) - fun(x + 2 * h, r - 2 * h)) / (12 * h)


def _g_dist(flux, x, xm, xp):
    """``g(x)`` given ``xm = c - x`` and ``xp = c + x`` without cancellation."""
    if flux.closed_form:
        return x * flux.c / (flux.nu * np.sqrt(xm * xp))
    return flux.g(x)


def _end_exponent(flux, top: float, m: float) -> float:
    """Power ``p`` with ``1/U ~ dist^(-p)`` where ``U -> 0`` against ``G(top) - G(.)``."""
    if abs(abs(top) - flux.c) <= 1e-12 * flux.c:
        return (1.0 - 1.0 / flux.alpha) / (m + 1.0)
    return 1.0 / (m + 1.0)


# ---------------------------------------------------------------------------
# constructions


def continuous_profile(params: ModelParams, M: float, tau: float, xi_minus: float = 0.0,
                       N: int = N_PROFILE) -> WaveProfile:
    """Continuous profile with ``U(M) = 0`` (and ``U(0) = 0`` when entropic)."""
    if N < 3:
        raise ParameterError("N must be >= 3")
    rep = admissibility(params, M, tau)
    if not rep.admissible:
        raise AdmissibilityError("; ".join(rep.messages) or "inadmissible (M, tau)")
    params = replace(params, M=float(M))
    flux, a, m = params.flux, params.a, params.m
    c = flux.c
    top = a * M + tau
    p_end = _end_exponent(flux, top, m)
    p_start = _end_exponent(flux, tau, m) if rep.entropic else 0.0
    if max(p_end, p_start) >= 1.0:
        raise NumericError(f"1/U is not integrable at the support ends (exponent {max(p_end, p_start):.3g});"
                           " the profile has unbounded support for this m")

    def U_of(k, r):
        H = flux.G_diff(top, a * k + tau, gap=a * r, total=(a * M + 2 * tau) + a * k,
                        x_dist=((c - top) + a * r, (c + tau) + a * k))
        if np.iscomplexobj(H):
            return ((m + 1) / a * H) ** (1.0 / (m + 1))
        return ((m + 1) / a * np.maximum(H, 0.0)) ** (1.0 / (m + 1))

    theta, kappa, rest = _cheb_nodes(M, N)
    U = U_of(kappa, rest)
    U[-1] = 0.0
    if rep.entropic:
        U[0] = 0.0
    xi_rel, k_int = _cumulative(U_of, theta, M)
    ell = xi_rel[-1]
    kappa_bar = float(k_int[-1] / ell)
    sigma = tau + a * kappa_bar

    inner, rin = kappa[1:-1], rest[1:-1]
    dU = _derivative(U_of, inner, rin, flux.closed_form)
    resid = np.abs(np.real(U_of(inner, rin)) ** m * dU
                   + _g_dist(flux, a * inner + tau, (c - top) + a * rin, (c + tau) + a * inner))
    return WaveProfile(kind="continuous", params=params, kappa=kappa, U=U, xi=xi_minus + xi_rel,
                       sigma=float(sigma), kappa_bar=kappa_bar, tau=float(tau),
                       entropic=rep.entropic, residual=float(np.max(resid)),
                       meta={"end_exponent": p_end})


def jump_profile(params: ModelParams, v_edge: float, xi_minus: float = 0.0, N: int = N_PROFILE) -> WaveProfile:
    """Jump profile with equal edge values ``v_edge``; exists only at ``aM = 2c``."""
    flux, a, m, M = params.flux, params.a, params.m, params.M
    c = flux.c
    if abs(a * M - 2 * c) > 1e-12 * c:
        raise ParameterError(f"jump profiles need aM = 2c (aM={a * M}, 2c={2 * c})")
    if not v_edge > 0:
        raise ParameterError("v_edge must be positive")
    if N < 3:
        raise ParameterError("N must be >= 3")

    def U_of(k, r):
        W = v_edge ** (m + 1) + (m + 1) / a * flux.G_diff(c, c - a * k, gap=a * k,
                                                          x_dist=(a * k, 2 * c - a * k))
        return W ** (1.0 / (m + 1))

    theta, kappa, rest = _cheb_nodes(M, N)
    U = U_of(kappa, rest)
    xi_rel, k_int = _cumulative(U_of, theta, M)
    ell = xi_rel[-1]
    kappa_bar = float(k_int[-1] / ell)
    sigma = a * kappa_bar - c

    inner, rin = kappa[1:-1], rest[1:-1]
    dU = _derivative(U_of, inner, rin, flux.closed_form)
    resid = np.abs(np.real(U_of(inner, rin)) ** m * dU
                   - _g_dist(flux, c - a * inner, a * inner, 2 * c - a * inner))
    return WaveProfile(kind="jump", params=params, kappa=kappa, U=U, xi=xi_minus + xi_rel,
                       sigma=float(sigma), kappa_bar=kappa_bar, v_edge=float(v_edge),
                       entropic=True, residual=float(np.max(resid)))


def to_dual_state(profile: WaveProfile, N: int = 400) -> DualState:
    """Cell averages of ``v = 1/U`` on the uniform dual grid.

    ``v_i = (xi(eta_{i+1/2}) - xi(eta_{i-1/2})) / d_eta`` with ``xi(kappa)``
    interpolated monotonically, so partial sums reproduce the profile's face
    positions and ``d_eta * sum(v)`` equals its support length.
    """
    if profile.kind != "jump":
        raise UnrepresentableError("continuous profiles vanish at the ends; v = 1/U is unbounded")
    M = profile.M
    faces = np.linspace(0.0, M, N + 1)
    xi_of = PchipInterpolator(profile.kappa, profile.xi)
    xf = xi_of(faces)
    xf[0], xf[-1] = profile.xi[0], profile.xi[-1]
    return DualState(0.0, profile.params, np.diff(xf) / (M / N))
