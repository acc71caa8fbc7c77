"""Saturated flux nonlinearities and their calculus.

A flux ``phi`` is odd, strictly increasing and saturates at ``c`` as
``y -> +inf``. The inverse ``g = phi^{-1}`` lives on ``(-c, c)`` and its
primitive ``G(u) = int_0^u g`` stays finite at ``u = +-c``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericError, ParameterError

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class FluxModel:
    """Immutable bundle of a saturated flux and its derived evaluators.

    ``phi``, ``dphi``, ``g`` and ``G`` are raw vectorised callables without
    domain checks; use :func:`phi_eval` and friends for checked access.
    ``G_diff(b, x, gap=None, total=None, x_dist=None)`` returns ``G(b) - G(x)``
    without cancellation where a closed form allows it; the keywords
    optionally supply ``b - x``, ``b + x`` and ``(c - x, c + x)``.
    """

    c: float
    nu: float
    alpha: float
    K_tail: float
    phi: Evaluator = field(repr=False)
    dphi: Evaluator = field(repr=False)
    g: Evaluator = field(repr=False)
    G: Evaluator = field(repr=False)
    G_diff: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)
    family: str = "classical"

    @property
    def closed_form(self) -> bool:
        return self.family == "classical"

    def to_dict(self) -> dict:
        return {"family": self.family, "nu": self.nu, "c": self.c}


def _nonneg(q):
    return q if np.iscomplexobj(q) else np.maximum(q, 0.0)


def make_classical_flux(nu: float, c: float) -> FluxModel:
    """Build ``phi(y) = nu*y / sqrt(1 + (nu/c)^2 y^2)`` with closed-form calculus."""
    if not (np.isfinite(nu) and nu > 0):
        raise ParameterError(f"nu must be positive, got {nu!r}")
    if not (np.isfinite(c) and c > 0):
        raise ParameterError(f"c must be positive, got {c!r}")
    nu = float(nu)
    c = float(c)
    k2 = (nu / c) ** 2

    def phi(y):
        return nu * y / np.sqrt(1.0 + k2 * y * y)

    def dphi(y):
        return nu * (1.0 + k2 * y * y) ** -1.5

    def g(r):
        return r * c / (nu * np.sqrt((c - r) * (c + r)))

    def G(u):
        # c^2/nu * (1 - sqrt(1 - u^2/c^2)), written without cancellation at small u
        q = (u / c) ** 2
        return (c * c / nu) * q / (1.0 + np.sqrt(1.0 - q))

    def G_diff(b, x, gap=None, total=None, x_dist=None):
        # gap, total and x_dist = (c - x, c + x) are optional cancellation-free inputs
        sb = np.sqrt(_nonneg((c - b) * (c + b))) / c
        xm, xp = (c - x, c + x) if x_dist is None else x_dist
        sx = np.sqrt(_nonneg(xm * xp)) / c
        num = ((b - x) if gap is None else gap) * ((b + x) if total is None else total)
        den = nu * (sx + sb)
        zero = den == 0
        return np.where(zero, 0.0, num / np.where(zero, 1.0, den))

    # y*(c - phi(y)) peaks near 0.3*c^2/nu, so c^2/(2 nu) bounds it for every (nu, c)
    K_tail = c * c / (2.0 * nu)
    flux = FluxModel(c=c, nu=nu, alpha=2.0, K_tail=K_tail, phi=phi, dphi=dphi,
                     g=g, G=G, G_diff=G_diff, family="classical")
    ys = np.logspace(-3, 6, 400)
    if np.any(phi(ys) < c - K_tail / ys - 1e-15 * c):
        raise NumericError("tail constant failed its construction-time check")
    return flux


def make_flux(phi: Evaluator, c: float, alpha: float, K_tail: float,
              dphi: Evaluator | None = None, family: str = "generic") -> FluxModel:
    """Wrap a user-supplied flux; ``g`` and ``G`` are computed numerically.

    The inverse uses safeguarded Newton/bisection to 1e-12 relative accuracy.
    ``G`` is evaluated through ``G(u) = int_0^{g(u)} (u - phi(y)) dy``, which
    moves the endpoint singularity of ``g`` at ``+-c`` to a decaying tail.
    """
    if not c > 0:
        raise ParameterError("c must be positive")
    c = float(c)
    if dphi is None:
        def dphi(y):
            y = np.asarray(y, dtype=float)
            h = 1e-6 * np.maximum(1.0, np.abs(y))
            return (phi(y + h) - phi(y - h)) / (2 * h)

    nu = float(dphi(np.array(0.0)))
    y_scale = 1.0 / max(nu / c, 1e-300)

    def _invert(r: float) -> float:
        if r == 0.0:
            return 0.0
        s = 1.0 if r > 0 else -1.0
        r = abs(r)
        lo, hi = 0.0, y_scale
        while phi(hi) < r:
            lo, hi = hi, 2.0 * hi
            if hi > 1e300:
                raise NumericError(f"cannot bracket g({r})")
        y = 0.5 * (lo + hi)
        for _ in range(200):
            f = phi(y) - r
            if f > 0:
                hi = y
            else:
                lo = y
            d = dphi(y)
            y_new = y - f / d if d > 0 else 0.5 * (lo + hi)
            if not (lo < y_new < hi):
                y_new = 0.5 * (lo + hi)
            if abs(y_new - y) <= 1e-14 * max(1.0, abs(y_new)) or hi - lo <= 1e-15 * hi:
                y = y_new
                break
            y = y_new
        return s * float(y)

    def _tail(Y: float) -> float:
        # c - phi(y) loses digits far out; the quadrature still meets 1e-13
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            return integrate.quad(lambda y: c - phi(y), Y, np.inf,
                                  epsabs=1e-15, epsrel=1e-13, limit=400)[0]

    G_c = _tail(0.0)

    def _G(u: float) -> float:
        u = abs(u)
        if u == 0.0:
            return 0.0
        if u >= c:
            return G_c
        Y = _invert(u)
        if Y > 50.0 * y_scale:
            # G(u) = int_0^inf (c - phi) - int_Y^inf (c - phi) - (c - u) Y
            return G_c - _tail(Y) - (c - u) * Y
        pts = [p for p in (y_scale, 10.0 * y_scale) if p < Y]
        return integrate.quad(lambda y: u - phi(y), 0.0, Y, points=pts or None,
                              epsabs=1e-15, epsrel=1e-13, limit=400)[0]

    g_vec = np.vectorize(_invert, otypes=[float])
    G_vec = np.vectorize(_G, otypes=[float])

    def _short(hi: float, d: float) -> float:
        # int_{hi-d}^{hi} g(r) dr, accurate when d is small against hi
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            return integrate.quad(lambda s: _invert(hi - s), 0.0, d,
                                  epsabs=1e-16, epsrel=1e-12, limit=200)[0]

    short_vec = np.vectorize(_short, otypes=[float])

    def G_diff(b, x, gap=None, total=None, x_dist=None):
        b, x = np.broadcast_arrays(np.asarray(b, dtype=float), np.asarray(x, dtype=float))
        out = np.asarray(G_vec(b) - G_vec(x), dtype=float)
        # |b| - |x| is the integration length; take it from the caller's
        # cancellation-free gap (same sign) or total (opposite sign) when given
        d = np.abs(b) - np.abs(x)
        if gap is not None:
            d = np.where(b * x >= 0, np.broadcast_to(gap, d.shape), d)
        if total is not None:
            d = np.where(b * x < 0, np.broadcast_to(total, d.shape), d)
        near = (np.abs(d) <= 0.05 * c) & (d != 0)
        if np.any(near):
            dn = d[near]
            hi = np.minimum(np.where(dn > 0, np.abs(b[near]), np.abs(b[near]) - dn), c)
            out[near] = np.sign(dn) * short_vec(hi, np.abs(dn))
        return out if out.ndim else float(out)

    return FluxModel(c=c, nu=nu, alpha=float(alpha), K_tail=float(K_tail),
                     phi=phi, dphi=dphi, g=g_vec, G=G_vec, G_diff=G_diff, family=family)


def generic_copy(flux: FluxModel) -> FluxModel:
    """The same flux, but with ``g``/``G`` recomputed by the numeric route."""
    family = "classical_quadrature" if flux.family == "classical" else flux.family
    return make_flux(flux.phi, flux.c, flux.alpha, flux.K_tail, dphi=flux.dphi, family=family)


def _finite(x, what: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{what} must be finite")
    return arr


def _out(res, x):
    return float(res) if np.ndim(x) == 0 else res


def phi_eval(flux: FluxModel, y):
    y_arr = _finite(y, "y")
    return _out(flux.phi(y_arr), y)


def phi_prime(flux: FluxModel, y):
    y_arr = _finite(y, "y")
    return _out(flux.dphi(y_arr), y)


def g_eval(flux: FluxModel, r):
    """Inverse flux; refuses ``|r| >= c`` (no silent clamping)."""
    r_arr = _finite(r, "r")
    if np.any(np.abs(r_arr) >= flux.c):
        raise DomainError(f"g is defined only on |r| < c = {flux.c}")
    return _out(flux.g(r_arr), r)


def G_eval(flux: FluxModel, u):
    u_arr = _finite(u, "u")
    if np.any(np.abs(u_arr) > flux.c):
        raise DomainError(f"G is defined only on |u| <= c = {flux.c}")
    return _out(flux.G(u_arr), u)


@dataclass
class HypothesisReport:
    """Outcome of :func:`validate_hypotheses`; ``checks`` maps name -> (ok, value, note)."""

    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(ok for ok, _, _ in self.checks.values())

    def failed(self) -> list[str]:
        return [k for k, (ok, _, _) in self.checks.items() if not ok]

    def to_dict(self) -> dict:
        return {k: {"pass": bool(ok), "value": float(v), "note": note}
                for k, (ok, v, note) in self.checks.items()}


def validate_hypotheses(flux: FluxModel, n_samples: int = 256,
                        y_max: float = 1e3) -> HypothesisReport:
    """Numerically audit oddness, monotonicity, saturation and tail decay."""
    if n_samples < 16:
        raise ParameterError("n_samples must be >= 16")
    if not y_max > 0:
        raise ParameterError("y_max must be positive")
    rep = HypothesisReport()
    c = flux.c
    pos = np.logspace(math.log10(y_max) - 6, math.log10(y_max), n_samples)
    ys = np.concatenate([-pos[::-1], [0.0], pos])

    with np.errstate(all="ignore"):
        p_pos = np.asarray(flux.phi(pos), dtype=float)
        p_neg = np.asarray(flux.phi(-pos), dtype=float)
        p_all = np.asarray(flux.phi(ys), dtype=float)

    odd_err = np.max(np.abs(p_pos + p_neg) / np.maximum(1.0, np.abs(p_pos)))
    odd_err = max(odd_err, abs(float(flux.phi(np.array(0.0)))))
    rep.checks["odd"] = (bool(odd_err <= 1e-12), float(odd_err), "|phi(y)+phi(-y)|")

    gaps = np.diff(p_all)
    rep.checks["monotone"] = (bool(np.all(gaps > 0)), float(np.min(gaps)),
                              "min phi(y_{k+1}) - phi(y_k)")

    tail_y = pos[pos >= 1.0]
    bounded = bool(np.all(np.abs(p_all) < c))
    if tail_y.size:
        slack = np.min(p_pos[pos >= 1.0] - (c - flux.K_tail / tail_y))
    else:
        slack = float("nan")
    rep.checks["saturation"] = (bounded and bool(slack >= -1e-15 * c), float(slack),
                                "|phi| < c and phi(y) >= c - K/y on [1, y_max]")

    # tail exponent from a log-log fit of phi' on the last decade
    yt = np.logspace(math.log10(y_max) - 1, math.log10(y_max), 32)
    with np.errstate(all="ignore"):
        d = np.asarray(flux.dphi(yt), dtype=float)
    if np.all(d > 0) and np.all(np.isfinite(d)):
        slope = np.polyfit(np.log(yt), np.log(d), 1)[0]
        alpha_fit = -slope - 1.0
    else:
        alpha_fit = float("nan")
    rep.checks["tail_exponent"] = (bool(abs(alpha_fit - flux.alpha) <= 0.2), float(alpha_fit),
                                   f"fitted alpha vs declared {flux.alpha}")

    yr = np.linspace(-min(y_max, 1e3), min(y_max, 1e3), n_samples)
    try:
        with np.errstate(all="ignore"):
            pr = np.asarray(flux.phi(yr), dtype=float)
        if np.any(np.abs(pr) >= c * (1 - 1e-15)):
            raise DomainError("phi leaves (-c, c)")
        back = np.asarray(flux.g(pr), dtype=float)
        rt = float(np.max(np.abs(back - yr) / np.maximum(1.0, np.abs(yr))))
        rep.checks["round_trip"] = (bool(rt <= 1e-8), rt, "max |g(phi(y)) - y| / max(1,|y|)")
    except Exception as exc:  # noqa: BLE001 - any failure is a report entry
        rep.checks["round_trip"] = (False, float("nan"), f"inversion failed: {exc}")
    return rep
