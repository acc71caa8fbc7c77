"""Pure numpy implementation of the dual-scheme hot loop.

Mirrors ``_ckernel.pyx`` step for step; it is the fallback when the compiled
extension is missing and the only path for user-supplied flux families.
"""
from __future__ import annotations

import numpy as np

MEAN_KINDS = {"arithmetic": 0, "geometric": 1, "harmonic": 2}

# status codes shared with the compiled kernel
REACHED = 0
POSITIVITY_LOSS = 1
BLOW_UP = 2
MAX_STEPS = 3


def interface_means(v: np.ndarray, mean_kind: int = 0) -> np.ndarray:
    left, right = v[:-1], v[1:]
    if mean_kind == 0:
        return 0.5 * (left + right)
    if mean_kind == 1:
        return np.sqrt(left * right)
    return 2.0 * left * right / (left + right)


def interface_fluxes(v, d, m, eps, c_eff, phi, mean_kind=0, out=None):
    """All ``N + 1`` fluxes; the two boundary entries are the prescribed constants."""
    n = v.shape[0]
    F = np.empty(n + 1) if out is None else out
    s = (v[1:] - v[:-1]) / d
    vt = interface_means(v, mean_kind)
    F[1:n] = phi(s / vt ** (2.0 + m)) + eps * s
    F[0] = -c_eff
    F[n] = c_eff
    return F


def stable_dt(v, d, m, nu, eps, cfl, mean_kind=0):
    vt = interface_means(v, mean_kind)
    d_max = nu / np.min(vt) ** (2.0 + m) + eps
    return cfl * d * d / (2.0 * d_max)


def advance(v, t, t_stop, sigma_m, sigma_p, M, a, c, nu, m, eps, c_eff, cfl,
            mean_kind, ell_floor, max_steps, t_comp, phi):
    """Step ``v`` in place until ``t_stop`` or an event.

    Returns ``(t, t_comp, sigma_m, sigma_p, nsteps, status)``. On positivity
    loss ``v`` keeps the last positive state.
    """
    n = v.shape[0]
    d = M / n
    eta = (np.arange(n) + 0.5) * d
    F = np.empty(n + 1)
    steps = 0
    while t < t_stop:
        if steps >= max_steps:
            return t, t_comp, sigma_m, sigma_p, steps, MAX_STEPS
        dt = stable_dt(v, d, m, nu, eps, cfl, mean_kind)
        remaining = (t_stop - t) + t_comp
        last = dt >= remaining
        if last:
            dt = remaining
        interface_fluxes(v, d, m, eps, c_eff, phi, mean_kind, out=F)
        v_new = v + dt * ((F[1:] - F[:-1]) / d - a)
        if np.any(v_new <= 0.0):
            return t, t_comp, sigma_m, sigma_p, steps, POSITIVITY_LOSS
        mu_bar = np.dot(eta, v) / np.sum(v)
        sigma_m += dt * (-c_eff + a * mu_bar)
        sigma_p += dt * (c_eff - a * (M - mu_bar))
        v[:] = v_new
        steps += 1
        if last:
            t, t_comp = t_stop, 0.0
        else:
            y = dt - t_comp
            tt = t + y
            t_comp = (tt - t) - y
            t = tt
        if sigma_p - sigma_m <= ell_floor:
            return t, t_comp, sigma_m, sigma_p, steps, BLOW_UP
    return t, t_comp, sigma_m, sigma_p, steps, REACHED
