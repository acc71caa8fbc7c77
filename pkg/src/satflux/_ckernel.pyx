# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loop for the classical saturated flux.

Same contract as ``satflux._pykernel.advance``; the flux is hard-wired to
``phi(y) = nu*y / sqrt(1 + (nu/c)^2 y^2)``.
"""
import numpy as np
from libc.math cimport sqrt, pow

DEF REACHED = 0
DEF POSITIVITY_LOSS = 1
DEF BLOW_UP = 2
DEF MAX_STEPS = 3


cdef inline double _mean(double x, double y, int kind) nogil:
    if kind == 0:
        return 0.5 * (x + y)
    if kind == 1:
        return sqrt(x * y)
    return 2.0 * x * y / (x + y)


cdef inline double _powp(double x, double m) nogil:
    """x**(2 + m) without libm pow for the common integer exponents."""
    cdef double x2 = x * x
    if m == 0.0:
        return x2
    if m == 1.0:
        return x2 * x
    if m == 2.0:
        return x2 * x2
    return pow(x, 2.0 + m)


def advance(double[::1] v, double t, double t_stop, double sigma_m, double sigma_p,
            double M, double a, double c, double nu, double m, double eps,
            double c_eff, double cfl, int mean_kind, double ell_floor,
            long max_steps, double t_comp):
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t i
    cdef double d = M / n
    cdef double k2 = (nu / c) * (nu / c)
    cdef double[::1] F = np.empty(n + 1)
    cdef double[::1] w = np.empty(n)
    cdef double dt, remaining, vt, vt_min, s, y, tt, d_max, sv, sev, mu_bar
    cdef long steps = 0
    cdef int last, status = REACHED

    with nogil:
        while t < t_stop:
            if steps >= max_steps:
                status = MAX_STEPS
                break
            # fluxes and the stability bound share one pass over the interfaces
            vt_min = _mean(v[0], v[1], mean_kind)
            F[0] = -c_eff
            F[n] = c_eff
            for i in range(n - 1):
                vt = _mean(v[i], v[i + 1], mean_kind)
                if vt < vt_min:
                    vt_min = vt
                s = (v[i + 1] - v[i]) / d
                y = s / _powp(vt, m)
                F[i + 1] = nu * y / sqrt(1.0 + k2 * y * y) + eps * s
            d_max = nu / _powp(vt_min, m) + eps
            dt = cfl * d * d / (2.0 * d_max)
            remaining = (t_stop - t) + t_comp
            last = dt >= remaining
            if last:
                dt = remaining

            status = REACHED
            sv = 0.0
            sev = 0.0
            for i in range(n):
                sv += v[i]
                sev += (i + 0.5) * d * v[i]
                w[i] = v[i] + dt * ((F[i + 1] - F[i]) / d - a)
                if w[i] <= 0.0:
                    status = POSITIVITY_LOSS
            if status == POSITIVITY_LOSS:
                break

            mu_bar = sev / sv
            sigma_m += dt * (-c_eff + a * mu_bar)
            sigma_p += dt * (c_eff - a * (M - mu_bar))
            for i in range(n):
                v[i] = w[i]
            steps += 1
            if last:
                t = t_stop
                t_comp = 0.0
            else:
                y = dt - t_comp
                tt = t + y
                t_comp = (tt - t) - y
                t = tt
            if sigma_p - sigma_m <= ell_floor:
                status = BLOW_UP
                break
    return t, t_comp, sigma_m, sigma_p, steps, status
