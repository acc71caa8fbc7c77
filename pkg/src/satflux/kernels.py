"""Backend selection for the dual-scheme hot loop.

The compiled extension ``satflux._ckernel`` is used when it imports and the
flux is the classical closed-form family; otherwise the numpy fallback runs.
Set ``SATFLUX_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _pykernel
from ._pykernel import BLOW_UP, MAX_STEPS, MEAN_KINDS, POSITIVITY_LOSS, REACHED  # noqa: F401

try:
    if os.environ.get("SATFLUX_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-python backend forced")
    from . import _ckernel
except ImportError:
    _ckernel = None

BACKEND = "compiled" if _ckernel is not None else "python"


def advance(v, t, t_stop, sigma_m, sigma_p, *, M, a, c, nu, m, eps, c_eff, cfl,
            mean_kind, ell_floor, max_steps, t_comp, flux, backend=None):
    """Dispatch to the compiled or numpy loop; both mutate ``v`` in place."""
    use = backend or BACKEND
    if use == "compiled" and _ckernel is not None and flux.closed_form:
        return _ckernel.advance(v, float(t), float(t_stop), float(sigma_m), float(sigma_p),
                                float(M), float(a), float(c), float(nu), float(m),
                                float(eps), float(c_eff), float(cfl), int(mean_kind),
                                float(ell_floor), int(max_steps), float(t_comp))
    return _pykernel.advance(v, t, t_stop, sigma_m, sigma_p, M, a, c, nu, m, eps, c_eff,
                             cfl, mean_kind, ell_floor, max_steps, t_comp, flux.phi)
