"""satflux: flux-saturated Keller-Segel dynamics in mass coordinates.

The density ``u`` on a moving support ``(sigma_-, sigma_+)`` is evolved
through the dual unknown ``v = 1/u`` on the fixed mass interval ``(0, M)``.
"""
from .errors import *  # noqa: F401,F403
from .flux import (FluxModel, HypothesisReport, G_eval, g_eval, generic_copy, make_classical_flux,
                   make_flux, phi_eval, phi_prime, validate_hypotheses)
from .fronts import (FrontState, PhysicalSnapshot, advance_fronts, center_diagnostics,
                     extrapolate_collapse, mu_bar, predict_support, reconstruct, rh_residual)
from .kernels import BACKEND
from .solver import (DualState, ModelParams, SchemeConfig, Trajectory, bv_seminorm,
                     compatibility_ramp, compatibilize_initial, numerical_flux, run, stable_dt, step,
                     steady_jump_profile)
from .waves import (AdmissibilityReport, WaveProfile, admissibility, continuous_profile,
                    entropic_speed, jump_profile, to_dual_state)

__version__ = "0.1.0"
