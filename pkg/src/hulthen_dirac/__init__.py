"""Dirac bound states of the generalized Hulthen potential family.

Closed-form spectra and spinors for the real, PT-symmetric and
pseudo-Hermitian members, a Nikiforov-Uvarov reduction engine, special
functions with complex parameters, and independent numerical oracles.
"""

__version__ = "0.1.0"

from .errors import HulthenDiracError  # noqa: E402
from .hulthen import (  # noqa: E402
    BoundState,
    PotentialSpec,
    Variant,
    alpha_window,
    bound_window,
    critical_coupling,
    energy_closed_form,
    potential_value,
    q0_state,
    spectrum,
    spinor_state,
)
from .verification import (  # noqa: E402
    GridSpec,
    coupled_residual,
    fd_dirac_spectrum,
    ode_residual,
    quantization_residual,
    quantization_root,
    symmetry_check,
)

__all__ = [
    "BoundState", "GridSpec", "HulthenDiracError", "PotentialSpec", "Variant",
    "alpha_window", "bound_window", "coupled_residual", "critical_coupling",
    "energy_closed_form", "fd_dirac_spectrum", "ode_residual", "potential_value",
    "q0_state", "quantization_residual", "quantization_root", "spectrum",
    "spinor_state", "symmetry_check",
]
