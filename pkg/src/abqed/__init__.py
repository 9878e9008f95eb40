"""Charge-fluxon effective interaction from explicit photon-mode sums.

The package computes the virtual-photon mediated vector potential a(x)
between a point charge and a point fluxon, checks how it responds to
gauge transformations, and evaluates local and closed-loop
Aharonov-Bohm phases along planar paths.
"""

from .core import (ChargeFluxConfig, CurrentLoop, PathGeometry, UnitSystem, circle,
                   subtended_angle, winding_number)
from .errors import (AbqedError, AccuracyError, ConfigError, ContractError, DomainError,
                     SingularityError)
from .interaction import (analytic_a, coulomb_energy, coulomb_gauge_comparison, coulomb_kernel,
                          delta_a, effective_a, effective_a_direct, effective_a_theta,
                          h2_assemble, h2_direct)
from .modes import GaugeSpec, PhotonMode, Polarization, polarization_identity_sum, stokes_check
from .phases import (AnalyticAField, InterferometerGeometry, NumericAField, SemiclassicalField,
                     andreev_local_phase, interference_signal, phase_along_path,
                     qed_vs_semiclassical_report, semiclassical_gauge_shift)
from .quadrature import QuadratureSpec, bessel_j, regulated_radial

__version__ = "0.1.0"

__all__ = [
    "AbqedError", "AccuracyError", "AnalyticAField", "ChargeFluxConfig", "ConfigError",
    "ContractError", "CurrentLoop", "DomainError", "GaugeSpec", "InterferometerGeometry",
    "NumericAField", "PathGeometry", "PhotonMode", "Polarization", "QuadratureSpec",
    "SemiclassicalField", "SingularityError", "UnitSystem", "analytic_a", "andreev_local_phase",
    "bessel_j", "circle", "coulomb_energy", "coulomb_gauge_comparison", "coulomb_kernel",
    "delta_a", "effective_a", "effective_a_direct", "effective_a_theta", "h2_assemble",
    "h2_direct", "interference_signal", "phase_along_path", "polarization_identity_sum",
    "qed_vs_semiclassical_report", "regulated_radial", "semiclassical_gauge_shift",
    "stokes_check", "subtended_angle", "winding_number",
]
