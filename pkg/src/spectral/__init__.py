"""
Spectral Module

Closed-form frequency-domain analysis:
- Susceptibility, transmission and group delay in both conventions
- Transparency metric and dark-state mixing angle
- Five-variable interaction matrix and its dark eigenvector
- Scaling laws and experimental estimates
"""

from .susceptibility import (
    OPAQUE, Convention, group_delay, group_velocity, kramers_kronig_imag,
    mixing_angle, susceptibility, transmission_spectrum, transparency_metric,
)
from .polariton import (
    BASIS, STRUCTURAL_NONZEROS, MatrixM, PolaritonDecomposition,
    build_matrix_M, coupling_from_params, dark_eigenvector,
)
from .estimates import (
    PRESETS, EstimateReport, ExperimentalSetup, Preset, ScalingLaws,
    experimental_estimate, interpolate_fidelity, scaling_laws,
)

__all__ = [
    "OPAQUE", "Convention", "group_delay", "group_velocity", "kramers_kronig_imag",
    "mixing_angle", "susceptibility", "transmission_spectrum", "transparency_metric",
    "BASIS", "STRUCTURAL_NONZEROS", "MatrixM", "PolaritonDecomposition",
    "build_matrix_M", "coupling_from_params", "dark_eigenvector",
    "PRESETS", "EstimateReport", "ExperimentalSetup", "Preset", "ScalingLaws",
    "experimental_estimate", "interpolate_fidelity", "scaling_laws",
]
