"""
Metrics Module

Figures of merit extracted from simulation results:
- Single-mode fidelity at a fixed or optimized delay
- Shape overlap with the delayed input
- Centroid delay and energy bookkeeping
"""

from .fidelity import (
    FidelityReport, default_reference_delay, fidelity,
    fidelity_max_over_delay, shape_overlap,
)
from .energy import EnergyReport, energy_balance, measured_delay

__all__ = [
    "FidelityReport", "default_reference_delay", "fidelity",
    "fidelity_max_over_delay", "shape_overlap",
    "EnergyReport", "energy_balance", "measured_delay",
]
