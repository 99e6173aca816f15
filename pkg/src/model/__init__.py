"""
Model Module

Domain types and unit conventions shared by every other module:
- Medium constants and dimensionless normalization
- Splitting schedules Δ(t)
- Probe pulse and simulation grid
"""

from .medium import (
    SPEED_OF_LIGHT, MediumParams, NormalizedInputs, PhysicalInputs,
    SchemeVariant, denormalize, normalize,
)
from .schedules import Constant, RampedStore, SplittingSchedule, StepStore, schedule_value
from .pulse import ProbePulse, SimGrid

__all__ = [
    "SPEED_OF_LIGHT", "MediumParams", "NormalizedInputs", "PhysicalInputs",
    "SchemeVariant", "denormalize", "normalize",
    "Constant", "RampedStore", "SplittingSchedule", "StepStore", "schedule_value",
    "ProbePulse", "SimGrid",
]
