"""
Sweep Module

Parameter-space exploration of storage runs:
- Fidelity heatmap over optical depth and splitting
- Splitting optimization and the optimized-fidelity curve
- Fit of the curve and delay scaling verification
"""

from .heatmap import (
    BASE_MEDIUM, GridPolicy, StorageTemplate, SweepResult, SweepRow, heatmap,
)
from .optimization import (
    CurvePoint, DeltaOptimum, FitReport, OptimizationCurve, ScalingReport,
    default_delta_bounds, fidelity_model, fit_fidelity_curve, optimize_curve,
    optimize_delta, verify_scaling,
)

__all__ = [
    "BASE_MEDIUM", "GridPolicy", "StorageTemplate", "SweepResult", "SweepRow", "heatmap",
    "CurvePoint", "DeltaOptimum", "FitReport", "OptimizationCurve", "ScalingReport",
    "default_delta_bounds", "fidelity_model", "fit_fidelity_curve", "optimize_curve",
    "optimize_delta", "verify_scaling",
]
