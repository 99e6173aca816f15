"""
Maxwell-Bloch Solver Module

Time-domain propagation of the probe through the split medium:
- RK4 coherences with trapezoidal field quadrature (retarded frame)
- Storage runs with step or ramped splitting schedules
- Zeeman/Stark frame conversion and dark-state polariton records
- Five-variable structural check
"""

from .equations import Equations, FullEquations, StarkEquations, ZeemanEquations, equations_for
from .solver import (
    DEFAULT_NZ, MaxwellBlochSolver, SimResult, SimState, Snapshots,
    SolverDiagnostics, default_grid, simulate, validate_grid,
)
from .storage import (
    FiveVarReport, PolaritonRecord, convert_result, entered_fraction,
    five_var_check, polariton_field, run_storage, storage_schedule,
    storage_t_max, to_stark_frame, to_zeeman_frame,
)

__all__ = [
    "Equations", "FullEquations", "StarkEquations", "ZeemanEquations", "equations_for",
    "DEFAULT_NZ", "MaxwellBlochSolver", "SimResult", "SimState", "Snapshots",
    "SolverDiagnostics", "default_grid", "simulate", "validate_grid",
    "FiveVarReport", "PolaritonRecord", "convert_result", "entered_fraction",
    "five_var_check", "polariton_field", "run_storage", "storage_schedule",
    "storage_t_max", "to_stark_frame", "to_zeeman_frame",
]
