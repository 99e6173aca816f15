"""
Time-domain Maxwell-Bloch integrator.

Each retarded-time step advances the coherences with classical RK4. At every
stage the field is rebuilt from the stage state by trapezoidal quadrature
along ζ from the boundary value E(0, t) = pulse(t). After the step the field
is rebuilt once more from the accepted state (corrector); its difference to
the last-stage field (predictor) at the output boundary is tracked as
``diagnostics.max_residual``.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ..config import get_config
from ..exceptions import DivergenceError, ValidationError
from ..model import MediumParams, ProbePulse, SchemeVariant, SimGrid, SplittingSchedule
from .equations import Equations, equations_for

logger = logging.getLogger(__name__)

DEFAULT_NZ = 400

# Grid admissibility limits
MAX_DT_PER_SIGMA = 1.0 / 20.0
MAX_DT_TIMES_DELTA = 0.1
MAX_DIAGONAL_STEP = 2.5
_RELATIVE_SLACK = 1e-9


@dataclass
class SimState:
    """Instantaneous state on the ζ grid."""
    variant: SchemeVariant
    t: float
    fields: dict[str, np.ndarray]
    atomic: dict[str, np.ndarray]
    boundary: dict[str, complex] = field(default_factory=dict)

    def variables(self) -> dict[str, np.ndarray]:
        return {**self.fields, **self.atomic}


@dataclass
class Snapshots:
    """Decimated space-time records, one row per stored time."""
    indices: np.ndarray
    times: np.ndarray
    data: dict[str, np.ndarray]  # name -> (n_snapshots, nz)

    def nearest(self, t: float) -> int:
        """Row index of the stored time closest to ``t``."""
        return int(np.argmin(np.abs(self.times - t)))


@dataclass
class SolverDiagnostics:
    steps: int
    max_residual: float
    entered_fraction: Optional[float] = None


@dataclass
class SimResult:
    """
    Output of one simulation.

    ``e_in`` / ``e_out`` are the y-polarized field at ζ = 0 and ζ = 1;
    ``e_in_x`` / ``e_out_x`` are only set by the full variant.
    ``delta_trace[n]`` is the splitting applied on the step leaving t_n.
    """
    params: MediumParams
    schedule: SplittingSchedule
    pulse: ProbePulse
    grid: SimGrid
    variant: SchemeVariant
    t_grid: np.ndarray
    z_grid: np.ndarray
    e_in: np.ndarray
    e_out: np.ndarray
    delta_trace: np.ndarray
    diagnostics: SolverDiagnostics
    snapshots: Optional[Snapshots] = None
    e_in_x: Optional[np.ndarray] = None
    e_out_x: Optional[np.ndarray] = None


def default_grid(
    pulse: ProbePulse,
    schedule: SplittingSchedule,
    t_max: float,
    nz: int = DEFAULT_NZ,
    snapshot_stride: Optional[int] = None
) -> SimGrid:
    """nz = 400 and dt = min(σ_τ/40, 0.05/Δ0)."""
    dt = pulse.sigma_tau / 40.0
    if schedule.max_value > 0:
        dt = min(dt, 0.05 / schedule.max_value)
    return SimGrid.from_step(dt, t_max, nz, snapshot_stride)


def validate_grid(
    params: MediumParams,
    schedule: SplittingSchedule,
    pulse: ProbePulse,
    grid: SimGrid
) -> None:
    """Raise ValidationError when the grid cannot resolve the run."""
    dt = grid.dt
    limit = MAX_DT_PER_SIGMA * pulse.sigma_tau
    if dt > limit * (1 + _RELATIVE_SLACK):
        raise ValidationError(
            "dt", f"{dt:.3e} exceeds sigma_tau/20 = {limit:.3e}"
        )
    delta_max = schedule.max_value
    if delta_max > 0 and dt * delta_max > MAX_DT_TIMES_DELTA * (1 + _RELATIVE_SLACK):
        raise ValidationError(
            "dt", f"{dt:.3e} exceeds 0.1/delta0 = {MAX_DT_TIMES_DELTA / delta_max:.3e}"
        )
    # lower-triangular part of the discretized medium response
    diagonal = params.decay_rate + params.kappa ** 2 * grid.dzeta / 2.0
    if dt * diagonal > MAX_DIAGONAL_STEP:
        raise ValidationError(
            "nz", f"dt * (decay + b*dzeta/8) = {dt * diagonal:.3g} > "
            f"{MAX_DIAGONAL_STEP}; refine the grid"
        )


class MaxwellBlochSolver:
    """
    Fixed-step integrator for one (medium, schedule, pulse, grid, variant).

    Example:
        solver = MaxwellBlochSolver(params, Constant(30.0), pulse, grid)
        result = solver.run()
    """

    def __init__(
        self,
        params: MediumParams,
        schedule: SplittingSchedule,
        pulse: ProbePulse,
        grid: SimGrid,
        variant: SchemeVariant = SchemeVariant.ZEEMAN,
        snapshots: bool = True
    ):
        validate_grid(params, schedule, pulse, grid)
        self.params = params
        self.schedule = schedule
        self.pulse = pulse
        self.grid = grid
        self.variant = SchemeVariant(variant)
        self.keep_snapshots = snapshots
        self.equations: Equations = equations_for(self.variant, params)

    def _boundary(self, t: float) -> np.ndarray:
        if self.variant is SchemeVariant.FULL:
            return np.array([self.pulse.field_x(t), self.pulse.field_y(t)], dtype=complex)
        return np.array([self.pulse.field_y(t)], dtype=complex)

    def _field(self, s: np.ndarray, t: float) -> np.ndarray:
        integral = cumulative_trapezoid(
            self.equations.source(s), dx=self.grid.dzeta, axis=-1, initial=0
        )
        return self._boundary(t)[:, None] + integral

    def _stage_deltas(self, t: float, dt: float) -> tuple[float, float, float]:
        # switches land on the nearest grid time for non-smooth schedules
        if not self.schedule.is_smooth:
            mid = float(self.schedule.value(t + 0.5 * dt))
            return mid, mid, mid
        return (
            float(self.schedule.value(t)),
            float(self.schedule.value(t + 0.5 * dt)),
            float(self.schedule.value(t + dt)),
        )

    def run(self) -> SimResult:
        grid = self.grid
        eq = self.equations
        nt, nz, dt = grid.nt, grid.nz, grid.dt
        t_grid = grid.t_grid()
        stride = grid.stride

        logger.info(
            f"simulate {self.variant.value}: b={self.params.b:g}, "
            f"delta_max={self.schedule.max_value:g}, nz={nz}, nt={nt}, dt={dt:.3e}"
        )

        s = np.zeros((len(eq.atomic_names), nz), dtype=complex)
        f = self._field(s, t_grid[0])

        out = np.empty((len(eq.field_names), nt), dtype=complex)
        inputs = np.empty((len(eq.field_names), nt), dtype=complex)
        out[:, 0] = f[:, -1]
        inputs[:, 0] = f[:, 0]
        delta_trace = np.empty(nt)

        snap_indices = list(range(0, nt, stride))
        if snap_indices[-1] != nt - 1:
            snap_indices.append(nt - 1)
        snap_data = None
        if self.keep_snapshots:
            names = eq.field_names + eq.atomic_names
            snap_data = {
                name: np.empty((len(snap_indices), nz), dtype=complex) for name in names
            }
        snap_rows = {n: row for row, n in enumerate(snap_indices)}

        def record(n: int, s: np.ndarray, f: np.ndarray) -> None:
            row = snap_rows.get(n)
            if snap_data is None or row is None:
                return
            for i, name in enumerate(eq.field_names):
                snap_data[name][row] = f[i]
            for i, name in enumerate(eq.atomic_names):
                snap_data[name][row] = s[i]

        record(0, s, f)
        scale = max(abs(self.pulse.amplitude), np.finfo(float).tiny)
        max_residual = 0.0

        for n in range(nt - 1):
            t = t_grid[n]
            d1, d2, d4 = self._stage_deltas(t, dt)
            delta_trace[n] = d1

            k1 = eq.rhs(s, f, d1)
            s2 = s + (0.5 * dt) * k1
            k2 = eq.rhs(s2, self._field(s2, t + 0.5 * dt), d2)
            s3 = s + (0.5 * dt) * k2
            k3 = eq.rhs(s3, self._field(s3, t + 0.5 * dt), d2)
            s4 = s + dt * k3
            f_pred = self._field(s4, t_grid[n + 1])
            k4 = eq.rhs(s4, f_pred, d4)

            s = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(s)):
                raise DivergenceError(n + 1)

            f = self._field(s, t_grid[n + 1])
            residual = float(np.max(np.abs(f_pred[:, -1] - f[:, -1]))) / scale
            max_residual = max(max_residual, residual)

            out[:, n + 1] = f[:, -1]
            inputs[:, n + 1] = f[:, 0]
            record(n + 1, s, f)

        delta_trace[-1] = float(self.schedule.value(t_grid[-1]))

        snapshots = None
        if snap_data is not None:
            idx = np.array(snap_indices)
            snapshots = Snapshots(indices=idx, times=t_grid[idx], data=snap_data)

        logger.debug(f"finished {nt - 1} steps, max residual {max_residual:.3e}")

        full = self.variant is SchemeVariant.FULL
        return SimResult(
            params=self.params,
            schedule=self.schedule,
            pulse=self.pulse,
            grid=grid,
            variant=self.variant,
            t_grid=t_grid,
            z_grid=grid.z_grid(),
            e_in=inputs[-1].copy(),
            e_out=out[-1].copy(),
            delta_trace=delta_trace,
            diagnostics=SolverDiagnostics(steps=nt - 1, max_residual=max_residual),
            snapshots=snapshots,
            e_in_x=inputs[0].copy() if full else None,
            e_out_x=out[0].copy() if full else None,
        )


def simulate(
    params: MediumParams,
    schedule: SplittingSchedule,
    pulse: ProbePulse,
    grid: Optional[SimGrid] = None,
    variant: SchemeVariant = SchemeVariant.ZEEMAN,
    snapshots: bool = True,
    t_max: Optional[float] = None
) -> SimResult:
    """
    Integrate the Maxwell-Bloch equations over ``grid``.

    Args:
        params: Medium constants
        schedule: Splitting Δ(t)
        pulse: Input field at ζ = 0
        grid: Space-time grid; when None, ``default_grid`` over ``t_max``
        variant: Level scheme to evolve
        snapshots: Keep decimated space-time records
        t_max: Run length used with the default grid

    Returns:
        SimResult with output field, applied Δ(t) and diagnostics
    """
    if grid is None:
        if t_max is None:
            raise ValidationError("t_max", "required when no grid is given")
        grid = default_grid(pulse, schedule, t_max)
        if grid.snapshot_stride is None:
            points = get_config().snapshot_points
            grid = SimGrid(
                nz=grid.nz, nt=grid.nt, t_max=grid.t_max,
                snapshot_stride=max(1, math.ceil(grid.nt / points)),
            )
    return MaxwellBlochSolver(params, schedule, pulse, grid, variant, snapshots).run()
