"""
Fidelity heatmap over optical depth and splitting.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..config import get_config
from ..exceptions import ChosError, ValidationError
from ..mb_solver import SimResult, run_storage, storage_t_max
from ..mb_solver.solver import MAX_DIAGONAL_STEP
from ..metrics import FidelityReport, fidelity, fidelity_max_over_delay
from ..model import MediumParams, ProbePulse, SchemeVariant, SimGrid

logger = logging.getLogger(__name__)

# Reference medium for sweeps: γ = 1 rad/s and L = 1 m leave every canonical
# quantity unchanged; only the (negligible) transit time depends on them.
BASE_MEDIUM = MediumParams(gamma=1.0, optical_depth=0.0, length=1.0)


@dataclass(frozen=True)
class StorageTemplate:
    """
    Storage timing used at every sweep point, defined for
    ``sigma_tau_ref`` and scaled with the actual pulse width.

    With ``best_delay`` each point is scored at the retrieval delay
    τ ≥ hold that maximizes the fidelity; otherwise at the fixed
    hold + canonical group delay.
    """
    t_center: float = 0.010
    t_off: float = 0.017
    t_on: float = 0.030
    sigma_tau_ref: float = 0.002
    ramp_time: float = 0.0
    best_delay: bool = True

    def scaled(self, sigma_tau: float) -> "StorageTemplate":
        k = sigma_tau / self.sigma_tau_ref
        return StorageTemplate(
            t_center=self.t_center * k,
            t_off=self.t_off * k,
            t_on=self.t_on * k,
            sigma_tau_ref=sigma_tau,
            ramp_time=self.ramp_time * k,
            best_delay=self.best_delay,
        )

    @property
    def hold(self) -> float:
        return self.t_on - self.t_off

    def pulse(self, sigma_tau: Optional[float] = None) -> ProbePulse:
        sigma = sigma_tau or self.sigma_tau_ref
        return ProbePulse(sigma_tau=sigma, t_center=self.scaled(sigma).t_center)


@dataclass(frozen=True)
class GridPolicy:
    """
    Per-point grid: dt = min(σ_τ·sigma_fraction, delta_fraction/Δ), with nz
    raised when the optical depth would make the step too stiff.
    """
    nz: int = 400
    sigma_fraction: float = 1.0 / 40.0
    delta_fraction: float = 0.05
    snapshot_stride: Optional[int] = None

    def __post_init__(self):
        if self.nz < 2:
            raise ValidationError("nz", f"must be >= 2, got {self.nz}")
        if not 0 < self.sigma_fraction <= 1.0 / 20.0:
            raise ValidationError("sigma_fraction", "must be in (0, 1/20]")
        if not 0 < self.delta_fraction <= 0.1:
            raise ValidationError("delta_fraction", "must be in (0, 0.1]")

    def step(self, sigma_tau: float, delta_max: float) -> float:
        dt = self.sigma_fraction * sigma_tau
        if delta_max > 0:
            dt = min(dt, self.delta_fraction / delta_max)
        return dt

    def grid(self, params: MediumParams, sigma_tau: float, delta_max: float, t_max: float) -> SimGrid:
        dt = self.step(sigma_tau, delta_max)
        nz = self.nz
        stiff = dt * params.kappa ** 2 / 2.0
        if stiff > 0:
            # keep dt * b * dzeta / 8 within 80% of the admissible step
            nz = max(nz, math.ceil(stiff / (0.8 * MAX_DIAGONAL_STEP - dt * params.decay_rate)) + 1)
        stride = self.snapshot_stride
        if stride is None:
            nt = math.ceil(t_max / dt) + 1
            stride = max(1, math.ceil(nt / get_config().snapshot_points))
        return SimGrid.from_step(dt, t_max, nz, stride)


@dataclass
class SweepRow:
    b: float
    delta_over_gamma: float
    fidelity_mod: float
    fidelity_mod_sq: float
    delay: float
    steps: int = 0
    max_residual: float = 0.0
    entered_fraction: float = 0.0
    error: Optional[str] = None


@dataclass
class SweepResult:
    """Long-format heatmap plus everything needed to recompute any row."""
    rows: list[SweepRow]
    b_list: list[float]
    delta_list: list[float]
    pulse: ProbePulse
    template: StorageTemplate
    policy: GridPolicy
    medium: MediumParams
    variant: SchemeVariant = SchemeVariant.ZEEMAN
    errors: list[str] = field(default_factory=list)

    def fidelity_matrix(self, squared: bool = False) -> np.ndarray:
        """(len(b_list), len(delta_list)) array; failed points are NaN."""
        values = [r.fidelity_mod_sq if squared else r.fidelity_mod for r in self.rows]
        return np.array(values, dtype=float).reshape(len(self.b_list), len(self.delta_list))

    def metadata(self) -> dict:
        return {
            "b_list": list(self.b_list),
            "delta_list": list(self.delta_list),
            "pulse": {
                "sigma_tau": self.pulse.sigma_tau,
                "t_center": self.pulse.t_center,
            },
            "template": asdict(self.template),
            "policy": asdict(self.policy),
            "medium": asdict(self.medium),
            "variant": self.variant.value,
        }


def _score(result: SimResult, timing: StorageTemplate) -> FidelityReport:
    if not timing.best_delay:
        return fidelity(result)
    tau_max = max(result.t_grid[-1] - result.pulse.t_center, timing.hold)
    return fidelity_max_over_delay(result, tau_range=(timing.hold, tau_max))


def _storage_point(
    b: float,
    delta: float,
    pulse: ProbePulse,
    template: StorageTemplate,
    policy: GridPolicy,
    medium: MediumParams,
    delta_max: Optional[float] = None,
    variant: SchemeVariant = SchemeVariant.ZEEMAN
) -> SweepRow:
    """One storage simulation and its fidelity; failures land in ``error``."""
    params = medium.with_optical_depth(b)
    timing = template.scaled(pulse.sigma_tau)
    try:
        t_max = storage_t_max(params, delta, timing.t_on, pulse)
        grid = policy.grid(params, pulse.sigma_tau, delta_max or delta, t_max)
        result = run_storage(
            params, delta, timing.t_off, timing.t_on, pulse, grid,
            variant=variant, ramp_time=timing.ramp_time, snapshots=False,
        )
        report = _score(result, timing)
    except ChosError as e:
        logger.warning(f"sweep point b={b:g}, delta={delta:g} failed: {e}")
        return SweepRow(
            b=b, delta_over_gamma=delta, fidelity_mod=math.nan,
            fidelity_mod_sq=math.nan, delay=math.nan, error=str(e),
        )

    logger.debug(f"b={b:g}, delta={delta:g}: F={report.fidelity:.6f}")
    return SweepRow(
        b=b,
        delta_over_gamma=delta,
        fidelity_mod=report.fidelity,
        fidelity_mod_sq=report.fidelity_sq,
        delay=report.reference_delay,
        steps=result.diagnostics.steps,
        max_residual=result.diagnostics.max_residual,
        entered_fraction=result.diagnostics.entered_fraction or 0.0,
    )


def _run_point(task: tuple) -> SweepRow:
    return _storage_point(*task)


def _check_axis(name: str, values: Sequence[float]) -> list[float]:
    values = [float(v) for v in values]
    if not values:
        raise ValidationError(name, "must not be empty")
    if any(prev > nxt for prev, nxt in zip(values[:-1], values[1:])):
        raise ValidationError(name, "must be sorted ascending")
    return values


def heatmap(
    b_list: Sequence[float],
    delta_list: Sequence[float],
    pulse: Optional[ProbePulse] = None,
    template: StorageTemplate = StorageTemplate(),
    policy: GridPolicy = GridPolicy(),
    medium: MediumParams = BASE_MEDIUM,
    jobs: Optional[int] = None,
    variant: SchemeVariant = SchemeVariant.ZEEMAN
) -> SweepResult:
    """
    Storage fidelity on the b x Δ grid.

    Rows come out b-major in input order whatever ``jobs`` is; within a b row
    every point uses the time step set by the largest Δ.

    Args:
        b_list: Optical depths, ascending
        delta_list: Splittings Δ/γ, ascending
        pulse: Probe; defaults to the template's pulse
        template: Storage timing
        policy: Grid policy
        medium: Reference medium (b is replaced per point)
        jobs: Worker processes; defaults to Config.jobs
        variant: Level scheme

    Returns:
        SweepResult with one row per grid point
    """
    b_list = _check_axis("b_list", b_list)
    delta_list = _check_axis("delta_list", delta_list)
    pulse = pulse or template.pulse()
    jobs = jobs or get_config().jobs
    delta_max = max(delta_list)

    tasks = [
        (b, delta, pulse, template, policy, medium, delta_max, variant)
        for b in b_list
        for delta in delta_list
    ]
    logger.info(f"heatmap: {len(tasks)} points on {jobs} worker(s)")

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_point, tasks))
    else:
        rows = [_run_point(task) for task in tasks]

    errors = [
        f"b={r.b:g}, delta={r.delta_over_gamma:g}: {r.error}" for r in rows if r.error
    ]
    return SweepResult(
        rows=rows,
        b_list=b_list,
        delta_list=delta_list,
        pulse=pulse,
        template=template,
        policy=policy,
        medium=medium,
        variant=variant,
        errors=errors,
    )
