"""
Storage runs, frame conversions, dark-state polariton records and the
five-variable structural check.
"""

import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from ..exceptions import MissingSnapshotsError, ValidationError
from ..model import (
    MediumParams, ProbePulse, RampedStore, SchemeVariant, SimGrid,
    SplittingSchedule, StepStore,
)
from ..spectral import Convention, group_delay, mixing_angle
from .solver import SimResult, SimState, Snapshots, default_grid, simulate

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)

# Tail margin after the expected retrieval, in pulse widths
_RETRIEVAL_MARGIN = 8.0


def storage_schedule(
    delta0: float,
    t_off: float,
    t_on: float,
    ramp_time: float = 0.0
) -> SplittingSchedule:
    if ramp_time > 0:
        return RampedStore(delta0=delta0, t_off=t_off, t_on=t_on, ramp_time=ramp_time)
    return StepStore(delta0=delta0, t_off=t_off, t_on=t_on)


def storage_t_max(params: MediumParams, delta0: float, t_on: float, pulse: ProbePulse) -> float:
    """Run length that covers the retrieved pulse."""
    delay = 0.0
    if delta0 > 0:
        delay = max(group_delay(params, delta0, Convention.CANONICAL), 0.0)
    return t_on + delay + _RETRIEVAL_MARGIN * pulse.sigma_tau


def entered_fraction(result: SimResult, t: float) -> float:
    """Share of the input energy inside the medium at time ``t``."""
    t_grid = result.t_grid
    flux_in = np.abs(result.e_in) ** 2
    flux_out = np.abs(result.e_out) ** 2
    total = trapezoid(flux_in, t_grid)
    if total == 0:
        return 0.0
    cum_in = cumulative_trapezoid(flux_in, t_grid, initial=0)
    cum_out = cumulative_trapezoid(flux_out, t_grid, initial=0)
    inside = np.interp(t, t_grid, cum_in - cum_out)
    return float(inside / total)


def run_storage(
    params: MediumParams,
    delta0: float,
    t_off: float,
    t_on: float,
    pulse: ProbePulse,
    grid: Optional[SimGrid] = None,
    variant: SchemeVariant = SchemeVariant.ZEEMAN,
    ramp_time: float = 0.0,
    snapshots: bool = True
) -> SimResult:
    """
    Store the pulse by collapsing the splitting at ``t_off`` and release it
    at ``t_on`` (``math.inf`` keeps it stored).

    The fraction of the input energy inside the medium at ``t_off`` is
    reported as ``diagnostics.entered_fraction``.
    """
    if t_off <= pulse.t_center:
        warnings.warn(
            f"t_off={t_off} is not after the pulse center {pulse.t_center}: "
            "part of the pulse is still outside the medium at the switch",
            RuntimeWarning,
            stacklevel=2,
        )
    schedule = storage_schedule(delta0, t_off, t_on, ramp_time)
    if grid is None:
        end = t_on if math.isfinite(t_on) else t_off + (t_off - pulse.t_center)
        grid = default_grid(pulse, schedule, storage_t_max(params, delta0, end, pulse))

    result = simulate(params, schedule, pulse, grid, variant, snapshots=snapshots)
    result.diagnostics.entered_fraction = entered_fraction(result, t_off)
    logger.info(
        f"stored at t_off={t_off:g}: {result.diagnostics.entered_fraction:.4f} "
        "of the input energy inside the medium"
    )
    return result


# Zeeman <-> Stark: σ_y = (σ_2 + σ_1)/√2, σ_z = (σ_2 - σ_1)/(√2 i)

def _zeeman_to_stark(sigma_y: np.ndarray, sigma_z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sigma_1 = (sigma_y - 1j * sigma_z) / SQRT2
    sigma_2 = (sigma_y + 1j * sigma_z) / SQRT2
    return sigma_1, sigma_2


def _stark_to_zeeman(sigma_1: np.ndarray, sigma_2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sigma_y = (sigma_2 + sigma_1) / SQRT2
    sigma_z = (sigma_2 - sigma_1) / (SQRT2 * 1j)
    return sigma_y, sigma_z


def _convert_atomic(atomic: dict[str, np.ndarray], target: SchemeVariant) -> dict[str, np.ndarray]:
    if target is SchemeVariant.STARK:
        s1, s2 = _zeeman_to_stark(atomic["sigma_y"], atomic["sigma_z"])
        return {"sigma_1": s1, "sigma_2": s2}
    sy, sz = _stark_to_zeeman(atomic["sigma_1"], atomic["sigma_2"])
    return {"sigma_y": sy, "sigma_z": sz}


def _convert_state(state: SimState, target: SchemeVariant) -> SimState:
    return SimState(
        variant=target,
        t=state.t,
        fields={k: v.copy() for k, v in state.fields.items()},
        atomic=_convert_atomic(state.atomic, target),
        boundary=dict(state.boundary),
    )


def _convert_snapshots(snapshots: Snapshots, target: SchemeVariant) -> Snapshots:
    data = {"E_y": snapshots.data["E_y"].copy()}
    data.update(_convert_atomic(snapshots.data, target))
    return Snapshots(indices=snapshots.indices.copy(), times=snapshots.times.copy(), data=data)


def convert_result(result: SimResult, target: SchemeVariant) -> SimResult:
    """Express a Zeeman or Stark result in the other frame."""
    target = SchemeVariant(target)
    expected = {
        SchemeVariant.STARK: SchemeVariant.ZEEMAN,
        SchemeVariant.ZEEMAN: SchemeVariant.STARK,
    }.get(target)
    if expected is None or result.variant is not expected:
        raise ValidationError(
            "variant", f"cannot convert {result.variant.value} to {target.value}"
        )
    if result.snapshots is None:
        raise MissingSnapshotsError("frame conversion needs snapshots")
    return replace(
        result, variant=target, snapshots=_convert_snapshots(result.snapshots, target)
    )


def to_stark_frame(obj: Union[SimState, SimResult]) -> Union[SimState, SimResult]:
    """Map a Zeeman state or result onto the two Stark-shifted classes."""
    if isinstance(obj, SimResult):
        return convert_result(obj, SchemeVariant.STARK)
    if obj.variant is not SchemeVariant.ZEEMAN:
        raise ValidationError("variant", f"expected zeeman, got {obj.variant.value}")
    _check_lengths(obj)
    return _convert_state(obj, SchemeVariant.STARK)


def to_zeeman_frame(obj: Union[SimState, SimResult]) -> Union[SimState, SimResult]:
    """Inverse of ``to_stark_frame``."""
    if isinstance(obj, SimResult):
        return convert_result(obj, SchemeVariant.ZEEMAN)
    if obj.variant is not SchemeVariant.STARK:
        raise ValidationError("variant", f"expected stark, got {obj.variant.value}")
    _check_lengths(obj)
    return _convert_state(obj, SchemeVariant.ZEEMAN)


def _check_lengths(state: SimState) -> None:
    lengths = {v.shape for v in state.variables().values()}
    if len(lengths) > 1:
        raise ValidationError("state", f"grid mismatch between variables: {sorted(lengths)}")


@dataclass
class PolaritonRecord:
    """
    Ψ = cos θ √(L/c) E_y + sin θ (i σ_z) on the snapshot times.

    Both terms carry the normalization of the energy bookkeeping, so
    ``excitation`` is the stored field plus σ_z energy. ``bright`` is the
    orthogonal combination sin θ √(L/c) E_y - cos θ (i σ_z); it vanishes
    while the excitation follows the dark state.
    """
    times: np.ndarray
    z_grid: np.ndarray
    psi: np.ndarray  # (n_snapshots, nz)
    bright: np.ndarray
    excitation: np.ndarray  # ∫|Ψ|² dζ per snapshot
    cos_theta: np.ndarray
    sin_theta: np.ndarray


def polariton_field(
    result: SimResult,
    params: Optional[MediumParams] = None,
    schedule: Optional[SplittingSchedule] = None,
    convention: Convention = Convention.CANONICAL
) -> PolaritonRecord:
    """Dark-state polariton along the run, θ(t) taken from Δ(t)."""
    if result.snapshots is None:
        raise MissingSnapshotsError("polariton field needs snapshots")
    params = params or result.params
    schedule = schedule or result.schedule
    if result.variant is SchemeVariant.STARK:
        result = convert_result(result, SchemeVariant.ZEEMAN)

    snaps = result.snapshots
    deltas = np.atleast_1d(schedule.value(snaps.times))
    angles = np.array([mixing_angle(params, float(d), convention) for d in deltas])
    cos_theta, sin_theta = angles[:, 0], angles[:, 1]

    # dark state: i σ_z = κ E / Δ, in phase with the field
    photon = math.sqrt(params.transit_time) * snaps.data["E_y"]
    spin = 1j * snaps.data["sigma_z"]
    c, s = cos_theta[:, None], sin_theta[:, None]
    psi = c * photon + s * spin
    excitation = trapezoid(np.abs(psi) ** 2, result.z_grid, axis=-1)
    return PolaritonRecord(
        times=snaps.times.copy(),
        z_grid=result.z_grid.copy(),
        psi=psi,
        bright=s * photon - c * spin,
        excitation=excitation,
        cos_theta=cos_theta,
        sin_theta=sin_theta,
    )


@dataclass
class FiveVarReport:
    """Outcome of the five-variable structural check."""
    passed: bool
    max_ex_ratio: float
    max_sx_ratio: float
    ey_mismatch: float
    errors: list[str] = field(default_factory=list)


FIVE_VAR_LEAK_TOL = 1e-12
FIVE_VAR_MATCH_TOL = 1e-10


def five_var_check(
    params: MediumParams,
    schedule: SplittingSchedule,
    pulse: ProbePulse,
    grid: SimGrid
) -> FiveVarReport:
    """
    Run the full scheme and confirm that a y-polarized input never excites
    the x subsystem and that E_y matches the Zeeman run.
    """
    if pulse.pol_x != 0:
        raise ValidationError("pol_x", "five-variable check needs a y-polarized pulse")

    full = simulate(params, schedule, pulse, grid, SchemeVariant.FULL)
    zeeman = simulate(params, schedule, pulse, grid, SchemeVariant.ZEEMAN)
    errors = []

    data = full.snapshots.data
    ey_max = float(np.max(np.abs(data["E_y"])))
    ref = ey_max if ey_max > 0 else 1.0

    def leak(name: str) -> float:
        values = np.abs(data[name])
        ratio = float(np.max(values)) / ref
        failed = ratio >= FIVE_VAR_LEAK_TOL if ey_max > 0 else ratio > 0
        if failed:
            i, j = np.unravel_index(np.argmax(values), values.shape)
            errors.append(
                f"{name} excited: |{name}|/max|E_y| = {ratio:.3e} at "
                f"t={full.snapshots.times[i]:.6g}, zeta={full.z_grid[j]:.4g}"
            )
        return ratio

    ex_ratio = leak("E_x")
    sx_ratio = leak("sigma_x")

    diff = np.abs(full.snapshots.data["E_y"] - zeeman.snapshots.data["E_y"])
    mismatch = float(np.max(diff)) / ref
    if mismatch > FIVE_VAR_MATCH_TOL:
        i, j = np.unravel_index(np.argmax(diff), diff.shape)
        errors.append(
            f"E_y differs from the zeeman run by {mismatch:.3e} at "
            f"t={full.snapshots.times[i]:.6g}, zeta={full.z_grid[j]:.4g}"
        )

    report = FiveVarReport(
        passed=not errors,
        max_ex_ratio=ex_ratio,
        max_sx_ratio=sx_ratio,
        ey_mismatch=mismatch,
        errors=errors,
    )
    if not report.passed:
        logger.warning(f"five-variable check failed: {'; '.join(errors)}")
    return report
