"""
Delay and energy bookkeeping.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from ..exceptions import MetricsError, MissingSnapshotsError
from ..mb_solver import SimResult
from ..model import MediumParams

# Output energies below this fraction of the input count as no output
MIN_OUTPUT_FRACTION = 1e-9


def _intensity(result: SimResult, side: str) -> np.ndarray:
    if side == "in":
        total = np.abs(result.e_in) ** 2
        if result.e_in_x is not None:
            total = total + np.abs(result.e_in_x) ** 2
    else:
        total = np.abs(result.e_out) ** 2
        if result.e_out_x is not None:
            total = total + np.abs(result.e_out_x) ** 2
    return total


def measured_delay(result: SimResult) -> float:
    """Centroid of |E_out|² minus centroid of |E_in|², in 1/γ."""
    t = result.t_grid
    i_in = _intensity(result, "in")
    i_out = _intensity(result, "out")
    n_in = trapezoid(i_in, t)
    n_out = trapezoid(i_out, t)
    if n_in <= 0 or n_out <= MIN_OUTPUT_FRACTION * n_in:
        raise MetricsError(
            f"output energy {n_out:.3e} is too small to locate (input {n_in:.3e})"
        )
    return float(trapezoid(t * i_out, t) / n_out - trapezoid(t * i_in, t) / n_in)


@dataclass
class EnergyReport:
    """
    Energy bookkeeping on the snapshot times.

    ``energy_in`` / ``energy_out`` are cumulative boundary fluxes; the stored
    terms are the atomic excitation ∫Σ|σ|²dζ and the field energy
    (L/c)·∫Σ|E|²dζ. ``residual`` is the largest imbalance relative to the
    total input.
    """
    times: np.ndarray
    energy_in: np.ndarray
    energy_out: np.ndarray
    stored_atomic: np.ndarray
    stored_field: np.ndarray
    residual: float

    @property
    def imbalance(self) -> np.ndarray:
        return self.energy_in - self.energy_out - self.stored_atomic - self.stored_field

    def summary(self) -> dict[str, float]:
        return {
            "in": float(self.energy_in[-1]),
            "out": float(self.energy_out[-1]),
            "stored_atomic": float(self.stored_atomic[-1]),
            "stored_field": float(self.stored_field[-1]),
            "residual": self.residual,
        }


def energy_balance(result: SimResult, params: Optional[MediumParams] = None) -> EnergyReport:
    """
    Compare the cumulative input with output plus stored energy.

    In the lossless limit the retarded-frame equations conserve
    |E_in|² - |E_out|² = d/dt ∫Σ|σ|²dζ exactly, so the residual measures the
    discretization error; with decay it also contains the decayed energy.
    """
    snaps = result.snapshots
    if snaps is None:
        raise MissingSnapshotsError("energy balance needs snapshots")
    params = params or result.params
    t = result.t_grid

    cum_in = cumulative_trapezoid(_intensity(result, "in"), t, initial=0)[snaps.indices]
    cum_out = cumulative_trapezoid(_intensity(result, "out"), t, initial=0)[snaps.indices]

    atomic = np.zeros(len(snaps.indices))
    stored_field = np.zeros(len(snaps.indices))
    for name, values in snaps.data.items():
        density = trapezoid(np.abs(values) ** 2, result.z_grid, axis=-1)
        if name.startswith("E_"):
            stored_field += params.transit_time * density
        else:
            atomic += density

    total = cum_in[-1]
    imbalance = cum_in - cum_out - atomic - stored_field
    residual = float(np.max(np.abs(imbalance)) / total) if total > 0 else 0.0
    return EnergyReport(
        times=snaps.times.copy(),
        energy_in=cum_in,
        energy_out=cum_out,
        stored_atomic=atomic,
        stored_field=stored_field,
        residual=residual,
    )
