"""
Order-of-magnitude scaling laws and experimental feasibility estimates.
"""

import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Iterable, Optional, Union

import numpy as np

from ..exceptions import ValidationError
from ..model import SPEED_OF_LIGHT, MediumParams
from .susceptibility import Convention, group_delay, group_velocity, transparency_metric

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScalingLaws:
    """Bandwidth bound, efficiency estimate and minimum splitting, in γ."""
    bandwidth_bound: float
    efficiency_estimate: float
    min_splitting: float


def scaling_laws(
    b: float,
    bandwidth_prefactor: float = 1.0,
    efficiency_prefactor: float = 1.0,
    splitting_prefactor: float = 1.0
) -> ScalingLaws:
    """
    1/τ ∼ γ√b, η ∼ √b (clipped at 1) and Δ_min ∼ γ√b.

    The O(1) prefactors are free parameters; ``sweep.verify_scaling`` and
    ``sweep.optimize_curve`` are the places to measure them.
    """
    if not b >= 0:
        raise ValidationError("b", f"must be non-negative, got {b}")
    root = math.sqrt(b)
    return ScalingLaws(
        bandwidth_bound=bandwidth_prefactor * root,
        efficiency_estimate=min(1.0, efficiency_prefactor * root),
        min_splitting=splitting_prefactor * root,
    )


@dataclass(frozen=True)
class ExperimentalSetup:
    """
    Physical parameters of a candidate medium.

    ``gamma`` is the full coherence decay rate [rad/s]; give either
    ``alpha`` [1/m] or ``optical_depth``.
    """
    name: str
    gamma: float
    length: float
    delta_over_gamma: float
    alpha: Optional[float] = None
    optical_depth: Optional[float] = None

    def medium(self) -> MediumParams:
        if self.alpha is None and self.optical_depth is None:
            raise ValidationError("alpha", "either alpha or optical_depth is required")
        b = self.optical_depth if self.alpha is None else self.alpha * self.length
        return MediumParams(
            gamma=self.gamma, optical_depth=b, length=self.length,
            light_speed=SPEED_OF_LIGHT,
        )


class Preset(Enum):
    """Media with known parameter estimates."""
    SR = "sr"        # cold strontium, narrow intercombination line
    PRYSO = "pryso"  # Pr:YSO crystal, Stark splitting


# The Pr:YSO figures only fix b; the length and the operating splitting
# (twice the minimum √b) are chosen here.
PRESETS: dict[Preset, ExperimentalSetup] = {
    Preset.SR: ExperimentalSetup(
        name="sr",
        gamma=2.0 * math.pi * 15e3,
        length=100e-6,
        delta_over_gamma=23.0,
        alpha=2e6,
    ),
    Preset.PRYSO: ExperimentalSetup(
        name="pryso",
        gamma=2.0 * math.pi * 24e3,
        length=1e-2,
        delta_over_gamma=2.0 * math.sqrt(32.0),
        optical_depth=32.0,
    ),
}


@dataclass(frozen=True)
class EstimateReport:
    """Feasibility figures for one medium, in SI units."""
    name: str
    b: float
    delta_over_gamma: float
    transparency: float
    group_delay: float  # s
    v_g: float          # m/s
    tau: float          # s
    fidelity_estimate: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def interpolate_fidelity(
    b: float,
    curve: Iterable[tuple[float, float]]
) -> Optional[float]:
    """Best fidelity at ``b`` by linear interpolation in log b."""
    points = sorted((pb, pf) for pb, pf in curve if pb > 0)
    if not points:
        return None
    bs = np.log([p[0] for p in points])
    fs = np.array([p[1] for p in points])
    if b < points[0][0] or b > points[-1][0]:
        logger.warning(
            f"b={b:g} is outside the curve range "
            f"[{points[0][0]:g}, {points[-1][0]:g}]; clamping"
        )
    return float(np.interp(math.log(b), bs, fs))


def experimental_estimate(
    setup: Union[str, Preset, ExperimentalSetup],
    curve: Optional[Iterable[tuple[float, float]]] = None
) -> EstimateReport:
    """
    Evaluate b, the canonical group velocity, the shortest pulse duration
    τ = 1/(γ√b) and, when an optimization curve of (b, best_fidelity) pairs
    is supplied, the interpolated storage fidelity.
    """
    if isinstance(setup, str):
        try:
            setup = Preset(setup.lower())
        except ValueError:
            raise ValidationError("preset", f"unknown preset '{setup}'") from None
    if isinstance(setup, Preset):
        setup = PRESETS[setup]

    medium = setup.medium()
    delta = setup.delta_over_gamma
    delay = group_delay(medium, delta, Convention.CANONICAL) / medium.gamma
    v_g = group_velocity(medium, delta)
    tau = 1.0 / (medium.gamma * math.sqrt(medium.b)) if medium.b > 0 else math.inf

    fidelity = interpolate_fidelity(medium.b, curve) if curve is not None else None

    report = EstimateReport(
        name=setup.name,
        b=medium.b,
        delta_over_gamma=delta,
        transparency=transparency_metric(medium, delta),
        group_delay=delay,
        v_g=v_g,
        tau=tau,
        fidelity_estimate=fidelity,
    )
    logger.info(
        f"{report.name}: b={report.b:g}, v_g={report.v_g:.3g} m/s, "
        f"tau={report.tau:.3g} s"
    )
    return report
