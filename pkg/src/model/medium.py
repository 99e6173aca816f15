"""
Medium constants, scheme variants and the dimensionless unit system.

Canonical units: time in 1/γ, space in ζ = z/L, splitting in γ. The vacuum
transit time L/c is dropped from the dynamics (retarded frame) and kept only
as ``MediumParams.transit_time`` for quantities that need it.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from ..exceptions import ValidationError

SPEED_OF_LIGHT = 299_792_458.0  # m/s


class SchemeVariant(Enum):
    """Level scheme evolved by the Maxwell-Bloch solver."""
    ZEEMAN = "zeeman"  # V-system: E_y, sigma_y, sigma_z
    STARK = "stark"    # two oppositely shifted classes: E_y, sigma_1, sigma_2
    FULL = "full"      # all five variables: E_x, E_y, sigma_z, sigma_x, sigma_y


@dataclass(frozen=True)
class MediumParams:
    """
    Ensemble constants.

    ``gamma`` [rad/s], ``length`` [m] and ``light_speed`` [m/s] are physical;
    ``optical_depth`` is the dimensionless b = αL. ``decay_scale`` multiplies
    the coherence decay (0 gives the lossless limit).
    """

    gamma: float
    optical_depth: float
    length: float
    light_speed: float = SPEED_OF_LIGHT
    decay_scale: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValidationError("gamma", f"must be positive, got {self.gamma}")
        if not self.optical_depth >= 0:
            raise ValidationError(
                "optical_depth", f"must be non-negative, got {self.optical_depth}"
            )
        if not self.length > 0:
            raise ValidationError("length", f"must be positive, got {self.length}")
        if not self.light_speed > 0:
            raise ValidationError(
                "light_speed", f"must be positive, got {self.light_speed}"
            )
        if not self.decay_scale >= 0:
            raise ValidationError(
                "decay_scale", f"must be non-negative, got {self.decay_scale}"
            )

    @property
    def b(self) -> float:
        return self.optical_depth

    @property
    def alpha(self) -> float:
        """Resonant absorption coefficient [1/m]."""
        return self.optical_depth / self.length

    @property
    def kappa(self) -> float:
        """
        Normalized field-coherence coupling.

        Fixed by requiring on-resonance intensity transmission exp(-b) with
        coherence decay 1/2: kappa**2 = b/4.
        """
        return 0.5 * math.sqrt(self.optical_depth)

    @property
    def decay_rate(self) -> float:
        """Coherence amplitude decay rate in units of γ."""
        return 0.5 * self.decay_scale

    @property
    def transit_time(self) -> float:
        """Vacuum transit time L/c in units of 1/γ."""
        return self.length * self.gamma / self.light_speed

    def with_optical_depth(self, optical_depth: float) -> "MediumParams":
        return MediumParams(
            gamma=self.gamma,
            optical_depth=optical_depth,
            length=self.length,
            light_speed=self.light_speed,
            decay_scale=self.decay_scale,
        )


@dataclass(frozen=True)
class PhysicalInputs:
    """Physical description of a run (SI units, angular frequencies)."""
    gamma: float
    alpha: float
    length: float
    splitting: float = 0.0
    durations: dict[str, float] = field(default_factory=dict)
    light_speed: float = SPEED_OF_LIGHT


@dataclass(frozen=True)
class NormalizedInputs:
    """The same run in canonical units."""
    medium: MediumParams
    delta: float
    durations: dict[str, float] = field(default_factory=dict)


def normalize(
    gamma: float,
    length: float,
    alpha: Optional[float] = None,
    optical_depth: Optional[float] = None,
    splitting: float = 0.0,
    durations: Optional[dict[str, float]] = None,
    light_speed: float = SPEED_OF_LIGHT
) -> NormalizedInputs:
    """
    Convert physical inputs to canonical units.

    Args:
        gamma: Coherence full decay rate γ [rad/s]
        length: Medium length L [m]
        alpha: Resonant absorption coefficient [1/m] (or give optical_depth)
        optical_depth: b = αL, used when alpha is not given
        splitting: Level splitting Δ [rad/s]
        durations: Named durations [s], returned in units of 1/γ
        light_speed: Speed of light [m/s]

    Returns:
        NormalizedInputs with the medium, Δ/γ and the scaled durations
    """
    if not gamma > 0:
        raise ValidationError("gamma", f"must be positive, got {gamma}")
    if not length > 0:
        raise ValidationError("length", f"must be positive, got {length}")
    if alpha is None and optical_depth is None:
        raise ValidationError("alpha", "either alpha or optical_depth is required")
    if alpha is not None:
        if not alpha > 0:
            raise ValidationError("alpha", f"must be positive, got {alpha}")
        b = alpha * length
    else:
        if not optical_depth > 0:
            raise ValidationError(
                "optical_depth", f"must be positive, got {optical_depth}"
            )
        b = optical_depth
    if not splitting >= 0:
        raise ValidationError("splitting", f"must be non-negative, got {splitting}")

    scaled = {}
    for name, value in (durations or {}).items():
        if not value > 0:
            raise ValidationError(name, f"duration must be positive, got {value}")
        scaled[name] = value * gamma

    medium = MediumParams(
        gamma=gamma, optical_depth=b, length=length, light_speed=light_speed
    )
    return NormalizedInputs(medium=medium, delta=splitting / gamma, durations=scaled)


def denormalize(normalized: NormalizedInputs) -> PhysicalInputs:
    """Inverse of ``normalize``."""
    medium = normalized.medium
    return PhysicalInputs(
        gamma=medium.gamma,
        alpha=medium.alpha,
        length=medium.length,
        splitting=normalized.delta * medium.gamma,
        durations={k: v / medium.gamma for k, v in normalized.durations.items()},
        light_speed=medium.light_speed,
    )
