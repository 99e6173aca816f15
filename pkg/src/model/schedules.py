"""
Splitting schedules Δ(t), in units of γ with times in 1/γ.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from ..exceptions import ValidationError

TimeLike = Union[float, np.ndarray]


def _smoothstep(t: TimeLike, center: float, width: float) -> TimeLike:
    """0 before the transition, 1 after, cubic Hermite in between."""
    if width == 0:
        return np.where(np.asarray(t) >= center, 1.0, 0.0)
    x = np.clip((np.asarray(t, dtype=float) - (center - 0.5 * width)) / width, 0.0, 1.0)
    return x * x * (3.0 - 2.0 * x)


def _scalar_or_array(values: np.ndarray, t: TimeLike) -> TimeLike:
    if np.ndim(t) == 0:
        return float(values)
    return values


@dataclass(frozen=True)
class Constant:
    """Splitting held at ``delta0`` for all times."""
    delta0: float

    def __post_init__(self):
        if not self.delta0 >= 0:
            raise ValidationError("delta0", f"must be non-negative, got {self.delta0}")

    is_smooth = True

    @property
    def max_value(self) -> float:
        return self.delta0

    def value(self, t: TimeLike) -> TimeLike:
        return _scalar_or_array(np.full(np.shape(t), self.delta0, dtype=float), t)


@dataclass(frozen=True)
class StepStore:
    """Splitting switched off at ``t_off`` and back on at ``t_on``."""
    delta0: float
    t_off: float
    t_on: float

    def __post_init__(self):
        if not self.delta0 >= 0:
            raise ValidationError("delta0", f"must be non-negative, got {self.delta0}")
        if not self.t_off < self.t_on:
            raise ValidationError(
                "t_off", f"must precede t_on ({self.t_off} >= {self.t_on})"
            )

    is_smooth = False

    @property
    def max_value(self) -> float:
        return self.delta0

    @property
    def hold(self) -> float:
        return self.t_on - self.t_off

    def value(self, t: TimeLike) -> TimeLike:
        t_arr = np.asarray(t, dtype=float)
        stored = (t_arr >= self.t_off) & (t_arr < self.t_on)
        return _scalar_or_array(np.where(stored, 0.0, self.delta0), t)


@dataclass(frozen=True)
class RampedStore:
    """
    StepStore with each switch replaced by a smoothstep of duration
    ``ramp_time`` centered on the switch time.
    """
    delta0: float
    t_off: float
    t_on: float
    ramp_time: float

    def __post_init__(self):
        if not self.delta0 >= 0:
            raise ValidationError("delta0", f"must be non-negative, got {self.delta0}")
        if not self.t_off < self.t_on:
            raise ValidationError(
                "t_off", f"must precede t_on ({self.t_off} >= {self.t_on})"
            )
        if not self.ramp_time >= 0:
            raise ValidationError(
                "ramp_time", f"must be non-negative, got {self.ramp_time}"
            )
        if self.ramp_time > self.t_on - self.t_off:
            raise ValidationError(
                "ramp_time", "ramps overlap: ramp_time exceeds t_on - t_off"
            )

    @property
    def is_smooth(self) -> bool:
        return self.ramp_time > 0

    @property
    def max_value(self) -> float:
        return self.delta0

    @property
    def hold(self) -> float:
        return self.t_on - self.t_off

    def value(self, t: TimeLike) -> TimeLike:
        off = _smoothstep(t, self.t_off, self.ramp_time)
        on = _smoothstep(t, self.t_on, self.ramp_time)
        return _scalar_or_array(self.delta0 * (1.0 - off + on), t)


SplittingSchedule = Union[Constant, StepStore, RampedStore]


def schedule_value(schedule: SplittingSchedule, t: TimeLike) -> TimeLike:
    """Δ(t) in units of γ."""
    return schedule.value(t)
