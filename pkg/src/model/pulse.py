"""
Probe pulse and space-time grid.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..exceptions import ValidationError

TimeLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class ProbePulse:
    """
    Gaussian input field at ζ = 0.

    envelope(t) = amplitude * exp(-(t - t_center)**2 / (2 sigma_tau**2)); the
    y and x input components are pol_y * envelope and pol_x * envelope.
    All simulations are linear, so ``amplitude`` is a pure (complex) scale.
    """

    sigma_tau: float
    t_center: float
    amplitude: complex = 1.0
    pol_x: complex = 0.0
    pol_y: complex = 1.0

    def __post_init__(self):
        if not self.sigma_tau > 0:
            raise ValidationError(
                "sigma_tau", f"must be positive, got {self.sigma_tau}"
            )
        norm = abs(self.pol_x) ** 2 + abs(self.pol_y) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValidationError(
                "pol_x", f"|pol_x|^2 + |pol_y|^2 must be 1, got {norm}"
            )
        if self.t_center < 4.0 * self.sigma_tau:
            warnings.warn(
                f"t_center={self.t_center} < 4*sigma_tau: the input pulse is "
                "truncated at t=0 and fidelities will be biased",
                RuntimeWarning,
                stacklevel=3,
            )

    def envelope(self, t: TimeLike) -> TimeLike:
        x = (np.asarray(t, dtype=float) - self.t_center) / self.sigma_tau
        return self.amplitude * np.exp(-0.5 * x * x)

    def field_y(self, t: TimeLike) -> TimeLike:
        return self.pol_y * self.envelope(t)

    def field_x(self, t: TimeLike) -> TimeLike:
        return self.pol_x * self.envelope(t)

    def scaled(self, factor: complex) -> "ProbePulse":
        return ProbePulse(
            sigma_tau=self.sigma_tau,
            t_center=self.t_center,
            amplitude=self.amplitude * factor,
            pol_x=self.pol_x,
            pol_y=self.pol_y,
        )


@dataclass(frozen=True)
class SimGrid:
    """
    Uniform grid in retarded time t ∈ [0, t_max] and ζ ∈ [0, 1].

    ``snapshot_stride`` decimates the stored space-time records; None
    means ceil(nt / 200).
    """

    nz: int
    nt: int
    t_max: float
    snapshot_stride: Optional[int] = None
    frame: str = "retarded"

    def __post_init__(self):
        if self.nz < 2:
            raise ValidationError("nz", f"must be >= 2, got {self.nz}")
        if self.nt < 2:
            raise ValidationError("nt", f"must be >= 2, got {self.nt}")
        if not self.t_max > 0:
            raise ValidationError("t_max", f"must be positive, got {self.t_max}")
        if self.snapshot_stride is not None and self.snapshot_stride < 1:
            raise ValidationError(
                "snapshot_stride", f"must be >= 1, got {self.snapshot_stride}"
            )
        if self.frame != "retarded":
            raise ValidationError("frame", "only the retarded frame is supported")

    @property
    def dt(self) -> float:
        return self.t_max / (self.nt - 1)

    @property
    def dzeta(self) -> float:
        return 1.0 / (self.nz - 1)

    @property
    def stride(self) -> int:
        if self.snapshot_stride is not None:
            return self.snapshot_stride
        return max(1, math.ceil(self.nt / 200))

    def t_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.nt)

    def z_grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.nz)

    @classmethod
    def from_step(
        cls,
        dt: float,
        t_max: float,
        nz: int,
        snapshot_stride: Optional[int] = None
    ) -> "SimGrid":
        """Smallest uniform grid covering t_max with a step no larger than dt."""
        if not dt > 0:
            raise ValidationError("dt", f"must be positive, got {dt}")
        nt = max(2, math.ceil(t_max / dt - 1e-9) + 1)
        return cls(nz=nz, nt=nt, t_max=t_max, snapshot_stride=snapshot_stride)
