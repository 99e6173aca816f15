"""
Run configuration: INI sections validated by pydantic models.

Unknown sections or keys are errors. The effective configuration (file plus
flag overrides) is written next to the outputs as ``run.cfg`` and reproduces
them when fed back through ``--config``.
"""

import configparser
import math
from pathlib import Path
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError

from ..exceptions import ConfigError
from ..mb_solver import default_grid
from ..model import (
    SPEED_OF_LIGHT, Constant, MediumParams, ProbePulse, RampedStore,
    SchemeVariant, SimGrid, SplittingSchedule, StepStore,
)
from ..spectral import Convention


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MediumSection(_Section):
    gamma: float = 1.0
    optical_depth: float = 0.0
    length: float = 1.0
    light_speed: float = SPEED_OF_LIGHT
    decay_scale: float = 1.0


class ScheduleSection(_Section):
    kind: Literal["constant", "step", "ramped"] = "constant"
    delta0: float = 0.0
    t_off: Optional[float] = None
    t_on: Optional[float] = None
    ramp_time: float = 0.0

    @model_validator(mode="after")
    def _check_times(self) -> "ScheduleSection":
        if self.kind != "constant" and (self.t_off is None or self.t_on is None):
            raise ValueError(f"schedule kind '{self.kind}' needs t_off and t_on")
        return self


class PulseSection(_Section):
    sigma_tau: float = 0.002
    t_center: Optional[float] = None  # defaults to 5 sigma_tau
    amplitude: float = 1.0
    pol_x: float = 0.0
    pol_y: float = 1.0


class GridSection(_Section):
    nz: int = 400
    nt: Optional[int] = None
    t_max: Optional[float] = None
    snapshot_stride: Optional[int] = None


class RunSection(_Section):
    variant: Literal["zeeman", "stark", "full"] = "zeeman"
    convention: Literal["paper", "canonical"] = "canonical"


class SweepSection(_Section):
    b_list: list[float] = []
    delta_list: list[float] = []

    @field_validator("b_list", "delta_list", mode="before")
    @classmethod
    def _split(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [float(v) for v in value.split(",") if v.strip()]
        return value


class RunConfig(_Section):
    """All sections of a run configuration file."""
    medium: MediumSection = MediumSection()
    schedule: ScheduleSection = ScheduleSection()
    pulse: PulseSection = PulseSection()
    grid: GridSection = GridSection()
    run: RunSection = RunSection()
    sweep: SweepSection = SweepSection()

    @property
    def variant(self) -> SchemeVariant:
        return SchemeVariant(self.run.variant)

    @property
    def convention(self) -> Convention:
        return Convention(self.run.convention)

    def to_medium(self) -> MediumParams:
        return MediumParams(**self.medium.model_dump())

    def to_schedule(self) -> SplittingSchedule:
        s = self.schedule
        if s.kind == "constant":
            return Constant(s.delta0)
        if s.kind == "step":
            return StepStore(delta0=s.delta0, t_off=s.t_off, t_on=s.t_on)
        return RampedStore(delta0=s.delta0, t_off=s.t_off, t_on=s.t_on, ramp_time=s.ramp_time)

    def to_pulse(self) -> ProbePulse:
        p = self.pulse
        t_center = p.t_center if p.t_center is not None else 5.0 * p.sigma_tau
        return ProbePulse(
            sigma_tau=p.sigma_tau, t_center=t_center, amplitude=p.amplitude,
            pol_x=p.pol_x, pol_y=p.pol_y,
        )

    def to_grid(self, t_max: float, schedule: SplittingSchedule, pulse: ProbePulse) -> SimGrid:
        """Explicit grid when nt is set, otherwise the default step policy."""
        g = self.grid
        t_max = g.t_max if g.t_max is not None else t_max
        if g.nt is not None:
            return SimGrid(nz=g.nz, nt=g.nt, t_max=t_max, snapshot_stride=g.snapshot_stride)
        return default_grid(pulse, schedule, t_max, nz=g.nz, snapshot_stride=g.snapshot_stride)

    def with_overrides(self, overrides: dict[str, dict[str, Any]]) -> "RunConfig":
        """New config with ``{section: {key: value}}`` applied; None values are skipped."""
        data = self.model_dump()
        for section, values in overrides.items():
            for key, value in values.items():
                if value is not None:
                    data[section][key] = value
        return _validate(data)


def _validate(data: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except PydanticValidationError as e:
        raise ConfigError(f"invalid run configuration: {e}") from e


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """Parse and validate an INI run configuration."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"configuration file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e
    data = {section: dict(parser.items(section)) for section in parser.sections()}
    return _validate(data)


def _format_value(value: Any) -> str:
    if isinstance(value, list):
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value) if isinstance(value, float) else str(value)


def dump_run_config(config: RunConfig) -> str:
    """INI text with exact (repr) floats; unset optional keys are omitted."""
    lines = []
    for section, values in config.model_dump().items():
        lines.append(f"[{section}]")
        for key, value in values.items():
            if value is None or value == []:
                continue
            lines.append(f"{key} = {_format_value(value)}")
        lines.append("")
    return "\n".join(lines)
