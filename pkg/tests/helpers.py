"""Small builders shared by the test modules."""

import numpy as np

from src.model import MediumParams


def medium(b: float, decay_scale: float = 1.0) -> MediumParams:
    return MediumParams(gamma=1.0, optical_depth=b, length=1.0, decay_scale=decay_scale)


def shifted_copy(result, delay: float, scale: complex = 1.0) -> np.ndarray:
    """The input pulse delayed by ``delay`` on the result's time grid."""
    return scale * result.pulse.field_y(result.t_grid - delay)
