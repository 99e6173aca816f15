"""
Closed-form dispersion of the split two-line medium.

All quantities are in canonical units: ω and Δ in γ, χ per unit ζ (i.e. in
1/L), delays in 1/γ. Every API takes the convention explicitly:

- ``paper``: the closed forms written with the bare line width
  (line half-width γ, delay bγ/Δ²).
- ``canonical``: re-derived from the coherence equations with decay γ/2 and
  the coupling kappa**2 = b/4; this is the convention the solver integrates.
"""

import math
from enum import Enum
from typing import Union

import numpy as np
from scipy.signal import hilbert

from ..exceptions import SingularConfigurationError, ValidationError
from ..model import MediumParams

ArrayLike = Union[float, np.ndarray]

OPAQUE = math.inf  # transparency metric at zero splitting


class Convention(Enum):
    """Closed-form flavor."""
    PAPER = "paper"
    CANONICAL = "canonical"


def _check_delta(delta: float) -> None:
    if not delta >= 0:
        raise ValidationError("delta", f"must be non-negative, got {delta}")


def susceptibility(
    omega: ArrayLike,
    params: MediumParams,
    delta: float,
    convention: Convention
) -> ArrayLike:
    """
    Probe susceptibility χ(ω), defined by ∂E/∂ζ = χ E for each frequency.

    The canonical form uses the e^{-iωt} convention,
    χ = -kappa**2 (Γ2 - iω) / ((Γ2 - iω)**2 + Δ**2) with Γ2 the coherence
    decay rate; the paper form keeps the (γ + iω) line shape.
    """
    _check_delta(delta)
    omega = np.asarray(omega, dtype=float)
    b = params.optical_depth

    if convention is Convention.PAPER:
        a = 1.0 + 1j * omega
        chi = -0.5 * b * a / (a * a + delta ** 2)
    else:
        a = params.decay_rate - 1j * omega
        denominator = a * a + delta ** 2
        if params.kappa > 0 and np.any(denominator == 0):
            # lossless lines are real-axis poles at ω = ±Δ
            raise SingularConfigurationError(
                f"lossless medium has a pole at omega = +/-{delta:g}; "
                "evaluate off the line centers or keep decay_scale > 0"
            )
        chi = -(params.kappa ** 2) * a / denominator

    if chi.ndim == 0:
        return complex(chi)
    return chi


def transmission_spectrum(
    omega: ArrayLike,
    params: MediumParams,
    delta: float,
    convention: Convention
) -> ArrayLike:
    """Intensity transmission T(ω) = exp(2 Re χ(ω)) through the full length."""
    chi = susceptibility(omega, params, delta, convention)
    return np.exp(2.0 * np.real(chi))


def group_delay(
    params: MediumParams,
    delta: float,
    convention: Convention,
    lossless: bool = False
) -> float:
    """
    Group delay at the carrier, in 1/γ.

    Args:
        params: Medium constants
        delta: Splitting Δ/γ, must be positive
        convention: ``paper`` returns bγ/Δ²; ``canonical`` returns
            d(Im χ)/dω at ω = 0 evaluated analytically
        lossless: Canonical only; drop the coherence decay (Γ = 0 limit)

    Returns:
        Delay in units of 1/γ
    """
    if delta == 0:
        raise SingularConfigurationError("zero splitting: no slow-light regime")
    _check_delta(delta)
    b = params.optical_depth

    if convention is Convention.PAPER:
        return b / delta ** 2

    d = 0.0 if lossless else params.decay_rate
    d2 = d * d
    delta2 = delta * delta
    return params.kappa ** 2 * (delta2 - d2) / (delta2 + d2) ** 2


def transparency_metric(params: MediumParams, delta: float) -> float:
    """bγ²/Δ²; the medium is transparent when this is much below 1."""
    _check_delta(delta)
    if delta == 0:
        return OPAQUE
    return params.optical_depth / delta ** 2


def mixing_angle(
    params: MediumParams,
    delta: float,
    convention: Convention
) -> tuple[float, float]:
    """
    Dark-state mixing angle as (cos θ, sin θ).

    ``canonical`` defines θ through cos²θ = v_g/c = 1/(1 + T_g c/L), with
    T_g the lossless canonical delay, so v_g = c cos²θ holds identically.
    ``paper`` uses tan θ = αγc/Δ with Δ in rad/s, as printed.
    """
    _check_delta(delta)
    if delta == 0:
        return 0.0, 1.0
    if math.isinf(delta):
        return 1.0, 0.0

    if convention is Convention.PAPER:
        x = params.alpha * params.light_speed / delta
        theta = math.atan2(x, 1.0)
        return math.cos(theta), math.sin(theta)

    ratio = group_delay(params, delta, Convention.CANONICAL, lossless=True)
    ratio /= params.transit_time
    cos2 = 1.0 / (1.0 + ratio)
    return math.sqrt(cos2), math.sqrt(ratio * cos2)


def group_velocity(params: MediumParams, delta: float) -> float:
    """Canonical v_g = c cos²θ in m/s."""
    cos_theta, _ = mixing_angle(params, delta, Convention.CANONICAL)
    return params.light_speed * cos_theta ** 2


def kramers_kronig_imag(omega: np.ndarray, re_chi: np.ndarray) -> np.ndarray:
    """
    Imaginary part implied by causality from Re χ on a uniform grid.

    For a response analytic in the upper half ω-plane, Im χ is the Hilbert
    transform of Re χ; the transform is taken by FFT, so the grid must be
    wide enough for Re χ to have decayed at both ends.
    """
    omega = np.asarray(omega, dtype=float)
    steps = np.diff(omega)
    if omega.ndim != 1 or omega.size < 8:
        raise ValidationError("omega", "need a 1-D grid of at least 8 points")
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise ValidationError("omega", "grid must be uniform")
    return np.imag(hilbert(np.asarray(re_chi, dtype=float)))
