"""
Right-hand sides of the retarded-frame Maxwell-Bloch equations.

Each variant splits its variables into fields (integrated along ζ) and
atomic coherences (integrated in time). With κ = √b/2 and Γ2 the coherence
decay rate:

    zeeman:  ∂ζE_y = -iκσ_y
             ∂tσ_y = -iκE_y - Δσ_z - Γ2σ_y
             ∂tσ_z =  Δσ_y - Γ2σ_z
    stark:   ∂ζE_y = -iκ'(σ_1 + σ_2),  κ' = κ/√2
             ∂tσ_1 = -(Γ2 + iΔ)σ_1 - iκ'E_y
             ∂tσ_2 = -(Γ2 - iΔ)σ_2 - iκ'E_y
    full:    zeeman plus ∂ζE_x = iκσ_x, ∂tσ_x = iκE_x - Γ2σ_x
"""

import math

import numpy as np

from ..model import MediumParams, SchemeVariant


class Equations:
    """Linear field/coherence system for one scheme variant."""

    field_names: tuple[str, ...] = ()
    atomic_names: tuple[str, ...] = ()

    def __init__(self, params: MediumParams):
        self.kappa = params.kappa
        self.decay = params.decay_rate

    def source(self, s: np.ndarray) -> np.ndarray:
        """∂F/∂ζ for atomic state ``s`` of shape (n_atomic, nz)."""
        raise NotImplementedError

    def rhs(self, s: np.ndarray, f: np.ndarray, delta: float) -> np.ndarray:
        """∂s/∂t given fields ``f`` of shape (n_fields, nz)."""
        raise NotImplementedError


class ZeemanEquations(Equations):
    field_names = ("E_y",)
    atomic_names = ("sigma_y", "sigma_z")

    def source(self, s):
        return (-1j * self.kappa) * s[0:1]

    def rhs(self, s, f, delta):
        out = np.empty_like(s)
        out[0] = -1j * self.kappa * f[0] - delta * s[1] - self.decay * s[0]
        out[1] = delta * s[0] - self.decay * s[1]
        return out


class StarkEquations(Equations):
    field_names = ("E_y",)
    atomic_names = ("sigma_1", "sigma_2")

    def __init__(self, params: MediumParams):
        super().__init__(params)
        self.kappa_class = self.kappa / math.sqrt(2.0)

    def source(self, s):
        return (-1j * self.kappa_class) * (s[0:1] + s[1:2])

    def rhs(self, s, f, delta):
        out = np.empty_like(s)
        drive = -1j * self.kappa_class * f[0]
        out[0] = -(self.decay + 1j * delta) * s[0] + drive
        out[1] = -(self.decay - 1j * delta) * s[1] + drive
        return out


class FullEquations(Equations):
    field_names = ("E_x", "E_y")
    atomic_names = ("sigma_z", "sigma_x", "sigma_y")

    def source(self, s):
        out = np.empty((2, s.shape[1]), dtype=complex)
        out[0] = (1j * self.kappa) * s[1]
        out[1] = (-1j * self.kappa) * s[2]
        return out

    def rhs(self, s, f, delta):
        out = np.empty_like(s)
        # same operation order as ZeemanEquations for the y-subsystem
        out[2] = -1j * self.kappa * f[1] - delta * s[0] - self.decay * s[2]
        out[0] = delta * s[2] - self.decay * s[0]
        out[1] = 1j * self.kappa * f[0] - self.decay * s[1]
        return out


_EQUATIONS = {
    SchemeVariant.ZEEMAN: ZeemanEquations,
    SchemeVariant.STARK: StarkEquations,
    SchemeVariant.FULL: FullEquations,
}


def equations_for(variant: SchemeVariant, params: MediumParams) -> Equations:
    return _EQUATIONS[SchemeVariant(variant)](params)
