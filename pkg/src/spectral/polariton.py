"""
Five-variable interaction matrix and its dark (zero-eigenvalue) state.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..exceptions import ConsistencyError, ValidationError
from ..model import MediumParams

BASIS = ("E_x", "E_y", "sigma_z", "sigma_x", "sigma_y")

# Structurally nonzero entries (row, col), 0-based in BASIS order
STRUCTURAL_NONZEROS = (
    (0, 0), (0, 3),
    (1, 1), (1, 4),
    (2, 2), (2, 4),
    (3, 0), (3, 3),
    (4, 1), (4, 2), (4, 4),
)

_INVERSE_ITERATIONS = 3
_NULL_TOLERANCE = 1e-10


@dataclass(frozen=True)
class MatrixM:
    """Plane-wave interaction matrix for wavevector ``k``."""
    matrix: np.ndarray
    k: float
    coupling: float  # g * sqrt(2N)
    delta: float
    gamma_term: complex
    light_speed: float

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))


@dataclass(frozen=True)
class PolaritonDecomposition:
    """Dark-state mixing coefficients and the underlying null vector."""
    cos_theta: float
    sin_theta: float
    eigenvector: np.ndarray
    eigenvalue: complex


def coupling_from_params(params: MediumParams) -> float:
    """
    Collective coupling g√(2N) [rad/s] implied by the optical depth.

    Uses α = 4g²N/(γc); the matrix then has the same units as Δ and γ.
    """
    return math.sqrt(0.5 * params.alpha * params.gamma * params.light_speed)


def build_matrix_M(
    k: float,
    coupling: float,
    delta: float,
    gamma_term: complex = 0.0,
    light_speed: float = 1.0
) -> MatrixM:
    """
    Assemble the 5x5 matrix over (E_x, E_y, σ_z, σ_x, σ_y).

    Args:
        k: Probe wavevector offset
        coupling: g√(2N), in the units of ``delta``
        delta: Splitting Δ
        gamma_term: Atomic diagonal Γ (e.g. -iγ/2 for spontaneous emission)
        light_speed: c, so that the field diagonal is k*c
    """
    kc = k * light_speed
    g = coupling
    m = np.zeros((5, 5), dtype=complex)
    m[0, 0] = kc
    m[0, 3] = -g
    m[1, 1] = kc
    m[1, 4] = g
    m[2, 2] = gamma_term
    m[2, 4] = 1j * delta
    m[3, 0] = -g
    m[3, 3] = gamma_term
    m[4, 1] = g
    m[4, 2] = -1j * delta
    m[4, 4] = gamma_term
    return MatrixM(
        matrix=m, k=k, coupling=coupling, delta=delta,
        gamma_term=gamma_term, light_speed=light_speed,
    )


def dark_eigenvector(m: MatrixM) -> PolaritonDecomposition:
    """
    Null vector of M at k = 0 and Γ = 0.

    Inverse iteration with a small shift, seeded by the analytic two-component
    solution g√(2N)·E_y = iΔ·σ_z. The Rayleigh quotient must vanish to
    1e-10·‖M‖, otherwise ConsistencyError.
    """
    if m.k != 0 or m.gamma_term != 0:
        raise ValidationError("matrix", "dark state requires k = 0 and Γ = 0")

    scale = max(m.norm, 1.0)
    seed = np.zeros(5, dtype=complex)
    if m.delta == 0 and m.coupling == 0:
        seed[1] = 1.0
    else:
        seed[1] = m.delta
        seed[2] = -1j * m.coupling
    v = seed / np.linalg.norm(seed)

    # the shift must avoid the bright eigenvalues ±g and ±sqrt(g² + Δ²)
    shift = 1e-7 * scale
    shifted = m.matrix - shift * np.eye(5)
    for _ in range(_INVERSE_ITERATIONS):
        x = np.linalg.solve(shifted, v)
        v = x / np.linalg.norm(x)

    eigenvalue = complex(np.vdot(v, m.matrix @ v))
    if abs(eigenvalue) > _NULL_TOLERANCE * scale:
        raise ConsistencyError(
            f"no eigenvalue within {_NULL_TOLERANCE:g}*|M| of zero "
            f"(Rayleigh quotient {eigenvalue:.3e})"
        )

    theta = math.atan2(abs(v[2]), abs(v[1]))
    return PolaritonDecomposition(
        cos_theta=math.cos(theta),
        sin_theta=math.sin(theta),
        eigenvector=v,
        eigenvalue=eigenvalue,
    )
