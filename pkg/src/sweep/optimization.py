"""
Splitting optimization, the fidelity-vs-optical-depth curve and its fit,
and empirical verification of the delay scaling law.
"""

import logging
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from ..exceptions import FitError, MetricsError, RegimeError, ValidationError
from ..mb_solver import simulate
from ..metrics import measured_delay
from ..model import Constant, MediumParams, ProbePulse, SimGrid
from ..numerics import golden_section_max
from ..spectral import transparency_metric
from .heatmap import BASE_MEDIUM, GridPolicy, StorageTemplate, _storage_point

logger = logging.getLogger(__name__)

PRESCAN_POINTS = 8
GRID_SEARCH_POINTS = 29  # four times the pre-scan resolution
LOG_TOLERANCE = 2e-3     # final bracket width in ln Δ

# Default search window expressed through the lossless delay b/(4Δ²)
DELAY_BOUNDS_IN_SIGMA = (1.0, 16.0)

MAX_TRANSPARENCY = 0.1


@dataclass
class DeltaOptimum:
    b: float
    best_delta: float
    best_fidelity: float
    evaluations: int
    grid_search: bool = False


def default_delta_bounds(b: float, sigma_tau: float) -> tuple[float, float]:
    """Splittings whose lossless delay spans 1 to 16 pulse widths."""
    lo_delay, hi_delay = DELAY_BOUNDS_IN_SIGMA
    return (
        math.sqrt(b / (4.0 * hi_delay * sigma_tau)),
        math.sqrt(b / (4.0 * lo_delay * sigma_tau)),
    )


def _count_maxima(values: np.ndarray) -> int:
    """Local maxima of a scan, end points included."""
    padded = np.concatenate(([-np.inf], values, [-np.inf]))
    return int(sum(
        1 for i in range(1, len(padded) - 1)
        if padded[i] > padded[i - 1] and padded[i] >= padded[i + 1]
    ))


def optimize_delta(
    b: float,
    pulse: Optional[ProbePulse] = None,
    template: StorageTemplate = StorageTemplate(),
    bounds: Optional[tuple[float, float]] = None,
    policy: GridPolicy = GridPolicy(),
    medium: MediumParams = BASE_MEDIUM
) -> DeltaOptimum:
    """
    Splitting that maximizes the storage fidelity at optical depth ``b``.

    Golden-section search in ln Δ after an 8-point logarithmic pre-scan; if
    the pre-scan shows more than one maximum the search falls back to a
    finer grid search over the whole bracket.
    """
    pulse = pulse or template.pulse()
    if bounds is None:
        bounds = default_delta_bounds(b, pulse.sigma_tau)
    lo, hi = bounds
    if not (lo > 0 and hi > 0):
        raise ValidationError("bounds", f"must be positive, got {bounds}")
    if lo > hi:
        raise ValidationError("bounds", f"lower bound {lo} exceeds upper bound {hi}")

    cache: dict[float, float] = {}

    def evaluate(log_delta: float) -> float:
        if log_delta not in cache:
            row = _storage_point(b, math.exp(log_delta), pulse, template, policy, medium)
            value = row.fidelity_mod
            cache[log_delta] = -math.inf if row.error or math.isnan(value) else value
        return cache[log_delta]

    if lo == hi:
        value = evaluate(math.log(lo))
        if value == -math.inf:
            raise MetricsError(f"simulation failed at the only candidate delta={lo:g}")
        return DeltaOptimum(b=b, best_delta=lo, best_fidelity=value, evaluations=1)

    log_lo, log_hi = math.log(lo), math.log(hi)
    scan = np.linspace(log_lo, log_hi, PRESCAN_POINTS)
    values = np.array([evaluate(x) for x in scan])
    if np.all(values == -math.inf):
        raise MetricsError(f"every simulation failed at b={b:g}")

    grid_search = _count_maxima(values) > 1
    if grid_search:
        logger.warning(f"fidelity is not unimodal in delta at b={b:g}; grid search")
        fine = np.linspace(log_lo, log_hi, GRID_SEARCH_POINTS)
        fine_values = np.array([evaluate(x) for x in fine])
        best = int(np.argmax(fine_values))
        x_best, f_best = fine[best], fine_values[best]
    else:
        best = int(np.argmax(values))
        a = scan[max(best - 1, 0)]
        c = scan[min(best + 1, PRESCAN_POINTS - 1)]
        x_best, f_best, _ = golden_section_max(evaluate, a, c, tol=LOG_TOLERANCE)
        if values[best] > f_best:
            x_best, f_best = scan[best], values[best]

    logger.info(f"b={b:g}: best delta={math.exp(x_best):.6g}, F={f_best:.6f}")
    return DeltaOptimum(
        b=b,
        best_delta=math.exp(x_best),
        best_fidelity=float(f_best),
        evaluations=len(cache),
        grid_search=grid_search,
    )


@dataclass
class CurvePoint:
    b: float
    best_delta: float
    best_fidelity: float


@dataclass
class OptimizationCurve:
    """Optimized fidelity on a ladder of optical depths."""
    rows: list[CurvePoint]
    settings: dict = field(default_factory=dict)

    def points(self) -> list[tuple[float, float]]:
        return [(r.b, r.best_fidelity) for r in self.rows]

    def is_monotone(self, slack: float = 1e-3) -> bool:
        f = [r.best_fidelity for r in self.rows]
        return all(nxt >= prev - slack for prev, nxt in zip(f[:-1], f[1:]))


def optimize_curve(
    b_list: Sequence[float],
    pulse: Optional[ProbePulse] = None,
    template: StorageTemplate = StorageTemplate(),
    policy: GridPolicy = GridPolicy(),
    medium: MediumParams = BASE_MEDIUM
) -> OptimizationCurve:
    """Run ``optimize_delta`` at every b of the ladder."""
    pulse = pulse or template.pulse()
    rows = []
    for b in b_list:
        opt = optimize_delta(b, pulse, template, None, policy, medium)
        rows.append(CurvePoint(b=b, best_delta=opt.best_delta, best_fidelity=opt.best_fidelity))
    settings = {
        "sigma_tau": pulse.sigma_tau,
        "template": asdict(template),
        "policy": asdict(policy),
        "prescan_points": PRESCAN_POINTS,
        "log_tolerance": LOG_TOLERANCE,
    }
    return OptimizationCurve(rows=rows, settings=settings)


@dataclass
class FitReport:
    """F(b) = exp(-c0 t_s) (1 - exp(-c1 √b)) least-squares fit."""
    c0: float
    c1: float
    rms_residual: float
    t_s: float
    n_points: int

    def model(self, b: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        return fidelity_model(np.asarray(b, dtype=float), self.c0, self.c1, self.t_s)

    @property
    def asymptote(self) -> float:
        return math.exp(-self.c0 * self.t_s)


def fidelity_model(b, c0, c1, t_s):
    return np.exp(-c0 * t_s) * (1.0 - np.exp(-c1 * np.sqrt(b)))


def fit_fidelity_curve(
    curve: Union[OptimizationCurve, Iterable[tuple[float, float]]],
    t_s: float
) -> FitReport:
    """
    Fit the storage-loss / optical-depth model to an optimization curve.

    Args:
        curve: OptimizationCurve or (b, best_fidelity) pairs; at least 4
        t_s: Storage time in 1/γ

    Returns:
        FitReport with c0, c1 and the rms residual
    """
    points = curve.points() if isinstance(curve, OptimizationCurve) else list(curve)
    if len(points) < 4:
        raise ValidationError("curve", f"need at least 4 points, got {len(points)}")
    if not t_s > 0:
        raise ValidationError("t_s", f"must be positive, got {t_s}")
    b = np.array([p[0] for p in points], dtype=float)
    f = np.array([p[1] for p in points], dtype=float)
    if np.unique(b).size < 2:
        raise FitError("all curve points share the same optical depth")

    f_max = float(np.max(f))
    c0_guess = -math.log(min(max(f_max, 1e-6), 1.0 - 1e-6)) / t_s
    c1_guess = 1.0 / math.sqrt(float(np.median(b)) or 1.0)

    def model(b, c0, c1):
        return fidelity_model(b, c0, c1, t_s)

    with warnings.catch_warnings():
        warnings.simplefilter("error", OptimizeWarning)
        try:
            popt, _ = curve_fit(
                model, b, f, p0=(c0_guess, c1_guess),
                ftol=1e-12, xtol=1e-12, maxfev=20000,
            )
        except (RuntimeError, OptimizeWarning) as e:
            raise FitError(f"fit did not converge: {e}") from e

    residual = f - model(b, *popt)
    rms = float(np.sqrt(np.mean(residual ** 2)))
    logger.info(f"fit: c0={popt[0]:.6g}, c1={popt[1]:.6g}, rms={rms:.3e}")
    return FitReport(
        c0=float(popt[0]), c1=float(popt[1]), rms_residual=rms,
        t_s=t_s, n_points=len(points),
    )


@dataclass
class ScalingReport:
    """Log-log regression of the measured delay on b and Δ."""
    b_exponent: float
    delta_exponent: float
    prefactor: float
    prefactor_spread: float
    samples: list[tuple[float, float, float]]  # (b, Δ, measured delay)


def verify_scaling(
    samples: Sequence[tuple[float, float]],
    sigma_tau: float = 0.25,
    nz: int = 50,
    medium: MediumParams = BASE_MEDIUM
) -> ScalingReport:
    """
    Measure the slow-light delay at each (b, Δ) and regress
    ln T = ln A + p ln b + q ln Δ; the delay law predicts p = 1, q = -2.

    ``prefactor`` is the mean of T Δ²/b and ``prefactor_spread`` its
    (max - min)/mean over the samples.
    """
    samples = [(float(b), float(d)) for b, d in samples]
    if len(samples) < 3:
        raise ValidationError("samples", "need at least 3 (b, delta) points")
    bs = np.array([s[0] for s in samples])
    ds = np.array([s[1] for s in samples])
    if np.any(bs <= 0) or np.any(ds <= 0):
        raise ValidationError("samples", "b and delta must be positive")
    if bs.max() < 10 * bs.min() or ds.max() < 10 * ds.min():
        raise ValidationError("samples", "each axis must span at least one decade")
    for b, d in samples:
        metric = transparency_metric(medium.with_optical_depth(b), d)
        if metric >= MAX_TRANSPARENCY:
            raise RegimeError(
                f"(b={b:g}, delta={d:g}) is outside the transparency regime "
                f"(b/delta^2 = {metric:.3g} >= {MAX_TRANSPARENCY})"
            )

    pulse = ProbePulse(sigma_tau=sigma_tau, t_center=5.0 * sigma_tau)
    measured = []
    for b, d in samples:
        params = medium.with_optical_depth(b)
        schedule = Constant(d)
        t_max = 2.0 * pulse.t_center + b / (4.0 * d * d)
        dt = min(sigma_tau / 40.0, 0.05 / d)
        grid = SimGrid.from_step(dt, t_max, nz)
        result = simulate(params, schedule, pulse, grid, snapshots=False)
        delay = measured_delay(result)
        logger.debug(f"b={b:g}, delta={d:g}: delay={delay:.6e}")
        measured.append((b, d, delay))

    delays = np.array([m[2] for m in measured])
    if np.any(delays <= 0):
        raise RegimeError("non-positive measured delay; the pulse is not in the slow-light regime")

    design = np.column_stack([np.ones(len(samples)), np.log(bs), np.log(ds)])
    coef, *_ = np.linalg.lstsq(design, np.log(delays), rcond=None)
    ratios = delays * ds ** 2 / bs
    mean = float(np.mean(ratios))
    return ScalingReport(
        b_exponent=float(coef[1]),
        delta_exponent=float(coef[2]),
        prefactor=mean,
        prefactor_spread=float((ratios.max() - ratios.min()) / mean),
        samples=measured,
    )
