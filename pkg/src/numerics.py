"""
Golden-section search used by the delay and splitting optimizers.
"""

import math
from typing import Callable

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


def golden_section_max(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-6
) -> tuple[float, float, int]:
    """
    Maximize a unimodal function on [a, b].

    Args:
        f: Objective, assumed to have a single maximum in the bracket
        a: Lower end of the bracket
        b: Upper end of the bracket
        tol: Width of the final bracket

    Returns:
        (x_best, f(x_best), number of evaluations)
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x), 1

    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)
    evaluations = 2

    for _ in range(n - 1):
        if yc > yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)
        evaluations += 1

    if yc > yd:
        return c, yc, evaluations
    return d, yd, evaluations
