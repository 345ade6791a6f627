"""Composite Simpson quadrature on a window centred on a Gaussian-like integrand."""

import numpy as np
from scipy.integrate import simpson


class IntegrationError(ArithmeticError):
    pass


def quad_integrate(f, center: float, sigma: float, halfwidth_sigmas: float = 10.0, points: int = 2001) -> float:
    """Integrate vectorized ``f`` over [center - k sigma, center + k sigma]."""
    if points < 101 or points % 2 == 0:
        raise ValueError(f"points must be odd and >= 101, got {points}")
    if halfwidth_sigmas < 8:
        raise ValueError(f"halfwidth_sigmas must be >= 8, got {halfwidth_sigmas}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    grid = np.linspace(center - halfwidth_sigmas * sigma, center + halfwidth_sigmas * sigma, points)
    values = np.asarray(f(grid))
    if not np.all(np.isfinite(values)):
        raise IntegrationError("integrand is not finite on the quadrature grid")
    return simpson(values, x=grid)
