"""Simple linear regression by ordinary least squares."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import DomainError
from .distributions import t_cdf


@dataclass(frozen=True)
class RegressionFit:
    n: int
    intercept: float
    slope: float
    intercept_se: float
    slope_se: float
    t_slope: float
    p_slope: float
    r_squared: float
    residual_sd: float
    residuals: tuple[float, ...]
    # data range of x, for drawing the fitted line
    x_min: float
    x_max: float


def ols_fit(x: list[float], y: list[float]) -> RegressionFit:
    """Least squares line y = intercept + slope * x.

    Pairs with a missing coordinate must be dropped by the caller; here both
    lists are complete and equally long.  Needs n >= 3 and varying x.
    """
    if len(x) != len(y):
        raise DomainError("x and y must have equal length")
    n = len(x)
    if n < 3:
        raise DomainError("regression requires at least three complete pairs")
    mean_x = sum(x) / n
    mean_y = sum(y) / n
    sxx = sum((xi - mean_x) ** 2 for xi in x)
    if sxx <= 0:
        raise DomainError("regression requires x to vary")
    sxy = sum((xi - mean_x) * (yi - mean_y) for xi, yi in zip(x, y))
    syy = sum((yi - mean_y) ** 2 for yi in y)

    slope = sxy / sxx
    intercept = mean_y - slope * mean_x
    residuals = tuple(yi - intercept - slope * xi for xi, yi in zip(x, y))
    sse = sum(r * r for r in residuals)
    df = n - 2
    residual_var = sse / df
    slope_se = math.sqrt(residual_var / sxx)
    intercept_se = math.sqrt(residual_var * (1.0 / n + mean_x * mean_x / sxx))
    if slope_se > 0:
        t_slope = slope / slope_se
        p_slope = 2.0 * t_cdf(-abs(t_slope), df)
    else:
        # a perfect fit has no sampling noise to test against
        t_slope = math.inf if slope > 0 else (-math.inf if slope < 0 else 0.0)
        p_slope = 0.0 if slope != 0 else 1.0
    r_squared = 1.0 - sse / syy if syy > 0 else 1.0

    return RegressionFit(
        n=n,
        intercept=intercept,
        slope=slope,
        intercept_se=intercept_se,
        slope_se=slope_se,
        t_slope=t_slope,
        p_slope=p_slope,
        r_squared=r_squared,
        residual_sd=math.sqrt(residual_var),
        residuals=residuals,
        x_min=min(x),
        x_max=max(x),
    )
