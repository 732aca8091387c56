"""Descriptive summaries over numeric and categorical columns."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import DomainError


def quantile(sorted_values: list[float], p: float) -> float:
    """Linear interpolation between order statistics (the common default).

    h = (n - 1) p; result = x[floor(h)] + (h - floor(h)) (x[floor(h)+1] - x[floor(h)]).
    Input must be sorted ascending and non-empty.
    """
    if not sorted_values:
        raise DomainError("quantile of an empty sample")
    if not 0.0 <= p <= 1.0:
        raise DomainError("quantile probability must lie in [0, 1]")
    n = len(sorted_values)
    if n == 1:
        return sorted_values[0]
    h = (n - 1) * p
    lo = math.floor(h)
    if lo >= n - 1:
        return sorted_values[n - 1]
    frac = h - lo
    return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo])


def sample_sd(values: list[float]) -> float:
    """Sample standard deviation with the n-1 denominator."""
    n = len(values)
    if n < 2:
        raise DomainError("standard deviation requires at least two values")
    mean = sum(values) / n
    return math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1))


@dataclass(frozen=True)
class NumericSummary:
    n: int
    n_missing: int
    mean: float
    sd: float | None  # undefined for a single observation
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float


def numeric_summary(values: list[float], n_missing: int = 0) -> NumericSummary:
    """Five-number summary plus mean and sd over the non-missing values."""
    if not values:
        raise DomainError("summary requires at least one non-missing value")
    s = sorted(values)
    return NumericSummary(
        n=len(values),
        n_missing=n_missing,
        mean=sum(values) / len(values),
        sd=sample_sd(values) if len(values) >= 2 else None,
        minimum=s[0],
        q1=quantile(s, 0.25),
        median=quantile(s, 0.5),
        q3=quantile(s, 0.75),
        maximum=s[-1],
    )


@dataclass(frozen=True)
class FrequencyTable:
    levels: tuple[str, ...]
    counts: tuple[int, ...]
    n_missing: int

    @property
    def total(self) -> int:
        return sum(self.counts)


def frequency_table(labels: list[str], n_missing: int = 0) -> FrequencyTable:
    """Counts per level, levels in sorted order."""
    if not labels:
        raise DomainError("frequency table of an empty sample")
    levels = sorted(set(labels))
    counts = tuple(sum(1 for v in labels if v == level) for level in levels)
    return FrequencyTable(levels=tuple(levels), counts=counts, n_missing=n_missing)
