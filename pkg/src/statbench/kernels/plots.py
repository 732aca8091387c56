"""Plot geometry builders.

A plot here is pure data: the kernel reduces the sample to the geometry the
renderer needs (bin edges and counts, box stats, mosaic tiles) and nothing
else.  Serialization to the wire format lives with the other payloads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import DomainError
from .summaries import quantile


@dataclass(frozen=True)
class HistogramSpec:
    kind = "histogram"
    variable: str
    breaks: tuple[float, ...]
    counts: tuple[int, ...]


@dataclass(frozen=True)
class BarSpec:
    kind = "bar"
    variable: str
    levels: tuple[str, ...]
    counts: tuple[int, ...]


@dataclass(frozen=True)
class ScatterSpec:
    kind = "scatter"
    x_name: str
    y_name: str
    x: tuple[float, ...]
    y: tuple[float, ...]


@dataclass(frozen=True)
class BoxStats:
    label: str
    whisker_low: float
    q1: float
    median: float
    q3: float
    whisker_high: float
    outliers: tuple[float, ...]


@dataclass(frozen=True)
class BoxSpec:
    kind = "box"
    variable: str
    group: str | None
    boxes: tuple[BoxStats, ...]


@dataclass(frozen=True)
class MosaicTile:
    x_level: str
    fill_level: str
    x: float
    y: float
    width: float
    height: float
    count: int


@dataclass(frozen=True)
class MosaicSpec:
    kind = "mosaic"
    x_name: str
    fill_name: str
    tiles: tuple[MosaicTile, ...]


PlotSpec = HistogramSpec | BarSpec | ScatterSpec | BoxSpec | MosaicSpec


def default_bin_count(n: int) -> int:
    return max(1, math.ceil(math.sqrt(n)))


def histogram(variable: str, values: list[float], bins: int | None = None) -> HistogramSpec:
    """Equal-width bins over [min, max]; intervals are left-closed and
    right-open except the last, which is closed so the maximum is counted.
    """
    if not values:
        raise DomainError("histogram of an empty sample")
    if bins is None:
        bins = default_bin_count(len(values))
    if bins < 1:
        raise DomainError("bin count must be a positive integer")
    lo, hi = min(values), max(values)
    if not lo < hi:
        raise DomainError(f"histogram requires varying values; all equal {lo}")
    width = (hi - lo) / bins
    breaks = tuple(lo + k * width for k in range(bins)) + (hi,)
    counts = [0] * bins
    for v in values:
        idx = min(int((v - lo) / width), bins - 1)
        counts[idx] += 1
    return HistogramSpec(variable=variable, breaks=breaks, counts=tuple(counts))


def bar_chart(variable: str, labels: list[str]) -> BarSpec:
    if not labels:
        raise DomainError("bar chart of an empty sample")
    levels = tuple(sorted(set(labels)))
    counts = tuple(sum(1 for v in labels if v == level) for level in levels)
    return BarSpec(variable=variable, levels=levels, counts=counts)


def scatter(x_name: str, y_name: str, x: list[float], y: list[float]) -> ScatterSpec:
    if len(x) != len(y):
        raise DomainError("x and y must have equal length")
    if not x:
        raise DomainError("scatter plot needs at least one complete pair")
    return ScatterSpec(x_name=x_name, y_name=y_name, x=tuple(x), y=tuple(y))


def _box_stats(label: str, values: list[float]) -> BoxStats:
    s = sorted(values)
    q1 = quantile(s, 0.25)
    med = quantile(s, 0.5)
    q3 = quantile(s, 0.75)
    iqr = q3 - q1
    fence_low = q1 - 1.5 * iqr
    fence_high = q3 + 1.5 * iqr
    inside = [v for v in s if fence_low <= v <= fence_high]
    # quartiles are interpolated from data points, so inside is never empty
    whisker_low = inside[0]
    whisker_high = inside[-1]
    outliers = tuple(v for v in s if v < whisker_low or v > whisker_high)
    return BoxStats(
        label=label,
        whisker_low=whisker_low,
        q1=q1,
        median=med,
        q3=q3,
        whisker_high=whisker_high,
        outliers=outliers,
    )


def box_plot(
    variable: str,
    values: list[float],
    groups: list[str] | None = None,
    group_name: str | None = None,
) -> BoxSpec:
    """One box, or one per group level when a grouping variable is given.

    Whiskers reach the most extreme points within 1.5 IQR of the quartiles;
    points beyond are listed as outliers.
    """
    if not values:
        raise DomainError("box plot of an empty sample")
    if groups is None:
        return BoxSpec(variable=variable, group=None, boxes=(_box_stats(variable, values),))
    if len(groups) != len(values):
        raise DomainError("group labels must pair with values")
    levels = sorted(set(groups))
    boxes = []
    for level in levels:
        sub = [v for v, g in zip(values, groups) if g == level]
        if not sub:
            continue
        boxes.append(_box_stats(level, sub))
    return BoxSpec(variable=variable, group=group_name, boxes=tuple(boxes))


def mosaic(
    x_name: str, fill_name: str, x_labels: list[str], fill_labels: list[str]
) -> MosaicSpec:
    """Tile the unit square: column widths from the marginal distribution of
    the first variable, tile heights from the conditional distribution of the
    second within each column.  Levels in sorted order; tiles stack upward.
    """
    if len(x_labels) != len(fill_labels):
        raise DomainError("paired labels must have equal length")
    n = len(x_labels)
    if n == 0:
        raise DomainError("mosaic plot of an empty sample")
    x_levels = sorted(set(x_labels))
    fill_levels = sorted(set(fill_labels))
    counts = {
        (a, b): 0 for a in x_levels for b in fill_levels
    }
    marginal = {a: 0 for a in x_levels}
    for a, b in zip(x_labels, fill_labels):
        counts[(a, b)] += 1
        marginal[a] += 1

    tiles = []
    x_pos = 0.0
    for a in x_levels:
        width = marginal[a] / n
        y_pos = 0.0
        for b in fill_levels:
            c = counts[(a, b)]
            height = c / marginal[a]
            tiles.append(
                MosaicTile(
                    x_level=a,
                    fill_level=b,
                    x=x_pos,
                    y=y_pos,
                    width=width,
                    height=height,
                    count=c,
                )
            )
            y_pos += height
        x_pos += width
    return MosaicSpec(x_name=x_name, fill_name=fill_name, tiles=tuple(tiles))
