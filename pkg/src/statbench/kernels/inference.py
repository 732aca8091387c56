"""Hypothesis tests: t-tests, rank-sum, chi-squared independence."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from math import comb

from ..errors import DomainError
from .distributions import chisq_cdf, normal_cdf, t_cdf, t_quantile
from .summaries import sample_sd


class Alternative(enum.Enum):
    TWO_SIDED = "two.sided"
    LESS = "less"
    GREATER = "greater"

    @classmethod
    def parse(cls, text: str) -> "Alternative":
        for alt in cls:
            if alt.value == text:
                return alt
        raise DomainError(
            f"alternative must be one of two.sided, less, greater; got {text!r}"
        )


@dataclass(frozen=True)
class HypothesisSpec:
    alternative: Alternative = Alternative.TWO_SIDED
    conf_level: float = 0.95
    mu: float = 0.0  # hypothesized mean, or location shift for two samples

    def __post_init__(self):
        if not 0.0 < self.conf_level < 1.0:
            raise DomainError("confidence level must lie strictly between 0 and 1")


@dataclass(frozen=True)
class TTestResult:
    statistic: float
    df: float
    p_value: float
    estimate: float  # sample mean, or difference of means
    ci_low: float  # -inf when the interval is one-sided upper
    ci_high: float  # +inf when one-sided lower
    spec: HypothesisSpec
    method: str


def _t_p_value(t: float, df: float, alternative: Alternative) -> float:
    if alternative is Alternative.TWO_SIDED:
        return 2.0 * t_cdf(-abs(t), df)
    if alternative is Alternative.LESS:
        return t_cdf(t, df)
    return 1.0 - t_cdf(t, df)


def _t_interval(
    estimate: float, se: float, df: float, spec: HypothesisSpec
) -> tuple[float, float]:
    if spec.alternative is Alternative.TWO_SIDED:
        half = t_quantile(1.0 - (1.0 - spec.conf_level) / 2.0, df) * se
        return estimate - half, estimate + half
    crit = t_quantile(spec.conf_level, df) * se
    if spec.alternative is Alternative.LESS:
        return -math.inf, estimate + crit
    return estimate - crit, math.inf


def t_test(
    x: list[float], y: list[float] | None = None, spec: HypothesisSpec = HypothesisSpec()
) -> TTestResult:
    """One-sample t-test of the mean against spec.mu, or, when y is given,
    the unequal-variance two-sample test of mean(x) - mean(y) against it.

    Two-sample degrees of freedom by Welch-Satterthwaite; there is no
    pooled-variance variant.
    """
    n = len(x)
    if n < 2:
        raise DomainError("t-test requires at least two non-missing values per sample")
    mean_x = sum(x) / n

    if y is None:
        sd = sample_sd(x)
        if sd <= 0:
            raise DomainError("t-test requires positive sample standard deviation")
        se = sd / math.sqrt(n)
        df = float(n - 1)
        estimate = mean_x
        method = "One-sample t-test"
    else:
        m = len(y)
        if m < 2:
            raise DomainError(
                "t-test requires at least two non-missing values per sample"
            )
        mean_y = sum(y) / m
        v1 = sample_sd(x) ** 2 / n
        v2 = sample_sd(y) ** 2 / m
        if v1 + v2 <= 0:
            raise DomainError("t-test requires positive variance in at least one sample")
        se = math.sqrt(v1 + v2)
        df = (v1 + v2) ** 2 / (v1 * v1 / (n - 1) + v2 * v2 / (m - 1))
        estimate = mean_x - mean_y
        method = "Welch two-sample t-test"

    t = (estimate - spec.mu) / se
    lo, hi = _t_interval(estimate, se, df, spec)
    return TTestResult(
        statistic=t,
        df=df,
        p_value=_t_p_value(t, df, spec.alternative),
        estimate=estimate,
        ci_low=lo,
        ci_high=hi,
        spec=spec,
        method=method,
    )


@dataclass(frozen=True)
class WilcoxonResult:
    w_statistic: float  # rank sum of x minus its minimum n(n+1)/2; range 0..n*m
    p_value: float
    exact: bool
    spec: HypothesisSpec
    n_x: int
    n_y: int


def _midranks(values: list[float]) -> list[float]:
    """Ranks 1..n with tied values sharing the average of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j + 2) / 2.0  # positions are 1-based
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _rank_sum_counts(n: int, m: int) -> list[int]:
    """count[w] = number of n-subsets of ranks 1..n+m whose statistic is w.

    Standard dynamic program over ranks and subset sizes; w runs 0..n*m.
    """
    max_w = n * m
    table = [[0] * (max_w + 1) for _ in range(n + 1)]
    table[0][0] = 1
    for item in range(1, n + m + 1):
        for k in range(min(item, n), 0, -1):
            row = table[k]
            prev = table[k - 1]
            # taking rank `item` as the k-th chosen adds item - k to w
            shift = item - k
            for w in range(max_w, shift - 1, -1):
                if prev[w - shift]:
                    row[w] += prev[w - shift]
    return table[n]


EXACT_LIMIT = 20


def wilcoxon_rank_sum(
    x: list[float], y: list[float], spec: HypothesisSpec = HypothesisSpec()
) -> WilcoxonResult:
    """Two-sample rank-sum test under the location-shift model.

    y is shifted by spec.mu, then W = rank sum of x in the pooled midranks
    minus n(n+1)/2.  With no ties and n+m <= 20 the p-value is exact by
    enumeration of the null distribution; otherwise a normal approximation
    with tie-corrected variance and a 0.5 continuity correction.
    """
    n, m = len(x), len(y)
    if n < 1 or m < 1:
        raise DomainError("each sample needs at least one non-missing value")
    pooled = list(x) + [v + spec.mu for v in y]
    ranks = _midranks(pooled)
    w = sum(ranks[:n]) - n * (n + 1) / 2.0
    has_ties = len(set(pooled)) != len(pooled)

    if not has_ties and n + m <= EXACT_LIMIT:
        counts = _rank_sum_counts(n, m)
        total = comb(n + m, n)
        wi = round(w)
        p_le = sum(counts[: wi + 1]) / total
        p_ge = sum(counts[wi:]) / total
        if spec.alternative is Alternative.TWO_SIDED:
            p = min(1.0, 2.0 * min(p_le, p_ge))
        elif spec.alternative is Alternative.LESS:
            p = p_le
        else:
            p = p_ge
        return WilcoxonResult(w, p, True, spec, n, m)

    mean = n * m / 2.0
    tie_groups: dict[float, int] = {}
    for v in pooled:
        tie_groups[v] = tie_groups.get(v, 0) + 1
    tie_term = sum(t**3 - t for t in tie_groups.values())
    nm = n + m
    var = (n * m / 12.0) * (nm + 1.0 - tie_term / (nm * (nm - 1.0)))
    if var <= 0:
        # every pooled value is tied, so the null distribution is a point
        # mass at n*m/2 and the observed W necessarily equals it
        return WilcoxonResult(w, 1.0, False, spec, n, m)
    sigma = math.sqrt(var)
    z = w - mean
    if spec.alternative is Alternative.TWO_SIDED:
        correction = math.copysign(0.5, z) if z != 0 else 0.0
    elif spec.alternative is Alternative.GREATER:
        correction = 0.5
    else:
        correction = -0.5
    z = (z - correction) / sigma
    if spec.alternative is Alternative.TWO_SIDED:
        p = min(1.0, 2.0 * min(normal_cdf(z), 1.0 - normal_cdf(z)))
    elif spec.alternative is Alternative.LESS:
        p = normal_cdf(z)
    else:
        p = 1.0 - normal_cdf(z)
    return WilcoxonResult(w, p, False, spec, n, m)


@dataclass(frozen=True)
class ContingencyResult:
    chi_square: float
    df: int
    p_value: float
    row_levels: tuple[str, ...]
    col_levels: tuple[str, ...]
    observed: tuple[tuple[int, ...], ...]
    expected: tuple[tuple[float, ...], ...]
    n: int


def contingency(a: list[str], b: list[str]) -> ContingencyResult:
    """Pearson chi-squared test of independence, no continuity correction.

    Inputs are the paired labels of two categorical variables (complete
    cases only).  Levels are ordered lexicographically in the table.
    """
    if len(a) != len(b):
        raise DomainError("paired labels must have equal length")
    n = len(a)
    if n == 0:
        raise DomainError("no complete cases for the contingency table")
    row_levels = tuple(sorted(set(a)))
    col_levels = tuple(sorted(set(b)))
    if len(row_levels) < 2 or len(col_levels) < 2:
        raise DomainError("both variables need at least two observed levels")

    r_index = {level: i for i, level in enumerate(row_levels)}
    c_index = {level: j for j, level in enumerate(col_levels)}
    observed = [[0] * len(col_levels) for _ in row_levels]
    for ra, cb in zip(a, b):
        observed[r_index[ra]][c_index[cb]] += 1

    row_totals = [sum(row) for row in observed]
    col_totals = [
        sum(observed[i][j] for i in range(len(row_levels)))
        for j in range(len(col_levels))
    ]
    expected = [
        [row_totals[i] * col_totals[j] / n for j in range(len(col_levels))]
        for i in range(len(row_levels))
    ]
    chi_square = sum(
        (observed[i][j] - expected[i][j]) ** 2 / expected[i][j]
        for i in range(len(row_levels))
        for j in range(len(col_levels))
    )
    df = (len(row_levels) - 1) * (len(col_levels) - 1)
    p_value = 1.0 - chisq_cdf(chi_square, df)
    return ContingencyResult(
        chi_square=chi_square,
        df=df,
        p_value=p_value,
        row_levels=row_levels,
        col_levels=col_levels,
        observed=tuple(tuple(row) for row in observed),
        expected=tuple(tuple(row) for row in expected),
        n=n,
    )
