"""Result payloads: the JSON values module outputs produce.

Every payload is a plain dict with a "type" tag ("text", "table", "plot",
or "error") and a preformatted "text" field; typed payloads add structured
fields beside it.  These dicts are what the HTTP API returns, what reports
embed, and what the round-trip property compares, so everything in them is
JSON-safe: no NaN, and infinite interval endpoints are encoded as the
strings "inf"/"-inf".
"""

from __future__ import annotations

import math

from .dataset import Dataset
from .kernels.inference import (
    Alternative,
    ContingencyResult,
    TTestResult,
    WilcoxonResult,
)
from .kernels.plots import (
    BarSpec,
    BoxSpec,
    HistogramSpec,
    MosaicSpec,
    PlotSpec,
    ScatterSpec,
)
from .kernels.regression import RegressionFit
from .kernels.summaries import NumericSummary


def fmt_stat(v: float) -> str:
    """Fixed display formatting for statistics in text blocks."""
    if v != v or v in (math.inf, -math.inf):
        raise ValueError("non-finite statistic")
    if isinstance(v, int):
        return str(v)
    return format(v, ".6g")


def _encode_endpoint(v: float):
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    return v


def _fmt_endpoint(v: float) -> str:
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    return fmt_stat(v)


def error_payload(message: str) -> dict:
    return {"type": "error", "message": message, "text": f"error: {message}"}


def text_payload(text: str, data: dict | None = None) -> dict:
    payload = {"type": "text", "text": text}
    if data is not None:
        payload["data"] = data
    return payload


def table_payload(columns: list[str], rows: list[list], data: dict | None = None) -> dict:
    widths = [
        max(len(str(columns[j])), *(len(str(r[j])) for r in rows)) if rows else len(str(columns[j]))
        for j in range(len(columns))
    ]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(columns, widths)).rstrip()]
    for r in rows:
        lines.append("  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip())
    payload = {
        "type": "table",
        "columns": columns,
        "rows": rows,
        "text": "\n".join(lines),
    }
    if data is not None:
        payload["data"] = data
    return payload


def dataset_info_payload(ds: Dataset, source: str | None = None) -> dict:
    rows = []
    for col in ds.columns:
        missing = sum(1 for c in col.cells if c is None)
        rows.append([col.name, col.ctype.value, missing])
    payload = table_payload(["variable", "type", "missing"], rows)
    head = f"{ds.n_rows} rows, {len(ds.columns)} variables"
    if source:
        head = f"{source}: {head}"
    payload["text"] = head + "\n\n" + payload["text"]
    payload["n_rows"] = ds.n_rows
    return payload


def transform_payload(target: str, op: str, source: str, ctype: str, n_missing: int) -> dict:
    text = f"{target} ({ctype}) = {op} of {source}"
    if n_missing:
        text += f"; {n_missing} missing"
    return text_payload(
        text,
        data={
            "target": target,
            "op": op,
            "source": source,
            "ctype": ctype,
            "n_missing": n_missing,
        },
    )


def summary_payload(name: str, s: NumericSummary) -> dict:
    rows = [
        ["n", s.n],
        ["missing", s.n_missing],
        ["mean", fmt_stat(s.mean)],
        ["sd", fmt_stat(s.sd) if s.sd is not None else "NA"],
        ["min", fmt_stat(s.minimum)],
        ["q1", fmt_stat(s.q1)],
        ["median", fmt_stat(s.median)],
        ["q3", fmt_stat(s.q3)],
        ["max", fmt_stat(s.maximum)],
    ]
    payload = table_payload(["statistic", "value"], rows)
    payload["text"] = f"Summary of {name}\n\n" + payload["text"]
    payload["data"] = {
        "variable": name,
        "n": s.n,
        "n_missing": s.n_missing,
        "mean": s.mean,
        "sd": s.sd,
        "min": s.minimum,
        "q1": s.q1,
        "median": s.median,
        "q3": s.q3,
        "max": s.maximum,
    }
    return payload


def regression_payload(y_name: str, x_name: str, fit: RegressionFit) -> dict:
    # residuals stay out of the payload; reports and panels show coefficients
    lines = [
        f"Linear regression: {y_name} ~ {x_name}",
        "",
        "term         estimate      std error     t value",
        f"(intercept)  {fmt_stat(fit.intercept):<12}  {fmt_stat(fit.intercept_se):<12}",
        f"{x_name:<11}  {fmt_stat(fit.slope):<12}  {fmt_stat(fit.slope_se):<12}  {fmt_stat(fit.t_slope)}",
        "",
        f"r squared = {fmt_stat(fit.r_squared)}, residual sd = {fmt_stat(fit.residual_sd)}",
        f"slope p-value = {fmt_stat(fit.p_slope)} (n = {fit.n})",
    ]
    return text_payload(
        "\n".join(lines),
        data={
            "response": y_name,
            "explanatory": x_name,
            "n": fit.n,
            "intercept": fit.intercept,
            "slope": fit.slope,
            "intercept_se": fit.intercept_se,
            "slope_se": fit.slope_se,
            "t_slope": fit.t_slope,
            "p_slope": fit.p_slope,
            "r_squared": fit.r_squared,
            "residual_sd": fit.residual_sd,
        },
    )


def _alternative_phrase(alt: Alternative, what: str, mu: float) -> str:
    rel = {
        Alternative.TWO_SIDED: "not equal to",
        Alternative.LESS: "less than",
        Alternative.GREATER: "greater than",
    }[alt]
    return f"alternative hypothesis: {what} is {rel} {fmt_stat(mu)}"


def t_test_payload(x_name: str, y_name: str | None, r: TTestResult) -> dict:
    what = f"mean of {x_name}" if y_name is None else f"mean({x_name}) - mean({y_name})"
    pct = fmt_stat(r.spec.conf_level * 100)
    lines = [
        r.method,
        "",
        f"data: {x_name}" if y_name is None else f"data: {x_name} and {y_name}",
        f"t = {fmt_stat(r.statistic)}, df = {fmt_stat(r.df)}, p-value = {fmt_stat(r.p_value)}",
        _alternative_phrase(r.spec.alternative, what, r.spec.mu),
        f"{pct} percent confidence interval: [{_fmt_endpoint(r.ci_low)}, {_fmt_endpoint(r.ci_high)}]",
        f"estimate: {what} = {fmt_stat(r.estimate)}",
    ]
    return text_payload(
        "\n".join(lines),
        data={
            "x": x_name,
            "y": y_name,
            "method": r.method,
            "statistic": r.statistic,
            "df": r.df,
            "p_value": r.p_value,
            "estimate": r.estimate,
            "ci_low": _encode_endpoint(r.ci_low),
            "ci_high": _encode_endpoint(r.ci_high),
            "conf_level": r.spec.conf_level,
            "mu": r.spec.mu,
            "alternative": r.spec.alternative.value,
        },
    )


def wilcoxon_payload(x_name: str, y_name: str, r: WilcoxonResult) -> dict:
    method = "Wilcoxon rank-sum test" + (
        " (exact)" if r.exact else " (normal approximation)"
    )
    lines = [
        method,
        "",
        f"data: {x_name} and {y_name}",
        f"W = {fmt_stat(r.w_statistic)}, p-value = {fmt_stat(r.p_value)}",
        _alternative_phrase(r.spec.alternative, "location shift", r.spec.mu),
    ]
    return text_payload(
        "\n".join(lines),
        data={
            "x": x_name,
            "y": y_name,
            "w_statistic": r.w_statistic,
            "p_value": r.p_value,
            "exact": r.exact,
            "mu": r.spec.mu,
            "alternative": r.spec.alternative.value,
            "conf_level": r.spec.conf_level,
            "n_x": r.n_x,
            "n_y": r.n_y,
        },
    )


def contingency_payload(a_name: str, b_name: str, r: ContingencyResult) -> dict:
    header = [f"{a_name} \\ {b_name}"] + list(r.col_levels)
    observed_rows = [
        [r.row_levels[i]] + list(r.observed[i]) for i in range(len(r.row_levels))
    ]
    expected_rows = [
        [r.row_levels[i]] + [fmt_stat(e) for e in r.expected[i]]
        for i in range(len(r.row_levels))
    ]
    obs_table = table_payload(header, observed_rows)
    exp_table = table_payload(header, expected_rows)
    lines = [
        "Pearson chi-squared test of independence",
        "",
        "observed:",
        obs_table["text"],
        "",
        "expected:",
        exp_table["text"],
        "",
        f"X-squared = {fmt_stat(r.chi_square)}, df = {r.df}, p-value = {fmt_stat(r.p_value)}",
    ]
    return text_payload(
        "\n".join(lines),
        data={
            "a": a_name,
            "b": b_name,
            "chi_square": r.chi_square,
            "df": r.df,
            "p_value": r.p_value,
            "row_levels": list(r.row_levels),
            "col_levels": list(r.col_levels),
            "observed": [list(row) for row in r.observed],
            "expected": [list(row) for row in r.expected],
            "n": r.n,
        },
    )


def plot_to_json(spec: PlotSpec) -> dict:
    if isinstance(spec, HistogramSpec):
        return {
            "kind": "histogram",
            "variable": spec.variable,
            "breaks": list(spec.breaks),
            "counts": list(spec.counts),
        }
    if isinstance(spec, BarSpec):
        return {
            "kind": "bar",
            "variable": spec.variable,
            "levels": list(spec.levels),
            "counts": list(spec.counts),
        }
    if isinstance(spec, ScatterSpec):
        return {
            "kind": "scatter",
            "x_name": spec.x_name,
            "y_name": spec.y_name,
            "x": list(spec.x),
            "y": list(spec.y),
        }
    if isinstance(spec, BoxSpec):
        return {
            "kind": "box",
            "variable": spec.variable,
            "group": spec.group,
            "boxes": [
                {
                    "label": b.label,
                    "whisker_low": b.whisker_low,
                    "q1": b.q1,
                    "median": b.median,
                    "q3": b.q3,
                    "whisker_high": b.whisker_high,
                    "outliers": list(b.outliers),
                }
                for b in spec.boxes
            ],
        }
    if isinstance(spec, MosaicSpec):
        return {
            "kind": "mosaic",
            "x_name": spec.x_name,
            "fill_name": spec.fill_name,
            "tiles": [
                {
                    "x_level": t.x_level,
                    "fill_level": t.fill_level,
                    "x": t.x,
                    "y": t.y,
                    "width": t.width,
                    "height": t.height,
                    "count": t.count,
                }
                for t in spec.tiles
            ],
        }
    raise TypeError(f"not a plot spec: {spec!r}")


def plot_title(spec: PlotSpec) -> str:
    if isinstance(spec, HistogramSpec):
        return f"Histogram of {spec.variable}"
    if isinstance(spec, BarSpec):
        return f"Bar chart of {spec.variable}"
    if isinstance(spec, ScatterSpec):
        return f"Scatter plot of {spec.y_name} against {spec.x_name}"
    if isinstance(spec, BoxSpec):
        if spec.group:
            return f"Box plot of {spec.variable} by {spec.group}"
        return f"Box plot of {spec.variable}"
    if isinstance(spec, MosaicSpec):
        return f"Mosaic plot of {spec.x_name} and {spec.fill_name}"
    raise TypeError(f"not a plot spec: {spec!r}")


def plot_payload(spec: PlotSpec) -> dict:
    return {
        "type": "plot",
        "plot": plot_to_json(spec),
        "text": plot_title(spec),
    }
