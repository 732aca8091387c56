"""Typed columnar dataset: CSV ingestion, type inference, transforms.

A Dataset is immutable; every operation that "changes" data returns a new
value.  Cells are 64-bit floats, string labels, or None for missing.  The
missing token on the wire is "NA" (or an empty field on input).
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Iterable, Sequence

from .errors import DataError, DomainError
from .values import fmt_number

CellValue = float | str | None

MISSING_TOKEN = "NA"


class ColumnType(enum.Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"


class TransformOp(enum.Enum):
    LOG = "log"
    SQRT = "sqrt"
    SQUARE = "square"
    STANDARDIZE = "standardize"
    BIN_EQUAL_WIDTH = "bin"


@dataclass(frozen=True)
class Column:
    name: str
    ctype: ColumnType
    cells: tuple[CellValue, ...]

    def non_missing(self) -> list[float | str]:
        return [c for c in self.cells if c is not None]


@dataclass(frozen=True)
class Dataset:
    columns: tuple[Column, ...]
    n_rows: int

    def __post_init__(self):
        seen = set()
        for col in self.columns:
            if not col.name:
                raise DataError("column names must be non-empty")
            if col.name in seen:
                raise DataError(f"duplicate column name {col.name!r}")
            seen.add(col.name)
            if len(col.cells) != self.n_rows:
                raise DataError(
                    f"column {col.name!r} has {len(col.cells)} cells, expected {self.n_rows}"
                )

    def column(self, name: str) -> Column:
        for col in self.columns:
            if col.name == name:
                return col
        raise DataError(f"no column named {name!r}")

    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]


@dataclass(frozen=True)
class TransformSpec:
    source: str
    op: TransformOp
    target: str
    bins: int = 4


def _is_decimal_number(text: str) -> bool:
    """True for decimal literals like "1", "2.5", "-3e2"; false for words
    and for the inf/nan spellings float() would otherwise accept.
    """
    try:
        return Decimal(text).is_finite()
    except InvalidOperation:
        return False


def infer_column_type(raw: Sequence[str]) -> ColumnType:
    """Numeric iff every non-missing entry is a finite decimal number.

    An all-missing column is categorical.
    """
    saw_value = False
    for entry in raw:
        if entry == "" or entry == MISSING_TOKEN:
            continue
        saw_value = True
        if not _is_decimal_number(entry):
            return ColumnType.CATEGORICAL
    return ColumnType.NUMERIC if saw_value else ColumnType.CATEGORICAL


def _build_column(name: str, raw: list[str]) -> Column:
    ctype = infer_column_type(raw)
    cells: list[CellValue] = []
    for entry in raw:
        if entry == "" or entry == MISSING_TOKEN:
            cells.append(None)
        elif ctype is ColumnType.NUMERIC:
            # a literal too large for a double (e.g. 1e999) degrades to missing
            v = float(entry)
            cells.append(v if math.isfinite(v) else None)
        else:
            cells.append(entry)
    return Column(name, ctype, tuple(cells))


def parse_csv(data: bytes | str, has_header: bool = True) -> Dataset:
    """Parse RFC-4180-style CSV text into a typed Dataset.

    Empty fields and the literal "NA" become missing.  Ragged rows and
    duplicate header names are rejected with the offending position.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise DataError(f"input is not valid UTF-8: {e}") from None
    else:
        text = data
    try:
        rows = [row for row in csv.reader(io.StringIO(text))]
    except csv.Error as e:
        raise DataError(f"malformed CSV: {e}") from None
    if not rows or all(len(r) == 0 for r in rows):
        raise DataError("empty input")
    rows = [r for r in rows if len(r) > 0]

    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataError(
                f"ragged row {i + 1}: expected {width} fields, found {len(row)}"
            )

    if has_header:
        names = rows[0]
        body = rows[1:]
        seen: set[str] = set()
        for name in names:
            if name in seen:
                raise DataError(f"duplicate header name {name!r}")
            seen.add(name)
        if any(name == "" for name in names):
            raise DataError("empty header name")
    else:
        names = [f"c{k + 1}" for k in range(width)]
        body = rows

    columns = tuple(
        _build_column(name, [row[j] for row in body]) for j, name in enumerate(names)
    )
    return Dataset(columns=columns, n_rows=len(body))


def serialize_csv(ds: Dataset) -> str:
    """Serialize with a header row, LF line endings, and "NA" for missing.

    Round-trip property: parse_csv(serialize_csv(ds)) == ds.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow([c.name for c in ds.columns])
    for i in range(ds.n_rows):
        row = []
        for col in ds.columns:
            cell = col.cells[i]
            if cell is None:
                row.append(MISSING_TOKEN)
            elif col.ctype is ColumnType.NUMERIC:
                row.append(fmt_number(cell))
            else:
                row.append(cell)
        writer.writerow(row)
    return buf.getvalue()


def numeric_names(ds: Dataset) -> list[str]:
    return [c.name for c in ds.columns if c.ctype is ColumnType.NUMERIC]


def categorical_names(ds: Dataset) -> list[str]:
    return [c.name for c in ds.columns if c.ctype is ColumnType.CATEGORICAL]


def check_variable(ds: Dataset, name: str) -> bool:
    """True iff a column with exactly this name exists (case-sensitive)."""
    return any(c.name == name for c in ds.columns)


def _require_numeric(ds: Dataset, name: str) -> Column:
    col = ds.column(name)
    if col.ctype is not ColumnType.NUMERIC:
        raise DomainError(f"column {name!r} is categorical; a numeric column is required")
    return col


def _sample_sd(values: list[float]) -> float:
    n = len(values)
    mean = sum(values) / n
    return math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1))


def _finite_or_missing(v: float) -> CellValue:
    # overflow in a transform (e.g. squaring 1e200) degrades to missing
    return v if math.isfinite(v) else None


def bin_labels(lo: float, hi: float, bins: int) -> list[str]:
    """Equal-width interval labels: half-open except the last, which is closed."""
    width = (hi - lo) / bins
    edges = [lo + k * width for k in range(bins)] + [hi]
    labels = []
    for k in range(bins):
        close = "]" if k == bins - 1 else ")"
        labels.append(f"[{fmt_number(edges[k])},{fmt_number(edges[k + 1])}{close}")
    return labels


def apply_transform(ds: Dataset, spec: TransformSpec) -> Dataset:
    """Append one derived column; existing columns are untouched.

    Missing inputs give missing outputs.  Preconditions are checked over the
    non-missing values and violations name the offending value and row.
    """
    if check_variable(ds, spec.target):
        raise DomainError(f"target column {spec.target!r} already exists")
    source = _require_numeric(ds, spec.source)
    values = [(i, c) for i, c in enumerate(source.cells) if c is not None]
    if not values:
        raise DomainError(f"column {spec.source!r} has no non-missing values")

    op = spec.op
    if op is TransformOp.LOG:
        for i, v in values:
            if v <= 0:
                raise DomainError(f"log requires positive values; found {fmt_number(v)} at row {i + 1}")
        cells = [None if c is None else _finite_or_missing(math.log(c)) for c in source.cells]
        ctype = ColumnType.NUMERIC
    elif op is TransformOp.SQRT:
        for i, v in values:
            if v < 0:
                raise DomainError(f"sqrt requires nonnegative values; found {fmt_number(v)} at row {i + 1}")
        cells = [None if c is None else _finite_or_missing(math.sqrt(c)) for c in source.cells]
        ctype = ColumnType.NUMERIC
    elif op is TransformOp.SQUARE:
        cells = [None if c is None else _finite_or_missing(c * c) for c in source.cells]
        ctype = ColumnType.NUMERIC
    elif op is TransformOp.STANDARDIZE:
        vals = [v for _, v in values]
        if len(vals) < 2:
            raise DomainError("standardize requires at least two non-missing values")
        sd = _sample_sd(vals)
        if sd <= 0:
            raise DomainError("standardize requires positive sample standard deviation")
        mean = sum(vals) / len(vals)
        cells = [None if c is None else _finite_or_missing((c - mean) / sd) for c in source.cells]
        ctype = ColumnType.NUMERIC
    elif op is TransformOp.BIN_EQUAL_WIDTH:
        if spec.bins < 1:
            raise DomainError("bin count must be a positive integer")
        vals = [v for _, v in values]
        lo, hi = min(vals), max(vals)
        if not lo < hi:
            raise DomainError(f"binning requires min < max; both are {fmt_number(lo)}")
        labels = bin_labels(lo, hi, spec.bins)
        width = (hi - lo) / spec.bins
        cells = []
        for c in source.cells:
            if c is None:
                cells.append(None)
            else:
                idx = min(int((c - lo) / width), spec.bins - 1)
                cells.append(labels[idx])
        ctype = ColumnType.CATEGORICAL
    else:  # pragma: no cover - enum is closed
        raise DomainError(f"unknown transform {op}")

    new_col = Column(spec.target, ctype, tuple(cells))
    return Dataset(columns=ds.columns + (new_col,), n_rows=ds.n_rows)


def categorical_levels(col: Column) -> list[str]:
    """Distinct labels in sorted order; the deterministic level set."""
    return sorted({c for c in col.cells if c is not None})


def make_dataset(pairs: Iterable[tuple[str, Sequence[CellValue]]]) -> Dataset:
    """Build a Dataset from (name, cells) pairs, inferring each type.

    Convenience for tests and internal callers; floats stay numeric, strings
    categorical.  A column must not mix the two.
    """
    columns = []
    n_rows = None
    for name, cells in pairs:
        cells = tuple(float(c) if isinstance(c, (int, float)) and not isinstance(c, bool) else c
                      for c in cells)
        if n_rows is None:
            n_rows = len(cells)
        kinds = {type(c) for c in cells if c is not None}
        if kinds <= {float}:
            ctype = ColumnType.NUMERIC if kinds else ColumnType.CATEGORICAL
        elif kinds <= {str}:
            ctype = ColumnType.CATEGORICAL
        else:
            raise DataError(f"column {name!r} mixes numbers and labels")
        columns.append(Column(name, ctype, cells))
    return Dataset(columns=tuple(columns), n_rows=n_rows or 0)
