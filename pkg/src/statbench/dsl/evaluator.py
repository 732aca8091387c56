"""Statement evaluation: the command registry and the builtin commands.

Commands declare typed parameters; evaluation resolves a Call's arguments
against the declaration, runs the handler, and returns a result payload.
Two error channels, deliberately distinct:

  DomainError        data problems (bad column, degenerate sample, unknown
                     option value) become an "error" payload: a first-class
                     result that renders in panels and reports and
                     reproduces identically on replay.
  ScriptEvalError    structural misuse (unknown command, arity or type
                     mismatch, unloadable data) aborts evaluation, carrying
                     the line number.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .. import results
from ..dataset import (
    Column,
    ColumnType,
    Dataset,
    TransformOp,
    TransformSpec,
    apply_transform,
    check_variable,
)
from ..errors import DataError, DomainError, ScriptEvalError
from ..kernels import inference, plots, regression, summaries
from ..values import values_equal
from .ast import Bool, Call, ColumnRef, Num, Str
from .parser import Statement


@dataclass
class EvalEnv:
    """Mutable evaluation context: the active dataset and how to load one."""

    dataset: Dataset | None = None
    loader: Callable[[str], Dataset] | None = None
    registry: "CommandRegistry | None" = None


@dataclass(frozen=True)
class Param:
    name: str
    kind: str  # num_col | cat_col | any_col | number | int | string | bool
    required: bool = True
    default: object = None


@dataclass(frozen=True)
class Command:
    name: str
    params: tuple[Param, ...]
    handler: Callable[[EvalEnv, dict], dict]


class CommandRegistry:
    def __init__(self):
        self._commands: dict[str, Command] = {}

    def register(self, command: Command):
        if command.name in self._commands:
            raise ValueError(f"command {command.name!r} already registered")
        self._commands[command.name] = command

    def get(self, name: str) -> Command | None:
        return self._commands.get(name)

    def names(self) -> list[str]:
        return sorted(self._commands)


COLUMN_KINDS = ("num_col", "cat_col", "any_col")


def _bind_args(command: Command, call: Call) -> dict:
    """Match call arguments to declared parameters, positionally then by
    keyword, applying defaults.  Violations are structural errors.
    """
    by_name = {p.name: p for p in command.params}
    bound: dict[str, object] = {}
    position = 0
    seen_keyword = False
    for arg in call.args:
        if arg.key is None:
            if seen_keyword:
                raise ScriptEvalError(
                    f"{command.name}: positional argument after keyword argument"
                )
            if position >= len(command.params):
                raise ScriptEvalError(
                    f"{command.name} takes at most {len(command.params)} arguments"
                )
            param = command.params[position]
            position += 1
        else:
            seen_keyword = True
            param = by_name.get(arg.key)
            if param is None:
                raise ScriptEvalError(
                    f"{command.name} has no parameter named {arg.key!r}"
                )
        if param.name in bound:
            raise ScriptEvalError(
                f"{command.name}: parameter {param.name!r} given twice"
            )
        bound[param.name] = arg.value
    for param in command.params:
        if param.name not in bound:
            if param.required:
                raise ScriptEvalError(
                    f"{command.name}: missing required parameter {param.name!r}"
                )
            bound[param.name] = param.default
    return bound


def _resolve_column(env: EvalEnv, command: str, param: Param, ref: ColumnRef) -> Column:
    if env.dataset is None:
        raise DomainError("no dataset loaded")
    if ref.name == "":
        raise DomainError(f"{command}: no variable selected for {param.name!r}")
    if not check_variable(env.dataset, ref.name):
        # the script names a column the data does not have: the script and
        # the dataset no longer match, which is structural, not statistical
        raise ScriptEvalError(f"no column named {ref.name!r}")
    col = env.dataset.column(ref.name)
    if param.kind == "num_col" and col.ctype is not ColumnType.NUMERIC:
        raise DomainError(f"column {ref.name!r} must be numeric")
    if param.kind == "cat_col" and col.ctype is not ColumnType.CATEGORICAL:
        raise DomainError(f"column {ref.name!r} must be categorical")
    return col


def _resolve_value(env: EvalEnv, command: str, param: Param, node: object):
    if node is None:
        return None
    if param.kind in COLUMN_KINDS:
        if not isinstance(node, ColumnRef):
            raise ScriptEvalError(
                f"{command}: parameter {param.name!r} takes a column reference"
            )
        return _resolve_column(env, command, param, node)
    if param.kind == "number":
        if not isinstance(node, Num):
            raise ScriptEvalError(f"{command}: parameter {param.name!r} takes a number")
        return node.value
    if param.kind == "int":
        if not isinstance(node, Num):
            raise ScriptEvalError(f"{command}: parameter {param.name!r} takes an integer")
        v = node.value
        if isinstance(v, float):
            if not v.is_integer():
                raise ScriptEvalError(
                    f"{command}: parameter {param.name!r} takes an integer"
                )
            v = int(v)
        return v
    if param.kind == "string":
        if not isinstance(node, Str):
            raise ScriptEvalError(f"{command}: parameter {param.name!r} takes a string")
        return node.value
    if param.kind == "bool":
        if not isinstance(node, Bool):
            raise ScriptEvalError(f"{command}: parameter {param.name!r} takes a boolean")
        return node.value
    raise ScriptEvalError(f"{command}: unknown parameter kind {param.kind!r}")


def eval_call(env: EvalEnv, call: Call, line: int | None = None) -> dict:
    """Evaluate one statement to a result payload."""
    registry = env.registry
    if registry is None:
        raise ScriptEvalError("no command registry in environment", line)
    command = registry.get(call.name)
    if command is None:
        raise ScriptEvalError(f"unknown command {call.name}", line)
    try:
        raw = _bind_args(command, call)
        args = {
            p.name: _resolve_value(env, command.name, p, raw[p.name])
            for p in command.params
        }
        return command.handler(env, args)
    except DomainError as e:
        return results.error_payload(str(e))
    except ScriptEvalError as e:
        if e.line is None and line is not None:
            raise ScriptEvalError(str(e.args[0]) if e.args else str(e), line) from None
        raise


def eval_script(env: EvalEnv, statements: list[Statement]) -> list[dict]:
    """Evaluate statements in order; data-changing commands update env for
    the statements after them.  Domain errors land in the payload list;
    structural errors abort with the statement's line.
    """
    return [eval_call(env, stmt.call, stmt.line) for stmt in statements]


# -- builtin and kernel commands ----------------------------------------


def _require_dataset(env: EvalEnv) -> Dataset:
    if env.dataset is None:
        raise DomainError("no dataset loaded")
    return env.dataset


def _listwise(col: Column) -> list[float]:
    return [c for c in col.cells if c is not None]


def _pairwise(a: Column, b: Column) -> tuple[list, list]:
    xs, ys = [], []
    for u, v in zip(a.cells, b.cells):
        if u is not None and v is not None:
            xs.append(u)
            ys.append(v)
    return xs, ys


def _cmd_load_data(env: EvalEnv, args: dict) -> dict:
    filename = args["filename"]
    if env.loader is None:
        raise ScriptEvalError("no data source available to load from")
    try:
        ds = env.loader(filename)
    except DataError as e:
        raise ScriptEvalError(f"cannot load {filename!r}: {e}") from None
    env.dataset = ds
    return results.dataset_info_payload(ds, source=filename)


_TRANSFORM_OPS = {
    "log": TransformOp.LOG,
    "sqrt": TransformOp.SQRT,
    "square": TransformOp.SQUARE,
    "standardize": TransformOp.STANDARDIZE,
    "bin": TransformOp.BIN_EQUAL_WIDTH,
}


def transform_target_name(op: str, source: str) -> str:
    return f"{op}_{source}"


def _without_column(ds: Dataset, name: str) -> Dataset:
    return Dataset(
        columns=tuple(c for c in ds.columns if c.name != name), n_rows=ds.n_rows
    )


def _cmd_transform(env: EvalEnv, args: dict) -> dict:
    ds = _require_dataset(env)
    source: Column = args["source"]
    op_name: str = args["op"]
    op = _TRANSFORM_OPS.get(op_name)
    if op is None:
        raise DomainError(
            f"unknown transform {op_name!r}; expected one of {', '.join(sorted(_TRANSFORM_OPS))}"
        )
    bins = args["bins"]
    if bins is not None and bins < 1:
        raise DomainError("bin count must be a positive integer")
    spec = TransformSpec(
        source=source.name,
        op=op,
        target=transform_target_name(op_name, source.name),
        bins=bins if bins is not None else 4,
    )

    if check_variable(ds, spec.target):
        # re-running an identical transform is a no-op; anything else is a clash
        candidate = apply_transform(_without_column(ds, spec.target), spec)
        new_col = candidate.column(spec.target)
        old_col = ds.column(spec.target)
        if old_col.ctype is new_col.ctype and values_equal(
            list(old_col.cells), list(new_col.cells)
        ):
            produced = old_col
        else:
            raise DomainError(f"target column {spec.target!r} already exists")
    else:
        env.dataset = apply_transform(ds, spec)
        produced = env.dataset.column(spec.target)

    n_missing = sum(1 for c in produced.cells if c is None)
    return results.transform_payload(
        spec.target, op_name, source.name, produced.ctype.value, n_missing
    )


def _cmd_dataset_info(env: EvalEnv, args: dict) -> dict:
    return results.dataset_info_payload(_require_dataset(env))


def _cmd_numeric_summary(env: EvalEnv, args: dict) -> dict:
    col: Column = args["x"]
    values = _listwise(col)
    n_missing = len(col.cells) - len(values)
    if not values:
        raise DomainError(f"column {col.name!r} has no non-missing values")
    return results.summary_payload(col.name, summaries.numeric_summary(values, n_missing))


def _cmd_histogram(env: EvalEnv, args: dict) -> dict:
    col: Column = args["x"]
    values = _listwise(col)
    if not values:
        raise DomainError(f"column {col.name!r} has no non-missing values")
    return results.plot_payload(plots.histogram(col.name, values, args["bins"]))


def _cmd_bar_chart(env: EvalEnv, args: dict) -> dict:
    col: Column = args["x"]
    labels = _listwise(col)
    if not labels:
        raise DomainError(f"column {col.name!r} has no non-missing values")
    return results.plot_payload(plots.bar_chart(col.name, labels))


def _cmd_scatter_plot(env: EvalEnv, args: dict) -> dict:
    xcol: Column = args["x"]
    ycol: Column = args["y"]
    xs, ys = _pairwise(xcol, ycol)
    if not xs:
        raise DomainError("no complete pairs")
    return results.plot_payload(plots.scatter(xcol.name, ycol.name, xs, ys))


def _cmd_box_plot(env: EvalEnv, args: dict) -> dict:
    col: Column = args["x"]
    group: Column | None = args["group"]
    if group is None:
        values = _listwise(col)
        if not values:
            raise DomainError(f"column {col.name!r} has no non-missing values")
        return results.plot_payload(plots.box_plot(col.name, values))
    values, labels = _pairwise(col, group)
    if not values:
        raise DomainError("no complete pairs")
    return results.plot_payload(
        plots.box_plot(col.name, values, labels, group.name)
    )


def _cmd_mosaic_plot(env: EvalEnv, args: dict) -> dict:
    xcol: Column = args["x"]
    ycol: Column = args["y"]
    xs, ys = _pairwise(xcol, ycol)
    if not xs:
        raise DomainError("no complete pairs")
    return results.plot_payload(plots.mosaic(xcol.name, ycol.name, xs, ys))


def _cmd_ols_fit(env: EvalEnv, args: dict) -> dict:
    ycol: Column = args["y"]
    xcol: Column = args["x"]
    xs, ys = _pairwise(xcol, ycol)
    fit = regression.ols_fit(xs, ys)
    return results.regression_payload(ycol.name, xcol.name, fit)


def _hypothesis_spec(args: dict) -> inference.HypothesisSpec:
    alt = inference.Alternative.parse(args["alternative"])
    conf = args["conf_level"]
    mu = args["mu"]
    return inference.HypothesisSpec(
        alternative=alt, conf_level=float(conf), mu=float(mu)
    )


def _cmd_t_test(env: EvalEnv, args: dict) -> dict:
    spec = _hypothesis_spec(args)
    xcol: Column = args["x"]
    ycol: Column | None = args["y"]
    x = _listwise(xcol)
    y = _listwise(ycol) if ycol is not None else None
    r = inference.t_test(x, y, spec)
    return results.t_test_payload(xcol.name, ycol.name if ycol else None, r)


def _cmd_wilcoxon(env: EvalEnv, args: dict) -> dict:
    spec = _hypothesis_spec(args)
    xcol: Column = args["x"]
    ycol: Column = args["y"]
    r = inference.wilcoxon_rank_sum(_listwise(xcol), _listwise(ycol), spec)
    return results.wilcoxon_payload(xcol.name, ycol.name, r)


def _cmd_contingency(env: EvalEnv, args: dict) -> dict:
    acol: Column = args["a"]
    bcol: Column = args["b"]
    xs, ys = _pairwise(acol, bcol)
    if not xs:
        raise DomainError("no complete pairs")
    r = inference.contingency(xs, ys)
    return results.contingency_payload(acol.name, bcol.name, r)


_HYPOTHESIS_PARAMS = (
    Param("mu", "number", required=False, default=Num(0)),
    Param("alternative", "string", required=False, default=Str("two.sided")),
    Param("conf_level", "number", required=False, default=Num(0.95)),
)


def default_registry() -> CommandRegistry:
    reg = CommandRegistry()
    reg.register(Command("load_data", (Param("filename", "string"),), _cmd_load_data))
    reg.register(
        Command(
            "transform",
            (
                Param("source", "num_col"),
                Param("op", "string"),
                Param("bins", "int", required=False),
            ),
            _cmd_transform,
        )
    )
    reg.register(Command("dataset_info", (), _cmd_dataset_info))
    reg.register(
        Command("numeric_summary", (Param("x", "num_col"),), _cmd_numeric_summary)
    )
    reg.register(
        Command(
            "histogram",
            (Param("x", "num_col"), Param("bins", "int", required=False)),
            _cmd_histogram,
        )
    )
    reg.register(Command("bar_chart", (Param("x", "cat_col"),), _cmd_bar_chart))
    reg.register(
        Command(
            "scatter_plot",
            (Param("x", "num_col"), Param("y", "num_col")),
            _cmd_scatter_plot,
        )
    )
    reg.register(
        Command(
            "box_plot",
            (Param("x", "num_col"), Param("group", "cat_col", required=False)),
            _cmd_box_plot,
        )
    )
    reg.register(
        Command(
            "mosaic_plot",
            (Param("x", "cat_col"), Param("y", "cat_col")),
            _cmd_mosaic_plot,
        )
    )
    reg.register(
        Command("ols_fit", (Param("y", "num_col"), Param("x", "num_col")), _cmd_ols_fit)
    )
    reg.register(
        Command(
            "t_test",
            (Param("x", "num_col"), Param("y", "num_col", required=False))
            + _HYPOTHESIS_PARAMS,
            _cmd_t_test,
        )
    )
    reg.register(
        Command(
            "wilcoxon_rank_sum",
            (Param("x", "num_col"), Param("y", "num_col")) + _HYPOTHESIS_PARAMS,
            _cmd_wilcoxon,
        )
    )
    reg.register(
        Command(
            "contingency",
            (Param("a", "cat_col"), Param("b", "cat_col")),
            _cmd_contingency,
        )
    )
    return reg
