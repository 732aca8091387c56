"""Syntax tree for the transcription language, with the canonical printer.

print_value is the one way statements become text; the parser inverts it
exactly (parse of a printed tree gives back an identical tree), which is
what lets stored scripts be compared and replayed byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..values import values_equal


@dataclass(frozen=True)
class Num:
    value: Union[int, float]


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class ColumnRef:
    name: str


@dataclass(frozen=True)
class ListVal:
    items: tuple["Value", ...]


@dataclass(frozen=True)
class Arg:
    key: str | None
    value: "Value"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple[Arg, ...]


Value = Union[Num, Str, Bool, ColumnRef, ListVal, Call]


def escape_string(text: str) -> str:
    out = []
    for ch in text:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        else:
            out.append(ch)
    return "".join(out)


def print_value(node: Value) -> str:
    if isinstance(node, Num):
        if isinstance(node.value, bool):  # pragma: no cover - construction bug
            raise TypeError("Num must not hold a bool")
        if isinstance(node.value, int):
            return str(node.value)
        return fmt_number_float(node.value)
    if isinstance(node, Str):
        return f'"{escape_string(node.value)}"'
    if isinstance(node, Bool):
        return "true" if node.value else "false"
    if isinstance(node, ColumnRef):
        return f'col("{escape_string(node.name)}")'
    if isinstance(node, ListVal):
        return "[" + ", ".join(print_value(v) for v in node.items) + "]"
    if isinstance(node, Call):
        parts = []
        for arg in node.args:
            rendered = print_value(arg.value)
            parts.append(rendered if arg.key is None else f"{arg.key} = {rendered}")
        return f"{node.name}(" + ", ".join(parts) + ")"
    raise TypeError(f"not a value node: {node!r}")


def fmt_number_float(value: float) -> str:
    """Shortest decimal that round-trips; keeps the trailing .0 on integral
    floats so the token re-parses as a float, not an int.
    """
    text = repr(value)
    if text in ("inf", "-inf", "nan"):
        raise ValueError("non-finite numbers cannot be printed")
    return text


def ast_equal(a: Value, b: Value) -> bool:
    """Structural equality, stricter than ==: int and float never compare
    equal, floats compare bitwise.
    """
    if type(a) is not type(b):
        return False
    if isinstance(a, Num):
        return values_equal(a.value, b.value)
    if isinstance(a, (Str, ColumnRef, Bool)):
        return a == b
    if isinstance(a, ListVal):
        return len(a.items) == len(b.items) and all(
            ast_equal(x, y) for x, y in zip(a.items, b.items)
        )
    if isinstance(a, Call):
        if a.name != b.name or len(a.args) != len(b.args):
            return False
        for x, y in zip(a.args, b.args):
            if x.key != y.key or not ast_equal(x.value, y.value):
                return False
        return True
    raise TypeError(f"not a value node: {a!r}")


def from_python(value) -> Value:
    """Lift a plain Python value into the tree.  Strings become Str; use
    ColumnRef explicitly for column references.
    """
    if isinstance(value, bool):
        return Bool(value)
    if isinstance(value, (int, float)):
        return Num(value)
    if isinstance(value, str):
        return Str(value)
    if isinstance(value, (list, tuple)):
        return ListVal(tuple(from_python(v) for v in value))
    if isinstance(value, (Num, Str, Bool, ColumnRef, ListVal, Call)):
        return value
    raise TypeError(f"cannot represent {type(value).__name__} in the language")
