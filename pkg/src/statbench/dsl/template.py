"""Code templates and interpolation.

A template is a statement skeleton with `{name}` placeholders.  Rendering
substitutes bound values per the value-rendering rules, and interpolation
immediately evaluates the rendered statement, returning both: the pair of
code and result is the unit every module output produces.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from ..errors import TemplateError
from ..values import fmt_number
from .ast import Call, ColumnRef, escape_string
from .parser import parse_statement

_PLACEHOLDER = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")


@dataclass(frozen=True)
class CodeTemplate:
    skeleton: str
    placeholder_order: tuple[str, ...]

    @classmethod
    def from_skeleton(cls, skeleton: str) -> "CodeTemplate":
        names = _PLACEHOLDER.findall(skeleton)
        seen: set[str] = set()
        for name in names:
            if name in seen:
                raise TemplateError(f"placeholder {{{name}}} appears more than once")
            seen.add(name)
        stripped = _PLACEHOLDER.sub("", skeleton)
        if "{" in stripped or "}" in stripped:
            raise TemplateError("stray brace outside a {name} placeholder")
        return cls(skeleton=skeleton, placeholder_order=tuple(names))


BindingValue = object  # number | str | bool | ColumnRef | list of these


@dataclass(frozen=True)
class Binding:
    name: str
    value: BindingValue


@dataclass(frozen=True)
class RenderedStatement:
    text: str
    module_id: str
    produced_at: int

    def parsed(self) -> Call:
        return parse_statement(self.text)


def render_value(value: BindingValue) -> str:
    """The value-rendering rules: how a widget value becomes statement text."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return fmt_number(value)
    if isinstance(value, str):
        return f'"{escape_string(value)}"'
    if isinstance(value, ColumnRef):
        return f'col("{escape_string(value.name)}")'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(render_value(v) for v in value) + "]"
    raise TemplateError(f"cannot render a {type(value).__name__} into a statement")


def render_template(template: CodeTemplate, bindings: list[Binding]) -> str:
    by_name = {}
    for b in bindings:
        if b.name in by_name:
            raise TemplateError(f"binding {b.name!r} given more than once")
        by_name[b.name] = b.value
    missing = [n for n in template.placeholder_order if n not in by_name]
    if missing:
        raise TemplateError(f"missing binding for placeholder {{{missing[0]}}}")
    extra = [n for n in by_name if n not in template.placeholder_order]
    if extra:
        raise TemplateError(f"binding {extra[0]!r} matches no placeholder")

    def sub(m: re.Match) -> str:
        return render_value(by_name[m.group(1)])

    return _PLACEHOLDER.sub(sub, template.skeleton)


def interpolate(
    template: CodeTemplate,
    bindings: list[Binding],
    evaluator: Callable[[Call], dict],
    module_id: str = "",
    produced_at: int = 0,
) -> tuple[RenderedStatement, dict]:
    """Render the statement and evaluate it at once.

    The returned statement is always valid (it re-parses); evaluation
    problems come back inside the result payload, never as exceptions.
    """
    text = render_template(template, bindings)
    try:
        call = parse_statement(text)
    except Exception as e:  # a template that renders unparseable text is a bug
        raise TemplateError(f"rendered statement does not parse: {e}") from None
    result = evaluator(call)
    return RenderedStatement(text=text, module_id=module_id, produced_at=produced_at), result
