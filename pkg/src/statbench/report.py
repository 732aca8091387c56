"""Report generation: replay a stored script and weave the results into
a Markdown document with rendered figures.

The replay runs in a fresh evaluation environment supplied by the caller,
so a report proves reproducibility: every block's result comes from
re-executing the recorded statement, never from cached panel state.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dsl.ast import print_value
from .dsl.evaluator import EvalEnv, eval_call
from .dsl.parser import parse_script
from .dsl.script import Script
from .errors import ScriptEvalError
from .svg import render_plot_svg


@dataclass(frozen=True)
class ReportBlock:
    """One replayed statement: the code that ran (when shown) and its result.
    The setup block carries code only."""

    code: str | None
    result: dict | None


@dataclass(frozen=True)
class ReportDocument:
    blocks: tuple[ReportBlock, ...]
    include_code: bool


def render_report(script: Script, env: EvalEnv, include_code: bool = True) -> ReportDocument:
    """Re-execute the script against env, one block per stored statement.

    Domain errors are ordinary results and render as error blocks; a
    structural failure (bad syntax, unknown command, unloadable data)
    aborts with the offending line.  Hiding code changes only what the
    blocks carry, never what gets computed.
    """
    statements = parse_script(script.text())
    n_setup = len(script.preamble)
    blocks: list[ReportBlock] = []

    setup_lines = []
    for stmt in statements[:n_setup]:
        payload = eval_call(env, stmt.call, stmt.line)
        if payload.get("type") == "error":
            raise ScriptEvalError(f"setup failed: {payload['message']}", stmt.line)
        setup_lines.append(print_value(stmt.call))
    if include_code and setup_lines:
        blocks.append(ReportBlock(code="\n".join(setup_lines), result=None))

    for stmt in statements[n_setup:]:
        payload = eval_call(env, stmt.call, stmt.line)
        code = print_value(stmt.call) if include_code else None
        blocks.append(ReportBlock(code=code, result=payload))
    return ReportDocument(blocks=tuple(blocks), include_code=include_code)


def _table_markdown(payload: dict) -> list[str]:
    def cell(v) -> str:
        return str(v).replace("|", "\\|")

    header = "| " + " | ".join(cell(c) for c in payload["columns"]) + " |"
    rule = "|" + "|".join(" --- " for _ in payload["columns"]) + "|"
    lines = [header, rule]
    for row in payload["rows"]:
        lines.append("| " + " | ".join(cell(v) for v in row) + " |")
    return lines


def report_markdown(doc: ReportDocument, title: str = "Analysis Report") -> tuple[str, dict[str, str]]:
    """Lay the document out as Markdown; returns (text, images) where
    images maps figure file names (plot_001.svg, ...) to SVG content.
    """
    images: dict[str, str] = {}
    lines: list[str] = [f"# {title}", ""]
    n_plots = 0
    for block in doc.blocks:
        if block.code is not None:
            lines += ["```", block.code, "```", ""]
        result = block.result
        if result is None:
            continue
        kind = result["type"]
        if kind == "plot":
            n_plots += 1
            name = f"plot_{n_plots:03d}.svg"
            images[name] = render_plot_svg(result["plot"], result["text"])
            lines += [f"![{result['text']}]({name})", ""]
        elif kind == "table":
            lines += _table_markdown(result) + [""]
        elif kind == "error":
            lines += [f"> {result['text']}", ""]
        else:
            lines += ["```", result["text"].rstrip("\n"), "```", ""]
    return "\n".join(lines).rstrip("\n") + "\n", images
