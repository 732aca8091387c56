"""The session script: loading provenance plus everything the user stored."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .template import RenderedStatement


@dataclass(frozen=True)
class Script:
    preamble: tuple[RenderedStatement, ...] = ()
    stored: tuple[RenderedStatement, ...] = ()

    def text(self) -> str:
        lines = [s.text for s in self.preamble] + [s.text for s in self.stored]
        return "\n".join(lines) + ("\n" if lines else "")


def store_statement(script: Script, stmt: RenderedStatement) -> Script:
    """Append-only history; storing the same statement twice keeps both."""
    return replace(script, stored=script.stored + (stmt,))


def with_preamble(script: Script, preamble: list[RenderedStatement]) -> Script:
    return replace(script, preamble=tuple(preamble))
