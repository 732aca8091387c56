"""Tokenizer and recursive-descent parser for the transcription language.

The language is line-based: one statement per line, `#` comments, blank
lines ignored.  There are no operators, no variables, and no control flow;
a statement is a call whose arguments are literals, lists, column
references (the call form col("name")), or nested calls.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ScriptSyntaxError
from .ast import Arg, Bool, Call, ColumnRef, ListVal, Num, Str, Value

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789")
_DIGITS = set("0123456789")

_PUNCT = {
    "(": "LPAREN",
    ")": "RPAREN",
    "[": "LBRACKET",
    "]": "RBRACKET",
    ",": "COMMA",
    "=": "EQUALS",
}


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT NUMBER STRING LPAREN RPAREN LBRACKET RBRACKET COMMA EQUALS NEWLINE EOF
    text: str
    value: object
    line: int
    col: int


@dataclass(frozen=True)
class Statement:
    line: int
    call: Call


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line = 1
    col = 1
    i = 0
    n = len(text)

    def err(message: str, at_line: int, at_col: int):
        raise ScriptSyntaxError(message, at_line, at_col)

    while i < n:
        ch = text[i]
        if ch == "\n":
            tokens.append(Token("NEWLINE", "\n", None, line, col))
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
                col += 1
            continue
        if ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, None, line, col))
            i += 1
            col += 1
            continue
        if ch in _IDENT_START:
            start = i
            start_col = col
            while i < n and text[i] in _IDENT_CONT:
                i += 1
                col += 1
            word = text[start:i]
            tokens.append(Token("IDENT", word, word, line, start_col))
            continue
        if ch in _DIGITS or (ch == "-" and i + 1 < n and text[i + 1] in _DIGITS):
            start = i
            start_col = col
            if ch == "-":
                i += 1
                col += 1
            while i < n and text[i] in _DIGITS:
                i += 1
                col += 1
            is_float = False
            if i < n and text[i] == ".":
                if i + 1 >= n or text[i + 1] not in _DIGITS:
                    err("digits must follow a decimal point", line, col)
                is_float = True
                i += 1
                col += 1
                while i < n and text[i] in _DIGITS:
                    i += 1
                    col += 1
            if i < n and text[i] in "eE":
                j = i + 1
                if j < n and text[j] in "+-":
                    j += 1
                if j < n and text[j] in _DIGITS:
                    is_float = True
                    col += j - i
                    i = j
                    while i < n and text[i] in _DIGITS:
                        i += 1
                        col += 1
                else:
                    err("digits must follow an exponent marker", line, col)
            word = text[start:i]
            value: object = float(word) if is_float else int(word)
            tokens.append(Token("NUMBER", word, value, line, start_col))
            continue
        if ch == '"':
            start_line, start_col = line, col
            start_i = i
            i += 1
            col += 1
            parts: list[str] = []
            while True:
                if i >= n or text[i] == "\n":
                    err("unterminated string", start_line, start_col)
                c = text[i]
                if c == '"':
                    i += 1
                    col += 1
                    break
                if c == "\\":
                    if i + 1 >= n:
                        err("unterminated string", start_line, start_col)
                    esc = text[i + 1]
                    if esc == '"':
                        parts.append('"')
                    elif esc == "\\":
                        parts.append("\\")
                    elif esc == "n":
                        parts.append("\n")
                    else:
                        err(f"unsupported escape \\{esc}", line, col)
                    i += 2
                    col += 2
                    continue
                parts.append(c)
                i += 1
                col += 1
            tokens.append(Token("STRING", text[start_i:i], "".join(parts), start_line, start_col))
            continue
        err(f"unexpected character {ch!r}", line, col)

    tokens.append(Token("EOF", "", None, line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def error(self, message: str, tok: Token):
        raise ScriptSyntaxError(message, tok.line, tok.col)

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            if tok.kind in ("EOF", "NEWLINE"):
                self.error("unexpected end of input", tok)
            self.error(f"expected {what}, found {tok.text!r}", tok)
        return self.advance()

    def skip_newlines(self):
        while self.peek().kind == "NEWLINE":
            self.advance()

    def parse_script(self) -> list[Statement]:
        statements: list[Statement] = []
        self.skip_newlines()
        while self.peek().kind != "EOF":
            tok = self.peek()
            call = self.parse_call_value()
            if not isinstance(call, Call):
                self.error("a statement must be a command call", tok)
            statements.append(Statement(line=tok.line, call=call))
            end = self.peek()
            if end.kind not in ("NEWLINE", "EOF"):
                self.error(f"expected end of line, found {end.text!r}", end)
            self.skip_newlines()
        return statements

    def parse_call_value(self) -> Value:
        name_tok = self.expect("IDENT", "a command name")
        self.expect("LPAREN", "'('")
        args: list[Arg] = []
        if self.peek().kind != "RPAREN":
            while True:
                args.append(self.parse_arg())
                tok = self.peek()
                if tok.kind == "COMMA":
                    self.advance()
                    continue
                break
        self.expect("RPAREN", "')' or ','")
        call = Call(name=name_tok.value, args=tuple(args))
        if call.name == "col":
            return self.lower_column_ref(call, name_tok)
        return call

    def lower_column_ref(self, call: Call, tok: Token) -> ColumnRef:
        if len(call.args) != 1 or call.args[0].key is not None or not isinstance(
            call.args[0].value, Str
        ):
            self.error("col() takes exactly one string argument", tok)
        return ColumnRef(call.args[0].value.value)

    def parse_arg(self) -> Arg:
        tok = self.peek()
        if (
            tok.kind == "IDENT"
            and self.tokens[self.pos + 1].kind == "EQUALS"
        ):
            self.advance()
            self.advance()
            return Arg(key=tok.value, value=self.parse_value())
        return Arg(key=None, value=self.parse_value())

    def parse_value(self) -> Value:
        tok = self.peek()
        if tok.kind == "NUMBER":
            self.advance()
            return Num(tok.value)
        if tok.kind == "STRING":
            self.advance()
            return Str(tok.value)
        if tok.kind == "IDENT":
            if self.tokens[self.pos + 1].kind == "LPAREN":
                return self.parse_call_value()
            if tok.value == "true":
                self.advance()
                return Bool(True)
            if tok.value == "false":
                self.advance()
                return Bool(False)
            self.error(f"expected a value, found {tok.text!r}", tok)
        if tok.kind == "LBRACKET":
            self.advance()
            items: list[Value] = []
            if self.peek().kind != "RBRACKET":
                while True:
                    items.append(self.parse_value())
                    if self.peek().kind == "COMMA":
                        self.advance()
                        continue
                    break
            self.expect("RBRACKET", "']' or ','")
            return ListVal(tuple(items))
        if tok.kind in ("EOF", "NEWLINE"):
            self.error("unexpected end of input", tok)
        self.error(f"expected a value, found {tok.text!r}", tok)
        raise AssertionError("unreachable")


def parse_script(text: str) -> list[Statement]:
    """Parse a whole script; comments and blank lines are skipped but the
    line number of each statement is retained.
    """
    return _Parser(tokenize(text)).parse_script()


def parse_statement(text: str) -> Call:
    """Parse text that must contain exactly one statement."""
    statements = parse_script(text)
    if len(statements) != 1:
        raise ScriptSyntaxError(
            f"expected exactly one statement, found {len(statements)}", 1, 1
        )
    return statements[0].call
