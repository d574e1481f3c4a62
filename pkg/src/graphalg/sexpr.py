"""Minimal s-expression reader/printer used by all file formats.

Atoms are ints or symbols (plain strings); lists are Python lists.  Comments
run from ';' to end of line.
"""

from __future__ import annotations

from .errors import ParseError

_DELIMS = "()\"; \t\r\n"


def loads(text: str):
    """Parse a single s-expression from ``text``."""
    parser = _Parser(text)
    expr = parser.read()
    if expr is _EOF:
        raise ParseError("empty input", parser.line, parser.col)
    parser.skip_ws()
    if not parser.at_eof():
        raise ParseError("trailing content after expression", parser.line, parser.col)
    return expr


def loads_many(text: str):
    """Parse all top-level s-expressions in ``text``."""
    parser = _Parser(text)
    out = []
    while True:
        expr = parser.read()
        if expr is _EOF:
            return out
        out.append(expr)


def dumps(expr, indent: bool = False) -> str:
    if indent:
        return _dump_indent(expr, 0)
    return _dump(expr)


def _dump(expr) -> str:
    if isinstance(expr, list):
        return "(" + " ".join(_dump(e) for e in expr) + ")"
    if isinstance(expr, bool):
        raise ParseError(f"cannot serialize {expr!r}")
    if isinstance(expr, int):
        return str(expr)
    if isinstance(expr, str):
        if expr == "" or any(c in _DELIMS for c in expr):
            escaped = expr.replace("\\", "\\\\").replace('"', '\\"')
            return f'"{escaped}"'
        return expr
    raise ParseError(f"cannot serialize {expr!r}")


def _dump_indent(expr, depth: int) -> str:
    # Indent only the second nesting level; deeper structure stays inline.
    if not isinstance(expr, list) or depth >= 1 or not any(isinstance(e, list) for e in expr):
        return _dump(expr)
    pad = "  " * (depth + 1)
    head = 0
    while head < len(expr) and not isinstance(expr[head], list):
        head += 1
    parts = [_dump(e) for e in expr[:head]]
    lines = [pad + _dump_indent(e, depth + 1) for e in expr[head:]]
    inner = " ".join(parts)
    return "(" + inner + ("\n" + "\n".join(lines) if lines else "") + ")"


_EOF = object()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def at_eof(self) -> bool:
        return self.pos >= len(self.text)

    def _advance(self) -> str:
        c = self.text[self.pos]
        self.pos += 1
        if c == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return c

    def skip_ws(self):
        while not self.at_eof():
            c = self.text[self.pos]
            if c in " \t\r\n":
                self._advance()
            elif c == ";":
                while not self.at_eof() and self.text[self.pos] != "\n":
                    self._advance()
            else:
                return

    def read(self):
        self.skip_ws()
        if self.at_eof():
            return _EOF
        c = self.text[self.pos]
        if c == "(":
            self._advance()
            items = []
            while True:
                self.skip_ws()
                if self.at_eof():
                    raise ParseError("unclosed '('", self.line, self.col)
                if self.text[self.pos] == ")":
                    self._advance()
                    return items
                item = self.read()
                if item is _EOF:
                    raise ParseError("unclosed '('", self.line, self.col)
                items.append(item)
        if c == ")":
            raise ParseError("unexpected ')'", self.line, self.col)
        if c == '"':
            return self._read_string()
        return self._read_atom()

    def _read_string(self) -> str:
        self._advance()
        chars = []
        while True:
            if self.at_eof():
                raise ParseError("unterminated string", self.line, self.col)
            c = self._advance()
            if c == "\\":
                if self.at_eof():
                    raise ParseError("unterminated escape", self.line, self.col)
                chars.append(self._advance())
            elif c == '"':
                return "".join(chars)
            else:
                chars.append(c)

    def _read_atom(self):
        start = self.pos
        while not self.at_eof() and self.text[self.pos] not in _DELIMS:
            self._advance()
        token = self.text[start:self.pos]
        try:
            return int(token)
        except ValueError:
            return token
