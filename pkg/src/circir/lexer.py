from __future__ import annotations

import re
from dataclasses import dataclass

from .diagnostics import Diagnostic, error
from .ir import Span

KEYWORDS = frozenset(
    "host circuit fun val let if else return input output reduce min max true false int bool".split()
)

# Longest match first.
PUNCT = ("->", "<=", "==", "!=", "&&", "||", "(", ")", "{", "}", "[", "]",
         "<", ">", ",", ";", ":", "@", "=", "+", "-", "*", "/", "%", "^")

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>//[^\n]*)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>[0-9]+)|(?P<punct>"
    + "|".join(re.escape(p) for p in PUNCT)
    + ")"
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "num", "eof", a keyword, or a punctuation string
    text: str
    span: Span


def tokenize(text: str) -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            sp = Span(pos, pos + 1, line, pos - line_start + 1)
            diags.append(error(f"unexpected character {text[pos]!r}", sp))
            pos += 1
            continue
        kind = m.lastgroup
        s = m.group()
        sp = Span(pos, m.end(), line, pos - line_start + 1)
        if kind == "ident":
            tokens.append(Token(s if s in KEYWORDS else "ident", s, sp))
        elif kind == "int":
            tokens.append(Token("num", s, sp))
        elif kind == "punct":
            tokens.append(Token(s, s, sp))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", Span(pos, pos, line, pos - line_start + 1)))
    return tokens, diags
