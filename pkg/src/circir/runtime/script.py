"""IoScript: scripted per-host input queues for deterministic runs.

::

    // comments run to end of line
    host Server: 2 2 int[2,2] [1,2,3,4]
    host Client: int[2] [1,1] false
    corrupt x Client: 6

``host`` lines append to that host's queue.  ``corrupt <var> <host>: <v>``
is a fault-injection hook: the next time ``<host>`` receives a copy of the
variable being bound as ``<var>`` (a replication broadcast, or the owner
opening a commitment) it holds ``<v>`` instead.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import CircirError
from ..values import Value, format_value

_VALUE_RE = re.compile(
    r"\s*(?:(?P<elem>int|bool)\[(?P<dims>[0-9,\s]*)\]\s*\[(?P<data>[^\]]*)\]"
    r"|(?P<bool>true|false)|(?P<int>-?[0-9]+))\s*"
)


class ScriptError(CircirError):
    pass


@dataclass
class IoScript:
    inputs: dict[str, list[Value]] = field(default_factory=dict)
    corruptions: list[tuple[str, str, Value]] = field(default_factory=list)

    def add(self, host: str, *values):
        self.inputs.setdefault(host, []).extend(Value.scalar(v) if not isinstance(v, Value) else v
                                                 for v in values)
        return self


def _scalar_token(tok: str):
    tok = tok.strip()
    if tok in ("true", "false"):
        return tok == "true"
    try:
        return int(tok)
    except ValueError:
        raise ScriptError(f"bad scalar {tok!r}") from None


def parse_values(text: str) -> list[Value]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _VALUE_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ScriptError(f"cannot parse value at {text[pos:]!r}")
        pos = m.end()
        try:
            if m.group("elem"):
                dims = [int(d) for d in m.group("dims").replace(" ", "").split(",") if d]
                raw = m.group("data").strip()
                data = [_scalar_token(t) for t in raw.split(",")] if raw else []
                out.append(Value(m.group("elem"), tuple(dims), tuple(data)))
            elif m.group("bool"):
                out.append(Value.scalar(m.group("bool") == "true"))
            else:
                out.append(Value.scalar(int(m.group("int"))))
        except (ValueError, CircirError) as e:
            if isinstance(e, ScriptError):
                raise
            raise ScriptError(f"bad value {m.group().strip()!r}: {e}") from None
    return out


def parse_script(text: str) -> IoScript:
    script = IoScript()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        words = head.split()
        try:
            if not sep:
                raise ScriptError("missing ':'")
            if words[:1] == ["host"] and len(words) == 2:
                script.add(words[1], *parse_values(rest))
            elif words[:1] == ["corrupt"] and len(words) == 3:
                vals = parse_values(rest)
                if len(vals) != 1:
                    raise ScriptError("corrupt takes exactly one value")
                script.corruptions.append((words[1], words[2], vals[0]))
            else:
                raise ScriptError(f"unrecognised line {line!r}")
        except ScriptError as e:
            raise ScriptError(f"script line {lineno}: {e}") from None
    return script


def format_script(script: IoScript) -> str:
    lines = []
    for host, vals in script.inputs.items():
        lines.append(f"host {host}: " + " ".join(format_value(v) for v in vals))
    for var, host, v in script.corruptions:
        lines.append(f"corrupt {var} {host}: {format_value(v)}")
    return "\n".join(lines) + "\n"
