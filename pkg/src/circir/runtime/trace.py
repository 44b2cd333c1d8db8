"""Trace events and their line-per-event text serialisation.

One event per line, fields separated by single spaces::

    <seq> input <host> <var> <value>
    <seq> output <host> <var> <value>
    <seq> import <var> <from-format> -> <protocol>
    <seq> circuit <function> <protocol> [<size>=<n> ...]
    <seq> export <var> <from> -> <to-format> [digest=<hex>]
    <seq> equivocation <var> <format> ok|fail <host>,<host>...

Values use the script syntax (``7``, ``true``, ``int[2] [1,2]``).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..values import Value, format_value


@dataclass(frozen=True)
class TraceEvent:
    seq: int


@dataclass(frozen=True)
class InputEvent(TraceEvent):
    host: str
    var: str
    value: Value

    def line(self):
        return f"{self.seq} input {self.host} {self.var} {format_value(self.value)}"


@dataclass(frozen=True)
class OutputEvent(TraceEvent):
    host: str
    var: str
    value: Value

    def line(self):
        return f"{self.seq} output {self.host} {self.var} {format_value(self.value)}"


@dataclass(frozen=True)
class ImportEvent(TraceEvent):
    var: str
    source: str
    protocol: str

    def line(self):
        return f"{self.seq} import {self.var} {self.source} -> {self.protocol}"


@dataclass(frozen=True)
class ExportEvent(TraceEvent):
    var: str
    source: str
    target: str
    digest: str | None = None

    def line(self):
        tail = f" digest={self.digest}" if self.digest else ""
        return f"{self.seq} export {self.var} {self.source} -> {self.target}{tail}"


@dataclass(frozen=True)
class CircuitEvalEvent(TraceEvent):
    func: str
    protocol: str
    sizes: tuple[tuple[str, int], ...]

    def line(self):
        sizes = "".join(f" {k}={v}" for k, v in self.sizes)
        return f"{self.seq} circuit {self.func} {self.protocol}{sizes}"


@dataclass(frozen=True)
class EquivocationCheckEvent(TraceEvent):
    var: str
    fmt: str
    ok: bool
    hosts: tuple[str, ...] = ()

    def line(self):
        result = "ok" if self.ok else "fail " + ",".join(self.hosts)
        return f"{self.seq} equivocation {self.var} {self.fmt} {result}"


def serialize_trace(trace) -> str:
    return "".join(ev.line() + "\n" for ev in trace)


def io_events(trace) -> list[tuple[str, str, Value]]:
    """The observable part of a trace: (kind, host, value) for each I/O."""
    out = []
    for ev in trace:
        if isinstance(ev, InputEvent):
            out.append(("input", ev.host, ev.value))
        elif isinstance(ev, OutputEvent):
            out.append(("output", ev.host, ev.value))
    return out
