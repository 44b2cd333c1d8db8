from __future__ import annotations

import random
from collections import deque

from ..errors import ScriptExhausted
from ..values import Value
from .script import IoScript
from .trace import InputEvent, OutputEvent, TraceEvent


class World:
    """All mutable state of one run: queues, logs, trace, and the RNG.

    Every random choice (shares, nonces) comes from ``rng``, seeded once, so
    identical (program, script, seed) give a bitwise-identical trace.
    ``reference=True`` replaces every protocol with a cleartext reference
    backend; only the observable I/O behaviour is meant to match.
    """

    def __init__(self, universe, script: IoScript | None = None, seed: int = 0,
                 reference: bool = False, stdin=None):
        script = script or IoScript()
        self.universe = tuple(universe)
        self.queues = {h: deque(vals) for h, vals in script.inputs.items()}
        self.outputs: dict[str, list[Value]] = {}
        self.trace: list[TraceEvent] = []
        self.rng = random.Random(seed)
        self.reference = reference
        self.corruptions: dict[tuple[str, str], Value] = {
            (var, host): v for var, host, v in script.corruptions
        }
        self.stdin = stdin
        self.circuit_depth = 0
        self.purity_violations: list = []  # I/O events or script reads inside a circuit

    def emit(self, cls, **fields) -> TraceEvent:
        ev = cls(seq=len(self.trace), **fields)
        if self.circuit_depth and isinstance(ev, (InputEvent, OutputEvent)):
            self.purity_violations.append(ev)
        self.trace.append(ev)
        return ev

    def read_input(self, host: str) -> Value:
        if self.circuit_depth:
            self.purity_violations.append(("read", host))
        q = self.queues.get(host)
        if q:
            return q.popleft()
        if self.stdin is not None:
            return self.stdin(host)
        raise ScriptExhausted(host)

    def write_output(self, host: str, value: Value):
        self.outputs.setdefault(host, []).append(value)

    def corrupt(self, var: str, host: str, value):
        """Test hook: ``host``'s next received copy of ``var`` becomes ``value``."""
        self.corruptions[(var, host)] = Value.scalar(value) if not isinstance(value, Value) else value

    def take_corruption(self, var: str, host: str) -> Value | None:
        return self.corruptions.pop((var, host), None)
