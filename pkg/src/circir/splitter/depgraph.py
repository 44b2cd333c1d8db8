"""Statement-level dependence graphs over straight-line regions."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..ir import (
    BinOp, Call, CircuitFun, ComputeLet, Input, Lit, Lookup, Output, Program, Protocol,
    Reduce, Ref, stmt_defs, stmt_uses,
)

# Formats that hide the value from at least one host holding the data.
RESTRICTIVE = frozenset({"MPC", "Commit"})
CLEARTEXT = frozenset({"Local", "Repl"})

EFFECTS = ("input", "output", "call", "commit", "reveal")


@dataclass
class Node:
    id: int
    stmt: object
    protocol: Protocol | None = None  # resolved, for inline computations
    effect: str | None = None
    defs: tuple[str, ...] = ()
    uses: frozenset[str] = frozenset()

    @property
    def is_compute(self) -> bool:
        return self.protocol is not None


@dataclass
class DepGraph:
    nodes: list[Node]
    data: set[tuple[int, int]] = field(default_factory=set)
    safety: set[tuple[int, int]] = field(default_factory=set)

    @property
    def edges(self) -> set[tuple[int, int]]:
        return self.data | self.safety

    def preds(self) -> dict[int, set[int]]:
        out: dict[int, set[int]] = {n.id: set() for n in self.nodes}
        for a, b in self.edges:
            out[b].add(a)
        return out


def _restrictive(fmt) -> bool:
    # unknown storage (function parameters) is treated as hidden
    return fmt is None or fmt.name in RESTRICTIVE


def _reads_restrictive(names, formats: dict) -> bool:
    return any(n in formats and _restrictive(formats[n]) for n in names)


def classify(s, formats: dict, program: Program) -> str | None:
    """Effect class of a statement, given the storage format of each variable.

    ``formats`` maps variables to their storage protocol (``None`` when
    unknown); names absent from it are public sizes or literals.
    """
    if isinstance(s, ComputeLet):
        if s.protocol.name in CLEARTEXT and _reads_restrictive(stmt_uses(s), formats):
            return "reveal"
        return None
    m = s.command
    if isinstance(m, Input):
        return "input"
    if isinstance(m, Output):
        return "output"
    targets = [b.fmt for b in s.targets]
    if any(t.name == "Commit" for t in targets):
        return "commit"
    to_clear = any(t.name in CLEARTEXT for t in targets)
    if isinstance(m, Call):
        callee = program.lookup(m.func)
        if not isinstance(callee, CircuitFun):
            return "call"
        hidden = callee.protocol.name in RESTRICTIVE or _reads_restrictive(stmt_uses(s), formats)
        return "reveal" if hidden and to_clear else None
    if isinstance(m, Ref) and to_clear and _reads_restrictive({m.name}, formats):
        return "reveal"
    return None


def build_dep_graph(region, formats: dict, program: Program, universe=None) -> DepGraph:
    """Nodes are numbered in source order.

    Data edges run from a definition to each later use.  Every effectful
    statement is chained to the next one in source order.
    """
    universe = universe if universe is not None else program.universe()
    formats = dict(formats)
    nodes = []
    for k, s in enumerate(region):
        proto = s.protocol.resolve(universe) if isinstance(s, ComputeLet) else None
        nodes.append(Node(k, s, proto, classify(s, formats, program),
                          tuple(stmt_defs(s)), frozenset(stmt_uses(s))))
        if isinstance(s, ComputeLet):
            formats[s.var] = s.protocol
        else:
            for b in s.targets:
                formats[b.var] = b.fmt
    g = DepGraph(nodes)
    definer: dict[str, int] = {}
    last_effect = None
    for n in nodes:
        for v in n.uses:
            if v in definer:
                g.data.add((definer[v], n.id))
        for v in n.defs:
            definer[v] = n.id
        if n.effect is not None:
            if last_effect is not None:
                g.safety.add((last_effect, n.id))
            last_effect = n.id
    return g


def ordered_reads(e, bound=frozenset()):
    """Free variables of a scalar expression in textual order (with repeats)."""
    if isinstance(e, Lit):
        return
    if isinstance(e, Ref):
        if e.name not in bound:
            yield e.name
    elif isinstance(e, Lookup):
        if e.name not in bound:
            yield e.name
        for a in e.indices:
            yield from ordered_reads(a, bound)
    elif isinstance(e, BinOp):
        yield from ordered_reads(e.lhs, bound)
        yield from ordered_reads(e.rhs, bound)
    elif isinstance(e, Reduce):
        yield from ordered_reads(e.init, bound)
        yield from ordered_reads(e.binder.bound, bound)
        yield from ordered_reads(e.body, bound | {e.binder.var})
    else:
        raise TypeError(f"not a scalar expression: {e!r}")


def size_reads(e, bound=frozenset()):
    """Variables used as a reduce bound or lookup index, not bound locally."""
    if isinstance(e, Lookup):
        for a in e.indices:
            if isinstance(a, Ref) and a.name not in bound:
                yield a.name
    elif isinstance(e, BinOp):
        yield from size_reads(e.lhs, bound)
        yield from size_reads(e.rhs, bound)
    elif isinstance(e, Reduce):
        yield from size_reads(e.init, bound)
        if isinstance(e.binder.bound, Ref) and e.binder.bound.name not in bound:
            yield e.binder.bound.name
        yield from size_reads(e.body, bound | {e.binder.var})
