"""Abstract syntax of the IR.

Every node is a frozen dataclass.  Source spans ride along for diagnostics
but are excluded from equality, so two trees parsed from differently
formatted text compare equal.

Names (variables, hosts, functions) are plain strings.  The variable ``_``
is a wildcard: binding it discards the value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from .values import Value


@dataclass(frozen=True)
class Span:
    start: int
    end: int
    line: int
    col: int


def _span():
    return field(default=None, compare=False, repr=False)


WILDCARD = "_"


# -- protocols ---------------------------------------------------------------


@dataclass(frozen=True)
class ProtocolInfo:
    name: str
    can_compute: bool
    can_store: bool
    min_hosts: int
    max_hosts: int | None = None

    @property
    def kind(self) -> str:
        if self.can_compute and self.can_store:
            return "both"
        return "computation" if self.can_compute else "storage"


# Registry of protocol names known to the front end.  Backends for the
# computation-capable entries live in circir.runtime.backends.
PROTOCOLS: dict[str, ProtocolInfo] = {
    "Local": ProtocolInfo("Local", True, True, 1, 1),
    "Repl": ProtocolInfo("Repl", True, True, 1),
    "MPC": ProtocolInfo("MPC", True, True, 2),
    "Commit": ProtocolInfo("Commit", False, True, 2),
}


@dataclass(frozen=True)
class Protocol:
    """A protocol or storage-format literal such as ``MPC(Server, Client)``.

    ``hosts == ()`` is the bare form (``@MPC``) and stands for every host of
    the program.  For ``Commit`` the first host is the owner and the rest
    are verifiers.
    """

    name: str
    hosts: tuple[str, ...] = ()
    span: Span | None = _span()

    @property
    def info(self) -> ProtocolInfo | None:
        return PROTOCOLS.get(self.name)

    def resolve(self, universe: tuple[str, ...]) -> Protocol:
        if self.hosts or not universe:
            return self
        return Protocol(self.name, tuple(universe), self.span)

    def __str__(self):
        if not self.hosts:
            return self.name
        if self.name == "Commit":
            owner, *rest = self.hosts
            return f"Commit({owner}; {', '.join(rest)})" if rest else f"Commit({owner};)"
        return f"{self.name}({', '.join(self.hosts)})"


# -- types and atoms ---------------------------------------------------------


@dataclass(frozen=True)
class Lit:
    value: Value
    span: Span | None = _span()


@dataclass(frozen=True)
class Ref:
    name: str
    span: Span | None = _span()


Atom = Union[Lit, Ref]


@dataclass(frozen=True)
class Type:
    elem: str
    dims: tuple[Atom, ...] = ()
    span: Span | None = _span()

    @property
    def rank(self) -> int:
        return len(self.dims)


def same_dim(a: Atom, b: Atom) -> bool:
    """Nominal equality of two size atoms."""
    if isinstance(a, Ref) and isinstance(b, Ref):
        return a.name == b.name
    if isinstance(a, Lit) and isinstance(b, Lit):
        return a.value == b.value
    return False


def same_type(a: Type, b: Type) -> bool:
    return a.elem == b.elem and a.rank == b.rank and all(map(same_dim, a.dims, b.dims))


# -- scalar expressions ------------------------------------------------------


@dataclass(frozen=True)
class IndexBound:
    var: str
    bound: Atom
    span: Span | None = _span()


@dataclass(frozen=True)
class Lookup:
    name: str
    indices: tuple[Atom, ...]
    span: Span | None = _span()


@dataclass(frozen=True)
class BinOp:
    op: str
    lhs: ScalarExpr
    rhs: ScalarExpr
    span: Span | None = _span()


@dataclass(frozen=True)
class Reduce:
    op: str
    init: ScalarExpr
    binder: IndexBound
    body: ScalarExpr
    span: Span | None = _span()


ScalarExpr = Union[Lit, Ref, Lookup, BinOp, Reduce]


# -- commands and statements -------------------------------------------------


@dataclass(frozen=True)
class Call:
    func: str
    sizes: tuple[Atom, ...]
    args: tuple[Atom, ...]
    span: Span | None = _span()


@dataclass(frozen=True)
class Input:
    host: str
    type: Type
    span: Span | None = _span()


@dataclass(frozen=True)
class Output:
    host: str
    arg: Atom
    span: Span | None = _span()


Command = Union[Lit, Ref, Call, Input, Output]


@dataclass(frozen=True)
class CircuitStmt:
    target: str
    binders: tuple[IndexBound, ...]
    body: ScalarExpr
    span: Span | None = _span()


@dataclass(frozen=True)
class Binding:
    var: str
    fmt: Protocol
    span: Span | None = _span()


@dataclass(frozen=True)
class Let:
    """``val x@F = m``.  Calls may bind several results (or none)."""

    targets: tuple[Binding, ...]
    command: Command
    span: Span | None = _span()


@dataclass(frozen=True)
class ComputeLet:
    """Surface-only: ``val x[i < n]@P = e`` computes inline on protocol P.

    The result is stored in P's own storage format.
    """

    var: str
    protocol: Protocol
    binders: tuple[IndexBound, ...]
    body: ScalarExpr
    span: Span | None = _span()


@dataclass(frozen=True)
class If:
    cond: Atom
    then: tuple[Stmt, ...]
    orelse: tuple[Stmt, ...] = ()
    span: Span | None = _span()


Stmt = Union[Let, ComputeLet, If]


# -- declarations ------------------------------------------------------------


@dataclass(frozen=True)
class Param:
    name: str
    type: Type
    span: Span | None = _span()


@dataclass(frozen=True)
class CircuitFun:
    name: str
    sizes: tuple[str, ...]
    protocol: Protocol
    inputs: tuple[Param, ...]
    outputs: tuple[Param, ...]
    body: tuple[CircuitStmt, ...]
    returns: tuple[str, ...]
    span: Span | None = _span()


@dataclass(frozen=True)
class Fun:
    name: str
    sizes: tuple[str, ...]
    inputs: tuple[Param, ...]
    outputs: tuple[Param, ...]
    body: tuple[Stmt, ...]
    returns: tuple[str, ...]
    span: Span | None = _span()


Decl = Union[CircuitFun, Fun]


@dataclass(frozen=True)
class Program:
    decls: tuple[Decl, ...]
    hosts: tuple[str, ...] = ()
    entry: str = "main"

    def lookup(self, name: str) -> Decl | None:
        for d in self.decls:
            if d.name == name:
                return d
        return None

    def universe(self) -> tuple[str, ...]:
        """Declared hosts, or every host mentioned in order of appearance."""
        if self.hosts:
            return self.hosts
        seen: dict[str, None] = {}
        for h in mentioned_hosts(self):
            seen.setdefault(h)
        return tuple(seen)


# -- helpers -----------------------------------------------------------------


def atom_vars(a: Atom) -> set[str]:
    return {a.name} if isinstance(a, Ref) else set()


def free_vars(e: ScalarExpr) -> set[str]:
    if isinstance(e, Lit):
        return set()
    if isinstance(e, Ref):
        return {e.name}
    if isinstance(e, Lookup):
        out = {e.name}
        for a in e.indices:
            out |= atom_vars(a)
        return out
    if isinstance(e, BinOp):
        return free_vars(e.lhs) | free_vars(e.rhs)
    if isinstance(e, Reduce):
        body = free_vars(e.body) - {e.binder.var}
        return free_vars(e.init) | atom_vars(e.binder.bound) | body
    raise TypeError(f"not a scalar expression: {e!r}")


def comprehension_vars(binders, body: ScalarExpr) -> set[str]:
    """Free variables of ``x[binders] = body`` (binder bounds included)."""
    out = free_vars(body) - {b.var for b in binders}
    for b in binders:
        out |= atom_vars(b.bound)
    return out


def type_vars(t: Type) -> set[str]:
    out: set[str] = set()
    for d in t.dims:
        out |= atom_vars(d)
    return out


def command_vars(m: Command) -> set[str]:
    if isinstance(m, (Lit, Ref)):
        return atom_vars(m)
    if isinstance(m, Call):
        out: set[str] = set()
        for a in m.sizes + m.args:
            out |= atom_vars(a)
        return out
    if isinstance(m, Input):
        return type_vars(m.type)
    if isinstance(m, Output):
        return atom_vars(m.arg)
    raise TypeError(f"not a command: {m!r}")


def stmt_uses(s: Stmt) -> set[str]:
    """Variables read by a statement, including inside nested branches."""
    if isinstance(s, Let):
        return command_vars(s.command)
    if isinstance(s, ComputeLet):
        return comprehension_vars(s.binders, s.body)
    out = atom_vars(s.cond)
    for t in s.then + s.orelse:
        out |= stmt_uses(t)
    return out


def stmt_defs(s: Stmt) -> list[str]:
    if isinstance(s, Let):
        return [b.var for b in s.targets if b.var != WILDCARD]
    if isinstance(s, ComputeLet):
        return [s.var]
    return []


def walk_stmts(stmts) -> Iterator[Stmt]:
    for s in stmts:
        yield s
        if isinstance(s, If):
            yield from walk_stmts(s.then)
            yield from walk_stmts(s.orelse)


def mentioned_hosts(p: Program) -> Iterator[str]:
    for d in p.decls:
        if isinstance(d, CircuitFun):
            yield from d.protocol.hosts
            continue
        for s in walk_stmts(d.body):
            if isinstance(s, Let):
                for b in s.targets:
                    yield from b.fmt.hosts
                if isinstance(s.command, (Input, Output)):
                    yield s.command.host
            elif isinstance(s, ComputeLet):
                yield from s.protocol.hosts


def has_computation(p: Program) -> bool:
    return any(
        isinstance(s, ComputeLet)
        for d in p.decls if isinstance(d, Fun)
        for s in walk_stmts(d.body)
    )
