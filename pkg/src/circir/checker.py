"""Static well-formedness: scoping, symbolic shapes, protocol structure.

Sizes are compared nominally: ``n`` matches ``n``, ``3`` matches ``3``, and
nothing else is provably equal.  Rebinding a live name is an error, so a
variable name identifies its definition within a function.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import Diagnostic, error
from .ir import (
    PROTOCOLS, WILDCARD, BinOp, Call, CircuitFun, ComputeLet, Fun, If, Input, Let,
    Lit, Lookup, Output, Program, Protocol, Reduce, Ref, Type, same_dim, same_type,
)
from .parser import COMPUTE_IN_FUN, MODES
from .printer import type_str
from .values import result_elem

INT = Type("int")
BOOL = Type("bool")


@dataclass(frozen=True)
class VarInfo:
    type: Type
    kind: str  # "size" | "index" | "param" | "var"
    fmt: Protocol | None = None
    computed: bool = False  # bound by an inline computation (surface only)
    bound: object = None  # index binders: the upper bound atom


def _plural(n: int) -> str:
    return f"{n} index" if n == 1 else f"{n} indices"


def subst(t: Type, mapping: dict) -> Type:
    dims = tuple(mapping.get(d.name, d) if isinstance(d, Ref) else d for d in t.dims)
    return Type(t.elem, dims, t.span)


class Checker:
    def __init__(self, program: Program, mode: str = "strict"):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self.program = program
        self.mode = mode
        self.universe = program.universe()
        self.diags: list[Diagnostic] = []
        # id(stmt) -> [(var, VarInfo)] for every binding statement seen
        self.bindings: dict[int, list[tuple[str, VarInfo]]] = {}
        # fun name -> scope of its parameters and size parameters
        self.param_scopes: dict[str, dict[str, VarInfo]] = {}

    def err(self, message: str, node=None):
        self.diags.append(error(message, getattr(node, "span", None)))

    # -- program ---------------------------------------------------------------

    def run(self) -> list[Diagnostic]:
        p = self.program
        if len(set(p.hosts)) != len(p.hosts):
            self.err("duplicate host in host declaration")
        seen = set()
        for d in p.decls:
            if d.name in seen:
                self.err(f"duplicate declaration {d.name!r}", d)
            seen.add(d.name)
        entry = p.lookup(p.entry)
        if entry is None:
            self.err(f"entry function {p.entry!r} not found")
        elif isinstance(entry, CircuitFun):
            self.err(f"entry {p.entry!r} must be a non-circuit function", entry)
        elif entry.inputs:
            self.err(f"entry function {p.entry!r} must not take value parameters", entry)
        for d in p.decls:
            if isinstance(d, CircuitFun):
                self.check_circuit(d)
            else:
                self.check_fun(d)
        return self.diags

    def check_protocol(self, proto: Protocol, need: str):
        info = PROTOCOLS.get(proto.name)
        if info is None:
            self.err(f"unknown protocol {proto.name!r}", proto)
            return
        hosts = proto.resolve(self.universe).hosts
        if len(hosts) < info.min_hosts or (info.max_hosts is not None and len(hosts) > info.max_hosts):
            if info.max_hosts == info.min_hosts:
                want = f"exactly {info.min_hosts}"
            else:
                want = f"at least {info.min_hosts}"
            self.err(f"{proto.name} requires {want} host{'s' if info.min_hosts != 1 else ''}", proto)
        if len(set(hosts)) != len(hosts):
            self.err(f"duplicate host in {proto}", proto)
        for h in hosts:
            self.check_host(h, proto)
        if need == "compute" and not info.can_compute:
            self.err(f"{proto.name} is not a computation protocol", proto)
        if need == "store" and not info.can_store:
            self.err(f"{proto.name} is not a storage protocol", proto)

    def check_host(self, host: str, node):
        if self.program.hosts and host not in self.program.hosts:
            self.err(f"unknown host {host!r}", node)

    def bind(self, scope: dict, name: str, info: VarInfo, node) -> bool:
        if name == WILDCARD:
            return True
        if name in scope:
            self.err(f"{name!r} is already bound", node)
            return False
        scope[name] = info
        return True

    def size_atom(self, a, scope: dict, *, allow_vars: bool, what: str = "size") -> bool:
        """A dimension, bound, or size argument: non-negative int."""
        if isinstance(a, Lit):
            x = a.value.item()
            if isinstance(x, bool) or x < 0:
                self.err(f"{what} must be a non-negative integer", a)
                return False
            return True
        info = scope.get(a.name)
        if info is None:
            self.err(f"unknown size {a.name!r}", a)
            return False
        if info.kind == "size":
            return True
        if allow_vars and info.kind in ("var", "param") and not info.computed and same_type(info.type, INT):
            return True
        if allow_vars:
            self.err(f"{what} {a.name!r} must be a size parameter, a literal, or an int variable", a)
        else:
            self.err(f"{what} {a.name!r} must be a size parameter or a literal", a)
        return False

    def check_type(self, t: Type, scope: dict, *, allow_vars: bool) -> bool:
        return all([self.size_atom(d, scope, allow_vars=allow_vars) for d in t.dims])

    def params(self, params, scope: dict, *, bind: bool):
        for prm in params:
            self.check_type(prm.type, scope, allow_vars=False)
        if bind:
            for prm in params:
                self.bind(scope, prm.name, VarInfo(prm.type, "param"), prm)

    def check_returns(self, d, scope: dict):
        if len(d.returns) != len(d.outputs):
            self.err(f"{d.name!r} returns {len(d.returns)} values but declares {len(d.outputs)} outputs", d)
        for name, out in zip(d.returns, d.outputs):
            info = scope.get(name)
            if info is None or info.kind in ("size", "index"):
                self.err(f"return of unbound variable {name!r}", d)
            elif not same_type(info.type, out.type):
                self.err(f"return {name!r} has type {type_str(info.type)}, "
                         f"declared {type_str(out.type)}", out)

    def size_scope(self, d) -> dict:
        scope: dict[str, VarInfo] = {}
        for s in d.sizes:
            self.bind(scope, s, VarInfo(INT, "size"), d)
        return scope

    # -- circuit functions -----------------------------------------------------

    def check_circuit(self, d: CircuitFun):
        scope = self.size_scope(d)
        self.check_protocol(d.protocol, "compute")
        self.params(d.outputs, scope, bind=False)
        self.params(d.inputs, scope, bind=True)
        for cs in d.body:
            info = self.comprehension(cs.binders, cs.body, scope, surface=False)
            if info is not None:
                self.bind(scope, cs.target, info, cs)
            elif cs.target in scope:
                self.err(f"{cs.target!r} is already bound", cs)
        self.check_returns(d, scope)

    def comprehension(self, binders, body, scope: dict, *, surface: bool) -> VarInfo | None:
        inner = dict(scope)
        ok = True
        for ib in binders:
            ok &= self.size_atom(ib.bound, scope, allow_vars=surface, what="bound")
            ok &= self.bind(inner, ib.var, VarInfo(INT, "index", bound=ib.bound), ib)
        elem = self.expr(body, inner, surface=surface)
        if elem is None or not ok:
            return None
        return VarInfo(Type(elem, tuple(ib.bound for ib in binders)), "var", computed=surface)

    def expr(self, e, scope: dict, *, surface: bool) -> str | None:
        if isinstance(e, Lit):
            return e.value.elem
        if isinstance(e, Ref):
            info = scope.get(e.name)
            if info is None:
                self.err(f"unknown variable {e.name!r}", e)
                return None
            if info.type.rank:
                self.err(f"rank mismatch: expected {_plural(info.type.rank)} for {e.name!r}", e)
                return None
            return info.type.elem
        if isinstance(e, Lookup):
            return self.lookup(e, scope, surface=surface)
        if isinstance(e, BinOp):
            a = self.expr(e.lhs, scope, surface=surface)
            b = self.expr(e.rhs, scope, surface=surface)
            if a is None or b is None:
                return None
            r = result_elem(e.op, a, b)
            if r is None:
                self.err(f"operator {e.op!r} not defined on ({a}, {b})", e)
            return r
        if isinstance(e, Reduce):
            init = self.expr(e.init, scope, surface=surface)
            ok = self.size_atom(e.binder.bound, scope, allow_vars=surface, what="bound")
            inner = dict(scope)
            ok &= self.bind(inner, e.binder.var, VarInfo(INT, "index", bound=e.binder.bound), e.binder)
            body = self.expr(e.body, inner, surface=surface)
            if init is None or body is None or not ok:
                return None
            if init != body:
                self.err(f"reduce init has type {init} but body has type {body}", e)
                return None
            if result_elem(e.op, init, body) != init:
                self.err(f"reduce operator {e.op!r} does not map ({init}, {init}) to {init}", e)
                return None
            return init
        raise TypeError(f"not an expression: {e!r}")

    def lookup(self, e: Lookup, scope: dict, *, surface: bool) -> str | None:
        info = scope.get(e.name)
        if info is None:
            self.err(f"unknown variable {e.name!r}", e)
            return None
        rank = info.type.rank
        if len(e.indices) != rank:
            self.err(f"rank mismatch: expected {_plural(rank)}", e)
            return None
        ok = True
        for k, (idx, dim) in enumerate(zip(e.indices, info.type.dims)):
            if isinstance(idx, Lit):
                x = idx.value.item()
                if isinstance(x, bool):
                    self.err("index must be an integer", idx)
                    ok = False
                elif x < 0 or (isinstance(dim, Lit) and x >= dim.value.item()):
                    self.err(f"index {x} out of bounds for dimension {k} of {e.name!r}", idx)
                    ok = False
                continue
            iinfo = scope.get(idx.name)
            if iinfo is None:
                self.err(f"unknown variable {idx.name!r}", idx)
                ok = False
            elif iinfo.kind == "index":
                bound = iinfo.bound
                fits = same_dim(bound, dim) or (
                    isinstance(bound, Lit) and isinstance(dim, Lit) and bound.value.item() <= dim.value.item())
                if not fits:
                    self.err(f"shape mismatch: index {idx.name!r} ranges below "
                             f"{_atom(bound)} but dimension {k} of {e.name!r} has size {_atom(dim)}", idx)
                    ok = False
            elif iinfo.kind == "size":
                pass
            elif surface and not iinfo.computed and same_type(iinfo.type, INT):
                pass
            else:
                self.err(f"index {idx.name!r} must be a binder, size parameter, or literal", idx)
                ok = False
        return info.type.elem if ok else None

    # -- non-circuit functions -------------------------------------------------

    def check_fun(self, d: Fun):
        scope = self.size_scope(d)
        self.params(d.outputs, scope, bind=False)
        self.params(d.inputs, scope, bind=True)
        self.param_scopes[d.name] = dict(scope)
        self.stmts(d.body, scope)
        self.check_returns(d, scope)

    def stmts(self, stmts, scope: dict):
        for s in stmts:
            if isinstance(s, Let):
                self.let(s, scope)
            elif isinstance(s, ComputeLet):
                if self.mode == "strict":
                    self.err(COMPUTE_IN_FUN, s)
                self.check_protocol(s.protocol, "compute")
                info = self.comprehension(s.binders, s.body, scope, surface=True)
                if info is not None:
                    info = VarInfo(info.type, "var", s.protocol, computed=True)
                    self.bindings[id(s)] = [(s.var, info)]
                    self.bind(scope, s.var, info, s)
                elif s.var in scope:
                    self.err(f"{s.var!r} is already bound", s)
            elif isinstance(s, If):
                t = self.atom_type(s.cond, scope)
                if t is not None and not same_type(t, BOOL):
                    self.err(f"condition must be bool, got {type_str(t)}", s.cond)
                self.stmts(s.then, dict(scope))
                self.stmts(s.orelse, dict(scope))
            else:
                raise TypeError(f"not a statement: {s!r}")

    def atom_type(self, a, scope: dict) -> Type | None:
        if isinstance(a, Lit):
            return Type(a.value.elem)
        info = scope.get(a.name)
        if info is None or info.kind == "index":
            self.err(f"unknown variable {a.name!r}", a)
            return None
        return info.type

    def let(self, s: Let, scope: dict):
        m = s.command
        results: list[Type] | None
        if isinstance(m, (Lit, Ref)):
            t = self.atom_type(m, scope)
            results = None if t is None else [t]
        elif isinstance(m, Input):
            self.check_host(m.host, m)
            results = [m.type] if self.check_type(m.type, scope, allow_vars=True) else None
        elif isinstance(m, Output):
            self.check_host(m.host, m)
            t = self.atom_type(m.arg, scope)
            results = None if t is None else [t]
        elif isinstance(m, Call):
            results = self.call(m, scope)
        else:
            raise TypeError(f"not a command: {m!r}")

        if results is not None and len(results) != len(s.targets):
            self.err(f"{len(s.targets)} bindings for {len(results)} results", s)
            results = None
        bound = []
        for k, b in enumerate(s.targets):
            self.check_protocol(b.fmt, "store")
            t = results[k] if results is not None else None
            if t is None:
                if b.var in scope:
                    self.err(f"{b.var!r} is already bound", b)
                continue
            info = VarInfo(t, "var", b.fmt)
            if self.bind(scope, b.var, info, b) and b.var != WILDCARD:
                bound.append((b.var, info))
        self.bindings[id(s)] = bound

    def call(self, m: Call, scope: dict) -> list[Type] | None:
        callee = self.program.lookup(m.func)
        if callee is None:
            self.err(f"unknown function {m.func!r}", m)
            return None
        ok = True
        if len(m.sizes) != len(callee.sizes):
            self.err(f"{m.func!r} expects {len(callee.sizes)} size arguments, got {len(m.sizes)}", m)
            ok = False
        if len(m.args) != len(callee.inputs):
            self.err(f"{m.func!r} expects {len(callee.inputs)} arguments, got {len(m.args)}", m)
            ok = False
        for a in m.sizes:
            ok &= self.size_atom(a, scope, allow_vars=True, what="size argument")
        if not ok:
            return None
        mapping = dict(zip(callee.sizes, m.sizes))
        for k, (a, prm) in enumerate(zip(m.args, callee.inputs)):
            t = self.atom_type(a, scope)
            want = subst(prm.type, mapping)
            if t is None:
                ok = False
            elif not same_type(t, want):
                self.err(f"argument {k + 1} of {m.func!r}: expected {type_str(want)}, got {type_str(t)}", a)
                ok = False
        if not ok:
            return None
        return [subst(o.type, mapping) for o in callee.outputs]


def _atom(a) -> str:
    if isinstance(a, Ref):
        return a.name
    return str(a.value.item())


def check_program(p: Program, mode: str = "strict") -> list[Diagnostic]:
    return Checker(p, mode).run()


def check_shapes(decl: CircuitFun, program: Program | None = None) -> list[Diagnostic]:
    """Check a single circuit function in isolation."""
    c = Checker(program or Program((decl,), entry=decl.name), "strict")
    c.check_circuit(decl)
    return c.diags

