"""Rewrite surface functions into strict IR with generated circuit functions."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..checker import Checker, VarInfo
from ..diagnostics import ParseError
from ..errors import InternalError
from ..ir import (
    Binding, Call, CircuitFun, CircuitStmt, ComputeLet, Fun, If, Let, Param, Program, Ref, Type,
    stmt_uses, type_vars, walk_stmts,
)
from .depgraph import build_dep_graph, ordered_reads, size_reads
from .schedule import Block, cross_edges, num_compute_blocks, schedule


@dataclass
class Metrics:
    num_blocks: int = 0
    num_cross_edges: int = 0

    def report(self) -> str:
        return f"num_blocks: {self.num_blocks}\nnum_cross_edges: {self.num_cross_edges}\n"


@dataclass
class _Emitter:
    program: Program
    checker: Checker
    universe: tuple
    taken: set
    metrics: Metrics = field(default_factory=Metrics)

    def fresh(self, fun: str) -> str:
        k = 0
        while f"blk_{fun}_{k}" in self.taken:
            k += 1
        name = f"blk_{fun}_{k}"
        self.taken.add(name)
        return name

    def fun(self, d: Fun) -> tuple[Fun, list[CircuitFun]]:
        self.current = d
        self.new: list[CircuitFun] = []
        # uses by any statement, keyed by identity, for output liveness
        self.uses = [(id(s), stmt_uses(s)) for s in walk_stmts(d.body)]
        scope = dict(self.checker.param_scopes.get(d.name, {}))
        body = self.stmts(d.body, scope)
        return replace(d, body=body), self.new

    def stmts(self, stmts, scope: dict) -> tuple:
        out: list = []
        region: list = []
        for s in stmts:
            if isinstance(s, If):
                out += self.region(region, scope)
                region = []
                then = self.stmts(s.then, dict(scope))
                orelse = self.stmts(s.orelse, dict(scope))
                out.append(If(s.cond, then, orelse, s.span))
            else:
                region.append(s)
        out += self.region(region, scope)
        return tuple(out)

    def region(self, region: list, scope: dict) -> list:
        if not region:
            return []
        formats = {k: v.fmt for k, v in scope.items() if v.kind in ("var", "param")}
        g = build_dep_graph(region, formats, self.program, self.universe)
        blocks = schedule(g)
        self.metrics.num_blocks += num_compute_blocks(blocks)
        self.metrics.num_cross_edges += cross_edges(g, blocks)
        before = dict(scope)
        for s in region:
            for var, info in self.checker.bindings.get(id(s), ()):
                scope[var] = info
        out = []
        for b in blocks:
            stmts = [region[k] for k in b.nodes]
            out.append(self.block(b, stmts, scope, before) if b.is_compute else stmts[0])
        return out

    def block(self, b: Block, stmts: list[ComputeLet], scope: dict, before: dict) -> Let:
        fun_sizes = set(self.current.sizes)
        defined = {s.var for s in stmts}
        sizes: dict[str, None] = {}
        inputs: dict[str, None] = {}
        for s in stmts:
            binders = frozenset(ib.var for ib in s.binders)
            for ib in s.binders:
                if isinstance(ib.bound, Ref):
                    sizes.setdefault(ib.bound.name)
            for v in size_reads(s.body, binders):
                sizes.setdefault(v)
        for s in stmts:
            binders = frozenset(ib.var for ib in s.binders)
            for v in ordered_reads(s.body, binders):
                if v in fun_sizes:
                    sizes.setdefault(v)
                elif v not in defined and v not in sizes:
                    inputs.setdefault(v)
        in_types = {}
        for v in inputs:
            info = scope.get(v) or before.get(v)
            if info is None:
                raise InternalError(f"splitter: no type for block input {v!r}")
            in_types[v] = info.type
            for d in type_vars(info.type):
                sizes.setdefault(d)
        inputs = [v for v in inputs if v not in sizes]
        params = [Param(v, Type(in_types[v].elem, in_types[v].dims)) for v in inputs]
        block_ids = {id(s) for s in stmts}
        live = set()
        for sid, used in self.uses:
            if sid not in block_ids:
                live |= used
        live |= set(self.current.returns)
        outs = [s for s in stmts if s.var in live]
        types = {}
        for s in stmts:
            info: VarInfo = scope.get(s.var)
            if info is None:
                raise InternalError(f"splitter: no type for {s.var!r}")
            types[s.var] = info.type
        name = self.fresh(self.current.name)
        circuit = CircuitFun(
            name, tuple(sizes), b.protocol,
            tuple(params),
            tuple(Param(s.var, Type(types[s.var].elem, types[s.var].dims)) for s in outs),
            tuple(CircuitStmt(s.var, s.binders, s.body, s.span) for s in stmts),
            tuple(s.var for s in outs),
        )
        self.new.append(circuit)
        call = Call(name, tuple(Ref(v) for v in sizes), tuple(Ref(v) for v in inputs))
        return Let(tuple(Binding(s.var, s.protocol) for s in outs), call, stmts[0].span)


def split(program: Program) -> tuple[Program, Metrics]:
    """Group inline computation into circuit functions.

    The input must pass surface checking; the result passes strict checking
    and behaves identically on every script.
    """
    checker = Checker(program, "surface")
    diags = [d for d in checker.run() if d.is_error]
    if diags:
        raise ParseError(diags)
    universe = program.universe()
    em = _Emitter(program, checker, universe, {d.name for d in program.decls})
    decls = []
    for d in program.decls:
        if isinstance(d, Fun):
            d, new = em.fun(d)
            decls.extend(new)
        decls.append(d)
    hosts = program.hosts
    if len(decls) != len(program.decls) and not hosts:
        # moving protocol mentions around must not reorder the host universe
        hosts = universe
    return Program(tuple(decls), hosts, program.entry), em.metrics


def emit_ir(program: Program) -> Program:
    return split(program)[0]
