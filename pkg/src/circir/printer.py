"""Canonical text form. ``parse_program(pretty_print(p)) == p``."""

from __future__ import annotations

from .ir import (
    BinOp, Binding, Call, CircuitFun, ComputeLet, If, IndexBound, Input, Let, Lit, Lookup, Output,
    Program, Reduce, Ref, Type,
)
from .parser import PREC

INDENT = "  "


def atom_str(a) -> str:
    if isinstance(a, Ref):
        return a.name
    x = a.value.item()
    if isinstance(x, bool):
        return "true" if x else "false"
    return str(x)


def type_str(t: Type) -> str:
    return f"{t.elem}[{', '.join(atom_str(d) for d in t.dims)}]"


def expr_str(e, min_prec: int = 0) -> str:
    if isinstance(e, (Lit, Ref)):
        return atom_str(e)
    if isinstance(e, Lookup):
        return f"{e.name}[{', '.join(atom_str(a) for a in e.indices)}]"
    if isinstance(e, Reduce):
        return (f"reduce({e.op}, {expr_str(e.init)}, {bound_str(e.binder)}, "
                f"{expr_str(e.body)})")
    if isinstance(e, BinOp):
        if e.op in ("min", "max"):
            return f"{e.op}({expr_str(e.lhs)}, {expr_str(e.rhs)})"
        p = PREC[e.op]
        s = f"{expr_str(e.lhs, p)} {e.op} {expr_str(e.rhs, p + 1)}"
        return f"({s})" if p < min_prec else s
    raise TypeError(f"not an expression: {e!r}")


def bound_str(ib: IndexBound) -> str:
    return f"{ib.var} < {atom_str(ib.bound)}"


def binders_str(binders) -> str:
    return "[" + ", ".join(bound_str(b) for b in binders) + "]"


def command_str(m) -> str:
    if isinstance(m, (Lit, Ref)):
        return atom_str(m)
    if isinstance(m, Call):
        sizes = f"<{', '.join(atom_str(a) for a in m.sizes)}>" if m.sizes else ""
        return f"{m.func}{sizes}({', '.join(atom_str(a) for a in m.args)})"
    if isinstance(m, Input):
        return f"input {m.host} {type_str(m.type)}"
    if isinstance(m, Output):
        return f"output {m.host} {atom_str(m.arg)}"
    raise TypeError(f"not a command: {m!r}")


def binding_str(b: Binding) -> str:
    return f"{b.var}@{b.fmt}"


def stmt_lines(s, depth: int) -> list[str]:
    pad = INDENT * depth
    if isinstance(s, Let):
        if len(s.targets) == 1:
            lhs = binding_str(s.targets[0])
        else:
            lhs = "(" + ", ".join(binding_str(b) for b in s.targets) + ")"
        return [f"{pad}val {lhs} = {command_str(s.command)};"]
    if isinstance(s, ComputeLet):
        # Without brackets an atom body would re-parse as a plain transfer.
        need = s.binders or isinstance(s.body, (Lit, Ref))
        binders = binders_str(s.binders) if need else ""
        return [f"{pad}val {s.var}{binders}@{s.protocol} = {expr_str(s.body)};"]
    if isinstance(s, If):
        lines = [f"{pad}if {atom_str(s.cond)} {{"]
        for t in s.then:
            lines += stmt_lines(t, depth + 1)
        lines.append(f"{pad}}} else {{")
        for t in s.orelse:
            lines += stmt_lines(t, depth + 1)
        lines.append(f"{pad}}}")
        return lines
    raise TypeError(f"not a statement: {s!r}")


def params_str(ps) -> str:
    return "(" + ", ".join(f"{p.name}: {type_str(p.type)}" for p in ps) + ")"


def decl_str(d) -> str:
    sizes = f"<{', '.join(d.sizes)}>" if d.sizes else ""
    ret = "return" + (" " + ", ".join(d.returns) if d.returns else "")
    if isinstance(d, CircuitFun):
        head = f"circuit fun {d.name}{sizes}@{d.protocol}{params_str(d.inputs)} -> {params_str(d.outputs)}"
        body = [f"{INDENT}let {c.target}{binders_str(c.binders)} = {expr_str(c.body)};" for c in d.body]
    else:
        head = f"fun {d.name}{sizes}{params_str(d.inputs)} -> {params_str(d.outputs)}"
        body = [line for s in d.body for line in stmt_lines(s, 1)]
    if not body:
        return f"{head} {{ {ret} }}"
    return "\n".join([head + " {", *body, INDENT + ret, "}"])


def pretty_print(p: Program) -> str:
    parts = []
    if p.hosts:
        parts.append(f"host {', '.join(p.hosts)};")
    parts += [decl_str(d) for d in p.decls]
    return "\n\n".join(parts) + "\n"
