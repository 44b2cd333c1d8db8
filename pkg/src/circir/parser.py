"""Recursive-descent parser for ``.cir`` text.

Two dialects share one grammar.  ``strict`` is the IR proper: non-circuit
functions may not compute.  ``surface`` additionally admits
``val x[i < n]@P = e`` statements, the splitter's input.  The strict parser
still builds those statements (so both modes produce the same tree) but
reports each one as an error.
"""

from __future__ import annotations

from .diagnostics import Diagnostic, ParseError, error
from .ir import (
    PROTOCOLS, BinOp, Binding, Call, CircuitFun, CircuitStmt, ComputeLet, Fun, If, IndexBound,
    Input, Let, Lit, Lookup, Output, Param, Program, Protocol, Reduce, Ref, Span, Type,
)
from .lexer import Token, tokenize
from .values import INT_MAX, Value

MODES = ("strict", "surface")
COMPUTE_IN_FUN = "computation not allowed in non-circuit function"

PREC = {"||": 1, "&&": 2, "^": 3, "==": 4, "!=": 4, "<": 5, "<=": 5,
        "+": 6, "-": 6, "*": 7, "/": 7, "%": 7}
REDUCE_OPS = frozenset(PREC) | {"min", "max"}
MAX_NESTING = 100
MAX_DIAGNOSTICS = 25


class _Fail(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


class _Parser:
    def __init__(self, tokens: list[Token], mode: str):
        self.toks = tokens
        self.pos = 0
        self.mode = mode
        self.diags: list[Diagnostic] = []
        self.depth = 0

    # -- token plumbing --

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, *kinds: str) -> bool:
        return self.tok.kind in kinds

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def accept(self, kind: str) -> Token | None:
        return self.advance() if self.at(kind) else None

    def fail(self, message: str, tok: Token | None = None):
        raise _Fail(error(message, (tok or self.tok).span))

    def expect(self, kind: str, what: str | None = None) -> Token:
        if not self.at(kind):
            found = "end of input" if self.at("eof") else repr(self.tok.text)
            self.fail(f"expected {what or repr(kind)}, found {found}")
        return self.advance()

    def ident(self, what: str = "identifier") -> str:
        return self.expect("ident", what).text

    def span(self, start: Token) -> Span:
        end = self.toks[self.pos - 1].span.end if self.pos > 0 else start.span.end
        return Span(start.span.start, max(end, start.span.start), start.span.line, start.span.col)

    def nest(self):
        parser = self

        class _Nest:
            def __enter__(self):
                parser.depth += 1
                if parser.depth > MAX_NESTING:
                    parser.fail("nesting too deep")

            def __exit__(self, *exc):
                parser.depth -= 1

        return _Nest()

    def record(self, diag: Diagnostic):
        if len(self.diags) < MAX_DIAGNOSTICS:
            self.diags.append(diag)

    def skip_to(self, stops: tuple[str, ...], consume: tuple[str, ...] = ()):
        """Statement-level resynchronisation: skip to a stop token at depth 0."""
        start = self.pos
        depth = 0
        while not self.at("eof"):
            if depth == 0 and self.at(*consume):
                self.advance()
                return
            if depth == 0 and self.at(*stops) and self.pos > start:
                return
            if self.at("{"):
                depth += 1
            elif self.at("}"):
                if depth == 0:
                    if self.pos == start:
                        self.advance()
                    return
                depth -= 1
            self.advance()

    # -- top level --

    def program(self) -> Program:
        hosts: list[str] = []
        decls = []
        while not self.at("eof"):
            if len(self.diags) >= MAX_DIAGNOSTICS:
                break
            try:
                if self.accept("host"):
                    hosts.append(self.ident("host name"))
                    while self.accept(","):
                        hosts.append(self.ident("host name"))
                    self.accept(";")
                elif self.at("circuit", "fun"):
                    decls.append(self.decl())
                else:
                    self.fail(f"expected declaration, found {self.tok.text or 'end of input'!r}")
            except _Fail as f:
                self.record(f.diag)
                self.skip_to(("circuit", "fun", "host"))
        return Program(tuple(decls), tuple(hosts))

    def decl(self):
        start = self.tok
        is_circuit = self.accept("circuit") is not None
        self.expect("fun")
        name = self.ident("function name")
        sizes = []
        if self.accept("<"):
            if not self.at(">"):
                sizes.append(self.ident("size parameter"))
                while self.accept(","):
                    sizes.append(self.ident("size parameter"))
            self.expect(">")
        proto = None
        if is_circuit:
            self.expect("@", "'@' and a protocol")
            proto = self.protocol(header=True)
        inputs = self.params()
        self.expect("->")
        outputs = self.params()
        self.expect("{")
        if is_circuit:
            body = self.circuit_body()
        else:
            body = self.stmts(top=True)
        returns = self.returns()
        self.expect("}")
        if is_circuit:
            return CircuitFun(name, tuple(sizes), proto, inputs, outputs, tuple(body), returns, self.span(start))
        return Fun(name, tuple(sizes), inputs, outputs, tuple(body), returns, self.span(start))

    def protocol(self, header: bool = False) -> Protocol:
        start = self.tok
        name = self.ident("protocol name")
        if name not in PROTOCOLS:
            self.fail(f"unknown protocol {name!r}", start)
        hosts: list[str] = []
        if self.at("(") and (not header or self._host_list_ahead()):
            self.advance()
            if not self.at(")"):
                hosts.append(self.ident("host name"))
                if self.at(";"):
                    if name != "Commit":
                        self.fail("';' separates a commitment owner from its verifiers")
                    self.advance()
                    if not self.at(")"):
                        hosts.append(self.ident("host name"))
                while self.accept(","):
                    hosts.append(self.ident("host name"))
            self.expect(")")
        return Protocol(name, tuple(hosts), self.span(start))

    def _host_list_ahead(self) -> bool:
        # `@MPC(Server, Client)(a: int)` vs. bare `@MPC(a: int)`
        a, b = self.peek(1), self.peek(2)
        if a.kind == "ident":
            return b.kind in (",", ")", ";")
        return a.kind == ")" and b.kind == "("

    def params(self) -> tuple[Param, ...]:
        self.expect("(")
        out = []
        while not self.at(")"):
            if out:
                self.expect(",", "',' or ')'")
            start = self.tok
            name = self.ident("parameter name")
            self.expect(":")
            out.append(Param(name, self.type(), self.span(start)))
        self.expect(")")
        return tuple(out)

    def type(self) -> Type:
        start = self.tok
        if not self.at("int", "bool"):
            self.fail("expected a type ('int' or 'bool')")
        elem = self.advance().kind
        dims = []
        if self.accept("["):
            while not self.at("]"):
                if dims:
                    self.expect(",", "',' or ']'")
                if self.at("num"):
                    dims.append(self.int_lit())
                else:
                    t = self.tok
                    dims.append(Ref(self.ident("size"), t.span))
            self.expect("]")
        return Type(elem, tuple(dims), self.span(start))

    def returns(self) -> tuple[str, ...]:
        self.expect("return")
        out = []
        if self.at("ident"):
            out.append(self.ident())
            while self.accept(","):
                out.append(self.ident("returned variable"))
        return tuple(out)

    # -- bodies --

    def circuit_body(self) -> list[CircuitStmt]:
        body = []
        while not self.at("return", "}", "eof"):
            try:
                start = self.expect("let", "'let' or 'return'")
                target = self.ident("variable")
                binders = self.binders() if self.at("[") else ()
                self.expect("=")
                e = self.expr()
                self.expect(";")
                body.append(CircuitStmt(target, binders, e, self.span(start)))
            except _Fail as f:
                self.record(f.diag)
                self.skip_to(("return", "let"), consume=(";",))
        return body

    def stmts(self, top: bool) -> list:
        out = []
        while not self.at("}", "eof") and not (top and self.at("return")):
            try:
                out.append(self.stmt())
            except _Fail as f:
                self.record(f.diag)
                self.skip_to(("return", "val", "if"), consume=(";",))
        return out

    def stmt(self):
        if self.at("if"):
            return self.if_stmt()
        if self.at("val"):
            return self.let_stmt()
        self.fail(f"expected a statement, found {self.tok.text or 'end of input'!r}")

    def if_stmt(self) -> If:
        start = self.advance()
        cond = self.atom()
        with self.nest():
            then = self.block()
            orelse = ()
            if self.accept("else"):
                orelse = self.block()
        return If(cond, then, orelse, self.span(start))

    def block(self) -> tuple:
        self.expect("{")
        body = self.stmts(top=False)
        self.expect("}")
        return tuple(body)

    def binding(self) -> Binding:
        start = self.tok
        var = self.ident("variable")
        self.expect("@")
        return Binding(var, self.protocol(), self.span(start))

    def let_stmt(self):
        start = self.advance()
        if self.accept("("):
            targets = []
            while not self.at(")"):
                if targets:
                    self.expect(",", "',' or ')'")
                targets.append(self.binding())
            self.expect(")")
            self.expect("=")
            call_tok = self.tok
            cmd = self.rhs()
            if not isinstance(cmd, Call):
                self.fail("a parenthesised binding list requires a function call", call_tok)
            self.expect(";")
            return Let(tuple(targets), cmd, self.span(start))

        var_tok = self.tok
        var = self.ident("variable")
        binders = None
        if self.at("["):
            binders = self.binders()
        self.expect("@")
        proto = self.protocol()
        self.expect("=")
        rhs_tok = self.tok
        if binders is not None:
            body = self.expr()
        else:
            rhs = self.rhs()
            if isinstance(rhs, (Lit, Ref, Call, Input, Output)):
                self.expect(";")
                return Let((Binding(var, proto, var_tok.span),), rhs, self.span(start))
            body, binders = rhs, ()
        self.expect(";")
        if self.mode == "strict":
            self.record(error(COMPUTE_IN_FUN, rhs_tok.span))
        return ComputeLet(var, proto, tuple(binders), body, self.span(start))

    def rhs(self):
        start = self.tok
        if self.accept("input"):
            host = self.ident("host name")
            return Input(host, self.type(), self.span(start))
        if self.accept("output"):
            host = self.ident("host name")
            return Output(host, self.atom(), self.span(start))
        if self.at("ident") and self.peek().kind == "(":
            return self.call()
        if self.at("ident") and self.peek().kind == "<":
            saved, ndiags = self.pos, len(self.diags)
            try:
                return self.call()
            except _Fail:
                self.pos = saved
                del self.diags[ndiags:]
        return self.expr()

    def call(self) -> Call:
        start = self.tok
        name = self.ident("function name")
        sizes = []
        if self.accept("<"):
            while not self.at(">"):
                if sizes:
                    self.expect(",", "',' or '>'")
                sizes.append(self.atom())
            self.expect(">")
        self.expect("(")
        args = []
        while not self.at(")"):
            if args:
                self.expect(",", "',' or ')'")
            args.append(self.atom())
        self.expect(")")
        return Call(name, tuple(sizes), tuple(args), self.span(start))

    def binders(self) -> tuple[IndexBound, ...]:
        self.expect("[")
        out = []
        while not self.at("]"):
            if out:
                self.expect(",", "',' or ']'")
            out.append(self.index_bound())
        self.expect("]")
        return tuple(out)

    def index_bound(self) -> IndexBound:
        start = self.tok
        var = self.ident("index variable")
        self.expect("<")
        return IndexBound(var, self.atom(), self.span(start))

    # -- expressions --

    def int_lit(self, negative: bool = False) -> Lit:
        t = self.expect("num", "integer literal")
        v = -int(t.text) if negative else int(t.text)
        if not -INT_MAX - 1 <= v <= INT_MAX:
            self.fail("integer literal out of 64-bit range", t)
        return Lit(Value.scalar(v), t.span)

    def atom(self):
        t = self.tok
        if self.at("num"):
            return self.int_lit()
        if self.at("-") and self.peek().kind == "num":
            self.advance()
            lit = self.int_lit(negative=True)
            return Lit(lit.value, self.span(t))
        if self.at("true", "false"):
            self.advance()
            return Lit(Value.scalar(t.kind == "true"), t.span)
        if self.at("ident"):
            self.advance()
            return Ref(t.text, t.span)
        self.fail(f"expected a literal or variable, found {t.text or 'end of input'!r}")

    def expr(self, min_prec: int = 1):
        with self.nest():
            start = self.tok
            lhs = self.primary()
            while self.tok.kind in PREC and PREC[self.tok.kind] >= min_prec:
                op = self.advance().kind
                rhs = self.expr(PREC[op] + 1)
                lhs = BinOp(op, lhs, rhs, self.span(start))
            return lhs

    def primary(self):
        start = self.tok
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.accept("reduce"):
            self.expect("(")
            if self.tok.kind not in REDUCE_OPS:
                self.fail("expected a reduction operator")
            op = self.advance().kind
            self.expect(",")
            init = self.expr()
            self.expect(",")
            ib = self.index_bound()
            self.expect(",")
            body = self.expr()
            self.expect(")")
            return Reduce(op, init, ib, body, self.span(start))
        if self.at("min", "max"):
            op = self.advance().kind
            self.expect("(")
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect(")")
            return BinOp(op, a, b, self.span(start))
        if self.at("ident") and self.peek().kind == "[":
            name = self.advance().text
            self.advance()
            idx = []
            while not self.at("]"):
                if idx:
                    self.expect(",", "',' or ']'")
                idx.append(self.atom())
            self.expect("]")
            return Lookup(name, tuple(idx), self.span(start))
        return self.atom()


def parse_program(text, mode: str = "strict") -> Program:
    """Parse ``.cir`` source.  Raises ParseError (never anything else)."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError([error(f"input is not valid UTF-8 ({e.reason})", Span(e.start, e.end, 1, 1))])
    tokens, diags = tokenize(text)
    if diags:
        raise ParseError(diags[:MAX_DIAGNOSTICS])
    p = _Parser(tokens, mode)
    prog = p.program()
    if p.diags:
        raise ParseError(p.diags)
    return prog
