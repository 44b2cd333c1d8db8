"""Deterministic multi-host interpreter for non-circuit functions.

Frames are kept on an explicit stack, so deep recursion costs no Python
stack.  A call in tail position that binds nothing, from a function that
returns nothing, replaces the current frame: recursive loops like
``serve()`` run indefinitely under ``max_steps`` without tripping
``max_depth``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import CircirError, DepthExceeded, TypeMismatch, UnknownVariable
from ..ir import (
    WILDCARD, Call, CircuitFun, ComputeLet, Fun, If, Input, Let, Lit, Output, Program, Ref,
    comprehension_vars,
)
from ..printer import atom_str
from ..values import Value
from .backends import eval_circuit_call
from .evaluator import eval_comprehension
from .formats import PLAIN, PUBLIC, LocalCleartext, StoredValue, format_of, reconstruct, store
from .script import IoScript
from .trace import InputEvent, OutputEvent
from .transfer import transfer
from .world import World

DEFAULT_MAX_STEPS = 10**6
DEFAULT_MAX_DEPTH = 10**3


@dataclass
class RunResult:
    status: str  # "completed" | "step_limit" | "error"
    world: World
    error: CircirError | None = None
    steps: int = 0

    @property
    def trace(self):
        return self.world.trace

    @property
    def outputs(self) -> dict:
        return self.world.outputs


@dataclass
class Frame:
    fun: Fun
    sizes: dict[str, int]
    env: dict[str, StoredValue] = field(default_factory=dict)
    blocks: list = field(default_factory=list)  # [stmts, next index] pairs
    ret_targets: tuple = ()

    def at_tail(self) -> bool:
        return all(pos >= len(stmts) for stmts, pos in self.blocks)


class Interpreter:
    def __init__(self, program: Program, world: World, max_steps: int, max_depth: int):
        self.program = program
        self.world = world
        self.max_steps = max_steps
        self.max_depth = max_depth
        self.frames: list[Frame] = []
        self.steps = 0

    # -- values --

    def fmt(self, proto):
        if self.world.reference:
            return PLAIN
        return format_of(proto, self.world.universe)

    def atom(self, a, frame: Frame) -> StoredValue:
        if isinstance(a, Lit):
            return store(a.value, PUBLIC, self.world.rng)
        if a.name in frame.sizes:
            return store(Value.scalar(frame.sizes[a.name]), PUBLIC, self.world.rng)
        try:
            return frame.env[a.name]
        except KeyError:
            raise UnknownVariable(f"unknown variable {a.name!r}") from None

    def cleartext(self, a, frame: Frame) -> Value:
        return reconstruct(self.atom(a, frame))

    def size(self, a, frame: Frame) -> int:
        v = self.cleartext(a, frame)
        if v.shape or v.elem != "int" or v.item() < 0:
            raise TypeMismatch(f"size {atom_str(a)} must be a non-negative integer, got {v}")
        return v.item()

    def bind(self, frame: Frame, binding, sv: StoredValue):
        out = transfer(sv, self.fmt(binding.fmt), self.world, binding.var)
        if binding.var != WILDCARD:
            frame.env[binding.var] = out

    # -- driver --

    def push(self, fun: Fun, sizes: dict, args: list, ret_targets=()):
        frame = Frame(fun, dict(sizes), ret_targets=ret_targets)
        for prm, sv in zip(fun.inputs, args):
            frame.env[prm.name] = sv
        frame.blocks.append([fun.body, 0])
        self.frames.append(frame)
        if len(self.frames) > self.max_depth:
            raise DepthExceeded(f"call depth exceeded {self.max_depth} in {fun.name!r}")

    def run(self) -> str:
        entry = self.program.lookup(self.program.entry)
        if not isinstance(entry, Fun):
            raise CircirError(f"entry function {self.program.entry!r} not found")
        self.push(entry, {}, [])
        while self.frames:
            frame = self.frames[-1]
            if not frame.blocks:
                self.frames.pop()
                results = [frame.env[r] for r in frame.fun.returns]
                if self.frames:
                    for b, sv in zip(frame.ret_targets, results):
                        self.bind(self.frames[-1], b, sv)
                continue
            block = frame.blocks[-1]
            stmts, pos = block
            if pos >= len(stmts):
                frame.blocks.pop()
                continue
            block[1] += 1
            self.steps += 1
            if self.steps > self.max_steps:
                return "step_limit"
            self.exec(stmts[pos], frame)
        return "completed"

    def exec(self, s, frame: Frame):
        if isinstance(s, If):
            cond = self.cleartext(s.cond, frame)
            if cond.shape or cond.elem != "bool":
                raise TypeMismatch(f"condition must be bool, got {cond}")
            frame.blocks.append([s.then if cond.item() else s.orelse, 0])
        elif isinstance(s, ComputeLet):
            self.compute_let(s, frame)
        elif isinstance(s, Let):
            self.let(s, frame)
        else:
            raise TypeError(f"not a statement: {s!r}")

    def let(self, s: Let, frame: Frame):
        m = s.command
        world = self.world
        if isinstance(m, (Lit, Ref)):
            self.bind(frame, s.targets[0], self.atom(m, frame))
        elif isinstance(m, Input):
            target = s.targets[0]
            shape = tuple(self.size(d, frame) for d in m.type.dims)
            v = world.read_input(m.host)
            if (v.elem, v.shape) != (m.type.elem, shape):
                want = f"{m.type.elem}[{','.join(map(str, shape))}]"
                raise TypeMismatch(f"input {target.var} from {m.host}: expected {want}, "
                                   f"got {v.elem}[{','.join(map(str, v.shape))}]")
            world.emit(InputEvent, host=m.host, var=target.var, value=v)
            self.bind(frame, target, store(v, self._local(m.host), world.rng))
        elif isinstance(m, Output):
            target = s.targets[0]
            name = atom_str(m.arg)
            sv = transfer(self.atom(m.arg, frame), self._local(m.host), world, name)
            v = reconstruct(sv)
            world.write_output(m.host, v)
            world.emit(OutputEvent, host=m.host, var=name, value=v)
            self.bind(frame, target, sv)
        elif isinstance(m, Call):
            self.call(s, m, frame)
        else:
            raise TypeError(f"not a command: {m!r}")

    def _local(self, host: str):
        return PLAIN if self.world.reference else LocalCleartext(host)

    def call(self, s: Let, m: Call, frame: Frame):
        callee = self.program.lookup(m.func)
        if callee is None:
            raise UnknownVariable(f"unknown function {m.func!r}")
        sizes = {name: self.size(a, frame) for name, a in zip(callee.sizes, m.sizes)}
        args = [self.atom(a, frame) for a in m.args]
        if isinstance(callee, CircuitFun):
            results = eval_circuit_call(
                callee, sizes, args, [self.fmt(b.fmt) for b in s.targets], self.world,
                arg_names=[atom_str(a) for a in m.args], out_names=[b.var for b in s.targets])
            for b, sv in zip(s.targets, results):
                if b.var != WILDCARD:
                    frame.env[b.var] = sv
            return
        if not s.targets and not callee.outputs and not frame.fun.returns and frame.at_tail():
            self.frames.pop()
        self.push(callee, sizes, args, s.targets)

    def compute_let(self, s: ComputeLet, frame: Frame):
        """Surface programs only: evaluate inline, store in the protocol's format."""
        fmt = self.fmt(s.protocol)
        env: dict = dict(frame.sizes)
        for n in sorted(comprehension_vars(s.binders, s.body)):
            if n in frame.env:
                # same conversion rules as a circuit import, without the event
                env[n] = reconstruct(transfer(frame.env[n], fmt, self.world, n, log=False))
        v = eval_comprehension(s.binders, s.body, env)
        frame.env[s.var] = store(v, fmt, self.world.rng)


def run_program(program: Program, script: IoScript | None = None, *, seed: int = 0,
                max_steps: int = DEFAULT_MAX_STEPS, max_depth: int = DEFAULT_MAX_DEPTH,
                reference: bool = False, world: World | None = None) -> RunResult:
    """Interpret ``program`` from its entry function.

    Runtime failures are reported through ``status == "error"``; the trace up
    to the failure is kept.
    """
    if world is None:
        world = World(program.universe(), script, seed=seed, reference=reference)
    interp = Interpreter(program, world, max_steps, max_depth)
    try:
        status = interp.run()
    except CircirError as e:
        return RunResult("error", world, e, interp.steps)
    return RunResult(status, world, None, interp.steps)

