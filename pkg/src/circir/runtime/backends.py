"""Protocol backends and the circuit-call lifecycle.

A call goes build -> import each argument -> evaluate -> export each
result -> destroy, mirroring libraries whose circuits are discarded after
evaluation.  The simulated backends compute on cleartext internally but
only ever see data that crossed the import boundary.
"""

from __future__ import annotations

from ..errors import CircirError, InternalError, ShapeMismatch
from ..ir import CircuitFun, Lit, Protocol
from .evaluator import evaluate_circuit
from .formats import (
    PLAIN, StorageFormat, StoredValue, format_of, reconstruct, store,
)
from .trace import CircuitEvalEvent, ExportEvent, ImportEvent
from .transfer import transfer


class ProtocolBackend:
    name = "?"
    can_compute = True
    can_store = True

    def native_format(self, proto: Protocol, universe) -> StorageFormat:
        return format_of(proto, universe)

    def run(self, fn: CircuitFun, sizes: dict, wires: dict[str, StoredValue], world) -> list[StoredValue]:
        raise NotImplementedError

    def build(self, fn: CircuitFun, sizes: dict, world) -> CircuitSession:
        if not self.can_compute:
            raise CircirError(f"{self.name} is not a computation protocol")
        missing = [s for s in fn.sizes if s not in sizes]
        if missing:
            raise InternalError(f"circuit {fn.name} built without concrete sizes {missing}")
        return CircuitSession(self, fn, dict(sizes), world)


class LocalBackend(ProtocolBackend):
    name = "Local"

    def run(self, fn, sizes, wires, world):
        fmt = self.native_format(fn.protocol, world.universe)
        inputs = {k: sv.payloads[fmt.host] for k, sv in wires.items()}
        return [store(v, fmt, world.rng) for v in evaluate_circuit(fn, sizes, inputs)]


class ReplBackend(ProtocolBackend):
    """Every replica evaluates the circuit on its own copy."""

    name = "Repl"

    def run(self, fn, sizes, wires, world):
        fmt = self.native_format(fn.protocol, world.universe)
        per_host = {
            h: evaluate_circuit(fn, sizes, {k: sv.payloads[h] for k, sv in wires.items()})
            for h in fmt.hosts
        }
        out = []
        for k in range(len(fn.returns)):
            copies = {h: per_host[h][k] for h in fmt.hosts}
            v = copies[fmt.hosts[0]]
            out.append(StoredValue(fmt, copies, v.elem, v.shape))
        return out


class MPCBackend(ProtocolBackend):
    """Arithmetic sharing mod 2**64, simulated: shares in, fresh shares out."""

    name = "MPC"

    def run(self, fn, sizes, wires, world):
        fmt = self.native_format(fn.protocol, world.universe)
        inputs = {k: reconstruct(sv) for k, sv in wires.items()}
        return [store(v, fmt, world.rng) for v in evaluate_circuit(fn, sizes, inputs)]


class ReferenceBackend(ProtocolBackend):
    """Cleartext stand-in for every protocol (reference runs)."""

    name = "reference"

    def native_format(self, proto, universe):
        return PLAIN

    def run(self, fn, sizes, wires, world):
        inputs = {k: reconstruct(sv) for k, sv in wires.items()}
        return [store(v, PLAIN, world.rng) for v in evaluate_circuit(fn, sizes, inputs)]


class CircuitSession:
    def __init__(self, backend: ProtocolBackend, fn: CircuitFun, sizes: dict, world):
        self.backend = backend
        self.fn = fn
        self.sizes = sizes
        self.world = world
        self.fmt = backend.native_format(fn.protocol, world.universe)
        self.wires: dict[str, StoredValue] = {}
        self.results: list[StoredValue] | None = None
        self.state = "built"

    def _require(self, *states):
        if self.state not in states:
            raise InternalError(f"circuit {self.fn.name}: operation not allowed in state {self.state}")

    def import_(self, param: str, sv: StoredValue, var: str):
        self._require("built")
        wire = transfer(sv, self.fmt, self.world, var, log=False)
        if not self.world.reference:
            self.world.emit(ImportEvent, var=var, source=str(sv.fmt), protocol=str(self.fmt))
        self.wires[param] = wire

    def evaluate(self):
        self._require("built")
        world = self.world
        world.circuit_depth += 1
        try:
            self.results = self.backend.run(self.fn, self.sizes, self.wires, world)
        finally:
            world.circuit_depth -= 1
        world.emit(CircuitEvalEvent, func=self.fn.name,
                   protocol=str(self.fn.protocol.resolve(world.universe)),
                   sizes=tuple((s, self.sizes[s]) for s in self.fn.sizes))
        self.state = "evaluated"

    def export(self, k: int, target: StorageFormat, var: str) -> StoredValue:
        self._require("evaluated")
        wire = self.results[k]
        out = transfer(wire, target, self.world, var, log=False)
        if not self.world.reference:
            self.world.emit(ExportEvent, var=var, source=str(wire.fmt), target=str(target))
        return out

    def destroy(self):
        self.wires.clear()
        self.results = None
        self.state = "destroyed"


BACKENDS: dict[str, ProtocolBackend] = {}
REFERENCE = ReferenceBackend()


def register_backend(backend: ProtocolBackend):
    if backend.name in BACKENDS:
        raise CircirError(f"backend {backend.name!r} already registered")
    BACKENDS[backend.name] = backend


for _b in (LocalBackend(), ReplBackend(), MPCBackend()):
    register_backend(_b)


def backend_for(proto: Protocol, world) -> ProtocolBackend:
    if world.reference:
        return REFERENCE
    b = BACKENDS.get(proto.name)
    if b is None:
        raise CircirError(f"{proto.name} is not a computation protocol")
    return b


def concrete_shape(t, sizes: dict) -> tuple[int, ...]:
    return tuple(d.value.item() if isinstance(d, Lit) else sizes[d.name] for d in t.dims)


def eval_circuit_call(fn: CircuitFun, sizes: dict, args: list[StoredValue],
                      out_formats: list[StorageFormat], world,
                      arg_names=None, out_names=None) -> list[StoredValue]:
    """Import the arguments, evaluate ``fn`` on its backend, export results."""
    for s in fn.sizes:
        if s not in sizes or isinstance(sizes[s], bool) or sizes[s] < 0:
            raise ShapeMismatch(f"{fn.name}: size {s} must be a non-negative integer")
    if len(args) != len(fn.inputs) or len(out_formats) != len(fn.outputs):
        raise ShapeMismatch(f"{fn.name}: arity mismatch")
    arg_names = arg_names or [p.name for p in fn.inputs]
    out_names = out_names or [p.name for p in fn.outputs]
    for prm, sv in zip(fn.inputs, args):
        want = concrete_shape(prm.type, sizes)
        if (sv.elem, sv.shape) != (prm.type.elem, want):
            raise ShapeMismatch(f"{fn.name}: argument {prm.name} expects {prm.type.elem}{list(want)}, "
                                f"got {sv.elem}{list(sv.shape)}")
    session = backend_for(fn.protocol, world).build(fn, sizes, world)
    try:
        for prm, sv, name in zip(fn.inputs, args, arg_names):
            session.import_(prm.name, sv, name)
        session.evaluate()
        for k, (prm, res) in enumerate(zip(fn.outputs, session.results)):
            want = concrete_shape(prm.type, sizes)
            if (res.elem, res.shape) != (prm.type.elem, want):
                raise ShapeMismatch(f"{fn.name}: result {prm.name} has shape {list(res.shape)}, "
                                    f"declared {list(want)}")
        return [session.export(k, fmt, name) for k, (fmt, name) in enumerate(zip(out_formats, out_names))]
    finally:
        session.destroy()

