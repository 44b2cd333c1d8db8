"""Cleartext evaluation of array comprehensions and circuit bodies.

Environments map names to ``Value`` (arrays, including zero-dim) or plain
ints (size parameters and index variables).
"""

from __future__ import annotations

import itertools

from ..errors import RankMismatch, TypeMismatch, UnknownVariable
from ..ir import BinOp, CircuitFun, Lit, Lookup, Reduce, Ref
from ..values import Value, apply_op, elem_of, offset, result_elem

_MISSING = object()


def _get(env: dict, name: str):
    try:
        return env[name]
    except KeyError:
        raise UnknownVariable(f"unknown variable {name!r}") from None


def _scalar(env: dict, name: str):
    v = _get(env, name)
    if isinstance(v, Value):
        if v.shape:
            raise RankMismatch(f"{name!r} has rank {v.rank}, used as a scalar")
        return v.data[0]
    return v


def _int(env: dict, atom) -> int:
    x = atom.value.data[0] if isinstance(atom, Lit) else _scalar(env, atom.name)
    if elem_of(x) != "int":
        raise TypeMismatch(f"expected an integer, got {x!r}")
    return x


def eval_scalar(e, env: dict):
    if isinstance(e, Lit):
        return e.value.data[0]
    if isinstance(e, Ref):
        return _scalar(env, e.name)
    if isinstance(e, Lookup):
        arr = _get(env, e.name)
        if not isinstance(arr, Value):
            raise RankMismatch(f"{e.name!r} is a scalar, cannot be indexed")
        idx = [_int(env, a) for a in e.indices]
        return arr.data[offset(arr.shape, idx)]
    if isinstance(e, BinOp):
        return apply_op(e.op, eval_scalar(e.lhs, env), eval_scalar(e.rhs, env))
    if isinstance(e, Reduce):
        acc = eval_scalar(e.init, env)
        n = _int(env, e.binder.bound)
        var = e.binder.var
        saved = env.get(var, _MISSING)
        try:
            for i in range(n):
                env[var] = i
                acc = apply_op(e.op, acc, eval_scalar(e.body, env))
        finally:
            if saved is _MISSING:
                env.pop(var, None)
            else:
                env[var] = saved
        return acc
    raise TypeError(f"not an expression: {e!r}")


def static_elem(e, env: dict) -> str:
    """Element type of an expression without evaluating it (for empty arrays)."""
    if isinstance(e, Lit):
        return e.value.elem
    if isinstance(e, (Ref, Lookup)):
        v = _get(env, e.name)
        return v.elem if isinstance(v, Value) else elem_of(v)
    if isinstance(e, BinOp):
        r = result_elem(e.op, static_elem(e.lhs, env), static_elem(e.rhs, env))
        if r is None:
            raise TypeMismatch(f"operator {e.op} not applicable")
        return r
    if isinstance(e, Reduce):
        return static_elem(e.init, env)
    raise TypeError(f"not an expression: {e!r}")


def eval_comprehension(binders, body, env: dict) -> Value:
    """Materialise ``x[i < a, j < b] = body`` in row-major order."""
    shape = tuple(_int(env, b.bound) for b in binders)
    if any(d < 0 for d in shape):
        raise TypeMismatch(f"negative bound in shape {shape}")
    if not binders:
        return Value.scalar(eval_scalar(body, env))
    names = [b.var for b in binders]
    saved = {n: env.get(n, _MISSING) for n in names}
    data = []
    try:
        for point in itertools.product(*(range(d) for d in shape)):
            env.update(zip(names, point))
            data.append(eval_scalar(body, env))
        if not data:
            env.update(zip(names, [0] * len(names)))
            elem = static_elem(body, env)
        else:
            elem = elem_of(data[0])
    finally:
        for n, v in saved.items():
            if v is _MISSING:
                env.pop(n, None)
            else:
                env[n] = v
    return Value(elem, shape, tuple(data))


def evaluate_circuit(fn: CircuitFun, sizes: dict[str, int], inputs: dict[str, Value]) -> list[Value]:
    """Run a circuit body; returns the values named by ``fn.returns``."""
    env: dict = dict(sizes)
    env.update(inputs)
    for cs in fn.body:
        env[cs.target] = eval_comprehension(cs.binders, cs.body, env)
    out = []
    for r in fn.returns:
        v = _get(env, r)
        out.append(v if isinstance(v, Value) else Value.scalar(v))
    return out
