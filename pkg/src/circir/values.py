"""Runtime values: 64-bit integers, booleans and row-major arrays of them.

A zero-dimensional array *is* a scalar.  ``Value.scalar(5)`` has shape ``()``
and compares equal to the Python int ``5``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DivisionByZero, IndexOutOfBounds, RankMismatch, TypeMismatch

INT_BITS = 64
MASK = (1 << INT_BITS) - 1
INT_MIN = -(1 << (INT_BITS - 1))
INT_MAX = (1 << (INT_BITS - 1)) - 1

ELEM_TYPES = ("int", "bool")


def wrap(x: int) -> int:
    """Reduce an unbounded int to signed 64-bit two's complement."""
    x &= MASK
    return x - (1 << INT_BITS) if x >> (INT_BITS - 1) else x


def elem_of(x) -> str:
    if isinstance(x, bool):
        return "bool"
    if isinstance(x, int):
        return "int"
    raise TypeMismatch(f"not a scalar: {x!r}")


@dataclass(frozen=True, eq=False)
class Value:
    elem: str
    shape: tuple[int, ...]
    data: tuple

    def __post_init__(self):
        if self.elem not in ELEM_TYPES:
            raise TypeMismatch(f"unknown element type {self.elem!r}")
        if any((not isinstance(d, int)) or isinstance(d, bool) or d < 0 for d in self.shape):
            raise ValueError(f"bad shape {self.shape!r}")
        if len(self.data) != math.prod(self.shape):
            raise ValueError(f"{len(self.data)} elements for shape {self.shape}")
        for x in self.data:
            if elem_of(x) != self.elem:
                raise TypeMismatch(f"{x!r} in {self.elem} array")
            if self.elem == "int" and not INT_MIN <= x <= INT_MAX:
                raise ValueError(f"{x} out of 64-bit range")

    @staticmethod
    def scalar(x) -> Value:
        if isinstance(x, Value):
            return x
        return Value(elem_of(x), (), (x,))

    @staticmethod
    def array(elem: str, shape: Sequence[int], data: Sequence) -> Value:
        return Value(elem, tuple(shape), tuple(data))

    @property
    def rank(self) -> int:
        return len(self.shape)

    @property
    def is_scalar(self) -> bool:
        return not self.shape

    def item(self):
        """The Python scalar of a zero-dimensional value."""
        if self.shape:
            raise RankMismatch(f"expected a scalar, got shape {list(self.shape)}")
        return self.data[0]

    def __eq__(self, other):
        if isinstance(other, Value):
            return (self.elem, self.shape, self.data) == (other.elem, other.shape, other.data)
        if isinstance(other, (bool, int)) and not self.shape:
            return elem_of(other) == self.elem and self.data[0] == other
        return NotImplemented

    def __hash__(self):
        if not self.shape:
            return hash(self.data[0])
        return hash((self.elem, self.shape, self.data))

    def __repr__(self):
        return f"Value({format_value(self)})"


def format_value(v: Value) -> str:
    """Render in script syntax: ``7``, ``true``, ``int[2,2] [1,2,3,4]``."""
    def one(x):
        return ("true" if x else "false") if isinstance(x, bool) else str(x)

    if not v.shape:
        return one(v.data[0])
    dims = ",".join(str(d) for d in v.shape)
    return f"{v.elem}[{dims}] [{','.join(one(x) for x in v.data)}]"


def strides(shape: Sequence[int]) -> list[int]:
    out = [1] * len(shape)
    for k in range(len(shape) - 2, -1, -1):
        out[k] = out[k + 1] * shape[k + 1]
    return out


def offset(shape: Sequence[int], indices: Sequence[int]) -> int:
    if len(indices) != len(shape):
        n = len(shape)
        raise RankMismatch(f"rank mismatch: expected {n} {'index' if n == 1 else 'indices'}, got {len(indices)}")
    off = 0
    for idx, dim in zip(indices, shape):
        if not 0 <= idx < dim:
            raise IndexOutOfBounds(f"index {idx} out of bounds for dimension of size {dim}")
        off = off * dim + idx
    return off


def array_get(arr: Value, indices: Sequence[int]) -> Value:
    return Value.scalar(arr.data[offset(arr.shape, indices)])


# op -> ((lhs elem, rhs elem, result elem), ...)
OP_SIGNATURES = {
    "+": (("int", "int", "int"),),
    "-": (("int", "int", "int"),),
    "*": (("int", "int", "int"),),
    "/": (("int", "int", "int"),),
    "%": (("int", "int", "int"),),
    "min": (("int", "int", "int"),),
    "max": (("int", "int", "int"),),
    "==": (("int", "int", "bool"), ("bool", "bool", "bool")),
    "!=": (("int", "int", "bool"), ("bool", "bool", "bool")),
    "<": (("int", "int", "bool"),),
    "<=": (("int", "int", "bool"),),
    "&&": (("bool", "bool", "bool"),),
    "||": (("bool", "bool", "bool"),),
    "^": (("int", "int", "int"), ("bool", "bool", "bool")),
}
OPS = tuple(OP_SIGNATURES)


def result_elem(op: str, lhs: str, rhs: str) -> str | None:
    for a, b, r in OP_SIGNATURES.get(op, ()):
        if a == lhs and b == rhs:
            return r
    return None


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


def apply_op(op: str, a, b):
    """Apply ``op`` to two Python scalars. Hot path of circuit evaluation."""
    ta, tb = elem_of(a), elem_of(b)
    if result_elem(op, ta, tb) is None:
        raise TypeMismatch(f"operator {op} not defined on ({ta}, {tb})")
    if op == "+":
        return wrap(a + b)
    if op == "-":
        return wrap(a - b)
    if op == "*":
        return wrap(a * b)
    if op in ("/", "%"):
        if b == 0:
            raise DivisionByZero(f"{a} {op} 0")
        q = _trunc_div(a, b)
        return wrap(q) if op == "/" else wrap(a - b * q)
    if op == "min":
        return min(a, b)
    if op == "max":
        return max(a, b)
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == "&&":
        return a and b
    if op == "||":
        return a or b
    if op == "^":
        return (a != b) if ta == "bool" else wrap(a ^ b)
    raise TypeMismatch(f"unknown operator {op!r}")


def eval_binop(op: str, lhs, rhs) -> Value:
    """Apply a binary operator to two scalars (``Value`` or Python)."""
    a = lhs.item() if isinstance(lhs, Value) else lhs
    b = rhs.item() if isinstance(rhs, Value) else rhs
    return Value.scalar(apply_op(op, a, b))
