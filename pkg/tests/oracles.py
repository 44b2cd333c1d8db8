"""Independent reference implementations used to derive expected values.

Nothing here imports circir's evaluator or scheduler; each oracle is the
most direct (slow, obvious) way to compute the answer.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

TWO64 = 1 << 64


def to_signed(x: int) -> int:
    """Truncate an arbitrary-precision integer to signed 64 bits."""
    r = x % TWO64
    return r - TWO64 if r >= TWO64 // 2 else r


def binop128(op: str, a, b):
    """Reference semantics: compute exactly, then truncate mod 2**64."""
    if op == "+":
        return to_signed(a + b)
    if op == "-":
        return to_signed(a - b)
    if op == "*":
        return to_signed(a * b)
    if op == "/":
        q = abs(a) // abs(b)
        return to_signed(q if (a >= 0) == (b >= 0) else -q)
    if op == "%":
        r = abs(a) % abs(b)
        return to_signed(r if a >= 0 else -r)
    if op == "min":
        return a if a <= b else b
    if op == "max":
        return a if a >= b else b
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
        return a != b if isinstance(a, bool) else to_signed(a ^ b)
    raise ValueError(op)


def nested_get(data, shape, indices):
    """Row-major element lookup by materialising nested lists."""
    def nest(flat, dims):
        if not dims:
            return flat[0]
        step = len(flat) // dims[0] if dims[0] else 0
        return [nest(flat[k * step:(k + 1) * step], dims[1:]) for k in range(dims[0])]

    cell = nest(list(data), list(shape))
    for i in indices:
        cell = cell[i]
    return cell


def closest_distance(db, sample):
    """min over rows of the squared Euclidean distance (exact integers)."""
    return min(sum((x - s) ** 2 for x, s in zip(row, sample)) for row in db)


def left_fold(op, init, xs):
    acc = init
    for x in xs:
        acc = binop128(op, acc, x)
    return acc


def topological_orders(n: int, edges):
    preds = {k: {a for a, b in edges if b == k} for k in range(n)}
    def rec(done, order):
        if len(order) == n:
            yield tuple(order)
            return
        for k in range(n):
            if k not in done and preds[k] <= done:
                yield from rec(done | {k}, order + [k])
    yield from rec(frozenset(), [])


def blocks_of_order(order, labels) -> int:
    """Compute blocks in a sequence: maximal runs of one groupable protocol.

    ``labels[k]`` is ``(protocol, groupable)``; protocol None = not computing.
    A computing node that is not groupable is a block by itself.
    """
    count = 0
    prev = None
    for k in order:
        proto, groupable = labels[k]
        if proto is None:
            prev = None
        elif not groupable:
            count += 1
            prev = None
        else:
            if proto != prev:
                count += 1
            prev = proto
    return count


def min_blocks_enumerate(n, edges, labels) -> int:
    """Exhaustive minimum over every topological order (small n only)."""
    return min(blocks_of_order(o, labels) for o in topological_orders(n, edges))


def min_blocks(n, edges, labels) -> int:
    """Same minimum as ``min_blocks_enumerate``, memoised over (done set, open protocol)."""
    preds = [frozenset(a for a, b in edges if b == k) for k in range(n)]

    @lru_cache(maxsize=None)
    def best(done: frozenset, prev):
        if len(done) == n:
            return 0
        out = None
        for k in range(n):
            if k in done or not preds[k] <= done:
                continue
            proto, groupable = labels[k]
            if proto is None:
                cost, nxt = 0, None
            elif not groupable:
                cost, nxt = 1, None
            else:
                cost, nxt = (0 if proto == prev else 1), proto
            v = cost + best(done | {k}, nxt)
            out = v if out is None else min(out, v)
        return out

    return best(frozenset(), None)


def all_index_vectors(shape):
    return itertools.product(*(range(d) for d in shape))
