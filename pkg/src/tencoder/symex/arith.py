"""Bit-vector arithmetic over BitRef lists (index 0 is the least significant bit).

All results are truncated to the operand width; the carry out of the most
significant position is discarded.
"""

from __future__ import annotations

from typing import Sequence, Union

from .nodes import FALSE, TRUE, NodeStore

Bits = list[int]


def extend(a: Sequence[int], width: int) -> Bits:
    return list(a[:width]) + [FALSE] * max(0, width - len(a))


def const_bits(value: int, width: int) -> Bits:
    return [(value >> i) & 1 for i in range(width)]


def full_add(store: NodeStore, a: int, b: int, c: int) -> tuple[int, int]:
    t = store.mk_xor(a, b)
    s = store.mk_xor(t, c)
    carry = store.mk_or(store.mk_and(a, b), store.mk_and(t, c))
    return s, carry


def add(store: NodeStore, a: Sequence[int], b: Sequence[int], carry: int = FALSE) -> Bits:
    out = []
    for x, y in zip(a, b):
        s, carry = full_add(store, x, y, carry)
        out.append(s)
    return out


def sub(store: NodeStore, a: Sequence[int], b: Sequence[int]) -> Bits:
    return add(store, a, [store.mk_not(y) for y in b], TRUE)


def mul(store: NodeStore, a: Sequence[int], b: Sequence[int]) -> Bits:
    width = len(a)
    acc = [FALSE] * width
    for i, bi in enumerate(b[:width]):
        if bi == FALSE:
            continue
        partial = [FALSE] * i + [store.mk_and(bi, a[j]) for j in range(width - i)]
        acc = add(store, acc, partial)
    return acc


def shl(a: Sequence[int], k: int) -> Bits:
    if k < 0:
        raise ValueError("negative shift amount")
    w = len(a)
    return ([FALSE] * min(k, w) + list(a))[:w]


def shr(a: Sequence[int], k: int) -> Bits:
    if k < 0:
        raise ValueError("negative shift amount")
    w = len(a)
    return (list(a[k:]) + [FALSE] * w)[:w]


def equal(store: NodeStore, a: Sequence[int], b: Sequence[int]) -> int:
    return store.mk_and_n(store.mk_not(store.mk_xor(x, y)) for x, y in zip(a, b))


def less_than(store: NodeStore, a: Sequence[int], b: Sequence[int]) -> int:
    """Unsigned a < b: no carry out of a + ~b + 1."""
    carry = TRUE
    for x, y in zip(a, b):
        ny = store.mk_not(y)
        t = store.mk_xor(x, ny)
        carry = store.mk_or(store.mk_and(x, ny), store.mk_and(t, carry))
    return store.mk_not(carry)


def compare(store: NodeStore, op: str, a: Sequence[int], b: Sequence[int]) -> int:
    if op == "==":
        return equal(store, a, b)
    if op == "!=":
        return store.mk_not(equal(store, a, b))
    if op == "<":
        return less_than(store, a, b)
    if op == ">":
        return less_than(store, b, a)
    if op == "<=":
        return store.mk_not(less_than(store, b, a))
    if op == ">=":
        return store.mk_not(less_than(store, a, b))
    raise ValueError(f"unknown comparison {op}")


def bitvec_arith(store: NodeStore, op: str, a: Sequence[int], b: Union[Sequence[int], int]):
    """Dispatch ``add sub mul shl shr`` (vector result) or a comparison operator (single BitRef).

    Operands are zero-extended to the longer width; shifts take an int amount.
    """
    if op in ("shl", "shr"):
        if not isinstance(b, int):
            raise ValueError("shift amount must be a concrete int")
        return shl(a, b) if op == "shl" else shr(a, b)
    width = max(len(a), len(b))
    a, b = extend(a, width), extend(b, width)
    if op == "add":
        return add(store, a, b)
    if op == "sub":
        return sub(store, a, b)
    if op == "mul":
        return mul(store, a, b)
    if op in ("==", "!=", "<", "<=", ">", ">="):
        return compare(store, op, a, b)
    raise ValueError(f"unknown operation {op}")
