"""Hash-consed Boolean formula DAG.

References to values (``BitRef``) are plain ints: ``0`` and ``1`` are the
constants false and true, anything else is the id of a node in the store.
Every constructor normalizes its arguments first (constant folding,
identity/absorption rules, sorting of commutative children) and only then
consults the cons table, so structurally equal formulas share one id.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

FALSE = 0
TRUE = 1

CONST = "const"
INPUT = "input"
AND = "and"
OR = "or"
NOT = "not"
XOR = "xor"
ITE = "ite"
TABLE = "table"

MAX_TABLE_ARITY = 16


class ArityError(ValueError):
    pass


class NodeStore:
    def __init__(self) -> None:
        self.kinds: list[str] = [CONST, CONST]
        self.children: list[tuple[int, ...]] = [(), ()]
        self.payload: list[Optional[int]] = [0, 1]
        self.origins: list[Optional[tuple[int, int]]] = [None, None]
        self._cons: dict[tuple, int] = {}
        self.num_inputs = 0

    def __len__(self) -> int:
        return len(self.kinds)

    # -- inspection -----------------------------------------------------------
    @staticmethod
    def is_const(ref: int) -> bool:
        return ref < 2

    def kind(self, ref: int) -> str:
        return self.kinds[ref]

    def is_not(self, ref: int) -> bool:
        return self.kinds[ref] == NOT

    def complement_of(self, x: int, y: int) -> bool:
        if x < 2 and y < 2:
            return x != y
        k = self.kinds
        return (k[x] == NOT and self.children[x][0] == y) or (k[y] == NOT and self.children[y][0] == x)

    def structural_key(self, ref: int) -> tuple:
        return (self.kinds[ref], self.children[ref], self.payload[ref])

    # -- allocation -----------------------------------------------------------
    def _alloc(self, key: tuple, origin=None) -> int:
        hit = self._cons.get(key)
        if hit is not None:
            return hit
        kind, children, payload = key
        for c in children:
            if not 2 <= c < len(self.kinds):
                raise ValueError(f"child {c} is not an existing node")
        ref = len(self.kinds)
        self.kinds.append(kind)
        self.children.append(children)
        self.payload.append(payload)
        self.origins.append(origin)
        self._cons[key] = ref
        return ref

    def new_input(self) -> int:
        idx = self.num_inputs
        self.num_inputs += 1
        return self._alloc((INPUT, (), idx))

    def mk_not(self, x: int, origin=None) -> int:
        if x < 2:
            return 1 - x
        if self.kinds[x] == NOT:
            return self.children[x][0]
        return self._alloc((NOT, (x,), None), origin)

    def _and_or(self, kind: str, xs: Iterable[int], origin) -> int:
        absorbing = FALSE if kind == AND else TRUE
        neutral = 1 - absorbing
        seen: set[int] = set()
        for c in xs:
            if c == neutral:
                continue
            if c == absorbing:
                return absorbing
            seen.add(c)
        for c in seen:
            if self.kinds[c] == NOT and self.children[c][0] in seen:
                return absorbing
        if not seen:
            return neutral
        if len(seen) == 1:
            return next(iter(seen))
        return self._alloc((kind, tuple(sorted(seen)), None), origin)

    def mk_and(self, *xs: int, origin=None) -> int:
        return self._and_or(AND, xs, origin)

    def mk_or(self, *xs: int, origin=None) -> int:
        return self._and_or(OR, xs, origin)

    def mk_and_n(self, xs: Iterable[int], origin=None) -> int:
        return self._and_or(AND, xs, origin)

    def mk_or_n(self, xs: Iterable[int], origin=None) -> int:
        return self._and_or(OR, xs, origin)

    def mk_xor(self, *xs: int, origin=None) -> int:
        return self.mk_xor_n(xs, origin)

    def mk_xor_n(self, xs: Iterable[int], origin=None) -> int:
        parity = 0
        odd: set[int] = set()
        for c in xs:
            if c < 2:
                parity ^= c
                continue
            if self.kinds[c] == NOT:
                parity ^= 1
                c = self.children[c][0]
            if c in odd:
                odd.remove(c)
            else:
                odd.add(c)
        if not odd:
            return parity
        if len(odd) == 1:
            (r,) = odd
        else:
            r = self._alloc((XOR, tuple(sorted(odd)), None), origin)
        return self.mk_not(r) if parity else r

    def mk_ite(self, c: int, a: int, b: int, origin=None) -> int:
        if c < 2:
            return a if c else b
        if a == b:
            return a
        if self.kinds[c] == NOT:
            c = self.children[c][0]
            a, b = b, a
        if a == TRUE and b == FALSE:
            return c
        if a == FALSE and b == TRUE:
            return self.mk_not(c)
        if a == TRUE or a == c:
            return self.mk_or(c, b, origin=origin)
        if a == FALSE or self.complement_of(a, c):
            return self.mk_and(self.mk_not(c), b, origin=origin)
        if b == FALSE or b == c:
            return self.mk_and(c, a, origin=origin)
        if b == TRUE or self.complement_of(b, c):
            return self.mk_or(self.mk_not(c), a, origin=origin)
        if self.complement_of(a, b):
            return self.mk_xor(c, b, origin=origin)
        return self._alloc((ITE, (c, a, b), None), origin)

    def mk_table(self, xs: Sequence[int], tt: int, origin=None) -> int:
        """Node for ``phi(xs)`` where bit ``sum(x_i << i)`` of ``tt`` is phi's value."""
        k = len(xs)
        if not 1 <= k <= MAX_TABLE_ARITY:
            raise ArityError(f"table arity {k} outside 1..{MAX_TABLE_ARITY}")
        if tt >> (1 << k):
            raise ArityError("truth table longer than 2^k bits")
        xs = list(xs)
        # cofactor constants and merge repeated children
        i = 0
        while i < len(xs):
            x = xs[i]
            j = xs.index(x)
            if x < 2 or j < i:
                tt = _restrict(tt, len(xs), i, x if x < 2 else None, j)
                xs.pop(i)
            else:
                i += 1
        k = len(xs)
        full = (1 << (1 << k)) - 1
        if tt == 0:
            return FALSE
        if tt == full:
            return TRUE
        # drop inputs the function does not depend on
        i = 0
        while i < len(xs):
            lo, hi = _cofactors(tt, len(xs), i)
            if lo == hi:
                tt = lo
                xs.pop(i)
            else:
                i += 1
        k = len(xs)
        if k == 1:
            return xs[0] if tt == 0b10 else self.mk_not(xs[0])
        return self._alloc((TABLE, tuple(xs), tt), origin)

    def rebuild(self, kind: str, children: Sequence[int], payload=None) -> int:
        """Re-create a node of ``kind`` over new children through the normalizing constructors."""
        if kind == NOT:
            return self.mk_not(children[0])
        if kind == AND:
            return self.mk_and_n(children)
        if kind == OR:
            return self.mk_or_n(children)
        if kind == XOR:
            return self.mk_xor_n(children)
        if kind == ITE:
            return self.mk_ite(*children)
        if kind == TABLE:
            return self.mk_table(children, payload)
        raise ValueError(f"cannot rebuild a node of kind {kind}")

    # -- evaluation -----------------------------------------------------------
    def evaluate_packed(self, roots: Iterable[int], inputs: Sequence[int], width: int) -> dict[int, int]:
        """Evaluate nodes bit-parallel: ``inputs[i]`` packs ``width`` samples of input i."""
        mask = (1 << width) - 1
        val: dict[int, int] = {FALSE: 0, TRUE: mask}
        stack = [r for r in roots]
        order: list[int] = []
        seen: set[int] = set()
        while stack:
            r = stack.pop()
            if r in seen or r in val:
                continue
            if r < 0:
                order.append(~r)
                continue
            seen.add(r)
            stack.append(~r)
            stack.extend(c for c in self.children[r] if c not in seen)
        for r in order:
            if r in val:
                continue
            if self.kinds[r] == INPUT:
                val[r] = inputs[self.payload[r]] & mask
            else:
                val[r] = apply_kind(self.kinds[r], [val[c] for c in self.children[r]], self.payload[r], mask)
        return val

    def evaluate(self, roots: Sequence[int], x: Sequence[int]) -> list[int]:
        """Evaluate ``roots`` on one concrete input vector."""
        val = self.evaluate_packed(roots, [b & 1 for b in x], 1)
        return [val[r] & 1 for r in roots]


def apply_kind(kind: str, vals: Sequence[int], payload, mask: int) -> int:
    """Bit-parallel value of one gate given packed child values."""
    if kind == NOT:
        return mask ^ vals[0]
    if kind == AND:
        v = mask
        for c in vals:
            v &= c
        return v
    if kind == OR:
        v = 0
        for c in vals:
            v |= c
        return v
    if kind == XOR:
        v = 0
        for c in vals:
            v ^= c
        return v
    if kind == ITE:
        c, a, b = vals
        return (c & a) | (~c & b & mask)
    if kind == TABLE:
        return _table_packed(payload, list(vals), mask)
    raise ValueError(kind)


def _cofactors(tt: int, k: int, i: int) -> tuple[int, int]:
    """Split ``tt`` on input i into (phi|x_i=0, phi|x_i=1), both over k-1 inputs."""
    lo = hi = 0
    out = 0
    for row in range(1 << k):
        if (row >> i) & 1:
            continue
        rest = (row & ((1 << i) - 1)) | ((row >> (i + 1)) << i)
        lo |= ((tt >> row) & 1) << rest
        hi |= ((tt >> (row | (1 << i))) & 1) << rest
        out += 1
    return lo, hi


def _restrict(tt: int, k: int, i: int, const: Optional[int], same_as: int) -> int:
    """Remove input i: either fixed to ``const`` or tied to input ``same_as`` (< i)."""
    out = 0
    for row in range(1 << k):
        bit = (row >> i) & 1
        want = const if const is not None else (row >> same_as) & 1
        if bit != want:
            continue
        rest = (row & ((1 << i) - 1)) | ((row >> (i + 1)) << i)
        out |= ((tt >> row) & 1) << rest
    return out


def _table_packed(tt: int, vals: list[int], mask: int) -> int:
    k = len(vals)
    out = 0
    for row in range(1 << k):
        if not (tt >> row) & 1:
            continue
        term = mask
        for i, v in enumerate(vals):
            term &= v if (row >> i) & 1 else ~v
            if not term:
                break
        out |= term
    return out & mask
