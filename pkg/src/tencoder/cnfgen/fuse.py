"""Collapse single-fan-out cones into Table nodes.

Every node that must own a CNF variable is a *cut*: inputs, roots (outputs,
asserts, core records), ``__mem`` marks and anything referenced twice.  Each
cut then absorbs its fan-out-1 descendants as long as the cone's support stays
within ``max_arity``; a descendant that would overflow becomes a cut itself.
Negations are transparent: they never own a variable.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Iterable

from ..symex.execute import EncodingState
from ..symex.nodes import AND, INPUT, NOT, OR, XOR, NodeStore, apply_kind
from .prune import prune, roots_of

DEFAULT_MAX_ARITY = 8


def _base(store: NodeStore, r: int) -> int:
    return store.children[r][0] if r >= 2 and store.kinds[r] == NOT else r


def _cone_table(store: NodeStore, root: int, leaves: list[int]) -> int:
    k = len(leaves)
    rows = 1 << k
    mask = (1 << rows) - 1
    val: dict[int, int] = {}
    for i, leaf in enumerate(leaves):
        # packed column of x_i over all rows
        pattern = 0
        for row in range(rows):
            if (row >> i) & 1:
                pattern |= 1 << row
        val[leaf] = pattern

    def ev(r: int) -> int:
        got = val.get(r)
        if got is not None:
            return got
        v = apply_kind(store.kinds[r], [ev(c) for c in store.children[r]], store.payload[r], mask)
        val[r] = v
        return v

    return ev(root)


def _cuts(store: NodeStore, state: EncodingState) -> tuple[set[int], set[int]]:
    """Return (live nodes without negations, nodes that must own a variable)."""
    live = prune(store, state)
    count: dict[int, int] = dict.fromkeys((_base(store, r) for r in live), 0)
    for r in live:
        if store.kinds[r] == NOT:
            continue
        for c in store.children[r]:
            count[_base(store, c)] += 1
    cut: set[int] = {r for r, c in count.items() if c >= 2}
    cut.update(_base(store, r) for r in roots_of(state) if r >= 2)
    cut.update(m for m in state.mem_points if m in live)
    cut.update(state.input_vars)
    return set(count), cut


def _full_cone(store: NodeStore, r: int, cut: set[int]) -> tuple[list[int], list[int]]:
    interior = [r]
    support: set[int] = set()
    stack = [_base(store, c) for c in store.children[r]]
    seen = {r}
    while stack:
        c = stack.pop()
        if c in seen:
            continue
        seen.add(c)
        if c in cut:
            support.add(c)
        else:
            interior.append(c)
            stack.extend(_base(store, g) for g in store.children[c])
    return sorted(support), interior


def _grow(store: NodeStore, r: int, cut: set[int], max_arity: int, mark: bool) -> tuple[list[int], list[int]]:
    """Cone of ``r`` with support at most ``max_arity`` where possible.

    The whole fan-out-1 region is taken when it fits; otherwise descendants
    are absorbed greedily while the leaf frontier stays within bounds, and
    rejected ones become leaves (and cuts when ``mark``).
    """
    support, interior = _full_cone(store, r, cut)
    if len(support) <= max_arity:
        return support, interior
    interior = [r]
    frontier = list(dict.fromkeys(_base(store, c) for c in store.children[r]))
    work = [c for c in frontier if c not in cut]
    while work:
        c = work.pop(0)
        grand = [g for g in dict.fromkeys(_base(store, x) for x in store.children[c])]
        after = [x for x in frontier if x != c] + [g for g in grand if g not in frontier]
        if len(after) <= max_arity:
            interior.append(c)
            frontier = after
            work.extend(g for g in grand if g not in cut and g not in interior and g not in work)
        elif mark:
            cut.add(c)
    return sorted(frontier), interior


def split_wide(store: NodeStore, state: EncodingState, max_arity: int) -> tuple[EncodingState, set[int]]:
    """Break associative gates whose cone support exceeds ``max_arity`` into parts.

    Children with absorbable cones are packed first-fit into groups of bounded
    support, then plain leaf children fill the remaining room.  Each group
    becomes a node of the same kind that must own a variable.
    """
    nodes, cut = _cuts(store, state)
    plans: dict[int, tuple[list[list[int]], list[int]]] = {}
    for r in sorted(nodes):
        if store.kinds[r] not in (AND, OR, XOR):
            continue
        sup = {}
        for c in store.children[r]:
            b = _base(store, c)
            sup[c] = {b} if b in cut else set(_grow(store, b, cut, max_arity, False)[0])
        if len(set().union(*sup.values())) <= max_arity:
            continue
        deep = [c for c in store.children[r] if _base(store, c) not in cut]
        if not deep:
            continue
        groups: list[list[int]] = []
        gsup: list[set[int]] = []
        for c in deep:
            for g, s in zip(groups, gsup):
                if len(s | sup[c]) <= max_arity:
                    g.append(c)
                    s |= sup[c]
                    break
            else:
                groups.append([c])
                gsup.append(set(sup[c]))
        rest = []
        for c in store.children[r]:
            if c in deep:
                continue
            for g, s in zip(groups, gsup):
                if len(s | sup[c]) <= max_arity:
                    g.append(c)
                    s |= sup[c]
                    break
            else:
                rest.append(c)
        plans[r] = (groups, rest)
    if not plans:
        return state, set()

    new: dict[int, int] = {}
    forced: set[int] = set()

    def lit(r: int) -> int:
        if r < 2:
            return r
        if store.kinds[r] == NOT:
            return store.mk_not(lit(store.children[r][0]))
        return new.get(r, r)

    for r in sorted(nodes):
        kind = store.kinds[r]
        if kind == INPUT:
            continue
        if r in plans:
            groups, rest = plans[r]
            parts = []
            for g in groups:
                p = store.rebuild(kind, [lit(c) for c in g]) if len(g) > 1 else lit(g[0])
                forced.add(_base(store, p))
                parts.append(p)
            new[r] = store.rebuild(kind, parts + [lit(c) for c in rest])
        else:
            new[r] = store.rebuild(kind, [lit(c) for c in store.children[r]], store.payload[r])
    return _remap(state, lit, store), {f for f in forced if f >= 2}


def _remap(state: EncodingState, lit, store: NodeStore) -> EncodingState:
    return replace(
        state,
        output_bits=[lit(r) for r in state.output_bits],
        asserts=[lit(r) for r in state.asserts],
        core_records=[(label, [lit(r) for r in refs]) for label, refs in state.core_records],
        mem_points={_base(store, lit(m)) for m in state.mem_points},
    )


def plan_cones(store: NodeStore, state: EncodingState, max_arity: int,
               extra_cuts: Iterable[int] = ()) -> dict[int, tuple[list[int], list[int]]]:
    """Map each non-input cut to ``(sorted leaves, interior nodes)``."""
    nodes, cut = _cuts(store, state)
    cut.update(c for c in extra_cuts if c in nodes)
    plan: dict[int, tuple[list[int], list[int]]] = {}
    for r in sorted(nodes, reverse=True):
        if r not in cut or store.kinds[r] == INPUT:
            continue
        plan[r] = _grow(store, r, cut, max_arity, True)
    return plan


def fuse_tables(store: NodeStore, state: EncodingState, max_arity: int = DEFAULT_MAX_ARITY) -> EncodingState:
    """Rewrite the live DAG so fan-out-1 cones become Table nodes.

    New nodes are appended to ``store``; the returned state refers to them.
    Cones consisting of a single gate are rebuilt unchanged.
    """
    if not 2 <= max_arity <= 12:
        raise ValueError("max_arity must be within 2..12")
    state, forced = split_wide(store, state, max_arity)
    plan = plan_cones(store, state, max_arity, forced)
    new: dict[int, int] = {}

    def lit(r: int) -> int:
        if r < 2:
            return r
        if store.kinds[r] == NOT:
            return store.mk_not(lit(store.children[r][0]))
        return new.get(r, r)

    for r in sorted(plan):
        leaves, interior = plan[r]
        if len(interior) == 1 or len(leaves) > max_arity:
            new[r] = store.rebuild(store.kinds[r], [lit(c) for c in store.children[r]], store.payload[r])
        else:
            tt = _cone_table(store, r, leaves)
            new[r] = store.mk_table([lit(x) for x in leaves], tt)

    return _remap(state, lit, store)
