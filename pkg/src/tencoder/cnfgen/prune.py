"""Backward reachability from everything the encoding must keep."""

from __future__ import annotations

from typing import Iterable

from ..symex.execute import EncodingState
from ..symex.nodes import NodeStore


def roots_of(state: EncodingState, keep_core: bool = True) -> list[int]:
    roots = list(state.output_bits) + list(state.asserts)
    if keep_core:
        for _, refs in state.core_records:
            roots.extend(refs)
    return roots


def reachable(store: NodeStore, roots: Iterable[int]) -> set[int]:
    seen: set[int] = set()
    stack = [r for r in roots if r >= 2]
    while stack:
        r = stack.pop()
        if r in seen:
            continue
        seen.add(r)
        stack.extend(c for c in store.children[r] if c not in seen)
    return seen


def prune(store: NodeStore, state: EncodingState, keep_core: bool = True) -> set[int]:
    """Live node ids: reachable from outputs, asserts and core records, plus every input."""
    live = reachable(store, roots_of(state, keep_core))
    live.update(state.input_vars)
    return live


def fanout(store: NodeStore, live: set[int], roots: Iterable[int]) -> dict[int, int]:
    """Reference counts inside the live region; root uses count as references."""
    count = dict.fromkeys(live, 0)
    for r in live:
        for c in store.children[r]:
            count[c] += 1
    for r in roots:
        if r >= 2:
            count[r] += 1
    return count



