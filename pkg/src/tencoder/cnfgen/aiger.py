"""ASCII AIGER export of pure circuits, plus a reader and simulator for checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..symex.execute import EncodingState
from ..symex.nodes import AND, INPUT, ITE, NOT, OR, XOR, NodeStore
from .prune import prune


class AigerError(ValueError):
    pass


class _Aig:
    def __init__(self, n: int):
        self.n = n
        self.ands: list[tuple[int, int, int]] = []
        self.cons: dict[tuple[int, int], int] = {}

    def and2(self, a: int, b: int) -> int:
        if a > b:
            a, b = b, a
        if a == 0:
            return 0
        if a == 1:
            return b
        if a == b:
            return a
        if a ^ 1 == b:
            return 0
        hit = self.cons.get((a, b))
        if hit is not None:
            return hit
        lhs = 2 * (self.n + len(self.ands) + 1)
        self.ands.append((lhs, b, a))
        self.cons[(a, b)] = lhs
        return lhs

    def and_n(self, xs: list[int]) -> int:
        acc = 1
        for x in xs:
            acc = self.and2(acc, x)
        return acc

    def xor2(self, a: int, b: int) -> int:
        return self.and2(self.and2(a, b) ^ 1, self.and2(a ^ 1, b ^ 1) ^ 1)


def to_aiger(store: NodeStore, state: EncodingState) -> str:
    """ASCII ``aag`` text for the outputs as functions of the inputs."""
    if state.asserts:
        raise AigerError("AIGER export requires a pure circuit (the program contains asserts)")
    n = len(state.input_vars)
    aig = _Aig(n)
    lit: dict[int, int] = {0: 0, 1: 1}
    for i, r in enumerate(state.input_vars):
        lit[r] = 2 * (i + 1)
    for r in sorted(prune(store, state, keep_core=False)):
        kind = store.kinds[r]
        if kind == INPUT:
            continue
        ch = [lit[c] for c in store.children[r]]
        if kind == NOT:
            v = ch[0] ^ 1
        elif kind == AND:
            v = aig.and_n(ch)
        elif kind == OR:
            v = aig.and_n([c ^ 1 for c in ch]) ^ 1
        elif kind == XOR:
            v = 0
            for c in ch:
                v = aig.xor2(v, c) if v else c
        elif kind == ITE:
            c, a, b = ch
            v = aig.and2(aig.and2(c, a) ^ 1, aig.and2(c ^ 1, b) ^ 1) ^ 1
        else:
            raise AigerError(f"AIGER export requires a pure circuit (node kind {kind})")
        lit[r] = v
    outs = [lit[r] for r in state.output_bits]
    m_idx = n + len(aig.ands)
    lines = [f"aag {m_idx} {n} 0 {len(outs)} {len(aig.ands)}"]
    lines += [str(2 * (i + 1)) for i in range(n)]
    lines += [str(o) for o in outs]
    lines += [f"{l} {a} {b}" for l, a, b in aig.ands]
    return "\n".join(lines) + "\n"


@dataclass
class AigFile:
    max_var: int
    inputs: list[int]
    latches: list[tuple[int, int]]
    outputs: list[int]
    ands: list[tuple[int, int, int]]


def parse_aiger(text: str) -> AigFile:
    lines = [l for l in text.splitlines() if l.strip()]
    if not lines:
        raise AigerError("empty AIGER file")
    head = lines[0].split()
    if len(head) != 6 or head[0] != "aag":
        raise AigerError("expected an ASCII 'aag' header with M I L O A")
    try:
        M, I, L, O, A = map(int, head[1:])
        body = [list(map(int, l.split())) for l in lines[1:1 + I + L + O + A]]
    except ValueError:
        raise AigerError("non-numeric AIGER entry") from None
    if len(body) < I + L + O + A:
        raise AigerError("truncated AIGER file")
    inputs = [r[0] for r in body[:I]]
    latches = [(r[0], r[1]) for r in body[I:I + L]]
    outputs = [r[0] for r in body[I + L:I + L + O]]
    ands = [tuple(r) for r in body[I + L + O:]]
    return AigFile(M, inputs, latches, outputs, ands)


def simulate_aiger(aig: AigFile, x: Sequence[int]) -> list[int]:
    """Evaluate a combinational AIG on one input vector."""
    if aig.latches:
        raise AigerError("simulation supports combinational AIGs only")
    val = {0: 0}
    for lit, b in zip(aig.inputs, x):
        val[lit >> 1] = b & 1

    def get(l: int) -> int:
        return val[l >> 1] ^ (l & 1)

    for lhs, a, b in aig.ands:
        val[lhs >> 1] = get(a) & get(b)
    return [get(o) for o in aig.outputs]
