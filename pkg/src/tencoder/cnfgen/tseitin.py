"""Tseitin conversion of the pruned DAG into a template CNF.

Clauses are first built over provisional variable ids (inputs first, then
gates and auxiliary chain variables in creation order, then output slots)
and renumbered at the end so that inputs occupy ``1..n`` and outputs the
last ``m`` indices with no gaps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Optional

from ..symex.execute import EncodingState
from ..symex.nodes import AND, INPUT, ITE, NOT, OR, TABLE, XOR, NodeStore
from .minimize import minimize_table
from .prune import prune

DEFAULT_XOR_DIRECT_MAX = 4
DEFAULT_MAX_VARS = 10_000_000

Clause = tuple[int, ...]


class EncodingError(Exception):
    pass


@dataclass
class EncodeOptions:
    xor_direct_max: int = DEFAULT_XOR_DIRECT_MAX
    ite_redundant: bool = False
    max_vars: int = DEFAULT_MAX_VARS

    def __post_init__(self):
        if self.xor_direct_max < 2:
            raise ValueError("xor_direct_max must be at least 2")


@dataclass
class TemplateCnf:
    num_vars: int
    clauses: list[Clause]
    input_vars: list[int]
    output_vars: list[int]
    # core entries are literal tokens: "17", "-4", or "0" / "-0" for constants false / true
    core_records: list[tuple[str, list[str]]] = field(default_factory=list)
    unused_inputs: list[int] = field(default_factory=list)
    var_to_node: dict[int, int] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.input_vars)

    @property
    def m(self) -> int:
        return len(self.output_vars)

    @property
    def num_literals(self) -> int:
        return sum(len(c) for c in self.clauses)

    def metrics(self) -> dict:
        return {"vars": self.num_vars, "clauses": len(self.clauses), "literals": self.num_literals}


def xor_clauses(lits: list[int]) -> list[Clause]:
    """Clauses forcing the XOR of ``lits`` to be false (2^(k-1) clauses)."""
    out = []
    for signs in product((1, -1), repeat=len(lits)):
        # forbid each assignment of odd parity: literal l is true when sign is -1 here
        if sum(1 for s in signs if s < 0) % 2 == 1:
            out.append(tuple(s * l for s, l in zip(signs, lits)))
    return out


class _Builder:
    def __init__(self, store: NodeStore, options: EncodeOptions):
        self.store = store
        self.opt = options
        self.next_var = 1
        self.lit: dict[int, int] = {}
        self.clauses: list[Clause] = []
        self.var_node: dict[int, int] = {}

    def fresh(self) -> int:
        v = self.next_var
        self.next_var += 1
        if v > self.opt.max_vars:
            raise EncodingError(f"encoding exceeds the variable budget of {self.opt.max_vars}")
        return v

    def ref(self, r: int) -> int:
        st = self.store
        if st.kinds[r] == NOT:
            return -self.lit[st.children[r][0]]
        return self.lit[r]

    def define(self, r: int, v: int) -> None:
        """Emit clauses for ``v <-> node r`` (v may be negative to claim with polarity)."""
        st = self.store
        kind = st.kinds[r]
        ch = [self.ref(c) for c in st.children[r]]
        add = self.clauses.append
        if kind == AND:
            for c in ch:
                add((-v, c))
            add(tuple([v] + [-c for c in ch]))
        elif kind == OR:
            for c in ch:
                add((v, -c))
            add(tuple([-v] + ch))
        elif kind == XOR:
            self.xor(v, ch)
        elif kind == ITE:
            c, a, b = ch
            add((-c, -a, v))
            add((-c, a, -v))
            add((c, -b, v))
            add((c, b, -v))
            if self.opt.ite_redundant:
                add((-a, -b, v))
                add((a, b, -v))
        elif kind == TABLE:
            k = len(ch)
            names = ch + [v]
            for cl in minimize_table(k, st.payload[r]):
                add(tuple(names[abs(x) - 1] * (1 if x > 0 else -1) for x in cl))
        else:  # pragma: no cover
            raise EncodingError(f"cannot encode node kind {kind}")

    def xor(self, v: int, lits: list[int]) -> None:
        t = self.opt.xor_direct_max
        lits = list(lits)
        # balanced chaining: fold groups of t literals into fresh variables
        while len(lits) > t:
            grouped = []
            for i in range(0, len(lits), t):
                group = lits[i:i + t]
                if len(group) == 1:
                    grouped.append(group[0])
                    continue
                aux = self.fresh()
                self.clauses.extend(xor_clauses(group + [aux]))
                grouped.append(aux)
            lits = grouped
        self.clauses.extend(xor_clauses(lits + [v]))


def tseitin(store: NodeStore, state: EncodingState, options: Optional[EncodeOptions] = None) -> TemplateCnf:
    """Encode the live part of the DAG as a template CNF."""
    opt = options or EncodeOptions()
    b = _Builder(store, opt)
    live = prune(store, state)
    for r in state.input_vars:
        b.lit[r] = b.fresh()
        b.var_node[b.lit[r]] = r
    n = len(state.input_vars)

    # outputs that can own their node's variable
    claimed: dict[int, int] = {}  # node -> output position
    for j, r in enumerate(state.output_bits):
        if r < 2:
            continue
        node = store.children[r][0] if store.kinds[r] == NOT else r
        if store.kinds[node] != INPUT and node not in claimed:
            claimed[node] = j

    out_var: list[Optional[int]] = [None] * len(state.output_bits)
    for r in sorted(live):
        kind = store.kinds[r]
        if kind in (INPUT, NOT):
            continue
        j = claimed.get(r)
        if j is None:
            v = b.fresh()
            b.lit[r] = v
            b.define(r, v)
        else:
            # defer the slot; a placeholder id is fixed up during renumbering
            v = b.fresh()
            out_var[j] = v
            b.lit[r] = -v if store.kinds[state.output_bits[j]] == NOT else v
            b.define(r, b.lit[r])
        b.var_node[v] = r

    for j, r in enumerate(state.output_bits):
        if out_var[j] is not None:
            continue
        f = b.fresh()
        out_var[j] = f
        if r < 2:
            b.clauses.append((f,) if r else (-f,))
        else:
            l = b.ref(r)
            b.clauses.append((-f, l))
            b.clauses.append((f, -l))

    for a in state.asserts:
        if a == 1:
            continue
        if a == 0:
            f = b.fresh()
            b.clauses.append((f,))
            b.clauses.append((-f,))
            continue
        b.clauses.append((b.ref(a),))

    total = b.next_var - 1
    outs = [v for v in out_var if v is not None]
    out_set = set(outs)
    perm: dict[int, int] = {}
    nxt = n + 1
    for v in range(n + 1, total + 1):
        if v not in out_set:
            perm[v] = nxt
            nxt += 1
    for v in outs:
        perm[v] = nxt
        nxt += 1
    for v in range(1, n + 1):
        perm[v] = v

    def rn(l: int) -> int:
        return perm[l] if l > 0 else -perm[-l]

    clauses = [tuple(rn(l) for l in c) for c in b.clauses]
    core = []
    for label, refs in state.core_records:
        toks = []
        for r in refs:
            if r < 2:
                toks.append("-0" if r else "0")
            else:
                toks.append(str(rn(b.ref(r))))
        core.append((label, toks))
    mentioned = {abs(l) for c in clauses for l in c}
    return TemplateCnf(
        num_vars=total,
        clauses=clauses,
        input_vars=list(range(1, n + 1)),
        output_vars=[perm[v] for v in outs],
        core_records=core,
        unused_inputs=[v for v in range(1, n + 1) if v not in mentioned],
        var_to_node={perm[v]: r for v, r in b.var_node.items()},
    )
