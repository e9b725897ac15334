"""Symbolic execution of resolved programs on a bit-cell abstract machine.

Loops are unrolled with concrete service integers; ``if`` statements whose
condition is a bit value run both branches on copy-on-write memories which
are then merged cell by cell with if-then-else nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..diagnostics import CompileError, Diagnostic
from ..frontend import ast as A
from ..frontend.resolve import int_binop, int_unop
from . import arith
from .nodes import FALSE, TRUE, NodeStore

MAX_LOOP_ITERATIONS = 1 << 24


@dataclass
class EncodingState:
    input_vars: list[int] = field(default_factory=list)
    output_bits: list[int] = field(default_factory=list)
    core_records: list[tuple[str, list[int]]] = field(default_factory=list)
    asserts: list[int] = field(default_factory=list)
    mem_points: set[int] = field(default_factory=set)
    inputs: list[tuple[str, int]] = field(default_factory=list)
    outputs: list[tuple[str, int]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.input_vars)

    @property
    def m(self) -> int:
        return len(self.output_bits)


class Memory:
    """Copy-on-write map from variable instance to its list of cell values."""

    __slots__ = ("cells", "owned")

    def __init__(self, cells: Optional[dict[int, list[int]]] = None):
        self.cells: dict[int, list[int]] = cells if cells is not None else {}
        self.owned: set[int] = set(self.cells)

    def clone(self) -> "Memory":
        # both sides now share every list, so neither may write in place
        self.owned = set()
        m = Memory(dict(self.cells))
        m.owned = set()
        return m

    def read(self, key: int) -> list[int]:
        return self.cells[key]

    def create(self, key: int, values: list[int]) -> None:
        self.cells[key] = values
        self.owned.add(key)

    def write(self, key: int, index: int, ref: int) -> None:
        if key not in self.owned:
            self.cells[key] = list(self.cells[key])
            self.owned.add(key)
        self.cells[key][index] = ref

    def drop(self, key: int) -> None:
        self.cells.pop(key, None)
        self.owned.discard(key)


def merge_conditional(store: NodeStore, cond: int, then_mem: Memory, else_mem: Memory) -> Memory:
    """Join two branch memories: differing cells become ``ite(cond, then, else)``."""
    if cond == TRUE:
        return then_mem
    if cond == FALSE:
        return else_mem
    if then_mem.cells.keys() != else_mem.cells.keys():
        raise ValueError("branch memories cover different cells")
    merged: dict[int, list[int]] = {}
    for key, tv in then_mem.cells.items():
        ev = else_mem.cells[key]
        if tv is ev or tv == ev:
            merged[key] = tv
        else:
            merged[key] = [a if a == b else store.mk_ite(cond, a, b) for a, b in zip(tv, ev)]
    out = Memory(merged)
    out.owned = set()
    return out


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class _Fault(Exception):
    def __init__(self, message: str, pos: A.Pos):
        super().__init__(message)
        self.pos = pos


class SymbolicExecutor:
    def __init__(self, program: A.Program, store: Optional[NodeStore] = None):
        self.program = program
        self.store = store if store is not None else NodeStore()
        self.state = EncodingState()
        self.mem = Memory()
        self.ints: dict[int, int] = {}
        self.int_depth: dict[int, int] = {}
        self.key_decl: dict[int, A.VarDecl] = {}
        self.globals: dict[int, int] = {}
        self.frames: list[dict[int, int]] = [{}]
        self.frame_depth: list[int] = [0]
        self.path: list[int] = []
        self.loops: list[str] = []
        self._next_key = 0

    # -- helpers --------------------------------------------------------------
    def fault(self, msg: str, pos: A.Pos) -> _Fault:
        if self.loops:
            msg += " (in " + ", ".join(self.loops) + ")"
        return _Fault(msg, pos)

    def new_key(self, decl: A.VarDecl) -> int:
        k = self._next_key
        self._next_key += 1
        self.key_decl[k] = decl
        return k

    def key_of(self, decl: A.VarDecl) -> int:
        k = self.frames[-1].get(decl.uid)
        if k is None:
            k = self.globals[decl.uid]
        return k

    def mark_mem(self, decl: A.VarDecl, refs) -> None:
        if "__mem" in decl.attrs:
            st = self.store
            for r in refs:
                if r >= 2:
                    self.state.mem_points.add(st.children[r][0] if st.is_not(r) else r)

    # -- driver ---------------------------------------------------------------
    def run(self) -> tuple[NodeStore, EncodingState]:
        try:
            self._run()
        except _Fault as f:
            raise CompileError([Diagnostic("error", str(f), f.pos.line, f.pos.column, self.program.origin)])
        return self.store, self.state

    def _run(self) -> None:
        st = self.state
        for d in self.program.globals:
            key = self.new_key(d)
            self.globals[d.uid] = key
            if d.base == "int":
                self.ints[key] = self.eval_int(d.init) if d.init is not None else 0
                self.int_depth[key] = 0
                continue
            if "__in" in d.attrs:
                refs = [self.store.new_input() for _ in range(d.size)]
                st.input_vars.extend(refs)
                st.inputs.append((d.name, d.size))
            elif d.init is not None:
                refs = arith.const_bits(self.eval_int(d.init), d.size)
            else:
                refs = [FALSE] * d.size
            self.mem.create(key, refs)
            self.mark_mem(d, refs)
        main = self.program.function("main")
        try:
            self.exec_block(main.body.stmts)
        except _Return:
            pass
        for d in self.program.outputs():
            st.outputs.append((d.name, d.size))
            st.output_bits.extend(self.mem.read(self.globals[d.uid]))

    # -- statements -----------------------------------------------------------
    def exec_block(self, stmts) -> None:
        declared: list[int] = []
        try:
            for s in stmts:
                self.exec_stmt(s, declared)
        finally:
            for key in declared:
                self.mem.drop(key)
                self.ints.pop(key, None)

    def declare(self, d: A.VarDecl, declared: list[int], value=None) -> None:
        key = self.new_key(d)
        self.frames[-1][d.uid] = key
        declared.append(key)
        if d.base == "int":
            self.ints[key] = value if value is not None else (self.eval_int(d.init) if d.init is not None else 0)
            self.int_depth[key] = len(self.path)
            return
        if value is None:
            value = self.eval_bits(d.init, d.size) if d.init is not None else [FALSE] * d.size
            value = self.fit(value, d.size, d.pos, d.name)
        self.mem.create(key, list(value))
        self.mark_mem(d, value)

    def fit(self, bits: list[int], width: int, pos: A.Pos, what: str) -> list[int]:
        if len(bits) > width:
            raise self.fault(f"value of width {len(bits)} does not fit '{what}' of width {width}", pos)
        return bits + [FALSE] * (width - len(bits))

    def exec_stmt(self, s, declared: list[int]) -> None:
        if isinstance(s, A.VarDecl):
            self.declare(s, declared)
        elif isinstance(s, A.Assign):
            self.assign(s)
        elif isinstance(s, A.IncDec):
            key = self.key_of(s.target.decl)
            self.set_int(key, int_binop("+" if s.op == "++" else "-", self.ints[key], 1), s.pos)
        elif isinstance(s, A.Block):
            self.exec_block(s.stmts)
        elif isinstance(s, A.If):
            self.exec_if(s)
        elif isinstance(s, A.For):
            self.exec_for(s)
        elif isinstance(s, A.ExprStmt):
            self.call(s.expr)
        elif isinstance(s, A.Return):
            if len(self.path) > self.frame_depth[-1]:
                raise self.fault("return under a bit-valued condition is not supported", s.pos)
            value = None
            if s.value is not None:
                value = self.eval_int(s.value) if s.value.ty == "int" else self.eval_bits(s.value)
            raise _Return(value)
        elif isinstance(s, A.Assert):
            if s.expr.ty == "int":
                e = TRUE if self.eval_int(s.expr) else FALSE
            else:
                e = self.store.mk_or_n(self.eval_bits(s.expr))
            self.apply_assert(e)
        elif isinstance(s, A.CoreVars):
            refs = list(self.mem.read(self.key_of(s.target.decl)))
            record_core_vars(self.state, s.target.ident, refs)
        else:  # pragma: no cover
            raise TypeError(s)

    def apply_assert(self, e: int) -> None:
        if self.path:
            e = self.store.mk_or(self.store.mk_not(self.store.mk_and_n(self.path)), e)
        apply_assert(self.state, e)

    def set_int(self, key: int, value: int, pos: A.Pos) -> None:
        if self.int_depth.get(key, 0) < len(self.path):
            raise self.fault("service int modified under a bit-valued condition", pos)
        self.ints[key] = value

    def exec_if(self, s: A.If) -> None:
        if s.cond.ty == "int":
            if self.eval_int(s.cond):
                self.exec_block(s.then.stmts)
            elif s.other is not None:
                self.exec_block(s.other.stmts)
            return
        cond = self.store.mk_or_n(self.eval_bits(s.cond))
        if cond == TRUE:
            self.exec_block(s.then.stmts)
            return
        if cond == FALSE:
            if s.other is not None:
                self.exec_block(s.other.stmts)
            return
        base = self.mem
        self.mem = base.clone()
        self.path.append(cond)
        try:
            self.exec_block(s.then.stmts)
            then_mem = self.mem
            self.mem = base.clone()
            self.path[-1] = self.store.mk_not(cond)
            if s.other is not None:
                self.exec_block(s.other.stmts)
            else_mem = self.mem
        finally:
            self.path.pop()
        self.mem = merge_conditional(self.store, cond, then_mem, else_mem)
        for key, vals in self.mem.cells.items():
            decl = self.key_decl[key]
            if "__mem" in decl.attrs and vals is not base.cells.get(key):
                self.mark_mem(decl, vals)

    def exec_for(self, s: A.For) -> None:
        declared: list[int] = []
        try:
            if s.init is not None:
                self.exec_stmt(s.init, declared)
            counter = _loop_label(s)
            it = 0
            while self.eval_int(s.cond):
                if it >= MAX_LOOP_ITERATIONS:
                    raise self.fault("loop exceeds the unrolling limit", s.pos)
                self.loops.append(f"iteration {it} of loop at line {s.pos.line}{counter(self)}")
                try:
                    self.exec_block(s.body.stmts)
                finally:
                    self.loops.pop()
                if s.step is not None:
                    self.exec_stmt(s.step, declared)
                it += 1
        finally:
            for key in declared:
                self.mem.drop(key)
                self.ints.pop(key, None)

    # -- assignment -----------------------------------------------------------
    def assign(self, s: A.Assign) -> None:
        t = s.target
        value_expr = s.value if s.op == "=" else A.Binary(s.op[:-1], t, s.value, pos=s.pos, ty=t.ty)
        if t.ty == "int":
            key = self.key_of(t.decl)
            self.set_int(key, self.eval_int(value_expr), s.pos)
            return
        decl = t.decl if isinstance(t, A.Name) else t.base.decl
        key = self.key_of(decl)
        cur = self.mem.read(key)
        if isinstance(t, A.Name):
            lo, hi = 0, len(cur)
        elif isinstance(t, A.Index):
            lo = self.eval_int(t.index)
            hi = lo + 1
        else:
            lo, hi = self.eval_int(t.lo), self.eval_int(t.hi)
        if not 0 <= lo < hi <= len(cur):
            raise self.fault(f"index [{lo}:{hi}) out of bounds for '{decl.name}' of length {len(cur)}", s.pos)
        bits = self.fit(self.eval_bits(value_expr, hi - lo), hi - lo, s.pos, decl.name)
        for i, r in enumerate(bits):
            if cur[lo + i] != r:
                self.mem.write(key, lo + i, r)
        self.mark_mem(decl, bits)

    # -- expressions ----------------------------------------------------------
    def eval_int(self, e) -> int:
        if isinstance(e, A.IntLit):
            return e.value
        if isinstance(e, A.Name):
            return self.ints[self.key_of(e.decl)]
        if isinstance(e, A.Unary):
            return int_unop(e.op, self.eval_int(e.operand))
        if isinstance(e, A.Binary):
            a, b = self.eval_int(e.left), self.eval_int(e.right)
            try:
                return int_binop(e.op, a, b)
            except ZeroDivisionError:
                raise self.fault("division of service ints by zero", e.pos)
            except ValueError as exc:
                raise self.fault(str(exc), e.pos)
        if isinstance(e, A.Call):
            v = self.call(e)
            if not isinstance(v, int):
                raise self.fault(f"'{e.name}' did not return an int", e.pos)
            return v
        raise self.fault("bit expression used as an int", e.pos)

    def _leaves(self, e, op: str, out: list) -> list:
        if isinstance(e, A.Binary) and e.op == op and e.ty == "bit":
            self._leaves(e.left, op, out)
            self._leaves(e.right, op, out)
        else:
            out.append(e)
        return out

    def _operands(self, exprs, width: Optional[int]) -> list[list[int]]:
        """Evaluate operands, sizing int literals to the widest bit operand."""
        vals = [self.eval_int(x) if x.ty == "int" else self.eval_bits(x) for x in exprs]
        w = max((len(v) for v in vals if isinstance(v, list)), default=0)
        if w == 0 and width:
            w = width
        w = max([w, 1] + [v.bit_length() for v in vals if isinstance(v, int)])
        return [arith.const_bits(v, w) if isinstance(v, int) else arith.extend(v, w) for v in vals]

    def eval_bits(self, e, width: Optional[int] = None) -> list[int]:
        st = self.store
        if e.ty == "int":
            v = self.eval_int(e)
            w = width if width is not None else max(1, v.bit_length())
            return arith.const_bits(v, w)
        if isinstance(e, A.Name):
            return list(self.mem.read(self.key_of(e.decl)))
        if isinstance(e, A.Index):
            vec = self.mem.read(self.key_of(e.base.decl))
            i = self.eval_int(e.index)
            if not 0 <= i < len(vec):
                raise self.fault(f"index {i} out of bounds for '{e.base.ident}' of length {len(vec)}", e.pos)
            return [vec[i]]
        if isinstance(e, A.Slice):
            vec = self.mem.read(self.key_of(e.base.decl))
            lo, hi = self.eval_int(e.lo), self.eval_int(e.hi)
            if not 0 <= lo < hi <= len(vec):
                raise self.fault(f"slice [{lo}:{hi}] out of bounds for '{e.base.ident}' of length {len(vec)}", e.pos)
            return list(vec[lo:hi])
        if isinstance(e, A.Unary):
            v = self.eval_bits(e.operand, width)
            if e.op == "~":
                return [st.mk_not(b) for b in v]
            if e.op == "!":
                return [st.mk_not(st.mk_or_n(v))]
            raise self.fault(f"operator '{e.op}' is not defined on bits", e.pos)
        if isinstance(e, A.Call):
            v = self.call(e)
            if not isinstance(v, list):
                raise self.fault(f"'{e.name}' did not return a bit value", e.pos)
            return v
        if not isinstance(e, A.Binary):  # pragma: no cover
            raise TypeError(e)
        op = e.op
        if op in ("^", "&", "|"):
            leaves = self._operands(self._leaves(e, op, []), width)
            make = {"^": st.mk_xor_n, "&": st.mk_and_n, "|": st.mk_or_n}[op]
            return [make([v[j] for v in leaves]) for j in range(len(leaves[0]))]
        if op in ("&&", "||"):
            a = st.mk_or_n(self.eval_bits(e.left))
            b = st.mk_or_n(self.eval_bits(e.right))
            return [st.mk_and(a, b) if op == "&&" else st.mk_or(a, b)]
        if op in ("<<", ">>"):
            v = self.eval_bits(e.left, width)
            k = self.eval_int(e.right)
            if k < 0:
                raise self.fault("negative shift amount", e.pos)
            return arith.shl(v, k) if op == "<<" else arith.shr(v, k)
        a, b = self._operands([e.left, e.right], width)
        if op in ("==", "!=", "<", "<=", ">", ">="):
            return [arith.compare(st, op, a, b)]
        if op == "+":
            return arith.add(st, a, b)
        if op == "-":
            return arith.sub(st, a, b)
        if op == "*":
            return arith.mul(st, a, b)
        raise self.fault(f"operator '{op}' is not defined on bits", e.pos)

    # -- calls ----------------------------------------------------------------
    def call(self, e: A.Call):
        f: A.FuncDecl = e.decl
        values = []
        for p, a in zip(f.params, e.args):
            if p.base == "int":
                values.append(self.eval_int(a))
            else:
                values.append(self.fit(self.eval_bits(a, p.size), p.size, a.pos, p.name))
        self.frames.append({})
        self.frame_depth.append(len(self.path))
        declared: list[int] = []
        result = None
        try:
            for p, v in zip(f.params, values):
                self.declare(p, declared, v)
            try:
                self.exec_block(f.body.stmts)
            except _Return as r:
                result = r.value
        finally:
            for key in declared:
                self.mem.drop(key)
                self.ints.pop(key, None)
            self.frames.pop()
            self.frame_depth.pop()
        if f.ret != "void" and result is None:
            raise self.fault(f"function '{f.name}' ended without returning a value", e.pos)
        return result


def _loop_label(s: A.For):
    name = None
    if isinstance(s.init, A.VarDecl):
        name = s.init.name
        decl = s.init
    elif isinstance(s.init, A.Assign) and isinstance(s.init.target, A.Name):
        name = s.init.target.ident
        decl = s.init.target.decl
    if name is None:
        return lambda ex: ""

    def label(ex: SymbolicExecutor) -> str:
        try:
            return f", {name}={ex.ints[ex.key_of(decl)]}"
        except KeyError:
            return ""

    return label


def apply_assert(state: EncodingState, e: int) -> None:
    """Record a constraint the encoding must force true."""
    state.asserts.append(e)


def record_core_vars(state: EncodingState, label: str, refs: list[int]) -> None:
    state.core_records.append((label, list(refs)))


def execute(program: A.Program, store: Optional[NodeStore] = None) -> tuple[NodeStore, EncodingState]:
    """Symbolically execute a resolved program; returns the DAG and the encoding records."""
    return SymbolicExecutor(program, store).run()
