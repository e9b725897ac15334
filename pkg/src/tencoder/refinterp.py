"""Concrete reference interpreter working directly on the AST.

It shares no code with the symbolic executor beyond the service-integer
arithmetic of the frontend, so it can serve as an oracle for the encoder.
The AST is translated once into nested Python closures; bit arrays are
lists of 0/1 with index 0 as the least significant bit.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .frontend import ast as A
from .frontend.resolve import INT_MAX, INT_MIN, int_binop, int_unop, wrap_int


class InterpError(Exception):
    def __init__(self, message: str, pos: A.Pos):
        super().__init__(f"{pos.line}:{pos.column}: {message}")
        self.pos = pos


class AssertionViolation(InterpError):
    pass


class _Return(Exception):
    def __init__(self, value):
        self.value = value


def _to_bits(value: int, width: int) -> list[int]:
    return [(value >> i) & 1 for i in range(width)]


def _to_int(bits: Sequence[int]) -> int:
    return sum(b << i for i, b in enumerate(bits))


@dataclass
class ConcreteState:
    """Variable values keyed by declaration uid: bit lists or service ints."""

    globals: dict[int, object] = field(default_factory=dict)


def _wrap(v: int) -> int:
    return v if INT_MIN <= v <= INT_MAX else wrap_int(v)


_FAST_INT = {
    "+": lambda a, b: _wrap(a + b),
    "-": lambda a, b: _wrap(a - b),
    "*": lambda a, b: wrap_int(a * b),
    "<": lambda a, b: int(a < b),
    "<=": lambda a, b: int(a <= b),
    ">": lambda a, b: int(a > b),
    ">=": lambda a, b: int(a >= b),
    "==": lambda a, b: int(a == b),
    "!=": lambda a, b: int(a != b),
    "&": lambda a, b: a & b,
    "|": lambda a, b: a | b,
    "^": lambda a, b: a ^ b,
}


def _int_mod(a: int, b: int) -> int:
    if b > 0 and a >= 0:
        return a % b
    return int_binop("%", a, b)

IntFn = Callable[[dict], int]
BitsFn = Callable[[dict, Optional[int]], list]
StmtFn = Callable[[dict], None]


class _Compiler:
    def __init__(self, program: A.Program, state: ConcreteState):
        self.program = program
        self.G = state.globals
        self.funcs: dict[str, Callable] = {}

    # -- variables ------------------------------------------------------------
    def store_of(self, d: A.VarDecl):
        """Return ``get(frame)`` giving the dict that holds ``d``."""
        G = self.G
        if d.is_global:
            return lambda f: G
        return lambda f: f

    # -- integer expressions --------------------------------------------------
    def int_expr(self, e) -> IntFn:
        if isinstance(e, A.IntLit):
            v = e.value
            return lambda f: v
        if isinstance(e, A.Name):
            uid = e.decl.uid
            if e.decl.is_global:
                G = self.G
                return lambda f: G[uid]
            return lambda f: f[uid]
        if isinstance(e, A.Unary):
            inner = self.int_expr(e.operand)
            op = e.op
            return lambda f: int_unop(op, inner(f))
        if isinstance(e, A.Binary):
            a, b = self.int_expr(e.left), self.int_expr(e.right)
            op, pos = e.op, e.pos
            if op == "&&":
                return lambda f: int(bool(a(f)) and bool(b(f)))
            if op == "||":
                return lambda f: int(bool(a(f)) or bool(b(f)))
            if op == "%":
                def mod(f):
                    try:
                        return _int_mod(a(f), b(f))
                    except ZeroDivisionError:
                        raise InterpError("division by zero", pos) from None
                return mod
            fast = _FAST_INT.get(op)
            if fast is not None:
                return lambda f: fast(a(f), b(f))

            def slow(f):
                try:
                    return int_binop(op, a(f), b(f))
                except (ZeroDivisionError, ValueError) as exc:
                    raise InterpError(str(exc), pos) from None
            return slow
        if isinstance(e, A.Call):
            call = self.call(e)
            return lambda f: call(f)
        raise InterpError("bit expression used as an int", e.pos)

    # -- bit expressions ------------------------------------------------------
    def chain(self, e, op: str) -> list:
        if isinstance(e, A.Binary) and e.op == op and e.ty == "bit":
            return self.chain(e.left, op) + self.chain(e.right, op)
        return [e]

    def operands(self, exprs) -> Callable[[dict, Optional[int]], tuple[list[int], int]]:
        """Operand values as ints with their common width; int literals size to the others."""
        parts = [(True, self.int_expr(x)) if x.ty == "int" else (False, self.bits_expr(x)) for x in exprs]

        if not any(is_int for is_int, _ in parts):
            fns = [fn for _, fn in parts]

            def run_bits(f, hint):
                raw = [fn(f, None) for fn in fns]
                w = max(len(r) for r in raw)
                if w == 1:
                    return [r[0] for r in raw], 1
                return [_to_int(r) for r in raw], w
            return run_bits

        def run(f, hint):
            raw = [fn(f) if is_int else fn(f, None) for is_int, fn in parts]
            w = max((len(r) for r in raw if isinstance(r, list)), default=0) or (hint or 0)
            w = max([w, 1] + [r.bit_length() for r in raw if isinstance(r, int)])
            mask = (1 << w) - 1
            return [(r & mask) if isinstance(r, int) else _to_int(r) for r in raw], w
        return run

    def bits_expr(self, e) -> BitsFn:
        if e.ty == "int":
            iv = self.int_expr(e)

            def lit(f, hint):
                v = iv(f)
                return _to_bits(v, hint if hint is not None else max(1, v.bit_length()))
            return lit
        if isinstance(e, A.Name):
            uid, where = e.decl.uid, self.store_of(e.decl)
            return lambda f, hint: list(where(f)[uid])
        if isinstance(e, (A.Index, A.Slice)):
            uid, where = e.base.decl.uid, self.store_of(e.base.decl)
            name, pos = e.base.ident, e.pos
            if isinstance(e, A.Index):
                ix = self.int_expr(e.index)
                G = self.G
                is_global = e.base.decl.is_global

                def index(f, hint):
                    v = (G if is_global else f)[uid]
                    i = ix(f)
                    if 0 <= i < len(v):
                        return [v[i]]
                    raise InterpError(f"index {i} out of bounds for '{name}'", pos)
                return index
            lo_fn, hi_fn = self.int_expr(e.lo), self.int_expr(e.hi)

            def slice_(f, hint):
                v = where(f)[uid]
                lo, hi = lo_fn(f), hi_fn(f)
                if not 0 <= lo < hi <= len(v):
                    raise InterpError(f"slice [{lo}:{hi}] out of bounds for '{name}'", pos)
                return v[lo:hi]
            return slice_
        if isinstance(e, A.Unary):
            inner = self.bits_expr(e.operand)
            if e.op == "~":
                return lambda f, hint: [1 - b for b in inner(f, hint)]
            return lambda f, hint: [0 if any(inner(f, hint)) else 1]
        if isinstance(e, A.Call):
            call = self.call(e)
            return lambda f, hint: call(f)
        op, pos = e.op, e.pos
        if op in ("&&", "||"):
            a, b = self.bits_expr(e.left), self.bits_expr(e.right)
            if op == "&&":
                return lambda f, hint: [int(any(a(f, None)) and any(b(f, None)))]
            return lambda f, hint: [int(any(a(f, None)) or any(b(f, None)))]
        if op in ("<<", ">>"):
            a, k_fn = self.bits_expr(e.left), self.int_expr(e.right)
            left = op == "<<"

            def shift(f, hint):
                v = a(f, hint)
                k = k_fn(f)
                if k < 0:
                    raise InterpError("negative shift amount", pos)
                x = _to_int(v)
                return _to_bits(x << k if left else x >> k, len(v))
            return shift
        if op in ("^", "&", "|"):
            terms = self.chain(e, op)
            py_op = {"^": operator.xor, "&": operator.and_, "|": operator.or_}[op]
            if all(x.ty != "int" for x in terms):
                fns = [self.bits_expr(x) for x in terms]

                def bitwise_bits(f, hint):
                    raw = [fn(f, None) for fn in fns]
                    if all(len(r) == 1 for r in raw):
                        acc = raw[0][0]
                        for r in raw[1:]:
                            acc = py_op(acc, r[0])
                        return [acc]
                    w = max(len(r) for r in raw)
                    acc = _to_int(raw[0])
                    for r in raw[1:]:
                        acc = py_op(acc, _to_int(r))
                    return _to_bits(acc, w)
                return bitwise_bits
            ops = self.operands(terms)

            def bitwise(f, hint):
                vals, w = ops(f, hint)
                acc = vals[0]
                for v in vals[1:]:
                    acc = acc ^ v if op == "^" else (acc & v if op == "&" else acc | v)
                return _to_bits(acc, w)
            return bitwise
        ops = self.operands([e.left, e.right])
        if op in ("+", "-", "*"):
            arith = {"+": lambda a, b: a + b, "-": lambda a, b: a - b, "*": lambda a, b: a * b}[op]

            def arithmetic(f, hint):
                (a, b), w = ops(f, hint)
                return _to_bits(arith(a, b), w)
            return arithmetic
        cmp = {"==": lambda a, b: a == b, "!=": lambda a, b: a != b, "<": lambda a, b: a < b,
               "<=": lambda a, b: a <= b, ">": lambda a, b: a > b, ">=": lambda a, b: a >= b}[op]

        def compare(f, hint):
            (a, b), _ = ops(f, hint)
            return [int(cmp(a, b))]
        return compare

    def truth(self, e) -> IntFn:
        if e.ty == "int":
            fn = self.int_expr(e)
            return lambda f: fn(f) != 0
        bits = self.bits_expr(e)
        return lambda f: any(bits(f, None))

    # -- statements -----------------------------------------------------------
    @staticmethod
    def sized(v: list[int], width: int, pos: A.Pos, what: str) -> list[int]:
        if len(v) > width:
            raise InterpError(f"value of width {len(v)} does not fit '{what}' of width {width}", pos)
        return v + [0] * (width - len(v))

    def block(self, b: A.Block) -> StmtFn:
        stmts = [self.stmt(s) for s in b.stmts]

        def run(f):
            for s in stmts:
                s(f)
        return run

    def stmt(self, s) -> StmtFn:
        if isinstance(s, A.VarDecl):
            uid, where = s.uid, self.store_of(s)
            if s.base == "int":
                init = self.int_expr(s.init) if s.init is not None else (lambda f: 0)

                def decl_int(f):
                    where(f)[uid] = init(f)
                return decl_int
            size, pos, name = s.size, s.pos, s.name
            binit = self.bits_expr(s.init) if s.init is not None else (lambda f, hint: [])

            def decl_bits(f):
                where(f)[uid] = self.sized(binit(f, size), size, pos, name)
            return decl_bits
        if isinstance(s, A.Assign):
            return self.assign(s)
        if isinstance(s, A.IncDec):
            uid, where = s.target.decl.uid, self.store_of(s.target.decl)
            delta = 1 if s.op == "++" else -1

            def incdec(f):
                d = where(f)
                d[uid] = _wrap(d[uid] + delta)
            return incdec
        if isinstance(s, A.Block):
            return self.block(s)
        if isinstance(s, A.If):
            cond, then = self.truth(s.cond), self.block(s.then)
            other = self.block(s.other) if s.other is not None else None

            def if_(f):
                if cond(f):
                    then(f)
                elif other is not None:
                    other(f)
            return if_
        if isinstance(s, A.For):
            init = self.stmt(s.init) if s.init is not None else None
            cond = self.int_expr(s.cond)
            step = self.stmt(s.step) if s.step is not None else None
            body = self.block(s.body)

            def for_(f):
                if init is not None:
                    init(f)
                while cond(f):
                    body(f)
                    if step is not None:
                        step(f)
            return for_
        if isinstance(s, A.ExprStmt):
            call = self.call(s.expr)
            return lambda f: call(f)
        if isinstance(s, A.Return):
            if s.value is None:
                def ret_none(f):
                    raise _Return(None)
                return ret_none
            if s.value.ty == "int":
                iv = self.int_expr(s.value)

                def ret_int(f):
                    raise _Return(iv(f))
                return ret_int
            bv = self.bits_expr(s.value)

            def ret_bits(f):
                raise _Return(bv(f, None))
            return ret_bits
        if isinstance(s, A.Assert):
            cond, pos = self.truth(s.expr), s.pos

            def assert_(f):
                if not cond(f):
                    raise AssertionViolation("assertion violated", pos)
            return assert_
        if isinstance(s, A.CoreVars):
            return lambda f: None
        raise TypeError(s)  # pragma: no cover

    def assign(self, s: A.Assign) -> StmtFn:
        t = s.target
        rhs_e = s.value if s.op == "=" else A.Binary(s.op[:-1], t, s.value, pos=s.pos, ty=t.ty)
        pos = s.pos
        if t.ty == "int":
            uid, where = t.decl.uid, self.store_of(t.decl)
            rhs_i = self.int_expr(rhs_e)

            def assign_int(f):
                where(f)[uid] = rhs_i(f)
            return assign_int
        name = t if isinstance(t, A.Name) else t.base
        uid, where, ident = name.decl.uid, self.store_of(name.decl), name.ident
        rhs = self.bits_expr(rhs_e)
        if isinstance(t, A.Name):
            bounds = None
        elif isinstance(t, A.Index):
            ix = self.int_expr(t.index)

            def assign_bit(f):
                cur = where(f)[uid]
                i = ix(f)
                if not 0 <= i < len(cur):
                    raise InterpError(f"index [{i}:{i + 1}) out of bounds for '{ident}'", pos)
                v = rhs(f, 1)
                if len(v) != 1:
                    v = self.sized(v, 1, pos, ident)
                cur[i] = v[0]
            return assign_bit
        else:
            lo_fn, hi_fn = self.int_expr(t.lo), self.int_expr(t.hi)
            bounds = lambda f: (lo_fn(f), hi_fn(f))

        def assign_bits(f):
            cur = where(f)[uid]
            lo, hi = (0, len(cur)) if bounds is None else bounds(f)
            if not 0 <= lo < hi <= len(cur):
                raise InterpError(f"index [{lo}:{hi}) out of bounds for '{ident}'", pos)
            cur[lo:hi] = self.sized(rhs(f, hi - lo), hi - lo, pos, ident)
        return assign_bits

    # -- calls ----------------------------------------------------------------
    def function(self, fd: A.FuncDecl) -> Callable:
        got = self.funcs.get(fd.name)
        if got is not None:
            return got
        holder: list[StmtFn] = []

        def invoke(args):
            frame = {p.uid: v for p, v in zip(fd.params, args)}
            try:
                holder[0](frame)
            except _Return as r:
                return r.value
            return None
        self.funcs[fd.name] = invoke
        holder.append(self.block(fd.body))
        return invoke

    def call(self, e: A.Call) -> Callable[[dict], object]:
        fd = e.decl
        invoke = self.function(fd)
        arg_fns = []
        for p, a in zip(fd.params, e.args):
            if p.base == "int":
                fn = self.int_expr(a)
                arg_fns.append(lambda f, fn=fn: fn(f))
            else:
                fn = self.bits_expr(a)
                arg_fns.append(lambda f, fn=fn, p=p, a=a: self.sized(fn(f, p.size), p.size, a.pos, p.name))
        name, pos, ret = fd.name, e.pos, fd.ret

        def do_call(f):
            v = invoke([g(f) for g in arg_fns])
            if v is None and ret != "void":
                raise InterpError(f"function '{name}' ended without returning a value", pos)
            return v
        return do_call


class Interpreter:
    """Compiled form of one program; ``run`` may be called many times."""

    def __init__(self, program: A.Program):
        self.program = program
        self.state = ConcreteState()
        self._compiler = _Compiler(program, self.state)
        self._main = self._compiler.function(program.function("main"))
        self._inputs = program.inputs()
        self.n = sum(d.size for d in self._inputs)
        self._global_init = [self._compiler.stmt(d) for d in program.globals if "__in" not in d.attrs]

    def run(self, x: Sequence[int]) -> list[int]:
        if len(x) != self.n:
            raise ValueError(f"expected {self.n} input bits, got {len(x)}")
        G = self.state.globals
        G.clear()
        pos = 0
        for d in self._inputs:
            G[d.uid] = [int(b) & 1 for b in x[pos:pos + d.size]]
            pos += d.size
        for init in self._global_init:
            init({})
        self._main([])
        out: list[int] = []
        for d in self.program.outputs():
            out.extend(G[d.uid])
        return out


def interpret(program: A.Program, x: Sequence[int]) -> list[int]:
    """Run ``program`` on input bits ``x`` (declaration order); return the output bits.

    A failing ``assert`` raises :class:`AssertionViolation`.
    """
    return Interpreter(program).run(x)
