"""Name resolution and type-category checking.

Every expression is tagged ``bit`` or ``int``.  ``int`` values are service
values evaluated at translation time; ``bit`` values may be symbolic.  Bit
widths are checked later, during execution, because slice widths can depend
on loop counters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..diagnostics import CompileError, Diagnostic, DiagnosticSink
from . import ast as A

INT_MIN, INT_MAX = -(1 << 63), (1 << 63) - 1


def wrap_int(v: int) -> int:
    """Two's-complement wrap to a signed 64-bit service integer."""
    v &= (1 << 64) - 1
    return v - (1 << 64) if v >> 63 else v


def int_binop(op: str, a: int, b: int) -> int:
    """Service-integer semantics shared by every evaluator (C-like, 64-bit)."""
    if op == "+":
        return wrap_int(a + b)
    if op == "-":
        return wrap_int(a - b)
    if op == "*":
        return wrap_int(a * b)
    if op in ("/", "%"):
        if b == 0:
            raise ZeroDivisionError("division by zero")
        q = abs(a) // abs(b)
        if (a < 0) != (b < 0):
            q = -q
        return wrap_int(q) if op == "/" else wrap_int(a - q * b)
    if op == "<<":
        if b < 0:
            raise ValueError("negative shift amount")
        return wrap_int(a << b) if b < 64 else 0
    if op == ">>":
        if b < 0:
            raise ValueError("negative shift amount")
        return a >> min(b, 63)
    if op == "&":
        return a & b
    if op == "|":
        return a | b
    if op == "^":
        return a ^ b
    if op == "==":
        return int(a == b)
    if op == "!=":
        return int(a != b)
    if op == "<":
        return int(a < b)
    if op == "<=":
        return int(a <= b)
    if op == ">":
        return int(a > b)
    if op == ">=":
        return int(a >= b)
    if op == "&&":
        return int(bool(a) and bool(b))
    if op == "||":
        return int(bool(a) or bool(b))
    raise ValueError(f"unknown integer operator {op}")


def int_unop(op: str, a: int) -> int:
    if op == "-":
        return wrap_int(-a)
    if op == "~":
        return ~a
    if op == "!":
        return int(a == 0)
    raise ValueError(f"unknown integer operator {op}")


@dataclass
class Scope:
    name: str
    parent: Optional["Scope"] = None
    symbols: dict[str, object] = field(default_factory=dict)
    children: list["Scope"] = field(default_factory=list)

    def lookup(self, ident: str):
        s: Optional[Scope] = self
        while s is not None:
            if ident in s.symbols:
                return s.symbols[ident]
            s = s.parent
        return None

    def child(self, name: str) -> "Scope":
        c = Scope(name, self)
        self.children.append(c)
        return c

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()


def _is_int_literal(e) -> bool:
    if isinstance(e, A.IntLit):
        return True
    return isinstance(e, A.Unary) and e.op in ("-", "~") and _is_int_literal(e.operand)


class _Resolver:
    def __init__(self, program: A.Program, defines: dict[str, int]):
        self.program = program
        self.defines = dict(defines)
        self.sink = DiagnosticSink(program.origin)
        self.root = Scope("<global>")
        self.uid = 0
        self.const_env: dict[str, int] = {}
        self.func: Optional[A.FuncDecl] = None
        self.calls: dict[str, set[str]] = {}
        self.loop_depth = 0

    def err(self, msg: str, pos: A.Pos) -> None:
        self.sink.error(msg, pos.line, pos.column)

    # -- constants ------------------------------------------------------------
    def fold(self, e) -> Optional[int]:
        """Fold literal expressions over global integer constants."""
        if isinstance(e, A.IntLit):
            return e.value
        if isinstance(e, A.Name):
            if isinstance(e.decl, A.VarDecl) and e.decl.is_global and e.decl.base == "int":
                return self.const_env.get(e.ident)
            return None
        if isinstance(e, A.Unary):
            v = self.fold(e.operand)
            return None if v is None else int_unop(e.op, v)
        if isinstance(e, A.Binary):
            a, b = self.fold(e.left), self.fold(e.right)
            if a is None or b is None:
                return None
            try:
                return int_binop(e.op, a, b)
            except (ZeroDivisionError, ValueError):
                return None
        return None

    # -- driver ---------------------------------------------------------------
    def run(self) -> Scope:
        prog = self.program
        mutated = self._mutated_globals()
        for d in prog.decls:
            if d.name in self.root.symbols:
                self.err(f"duplicate declaration of '{d.name}'", d.pos)
                continue
            self.root.symbols[d.name] = d
            if isinstance(d, A.VarDecl):
                self.global_decl(d, mutated)
        main = self.root.symbols.get("main")
        if not isinstance(main, A.FuncDecl):
            self.sink.error("missing entry point: no function named 'main'", 1, 1)
        elif main.params:
            self.err("'main' must not take parameters", main.pos)
        for f in prog.functions:
            self.function(f)
        self._check_recursion()
        self.sink.raise_if_errors()
        return self.root

    def _mutated_globals(self) -> set[str]:
        out: set[str] = set()

        def visit(node):
            if isinstance(node, A.Assign):
                t = node.target
                out.add(t.ident if isinstance(t, A.Name) else t.base.ident)
            elif isinstance(node, A.IncDec):
                out.add(node.target.ident)
            for child in _children(node):
                visit(child)

        for f in self.program.functions:
            visit(f.body)
        return out

    def global_decl(self, d: A.VarDecl, mutated: set[str]) -> None:
        d.is_global = True
        self.declare_common(d)
        if d.base == "int":
            if d.name in self.defines:
                d.init = A.IntLit(self.defines.pop(d.name), pos=d.pos)
            if d.init is not None:
                self.expr(d.init, self.root)
                v = self.fold(d.init)
                if v is None:
                    self.err(f"initializer of global '{d.name}' is not a constant", d.pos)
                elif d.name not in mutated:
                    self.const_env[d.name] = v
            elif d.name not in mutated:
                self.const_env[d.name] = 0
        elif d.base == "bit" and d.init is not None:
            if not _is_int_literal(d.init):
                self.err("initializer of a global bit variable must be an integer literal", d.init.pos)
            self.expr(d.init, self.root)

    def declare_common(self, d: A.VarDecl) -> None:
        d.uid = self.uid
        self.uid += 1
        for a in d.attrs:
            if a in ("__in", "__out"):
                if d.base != "bit":
                    self.err(f"attribute {a} on non-bit declaration '{d.name}'", d.pos)
                elif not d.is_global:
                    self.err(f"attribute {a} is only allowed on global declarations ('{d.name}')", d.pos)
            elif a == "__mem" and d.base != "bit":
                self.err(f"attribute __mem on non-bit declaration '{d.name}'", d.pos)
        if len(set(d.attrs)) != len(d.attrs):
            self.err(f"repeated attribute on '{d.name}'", d.pos)
        if "__in" in d.attrs and "__out" in d.attrs:
            self.err(f"'{d.name}' cannot be both __in and __out", d.pos)
        if d.base == "void":
            self.err(f"variable '{d.name}' declared void", d.pos)
        if d.length is not None:
            if d.base != "bit":
                self.err(f"only bit arrays are supported ('{d.name}')", d.pos)
            self.expr(d.length, self.root)
            n = self.fold(d.length)
            if n is None:
                self.err(f"array length of '{d.name}' is not a compile-time constant", d.length.pos)
                d.size = 1
            elif n <= 0:
                self.err(f"array length of '{d.name}' must be positive", d.length.pos)
                d.size = 1
            else:
                d.size = n
        else:
            d.size = 1

    # -- functions ------------------------------------------------------------
    def function(self, f: A.FuncDecl) -> None:
        self.func = f
        self.calls.setdefault(f.name, set())
        scope = self.root.child(f.name)
        for p in f.params:
            if p.name in scope.symbols:
                self.err(f"duplicate parameter '{p.name}'", p.pos)
            p.is_global = False
            self.declare_common(p)
            scope.symbols[p.name] = p
        self.block(f.body, scope, new_scope=False)
        self.func = None

    def _check_recursion(self) -> None:
        state: dict[str, int] = {}

        def dfs(name: str) -> bool:
            state[name] = 1
            for callee in sorted(self.calls.get(name, ())):
                s = state.get(callee, 0)
                if s == 1 or (s == 0 and dfs(callee)):
                    return True
            state[name] = 2
            return False

        for f in self.program.functions:
            if state.get(f.name, 0) == 0 and dfs(f.name):
                self.err(f"recursion is not supported (cycle through '{f.name}')", f.pos)
                return

    # -- statements -----------------------------------------------------------
    def block(self, b: A.Block, scope: Scope, new_scope: bool = True) -> None:
        inner = scope.child("<block>") if new_scope else scope
        for s in b.stmts:
            self.stmt(s, inner)

    def local_decl(self, d: A.VarDecl, scope: Scope) -> None:
        d.is_global = False
        self.declare_common(d)
        if d.init is not None:
            t = self.expr(d.init, scope)
            if d.base == "int" and t != "int":
                self.err(f"cannot initialize int '{d.name}' from a bit expression", d.init.pos)
            if d.base == "bit" and t == "int" and not _is_int_literal(d.init):
                self.err(f"int expression used where a bit value is required ('{d.name}')", d.init.pos)
        if d.name in scope.symbols:
            self.err(f"duplicate declaration of '{d.name}'", d.pos)
        scope.symbols[d.name] = d

    def stmt(self, s, scope: Scope) -> None:
        if isinstance(s, A.VarDecl):
            self.local_decl(s, scope)
        elif isinstance(s, A.Block):
            self.block(s, scope)
        elif isinstance(s, A.Assign):
            self.assign(s, scope)
        elif isinstance(s, A.IncDec):
            t = self.expr(s.target, scope)
            if t != "int":
                self.err(f"'{s.op}' requires an int variable", s.pos)
        elif isinstance(s, A.If):
            self.expr(s.cond, scope)
            self.block(s.then, scope)
            if s.other is not None:
                self.block(s.other, scope)
        elif isinstance(s, A.For):
            inner = scope.child("<for>")
            if s.init is not None:
                self.stmt(s.init, inner)
                if isinstance(s.init, A.VarDecl) and s.init.base != "int":
                    self.err("loop counter must be an int", s.init.pos)
                if isinstance(s.init, A.Assign) and self._place_type(s.init.target) != "int":
                    self.err("loop initializer must assign an int", s.init.pos)
            if s.cond is None:
                self.err("loop without a bound", s.pos)
            elif self.expr(s.cond, inner) != "int":
                self.err("non-constant loop bound: loop condition depends on bit values", s.cond.pos)
            if s.step is not None:
                self.stmt(s.step, inner)
                if isinstance(s.step, A.Assign) and self._place_type(s.step.target) != "int":
                    self.err("loop step must update an int", s.step.pos)
            self.loop_depth += 1
            self.block(s.body, inner)
            self.loop_depth -= 1
        elif isinstance(s, A.ExprStmt):
            self.expr(s.expr, scope, allow_void=True)
        elif isinstance(s, A.Return):
            ret = self.func.ret if self.func else "void"
            if s.value is None:
                if ret != "void":
                    self.err("missing return value", s.pos)
            else:
                t = self.expr(s.value, scope)
                if ret == "void":
                    self.err("void function returns a value", s.pos)
                elif ret == "int" and t != "int":
                    self.err("int function returns a bit value", s.pos)
                elif ret == "bit" and t == "int" and not _is_int_literal(s.value):
                    self.err("int expression used where a bit value is required", s.value.pos)
        elif isinstance(s, A.Assert):
            self.expr(s.expr, scope)
        elif isinstance(s, A.CoreVars):
            t = self.expr(s.target, scope)
            if t != "bit":
                self.err("core_vars requires a bit variable", s.pos)
        else:  # pragma: no cover - parser never builds other nodes
            raise TypeError(s)

    def _place_type(self, p) -> Optional[str]:
        if isinstance(p, A.Name):
            return p.ty
        return "bit"

    def assign(self, s: A.Assign, scope: Scope) -> None:
        tt = self.expr(s.target, scope)
        vt = self.expr(s.value, scope)
        if tt == "int":
            if vt != "int":
                self.err("cannot assign a bit value to an int variable", s.pos)
            return
        if s.op in ("<<=", ">>="):
            if vt != "int":
                self.err("shift amount must be an int expression", s.value.pos)
            return
        if vt == "int" and not _is_int_literal(s.value):
            self.err("int expression used where a bit value is required", s.value.pos)

    # -- expressions ----------------------------------------------------------
    def expr(self, e, scope: Scope, allow_void: bool = False) -> Optional[str]:
        ty = self._expr(e, scope, allow_void)
        e.ty = ty
        return ty

    def _name(self, n: A.Name, scope: Scope) -> Optional[str]:
        d = scope.lookup(n.ident)
        if d is None:
            self.err(f"undeclared identifier '{n.ident}'", n.pos)
            return None
        if isinstance(d, A.FuncDecl):
            self.err(f"function '{n.ident}' used as a variable", n.pos)
            return None
        n.decl = d
        n.ty = d.base
        return d.base

    def _index_check(self, base: A.Name, idx, pos: A.Pos) -> None:
        v = self.fold(idx)
        d = base.decl
        if v is not None and isinstance(d, A.VarDecl) and d.size is not None:
            if not 0 <= v < d.size:
                self.err(f"index {v} out of bounds for '{base.ident}' of length {d.size}", pos)

    def _expr(self, e, scope: Scope, allow_void: bool) -> Optional[str]:
        if isinstance(e, A.IntLit):
            return "int"
        if isinstance(e, A.Name):
            return self._name(e, scope)
        if isinstance(e, A.Index):
            bt = self.expr(e.base, scope)
            if bt is not None and bt != "bit":
                self.err(f"cannot index non-bit variable '{e.base.ident}'", e.pos)
            if self.expr(e.index, scope) not in ("int", None):
                self.err("array index must be an int expression", e.index.pos)
            self._index_check(e.base, e.index, e.pos)
            return "bit"
        if isinstance(e, A.Slice):
            bt = self.expr(e.base, scope)
            if bt is not None and bt != "bit":
                self.err(f"cannot slice non-bit variable '{e.base.ident}'", e.pos)
            for part in (e.lo, e.hi):
                if self.expr(part, scope) not in ("int", None):
                    self.err("slice bound must be an int expression", part.pos)
            lo, hi = self.fold(e.lo), self.fold(e.hi)
            d = e.base.decl
            if lo is not None and hi is not None and isinstance(d, A.VarDecl) and d.size:
                if not 0 <= lo < hi <= d.size:
                    self.err(f"slice [{lo}:{hi}] out of bounds for '{e.base.ident}'", e.pos)
            return "bit"
        if isinstance(e, A.Unary):
            t = self.expr(e.operand, scope)
            if e.op == "-" and t == "bit":
                self.err("unary '-' is only defined on int expressions", e.pos)
            return t
        if isinstance(e, A.Binary):
            lt = self.expr(e.left, scope)
            rt = self.expr(e.right, scope)
            if lt is None or rt is None:
                return None
            if e.op in ("<<", ">>"):
                if rt != "int":
                    self.err("shift amount must be an int expression", e.right.pos)
                return lt
            if lt == "int" and rt == "int":
                return "int"
            if e.op in ("/", "%"):
                self.err(f"operator '{e.op}' is only defined on int expressions", e.pos)
                return "bit"
            for side, t in ((e.left, lt), (e.right, rt)):
                if t == "int" and not _is_int_literal(side):
                    self.err("int expression used where a bit value is required", side.pos)
            return "bit"
        if isinstance(e, A.Call):
            f = self.root.symbols.get(e.name)
            if not isinstance(f, A.FuncDecl):
                self.err(f"undeclared function '{e.name}'", e.pos)
                for a in e.args:
                    self.expr(a, scope)
                return None
            e.decl = f
            if self.func is not None:
                self.calls.setdefault(self.func.name, set()).add(f.name)
            if len(e.args) != len(f.params):
                self.err(f"'{f.name}' expects {len(f.params)} arguments, got {len(e.args)}", e.pos)
            for a, p in zip(e.args, f.params):
                t = self.expr(a, scope)
                if p.base == "int" and t not in ("int", None):
                    self.err(f"argument '{p.name}' of '{f.name}' must be an int", a.pos)
                if p.base == "bit" and t == "int" and not _is_int_literal(a):
                    self.err(f"int expression used where a bit value is required (argument '{p.name}')", a.pos)
            for a in e.args[len(f.params):]:
                self.expr(a, scope)
            if f.ret == "void" and not allow_void:
                self.err(f"void function '{f.name}' used in an expression", e.pos)
            return f.ret
        raise TypeError(e)  # pragma: no cover


def _children(node):
    if isinstance(node, A.Block):
        yield from node.stmts
    elif isinstance(node, A.If):
        yield node.then
        if node.other is not None:
            yield node.other
    elif isinstance(node, A.For):
        for part in (node.init, node.step, node.body):
            if part is not None:
                yield part


def resolve(program: A.Program, defines: Optional[dict[str, int]] = None) -> tuple[A.Program, Scope]:
    """Bind identifiers and check types in place; return the program and scope tree.

    ``defines`` overrides the initializers of global ``int`` constants.
    """
    r = _Resolver(program, defines or {})
    root = r.run()
    if r.defines:
        unknown = ", ".join(sorted(r.defines))
        raise CompileError([Diagnostic("error", f"unknown constant(s) in defines: {unknown}", 1, 1, program.origin)])
    return program, root
