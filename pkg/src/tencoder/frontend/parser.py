"""Recursive-descent parser producing :mod:`tencoder.frontend.ast` trees.

Grammar (informal)::

    program  := { decl | func }
    decl     := { attr } type ident [ "[" expr "]" ] [ "=" expr ] ";"
    func     := type ident "(" [ param { "," param } ] ")" block
    param    := type ident [ "[" expr "]" ]
    stmt     := decl | block | place assign-op expr ";" | ident ("++"|"--") ";"
              | "if" "(" expr ")" block [ "else" ( block | if-stmt ) ]
              | "for" "(" [simple] ";" [expr] ";" [simple] ")" block
              | ident "(" args ")" ";" | "return" [expr] ";"
              | "assert" "(" expr ")" ";" | "core_vars" "(" ident ")" ";"
"""

from __future__ import annotations

from ..diagnostics import CompileError, Diagnostic
from . import ast as A
from .lexer import Token, tokenize

ASSIGN_OPS = ("=", "+=", "-=", "*=", "^=", "&=", "|=", "<<=", ">>=")
TYPES = ("bit", "int", "void")

# binary precedence levels, loosest first
BINARY_LEVELS: list[tuple[str, ...]] = [
    ("||",),
    ("&&",),
    ("|",),
    ("^",),
    ("&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("<<", ">>"),
    ("+", "-"),
    ("*", "/", "%"),
]


class _Parser:
    def __init__(self, tokens: list[Token], origin: str):
        self.toks = tokens
        self.i = 0
        self.origin = origin

    # -- token helpers --------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, lexeme: str) -> bool:
        t = self.tok
        return t.kind in ("op", "punct", "keyword", "attr") and t.lexeme == lexeme

    def fail(self, expected: str) -> CompileError:
        t = self.tok
        found = "end of input" if t.kind == "eof" else f"'{t.lexeme}'"
        return CompileError(
            [Diagnostic("error", f"expected {expected}, found {found}", t.line, t.column, self.origin)]
        )

    def expect(self, lexeme: str) -> Token:
        if not self.at(lexeme):
            raise self.fail(f"'{lexeme}'")
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> Token:
        t = self.tok
        if t.kind != "ident":
            raise self.fail("identifier")
        self.i += 1
        return t

    @staticmethod
    def pos(t: Token) -> A.Pos:
        return A.Pos(t.line, t.column)

    # -- top level ------------------------------------------------------------
    def program(self) -> A.Program:
        decls: list = []
        while self.tok.kind != "eof":
            start = self.tok
            attrs = self.attrs()
            if not (self.tok.kind == "keyword" and self.tok.lexeme in TYPES):
                raise self.fail("type name")
            base = self.tok.lexeme
            self.i += 1
            name = self.ident()
            if self.at("("):
                if attrs:
                    raise CompileError([Diagnostic(
                        "error", "attributes are not allowed on functions",
                        start.line, start.column, self.origin)])
                decls.append(self.function(base, name, start))
            else:
                decls.append(self.decl_rest(attrs, base, name, start))
        return A.Program(decls, origin=self.origin)

    def attrs(self) -> tuple[str, ...]:
        out = []
        while self.tok.kind == "attr":
            out.append(self.tok.lexeme)
            self.i += 1
        return tuple(out)

    def function(self, ret: str, name: Token, start: Token) -> A.FuncDecl:
        self.expect("(")
        params: list[A.VarDecl] = []
        if not self.at(")"):
            while True:
                ptok = self.tok
                if not (ptok.kind == "keyword" and ptok.lexeme in ("bit", "int")):
                    raise self.fail("parameter type")
                self.i += 1
                pname = self.ident()
                length = None
                if self.at("["):
                    self.i += 1
                    length = self.expr()
                    self.expect("]")
                params.append(A.VarDecl(pname.lexeme, ptok.lexeme, length, pos=self.pos(ptok)))
                if self.at(","):
                    self.i += 1
                    continue
                break
        self.expect(")")
        body = self.block()
        return A.FuncDecl(name.lexeme, ret, params, body, pos=self.pos(start))

    def decl_rest(self, attrs, base: str, name: Token, start: Token) -> A.VarDecl:
        length = None
        if self.at("["):
            self.i += 1
            length = self.expr()
            self.expect("]")
        init = None
        if self.at("="):
            self.i += 1
            init = self.expr()
        self.expect(";")
        return A.VarDecl(name.lexeme, base, length, tuple(attrs), init, pos=self.pos(start))

    # -- statements -----------------------------------------------------------
    def block(self) -> A.Block:
        open_tok = self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.fail("'}'")
            stmts.append(self.stmt())
        self.expect("}")
        return A.Block(stmts, pos=self.pos(open_tok))

    def stmt(self):
        t = self.tok
        if t.kind == "attr" or (t.kind == "keyword" and t.lexeme in TYPES):
            attrs = self.attrs()
            if not (self.tok.kind == "keyword" and self.tok.lexeme in TYPES):
                raise self.fail("type name")
            base = self.tok.lexeme
            self.i += 1
            name = self.ident()
            return self.decl_rest(attrs, base, name, t)
        if self.at("{"):
            return self.block()
        if self.at("if"):
            return self.if_stmt()
        if self.at("for"):
            self.i += 1
            self.expect("(")
            init = None if self.at(";") else self.simple(allow_decl=True)
            self.expect(";")
            cond = None if self.at(";") else self.expr()
            self.expect(";")
            step = None if self.at(")") else self.simple(allow_decl=False)
            self.expect(")")
            body = self.block()
            return A.For(init, cond, step, body, pos=self.pos(t))
        if self.at("return"):
            self.i += 1
            value = None if self.at(";") else self.expr()
            self.expect(";")
            return A.Return(value, pos=self.pos(t))
        if self.at("assert"):
            self.i += 1
            self.expect("(")
            e = self.expr()
            self.expect(")")
            self.expect(";")
            return A.Assert(e, pos=self.pos(t))
        if self.at("core_vars"):
            self.i += 1
            self.expect("(")
            nt = self.ident()
            self.expect(")")
            self.expect(";")
            return A.CoreVars(A.Name(nt.lexeme, pos=self.pos(nt)), pos=self.pos(t))
        if t.kind == "ident" and self.peek().kind == "punct" and self.peek().lexeme == "(":
            call = self.postfix()
            self.expect(";")
            return A.ExprStmt(call, pos=self.pos(t))
        s = self.simple(allow_decl=False)
        self.expect(";")
        return s

    def if_stmt(self) -> A.If:
        t = self.expect("if")
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        then = self.block()
        other = None
        if self.at("else"):
            self.i += 1
            if self.at("if"):
                nested = self.if_stmt()
                other = A.Block([nested], pos=nested.pos)
            else:
                other = self.block()
        return A.If(cond, then, other, pos=self.pos(t))

    def simple(self, allow_decl: bool):
        """Assignment, increment or (in a for-init) a declaration; no ';'."""
        t = self.tok
        if allow_decl and t.kind == "keyword" and t.lexeme in TYPES:
            base = t.lexeme
            self.i += 1
            name = self.ident()
            init = None
            if self.at("="):
                self.i += 1
                init = self.expr()
            return A.VarDecl(name.lexeme, base, None, (), init, pos=self.pos(t))
        if t.kind != "ident":
            raise self.fail("statement")
        target = self.postfix()
        if not isinstance(target, (A.Name, A.Index, A.Slice)):
            raise CompileError([Diagnostic("error", "expected assignable place", t.line, t.column, self.origin)])
        if self.tok.kind == "op" and self.tok.lexeme in ("++", "--"):
            if not isinstance(target, A.Name):
                raise self.fail("assignment operator")
            op = self.tok.lexeme
            self.i += 1
            return A.IncDec(target, op, pos=self.pos(t))
        if self.tok.kind == "op" and self.tok.lexeme in ASSIGN_OPS:
            op = self.tok.lexeme
            self.i += 1
            value = self.expr()
            return A.Assign(target, op, value, pos=self.pos(t))
        raise self.fail("assignment operator")

    # -- expressions ----------------------------------------------------------
    def expr(self, level: int = 0):
        if level == len(BINARY_LEVELS):
            return self.unary()
        left = self.expr(level + 1)
        ops = BINARY_LEVELS[level]
        while self.tok.kind == "op" and self.tok.lexeme in ops:
            t = self.tok
            self.i += 1
            right = self.expr(level + 1)
            left = A.Binary(t.lexeme, left, right, pos=self.pos(t))
        return left

    def unary(self):
        t = self.tok
        if t.kind == "op" and t.lexeme in ("!", "~", "-"):
            self.i += 1
            return A.Unary(t.lexeme, self.unary(), pos=self.pos(t))
        return self.postfix()

    def postfix(self):
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return A.IntLit(t.value, pos=self.pos(t))
        if self.at("("):
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        if t.kind != "ident":
            raise self.fail("expression")
        self.i += 1
        if self.at("("):
            self.i += 1
            args = []
            if not self.at(")"):
                while True:
                    args.append(self.expr())
                    if self.at(","):
                        self.i += 1
                        continue
                    break
            self.expect(")")
            return A.Call(t.lexeme, args, pos=self.pos(t))
        name = A.Name(t.lexeme, pos=self.pos(t))
        if self.at("["):
            open_tok = self.tok
            self.i += 1
            lo = self.expr()
            if self.at(":"):
                self.i += 1
                hi = self.expr()
                self.expect("]")
                return A.Slice(name, lo, hi, pos=self.pos(open_tok))
            self.expect("]")
            return A.Index(name, lo, pos=self.pos(open_tok))
        return name


def parse_tokens(tokens: list[Token], origin: str = "<memory>") -> A.Program:
    return _Parser(tokens, origin).program()


def parse(text: str, origin: str = "<memory>") -> A.Program:
    """Tokenize and parse ``text``; raises CompileError on failure."""
    return parse_tokens(tokenize(text, origin), origin)
