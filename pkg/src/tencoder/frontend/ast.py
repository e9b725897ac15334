"""AST node classes.

Structural equality ignores source positions and resolver annotations, so
two parses of equivalent text compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Union


@dataclass(frozen=True)
class Pos:
    line: int = 1
    column: int = 1


def _pos() -> Any:
    return field(default=Pos(), compare=False, repr=False)


def _note() -> Any:
    return field(default=None, compare=False, repr=False)


# --- expressions -------------------------------------------------------------

@dataclass(eq=True)
class IntLit:
    value: int
    pos: Pos = _pos()
    ty: Optional[str] = _note()


@dataclass(eq=True)
class Name:
    ident: str
    pos: Pos = _pos()
    decl: Any = _note()
    ty: Optional[str] = _note()


@dataclass(eq=True)
class Index:
    base: Name
    index: "Expr"
    pos: Pos = _pos()
    ty: Optional[str] = _note()


@dataclass(eq=True)
class Slice:
    """``base[lo:hi]`` selects the half-open bit range [lo, hi)."""

    base: Name
    lo: "Expr"
    hi: "Expr"
    pos: Pos = _pos()
    ty: Optional[str] = _note()


@dataclass(eq=True)
class Unary:
    op: str
    operand: "Expr"
    pos: Pos = _pos()
    ty: Optional[str] = _note()


@dataclass(eq=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos()
    ty: Optional[str] = _note()


@dataclass(eq=True)
class Call:
    name: str
    args: list["Expr"]
    pos: Pos = _pos()
    decl: Any = _note()
    ty: Optional[str] = _note()


Expr = Union[IntLit, Name, Index, Slice, Unary, Binary, Call]
Place = Union[Name, Index, Slice]


# --- declarations and statements ---------------------------------------------

@dataclass(eq=True)
class VarDecl:
    name: str
    base: str  # "bit" | "int" | "void"
    length: Optional[Expr] = None  # array length expression, None for scalars
    attrs: tuple[str, ...] = ()
    init: Optional[Expr] = None
    pos: Pos = _pos()
    # filled in by the resolver
    size: Optional[int] = _note()
    is_global: bool = field(default=False, compare=False, repr=False)
    uid: int = field(default=-1, compare=False, repr=False)

    @property
    def is_array(self) -> bool:
        return self.length is not None


@dataclass(eq=True)
class Block:
    stmts: list["Stmt"]
    pos: Pos = _pos()


@dataclass(eq=True)
class Assign:
    target: Place
    op: str  # "=", "^=", "+=", ...
    value: Expr
    pos: Pos = _pos()


@dataclass(eq=True)
class IncDec:
    target: Name
    op: str  # "++" | "--"
    pos: Pos = _pos()


@dataclass(eq=True)
class If:
    cond: Expr
    then: Block
    other: Optional[Block] = None
    pos: Pos = _pos()


@dataclass(eq=True)
class For:
    init: Optional["Stmt"]
    cond: Optional[Expr]
    step: Optional["Stmt"]
    body: Block
    pos: Pos = _pos()


@dataclass(eq=True)
class ExprStmt:
    expr: Call
    pos: Pos = _pos()


@dataclass(eq=True)
class Return:
    value: Optional[Expr] = None
    pos: Pos = _pos()


@dataclass(eq=True)
class Assert:
    expr: Expr
    pos: Pos = _pos()


@dataclass(eq=True)
class CoreVars:
    target: Name
    pos: Pos = _pos()


Stmt = Union[VarDecl, Block, Assign, IncDec, If, For, ExprStmt, Return, Assert, CoreVars]


@dataclass(eq=True)
class FuncDecl:
    name: str
    ret: str  # "bit" | "int" | "void"
    params: list[VarDecl]
    body: Block
    pos: Pos = _pos()


@dataclass(eq=True)
class Program:
    decls: list[Union[VarDecl, FuncDecl]]
    origin: str = field(default="<memory>", compare=False, repr=False)

    @property
    def globals(self) -> list[VarDecl]:
        return [d for d in self.decls if isinstance(d, VarDecl)]

    @property
    def functions(self) -> list[FuncDecl]:
        return [d for d in self.decls if isinstance(d, FuncDecl)]

    def function(self, name: str) -> Optional[FuncDecl]:
        for f in self.functions:
            if f.name == name:
                return f
        return None

    def inputs(self) -> list[VarDecl]:
        return [d for d in self.globals if "__in" in d.attrs]

    def outputs(self) -> list[VarDecl]:
        return [d for d in self.globals if "__out" in d.attrs]
