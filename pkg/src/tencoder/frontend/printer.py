"""Canonical pretty-printer.  ``parse(pretty(p)) == p`` holds structurally."""

from __future__ import annotations

from . import ast as A


def _expr(e) -> str:
    if isinstance(e, A.IntLit):
        return str(e.value)
    if isinstance(e, A.Name):
        return e.ident
    if isinstance(e, A.Index):
        return f"{e.base.ident}[{_expr(e.index)}]"
    if isinstance(e, A.Slice):
        return f"{e.base.ident}[{_expr(e.lo)}:{_expr(e.hi)}]"
    if isinstance(e, A.Unary):
        return f"{e.op}({_expr(e.operand)})"
    if isinstance(e, A.Binary):
        return f"({_expr(e.left)} {e.op} {_expr(e.right)})"
    if isinstance(e, A.Call):
        return f"{e.name}({', '.join(_expr(a) for a in e.args)})"
    raise TypeError(e)


def _decl(d: A.VarDecl) -> str:
    head = " ".join((*d.attrs, d.base, d.name))
    if d.length is not None:
        head += f"[{_expr(d.length)}]"
    if d.init is not None:
        head += f" = {_expr(d.init)}"
    return head


def _simple(s) -> str:
    if isinstance(s, A.VarDecl):
        return _decl(s)
    if isinstance(s, A.Assign):
        return f"{_expr(s.target)} {s.op} {_expr(s.value)}"
    if isinstance(s, A.IncDec):
        return f"{s.target.ident}{s.op}"
    raise TypeError(s)


def _stmt(s, indent: int, out: list[str]) -> None:
    pad = "    " * indent
    if isinstance(s, (A.VarDecl, A.Assign, A.IncDec)):
        out.append(f"{pad}{_simple(s)};")
    elif isinstance(s, A.Block):
        out.append(pad + "{")
        for inner in s.stmts:
            _stmt(inner, indent + 1, out)
        out.append(pad + "}")
    elif isinstance(s, A.If):
        out.append(f"{pad}if ({_expr(s.cond)}) {{")
        for inner in s.then.stmts:
            _stmt(inner, indent + 1, out)
        if s.other is None:
            out.append(pad + "}")
        else:
            out.append(pad + "} else {")
            for inner in s.other.stmts:
                _stmt(inner, indent + 1, out)
            out.append(pad + "}")
    elif isinstance(s, A.For):
        init = _simple(s.init) if s.init is not None else ""
        cond = _expr(s.cond) if s.cond is not None else ""
        step = _simple(s.step) if s.step is not None else ""
        out.append(f"{pad}for ({init}; {cond}; {step}) {{")
        for inner in s.body.stmts:
            _stmt(inner, indent + 1, out)
        out.append(pad + "}")
    elif isinstance(s, A.ExprStmt):
        out.append(f"{pad}{_expr(s.expr)};")
    elif isinstance(s, A.Return):
        out.append(f"{pad}return;" if s.value is None else f"{pad}return {_expr(s.value)};")
    elif isinstance(s, A.Assert):
        out.append(f"{pad}assert({_expr(s.expr)});")
    elif isinstance(s, A.CoreVars):
        out.append(f"{pad}core_vars({s.target.ident});")
    else:
        raise TypeError(s)


def pretty(program: A.Program) -> str:
    out: list[str] = []
    for d in program.decls:
        if isinstance(d, A.VarDecl):
            out.append(_decl(d) + ";")
        else:
            params = ", ".join(_decl(p) for p in d.params)
            out.append(f"{d.ret} {d.name}({params}) {{")
            for s in d.body.stmts:
                _stmt(s, 1, out)
            out.append("}")
    return "\n".join(out) + "\n"
