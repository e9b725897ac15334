"""DIMACS serialization with the template comment header.

Header lines, one datum per line::

    c t-encoding v1
    c input 1 2 ... n
    c output ...
    c core <label> <lit or 0/-0> ...
    c unused-input <v> ...
    c bound input|output <bits>
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .tseitin import Clause, TemplateCnf

MAGIC = "c t-encoding v1"


class DimacsError(ValueError):
    pass


class NotATemplate(DimacsError):
    def __init__(self, what: str = "not a t-encoding template"):
        super().__init__(what)


def header_lines(t: TemplateCnf) -> list[str]:
    lines = [MAGIC, "c input " + " ".join(map(str, t.input_vars)), "c output " + " ".join(map(str, t.output_vars))]
    for label, toks in t.core_records:
        lines.append(f"c core {label} " + " ".join(toks))
    if t.unused_inputs:
        lines.append("c unused-input " + " ".join(map(str, t.unused_inputs)))
    return [l.rstrip() for l in lines]


def write_cnf(num_vars: int, clauses: Iterable[Clause], comments: Iterable[str] = ()) -> str:
    clauses = list(clauses)
    out = list(comments)
    out.append(f"p cnf {num_vars} {len(clauses)}")
    out.extend(" ".join(map(str, c)) + " 0" for c in clauses)
    return "\n".join(out) + "\n"


def to_dimacs(t: TemplateCnf, extra: Iterable[Clause] = (), comments: Iterable[str] = (), num_vars: Optional[int] = None) -> str:
    """Template (plus optional instance clauses and comment lines) as DIMACS text."""
    lines = header_lines(t) + list(comments)
    return write_cnf(num_vars or t.num_vars, list(t.clauses) + list(extra), lines)


@dataclass
class DimacsFile:
    num_vars: int
    clauses: list[Clause]
    comments: list[str] = field(default_factory=list)


def parse_dimacs(text: str) -> DimacsFile:
    num_vars = None
    declared = None
    comments: list[str] = []
    clauses: list[Clause] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            comments.append(line)
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed problem line")
            try:
                num_vars, declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed problem line") from None
            continue
        if num_vars is None:
            raise DimacsError(f"line {lineno}: clause before the problem line")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > num_vars:
                raise DimacsError(f"line {lineno}: literal {lit} exceeds {num_vars} variables")
            else:
                current.append(lit)
    if num_vars is None:
        raise DimacsError("missing problem line")
    if current:
        clauses.append(tuple(current))
    if declared != len(clauses):
        raise DimacsError(f"problem line declares {declared} clauses, found {len(clauses)}")
    return DimacsFile(num_vars, clauses, comments)


@dataclass
class ParsedInstance:
    """A template read back from DIMACS, with any instance clauses kept inline."""

    template: TemplateCnf
    bound: list[tuple[str, str]] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)


def _ints(parts: list[str], lineno: int) -> list[int]:
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise NotATemplate(f"malformed header line {lineno}") from None


def read_template(text: str) -> ParsedInstance:
    """Parse DIMACS text carrying the template header; raises NotATemplate otherwise."""
    f = parse_dimacs(text)
    if MAGIC not in f.comments:
        raise NotATemplate()
    inputs: Optional[list[int]] = None
    outputs: Optional[list[int]] = None
    core: list[tuple[str, list[str]]] = []
    unused: list[int] = []
    bound: list[tuple[str, str]] = []
    for i, c in enumerate(f.comments, 1):
        parts = c.split()
        if len(parts) < 2:
            continue
        tag = parts[1]
        if tag == "input":
            inputs = _ints(parts[2:], i)
        elif tag == "output":
            outputs = _ints(parts[2:], i)
        elif tag == "core" and len(parts) >= 3:
            core.append((parts[2], parts[3:]))
        elif tag == "unused-input":
            unused = _ints(parts[2:], i)
        elif tag == "bound" and len(parts) == 4:
            bound.append((parts[2], parts[3]))
    if inputs is None or outputs is None:
        raise NotATemplate("template header lacks input or output line")
    t = TemplateCnf(f.num_vars, f.clauses, inputs, outputs, core, unused)
    return ParsedInstance(t, bound, f.comments)
