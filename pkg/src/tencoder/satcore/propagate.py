"""Unit propagation to fixpoint with per-clause false-literal counters."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence


@dataclass
class UPResult:
    """Outcome of one propagation run.

    ``values[v]`` is 1, -1 or 0 (unassigned) for ``v`` in ``1..num_vars``;
    ``conflict`` is the index of a falsified clause, or ``None`` at a fixpoint.
    """

    values: list[int]
    conflict: Optional[int] = None
    trail: list[int] = field(default_factory=list)
    propagations: int = 0

    @property
    def ok(self) -> bool:
        return self.conflict is None

    def value(self, lit: int) -> Optional[int]:
        """1 / 0 for an assigned literal, ``None`` when unassigned."""
        v = self.values[abs(lit)]
        if v == 0:
            return None
        return int((v > 0) == (lit > 0))

    def assigned_count(self) -> int:
        return sum(1 for v in self.values[1:] if v)


class Propagator:
    """Reusable unit propagator over a fixed clause list."""

    def __init__(self, num_vars: int, clauses: Sequence[Sequence[int]]):
        self.num_vars = num_vars
        self.clauses = [tuple(c) for c in clauses]
        occ: list[list[int]] = [[] for _ in range(2 * num_vars + 1)]
        units: list[tuple[int, int]] = []
        self.empty: Optional[int] = None
        for i, c in enumerate(self.clauses):
            if not c:
                if self.empty is None:
                    self.empty = i
                continue
            if len(c) == 1:
                units.append((c[0], i))
            for lit in c:
                occ[num_vars - lit].append(i)  # clauses falsified in part when lit is false
        self._occ = occ
        self._units = units
        self._sizes = [len(c) for c in self.clauses]

    def run(self, assumptions: Iterable[int] = ()) -> UPResult:
        nv = self.num_vars
        val = [0] * (nv + 1)
        res = UPResult(val)
        if self.empty is not None:
            res.conflict = self.empty
            return res
        trail: list[int] = []
        res.trail = trail
        for lit in assumptions:
            v = abs(lit)
            if not 1 <= v <= nv:
                raise ValueError(f"assumption {lit} outside 1..{nv}")
            s = 1 if lit > 0 else -1
            if val[v] == 0:
                val[v] = s
                trail.append(lit)
            elif val[v] != s:
                raise ValueError("inconsistent assumptions")
        for lit, ci in self._units:
            v = abs(lit)
            s = 1 if lit > 0 else -1
            if val[v] == 0:
                val[v] = s
                trail.append(lit)
            elif val[v] != s:
                res.conflict = ci
                return res
        false_cnt = [0] * len(self.clauses)
        clauses, sizes, occ = self.clauses, self._sizes, self._occ
        head = 0
        while head < len(trail):
            lit = trail[head]
            head += 1
            for ci in occ[nv + lit]:
                fc = false_cnt[ci] + 1
                false_cnt[ci] = fc
                if fc < sizes[ci] - 1:
                    continue
                unit = 0
                for x in clauses[ci]:
                    vx = val[x if x > 0 else -x]
                    if vx == 0:
                        unit = x
                    elif (vx > 0) == (x > 0):
                        break
                else:
                    if unit == 0:
                        res.conflict = ci
                        res.propagations = len(trail)
                        return res
                    val[unit if unit > 0 else -unit] = 1 if unit > 0 else -1
                    trail.append(unit)
        res.propagations = len(trail)
        return res


def unit_propagate(num_vars: int, clauses: Sequence[Sequence[int]], assumptions: Iterable[int] = ()) -> UPResult:
    """Least fixpoint of unit propagation over ``clauses`` plus ``assumptions``."""
    return Propagator(num_vars, clauses).run(assumptions)
