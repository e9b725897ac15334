"""DPLL search with two watched literals and chronological backtracking.

There is no clause learning: on a conflict the most recent decision that has
not yet been flipped is flipped.  Branching is either ``vsids`` (activity
bumped on the literals of falsified clauses, with decay) or ``fixed`` (lowest
unassigned variable first, optionally after a caller-given priority list).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

SAT = "SAT"
UNSAT = "UNSAT"
UNKNOWN = "UNKNOWN"


@dataclass
class Budget:
    conflicts: Optional[int] = None
    propagations: Optional[int] = None
    seconds: Optional[float] = None


@dataclass
class SolveStats:
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0
    seconds: float = 0.0


@dataclass
class SolveResult:
    status: str
    model: Optional[list[int]] = None  # model[v] in {0, 1} for v in 1..num_vars; index 0 unused
    stats: SolveStats = field(default_factory=SolveStats)

    @property
    def sat(self) -> bool:
        return self.status == SAT

    def value(self, lit: int) -> int:
        b = self.model[abs(lit)]
        return b if lit > 0 else 1 - b


class ModelError(AssertionError):
    pass


def check_model(clauses: Iterable[Sequence[int]], model: Sequence[int]) -> Optional[int]:
    """Index of the first clause ``model`` falsifies, or ``None``."""
    for i, c in enumerate(clauses):
        if not any((model[abs(l)] == 1) == (l > 0) for l in c):
            return i
    return None


class Solver:
    def __init__(self, num_vars: int, clauses: Iterable[Sequence[int]], order: str = "vsids",
                 priority: Sequence[int] = (), decay: float = 0.95):
        if order not in ("vsids", "fixed"):
            raise ValueError(f"unknown branching order {order!r}")
        self.num_vars = num_vars
        self.order = order
        self.decay = decay
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        self.root_units: list[int] = []
        self.trivially_unsat = False
        self.activity = [0.0] * (num_vars + 1)
        self.bump = 1.0
        self.occurs = [False] * (num_vars + 1)
        self.priority = [v for v in priority if 1 <= v <= num_vars]
        for c in clauses:
            self.add_clause(c)

    def add_clause(self, clause: Sequence[int]) -> None:
        lits = list(dict.fromkeys(clause))
        if any(-l in lits for l in lits):
            return
        for l in lits:
            if not 1 <= abs(l) <= self.num_vars:
                raise ValueError(f"literal {l} outside 1..{self.num_vars}")
            self.occurs[abs(l)] = True
            self.activity[abs(l)] += 1e-3  # seed activity with occurrence counts
        if not lits:
            self.trivially_unsat = True
            return
        if len(lits) == 1:
            self.root_units.append(lits[0])
            return
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.watches.setdefault(lits[0], []).append(ci)
        self.watches.setdefault(lits[1], []).append(ci)

    # -- search ---------------------------------------------------------------
    def solve(self, assumptions: Iterable[int] = (), budget: Optional[Budget] = None) -> SolveResult:
        return next(self.models(assumptions, budget))

    def models(self, assumptions: Iterable[int] = (), budget: Optional[Budget] = None,
               block: Optional[Sequence[int]] = None) -> Iterator[SolveResult]:
        """Yield verified SAT results, then a final UNSAT or UNKNOWN one.

        Without ``block`` the first result ends the stream.  With it, each model
        is excluded by a clause over ``block`` that stays in the database, and
        the search resumes where it stopped instead of restarting.
        """
        if block is not None and any(not 1 <= v <= self.num_vars for v in block):
            raise ValueError("blocking variables must lie within 1..num_vars")
        start = time.perf_counter()
        budget = budget or Budget()
        stats = SolveStats()
        for result in self._search(list(assumptions), budget, stats, start, block):
            stats.seconds = time.perf_counter() - start
            result.stats = stats
            if result.sat:
                bad = check_model(self._all_clauses(), result.model)
                if bad is not None:
                    raise ModelError(f"internal error: model falsifies clause {bad}")
            yield result
            if not result.sat or block is None:
                return

    def _all_clauses(self):
        yield from ([u] for u in self.root_units)
        yield from self.clauses

    def _search(self, assumptions: list[int], budget: Budget, stats: SolveStats, start: float,
                block: Optional[Sequence[int]]) -> Iterator[SolveResult]:
        if self.trivially_unsat:
            yield SolveResult(UNSAT)
            return
        nv = self.num_vars
        val = [0] * (nv + 1)
        trail: list[int] = []
        levels: list[int] = []  # trail index where each decision level starts
        flipped: list[bool] = []

        def assign(lit: int) -> bool:
            v = abs(lit)
            s = 1 if lit > 0 else -1
            if val[v] == 0:
                val[v] = s
                trail.append(lit)
                return True
            return val[v] == s

        for lit in self.root_units + assumptions:
            if not 1 <= abs(lit) <= nv:
                raise ValueError(f"literal {lit} outside 1..{nv}")
            if not assign(lit):
                yield SolveResult(UNSAT)
                return
        head = 0
        clauses, watches = self.clauses, self.watches
        activity = self.activity
        vsids = self.order == "vsids"
        check_every = 0
        conflict = None

        while True:
            # propagate
            while head < len(trail) and conflict is None:
                lit = trail[head]
                head += 1
                stats.propagations += 1
                false_lit = -lit
                wl = watches.get(false_lit)
                if not wl:
                    continue
                i = 0
                while i < len(wl):
                    ci = wl[i]
                    c = clauses[ci]
                    if c[0] == false_lit:
                        c[0], c[1] = c[1], c[0]
                    other = c[0]
                    vo = val[abs(other)]
                    if vo != 0 and (vo > 0) == (other > 0):
                        i += 1
                        continue
                    # look for a replacement watch
                    for k in range(2, len(c)):
                        x = c[k]
                        vx = val[abs(x)]
                        if vx == 0 or (vx > 0) == (x > 0):
                            c[1], c[k] = x, false_lit
                            watches.setdefault(x, []).append(ci)
                            wl[i] = wl[-1]
                            wl.pop()
                            break
                    else:
                        if vo == 0:
                            assign(other)
                            i += 1
                        else:
                            conflict = ci
                            break
            if conflict is not None:
                stats.conflicts += 1
                if vsids:
                    for x in clauses[conflict]:
                        activity[abs(x)] += self.bump
                    self.bump /= self.decay
                    if self.bump > 1e100:
                        for v in range(nv + 1):
                            activity[v] *= 1e-100
                        self.bump *= 1e-100
                conflict = None
                while flipped and flipped[-1]:
                    self._undo(trail, levels.pop(), val)
                    flipped.pop()
                if not levels:
                    yield SolveResult(UNSAT)
                    return
                start_idx = levels[-1]
                decision = trail[start_idx]
                self._undo(trail, start_idx, val)
                flipped[-1] = True
                assign(-decision)
                head = start_idx
                if budget.conflicts is not None and stats.conflicts >= budget.conflicts:
                    yield SolveResult(UNKNOWN)
                    return
            else:
                v = self._pick(val)
                if v == 0 and block is not None:
                    # enumeration must branch on blocked variables that occur nowhere
                    v = next((u for u in block if val[u] == 0), 0)
                if v == 0:
                    # variables in no clause take the value false without branching
                    for u in range(1, nv + 1):
                        if val[u] == 0:
                            assign(-u)
                    head = len(trail)
                    yield SolveResult(SAT, [0] + [1 if x > 0 else 0 for x in val[1:]])
                    if block is None:
                        return
                    conflict = self._add_blocking(block, val, trail)
                    if conflict is None:
                        yield SolveResult(UNSAT)
                        return
                    continue
                stats.decisions += 1
                levels.append(len(trail))
                flipped.append(False)
                assign(-v)  # false first
            if budget.propagations is not None and stats.propagations >= budget.propagations:
                yield SolveResult(UNKNOWN)
                return
            check_every += 1
            if budget.seconds is not None and check_every & 63 == 0:
                if time.perf_counter() - start >= budget.seconds:
                    yield SolveResult(UNKNOWN)
                    return

    def _add_blocking(self, block: Sequence[int], val: list[int], trail: list[int]) -> Optional[int]:
        """Add the clause excluding the current values of ``block``; return its index.

        The clause is false under the current trail; it watches its two most
        recently assigned literals so that backtracking frees a watch first.
        ``None`` means the clause is empty and the search is over.
        """
        lits = [-v if val[v] > 0 else v for v in dict.fromkeys(block)]
        if not lits:
            return None
        pos = {abs(l): i for i, l in enumerate(trail)}
        lits.sort(key=lambda l: -pos[abs(l)])
        if len(lits) == 1:
            # a unit blocking clause still needs two watch slots
            lits.append(lits[0])
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.watches.setdefault(lits[0], []).append(ci)
        self.watches.setdefault(lits[1], []).append(ci)
        return ci

    @staticmethod
    def _undo(trail: list[int], to: int, val: list[int]) -> None:
        for lit in trail[to:]:
            val[abs(lit)] = 0
        del trail[to:]

    def _pick(self, val: list[int]) -> int:
        for v in self.priority:
            if val[v] == 0:
                return v
        best, best_act = 0, -1.0
        occurs = self.occurs
        if self.order == "fixed":
            for v in range(1, self.num_vars + 1):
                if val[v] == 0 and occurs[v]:
                    return v
        else:
            act = self.activity
            for v in range(1, self.num_vars + 1):
                if val[v] == 0 and occurs[v] and act[v] > best_act:
                    best, best_act = v, act[v]
        return best


def solve(num_vars: int, clauses: Iterable[Sequence[int]], assumptions: Iterable[int] = (),
          budget: Optional[Budget] = None, order: str = "vsids", priority: Sequence[int] = ()) -> SolveResult:
    """Decide satisfiability; SAT models are verified before they are returned."""
    return Solver(num_vars, clauses, order, priority).solve(assumptions, budget)
