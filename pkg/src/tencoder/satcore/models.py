"""Model enumeration by blocking clauses over a projection set."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .dpll import UNKNOWN, Budget, Solver


@dataclass
class Enumeration:
    models: list[list[int]] = field(default_factory=list)
    truncated: bool = False
    complete: bool = True  # False when a budget ran out before the search finished

    def projections(self, variables: Sequence[int]) -> list[tuple[int, ...]]:
        return [tuple(m[v] for v in variables) for m in self.models]


def enumerate_models(num_vars: int, clauses: Sequence[Sequence[int]], cap: int,
                     projection: Optional[Sequence[int]] = None, order: str = "fixed",
                     budget: Optional[Budget] = None) -> Enumeration:
    """Up to ``cap`` models differing on ``projection`` (default: all variables).

    ``truncated`` is set when more models exist beyond ``cap``.  One search
    runs throughout: each model adds a blocking clause and the search resumes.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    proj = list(projection) if projection is not None else list(range(1, num_vars + 1))
    solver = Solver(num_vars, clauses, order=order)
    out = Enumeration()
    for res in solver.models(budget=budget, block=proj):
        if res.status == UNKNOWN:
            out.complete = False
            return out
        if not res.sat:
            return out
        if len(out.models) == cap:
            out.truncated = True
            return out
        out.models.append(res.model)
        if not proj:
            return out
    return out
