"""Concrete problem instances built on top of a template CNF.

Bindings fix inputs or outputs with unit clauses, the collision construction
joins two disjoint copies of the template, switching variables guard optional
constraints, and guessed-bit families plus a Monte Carlo estimator support
guess-and-determine style cost estimates.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterator, Optional, Sequence, Union

from .cnfgen.dimacs import header_lines, write_cnf
from .cnfgen.tseitin import Clause, TemplateCnf
from .satcore import SAT, Budget, Propagator, Solver, UPResult, external_solve
from .satcore.external import SolverTimeout

INPUT_BOUND = "input-bound"
OUTPUT_BOUND = "output-bound"
COLLISION = "collision"
RELAXED = "relaxed"

MAX_EXHAUSTIVE_GUESS = 30
ESTIMATOR_LABEL = "simplified estimator"


class InstanceError(ValueError):
    pass


@dataclass
class BoundInstance:
    """A template plus instance clauses; variables above ``base.num_vars`` are fresh."""

    base: TemplateCnf
    extra: list[Clause] = field(default_factory=list)
    kind: str = INPUT_BOUND
    num_vars: int = 0
    bound: list[tuple[str, str]] = field(default_factory=list)
    # the second copy's inputs and outputs in a collision instance
    second_inputs: list[int] = field(default_factory=list)
    second_outputs: list[int] = field(default_factory=list)
    switches: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.num_vars = max(self.num_vars, self.base.num_vars)

    @property
    def clauses(self) -> list[Clause]:
        return list(self.base.clauses) + list(self.extra)

    def with_units(self, lits: Sequence[int], kind: Optional[str] = None) -> "BoundInstance":
        return BoundInstance(self.base, self.extra + [(l,) for l in lits], kind or self.kind, self.num_vars,
                             list(self.bound), list(self.second_inputs), list(self.second_outputs),
                             list(self.switches))

    def header(self) -> list[str]:
        lines = header_lines(self.base)
        lines.append(f"c instance {self.kind}")
        lines += [f"c bound {k} {bits}" for k, bits in self.bound]
        if self.kind == COLLISION:
            lines.append("c input2 " + " ".join(map(str, self.second_inputs)))
            lines.append("c output2 " + " ".join(map(str, self.second_outputs)))
        if self.switches:
            lines.append("c switch " + " ".join(map(str, self.switches)))
        return lines

    def to_dimacs(self) -> str:
        return write_cnf(self.num_vars, self.clauses, self.header())


def bits_str(bits: Sequence[int]) -> str:
    return "".join(str(b) for b in bits)


def _template(t: Union[TemplateCnf, BoundInstance]) -> tuple[TemplateCnf, BoundInstance]:
    if isinstance(t, BoundInstance):
        return t.base, t
    return t, BoundInstance(t, [], INPUT_BOUND)


def _check_bits(bits: Sequence[int], want: int, what: str) -> list[int]:
    bits = list(bits)
    if len(bits) != want:
        raise InstanceError(f"{what} has {len(bits)} bits, template expects {want}")
    if any(b not in (0, 1) for b in bits):
        raise InstanceError(f"{what} must consist of 0/1 values")
    return bits


def units(variables: Sequence[int], bits: Sequence[int]) -> list[int]:
    return [v if b else -v for v, b in zip(variables, bits)]


def bind_input(t: TemplateCnf, x: Sequence[int]) -> BoundInstance:
    x = _check_bits(x, t.n, "input")
    inst = BoundInstance(t, [(l,) for l in units(t.input_vars, x)], INPUT_BOUND)
    inst.bound.append(("input", bits_str(x)))
    return inst


def bind_output(t: TemplateCnf, y: Sequence[int]) -> BoundInstance:
    y = _check_bits(y, t.m, "output")
    inst = BoundInstance(t, [(l,) for l in units(t.output_vars, y)], OUTPUT_BOUND)
    inst.bound.append(("output", bits_str(y)))
    return inst


def collision_instance(t: TemplateCnf) -> BoundInstance:
    """Two copies of ``t`` with equal outputs and at least one differing input.

    The second copy shifts every variable by ``t.num_vars``; difference
    variables ``d_i`` follow, one per input.
    """
    off = t.num_vars
    extra: list[Clause] = [tuple(l + off if l > 0 else l - off for l in c) for c in t.clauses]
    for a in t.output_vars:
        b = a + off
        extra += [(-a, b), (a, -b)]
    diffs = []
    for i, a in enumerate(t.input_vars):
        b, d = a + off, 2 * off + 1 + i
        diffs.append(d)
        # d <-> a xor b
        extra += [(-d, a, b), (-d, -a, -b), (d, -a, b), (d, a, -b)]
    extra.append(tuple(diffs))
    return BoundInstance(t, extra, COLLISION, 2 * off + t.n,
                         second_inputs=[v + off for v in t.input_vars],
                         second_outputs=[v + off for v in t.output_vars])


def add_switching(t: Union[TemplateCnf, BoundInstance], constraint: Sequence[Sequence[int]]) -> tuple[BoundInstance, int]:
    """Guard ``constraint`` by a fresh switch variable ``u``: each clause gains ``-u``."""
    base, inst = _template(t)
    for c in constraint:
        for l in c:
            if l == 0 or abs(l) > inst.num_vars:
                raise InstanceError(f"constraint literal {l} is not a variable of the instance")
    u = inst.num_vars + 1
    out = BoundInstance(base, inst.extra + [tuple(c) + (-u,) for c in constraint], RELAXED, u,
                        list(inst.bound), list(inst.second_inputs), list(inst.second_outputs),
                        inst.switches + [u])
    return out, u


def set_switches(inst: BoundInstance, activated: Sequence[int], deactivate_rest: bool = False) -> BoundInstance:
    """Units ``(u)`` for each activated switch, and ``(-u)`` for the rest when asked."""
    unknown = [u for u in activated if u not in inst.switches]
    if unknown:
        raise InstanceError(f"not a switch variable: {unknown[0]}")
    lits = list(activated)
    if deactivate_rest:
        lits += [-u for u in inst.switches if u not in activated]
    return inst.with_units(lits)


@dataclass
class MuResult:
    count: int
    conflict: bool
    assigned: list[int] = field(default_factory=list)


def measure_mu(inst: Union[TemplateCnf, BoundInstance], activated: Sequence[int] = (),
               target_vars: Optional[Sequence[int]] = None, all_vars: bool = False) -> MuResult:
    """Number of ``target_vars`` (default: inputs) fixed by UP once ``activated`` switches are on."""
    base, inst = _template(inst)
    if all_vars:
        targets = list(range(1, base.num_vars + 1))
    else:
        targets = list(target_vars) if target_vars is not None else list(base.input_vars)
    res = Propagator(inst.num_vars, inst.clauses).run(activated)
    if not res.ok:
        return MuResult(0, True)
    got = [v for v in targets if res.values[v]]
    return MuResult(len(got), False, got)


def guess_family(t: TemplateCnf, y: Sequence[int], guessed: Sequence[int], mode: str = "exhaustive",
                 k: int = 0, seed: int = 0) -> Iterator[BoundInstance]:
    """``bind_output(t, y)`` plus units for each assignment of the guessed variables.

    Exhaustive mode walks assignments in lexicographic order with the first
    guessed variable most significant; ``sample`` draws ``k`` with a seeded PRNG.
    """
    guessed = list(guessed)
    bad = [v for v in guessed if not 1 <= v <= t.num_vars]
    if bad:
        raise InstanceError(f"guessed variable {bad[0]} is not a template variable")
    if len(set(guessed)) != len(guessed):
        raise InstanceError("guessed variables must be distinct")
    base = bind_output(t, y)
    if mode == "exhaustive":
        if len(guessed) > MAX_EXHAUSTIVE_GUESS:
            raise InstanceError(f"exhaustive mode allows at most {MAX_EXHAUSTIVE_GUESS} guessed variables")
        assignments: Iterator = product((0, 1), repeat=len(guessed))
    elif mode == "sample":
        rng = random.Random(seed)
        assignments = (tuple(rng.getrandbits(1) for _ in guessed) for _ in range(k))
    else:
        raise InstanceError(f"unknown guess mode {mode!r}")
    for bits in assignments:
        inst = base.with_units(units(guessed, bits))
        inst.bound.append(("guess", bits_str(bits)))
        yield inst


# -- guess-and-determine estimate ---------------------------------------------

SolveFn = Callable[[BoundInstance, float], tuple[bool, float]]


def embedded_solver(unit: str = "propagations") -> SolveFn:
    """Embedded DPLL run; cost is the propagation count or wall seconds."""
    if unit not in ("propagations", "seconds"):
        raise InstanceError(f"unknown cost unit {unit!r}")

    def run(inst: BoundInstance, limit: float) -> tuple[bool, float]:
        budget = Budget(propagations=int(limit)) if unit == "propagations" else Budget(seconds=limit)
        start = time.perf_counter()
        res = Solver(inst.num_vars, inst.clauses).solve(budget=budget)
        cost = res.stats.propagations if unit == "propagations" else time.perf_counter() - start
        return res.status == SAT, float(cost)
    return run


def external_solver(command: Optional[str] = None) -> SolveFn:
    def run(inst: BoundInstance, limit: float) -> tuple[bool, float]:
        start = time.perf_counter()
        try:
            res = external_solve(inst.to_dimacs(), command, timeout=limit)
        except SolverTimeout:
            return False, limit
        return res.status == SAT, time.perf_counter() - start
    return run


@dataclass
class Estimate:
    guessed: int
    samples: int
    seed: int
    unit: str
    limit: float
    solved: int
    rho: float
    t_mean: float
    epsilon: float
    T: float
    label: str = ESTIMATOR_LABEL

    def as_dict(self) -> dict:
        return {"estimator": self.label, "guessed": self.guessed, "samples": self.samples, "seed": self.seed,
                "unit": self.unit, "limit": self.limit, "solved": self.solved, "rho": self.rho,
                "t_mean": self.t_mean, "epsilon": self.epsilon, "T": self.T}


def estimate_gd(t: TemplateCnf, guessed: Sequence[int], samples: int, limit: float,
                solver: Optional[SolveFn] = None, seed: int = 0, unit: str = "propagations") -> Estimate:
    """Monte Carlo estimate of ``T = 2^|B| * t_mean / max(rho, 1/(2N))``.

    Each sample draws a random input, derives the outputs and the true values
    of the guessed variables by UP, then solves the output-bound instance with
    those values as hints under the per-instance ``limit``.
    """
    if samples <= 0:
        raise InstanceError("sample size must be positive")
    guessed = list(guessed)
    bad = [v for v in guessed if not 1 <= v <= t.num_vars]
    if bad:
        raise InstanceError(f"guessed variable {bad[0]} is not a template variable")
    solver = solver or embedded_solver(unit)
    rng = random.Random(seed)
    prop = Propagator(t.num_vars, t.clauses)
    costs = []
    for _ in range(samples):
        x = [rng.getrandbits(1) for _ in range(t.n)]
        fwd: UPResult = prop.run(units(t.input_vars, x))
        if not fwd.ok:
            raise InstanceError("template is inconsistent with a random input")
        y = [fwd.value(v) for v in t.output_vars]
        hints = [fwd.value(v) for v in guessed]
        if None in y or None in hints:
            raise InstanceError("unit propagation did not determine all outputs and guessed variables")
        ok, cost = solver(bind_output(t, y).with_units(units(guessed, hints)), limit)
        if ok and cost <= limit:
            costs.append(cost)
    eps = 1.0 / (2 * samples)
    rho = len(costs) / samples
    t_mean = sum(costs) / len(costs) if costs else float(limit)
    T = (2 ** len(guessed)) * t_mean / max(rho, eps)
    return Estimate(len(guessed), samples, seed, unit, limit, len(costs), rho, t_mean, eps, T)


def family_stream(instances: Iterator[BoundInstance]) -> str:
    """Concatenate instances into one text with numbered separators."""
    parts = []
    for i, inst in enumerate(instances):
        parts.append(f"c --- instance {i} ---\n" + inst.to_dimacs())
    return "".join(parts)
