"""Bridge to external solvers speaking the SAT-competition output format."""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
from typing import Optional, Sequence

from ..cnfgen.dimacs import parse_dimacs
from .dpll import SAT, UNKNOWN, UNSAT, SolveResult, check_model

SOLVER_ENV = "T_ENCODER_SOLVER"


class ExternalSolverError(Exception):
    pass


class SolverCommandError(ExternalSolverError):
    """The command could not be run."""


class SolverTimeout(ExternalSolverError):
    pass


class UnparseableOutput(ExternalSolverError):
    pass


class ModelVerificationError(ExternalSolverError):
    pass


def parse_solver_output(text: str, num_vars: int) -> SolveResult:
    status = None
    lits: list[int] = []
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "s" and len(parts) >= 2:
            word = " ".join(parts[1:])
            status = {"SATISFIABLE": SAT, "UNSATISFIABLE": UNSAT, "UNKNOWN": UNKNOWN}.get(word)
            if status is None:
                raise UnparseableOutput(f"unknown status line {line!r}")
        elif parts[0] == "v":
            try:
                lits.extend(int(p) for p in parts[1:])
            except ValueError:
                raise UnparseableOutput(f"bad value line {line!r}") from None
    if status is None:
        raise UnparseableOutput("solver output has no status line")
    if status != SAT:
        return SolveResult(status)
    model = [0] * (num_vars + 1)
    for l in lits:
        if l != 0 and abs(l) <= num_vars:
            model[abs(l)] = 1 if l > 0 else 0
    return SolveResult(SAT, model)


def resolve_command(command: Optional[str]) -> str:
    cmd = command or os.environ.get(SOLVER_ENV)
    if not cmd:
        raise SolverCommandError(f"no external solver given (use a flag or set {SOLVER_ENV})")
    return cmd


def external_solve(dimacs: str, command: Optional[str] = None, timeout: Optional[float] = None) -> SolveResult:
    """Run ``command <file.cnf>`` and return its verdict; SAT models are re-checked locally."""
    cnf = parse_dimacs(dimacs)
    argv = shlex.split(resolve_command(command))
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "instance.cnf")
        with open(path, "w") as fh:
            fh.write(dimacs)
        try:
            proc = subprocess.run(argv + [path], capture_output=True, text=True, timeout=timeout)
        except subprocess.TimeoutExpired:
            raise SolverTimeout(f"solver exceeded {timeout} s") from None
        except (OSError, subprocess.SubprocessError) as exc:
            raise SolverCommandError(f"cannot run {argv[0]!r}: {exc}") from None
    res = parse_solver_output(proc.stdout, cnf.num_vars)
    if res.sat:
        bad = check_model(cnf.clauses, res.model)
        if bad is not None:
            raise ModelVerificationError(f"external model falsifies clause {bad + 1}")
    return res
