"""Embedded propositional reasoning: unit propagation, DPLL, enumeration, external bridge."""

from .dpll import SAT, UNKNOWN, UNSAT, Budget, ModelError, SolveResult, SolveStats, Solver, check_model, solve
from .external import (SOLVER_ENV, ExternalSolverError, ModelVerificationError, SolverCommandError, SolverTimeout,
                       UnparseableOutput, external_solve, parse_solver_output)
from .models import Enumeration, enumerate_models
from .propagate import Propagator, UPResult, unit_propagate

__all__ = [
    "SAT", "UNKNOWN", "UNSAT", "SOLVER_ENV", "Budget", "Enumeration", "ExternalSolverError", "ModelError",
    "ModelVerificationError", "Propagator", "SolveResult", "SolveStats", "Solver", "SolverCommandError", "SolverTimeout",
    "UPResult", "UnparseableOutput", "check_model", "enumerate_models", "external_solve",
    "parse_solver_output", "solve", "unit_propagate",
]
