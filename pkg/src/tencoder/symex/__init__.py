"""Symbolic execution into a hash-consed Boolean DAG."""

from .execute import EncodingState, Memory, SymbolicExecutor, apply_assert, execute, merge_conditional, record_core_vars
from .nodes import FALSE, TRUE, ArityError, NodeStore

__all__ = [
    "FALSE", "TRUE", "ArityError", "NodeStore", "EncodingState", "Memory", "SymbolicExecutor",
    "apply_assert", "execute", "merge_conditional", "record_core_vars",
]
