"""Template CNF generation: pruning, cone fusion, Tseitin encoding and serialization."""

from __future__ import annotations

from typing import Optional

from ..symex.execute import EncodingState
from ..symex.nodes import NodeStore
from .aiger import AigerError, parse_aiger, simulate_aiger, to_aiger
from .dimacs import DimacsError, NotATemplate, parse_dimacs, read_template, to_dimacs
from .fuse import DEFAULT_MAX_ARITY, fuse_tables
from .minimize import minimize_table, naive_table
from .prune import prune
from .tseitin import EncodeOptions, EncodingError, TemplateCnf, tseitin


def encode(store: NodeStore, state: EncodingState, max_arity: Optional[int] = DEFAULT_MAX_ARITY,
           options: Optional[EncodeOptions] = None) -> TemplateCnf:
    """Fuse cones up to ``max_arity`` (``None`` or 0 disables fusion) and run Tseitin."""
    if max_arity:
        state = fuse_tables(store, state, max_arity)
    return tseitin(store, state, options)


__all__ = [
    "AigerError", "DEFAULT_MAX_ARITY", "DimacsError", "EncodeOptions", "EncodingError", "NotATemplate",
    "TemplateCnf", "encode", "fuse_tables", "minimize_table", "naive_table", "parse_aiger", "parse_dimacs",
    "prune", "read_template", "simulate_aiger", "to_aiger", "to_dimacs", "tseitin",
]
