"""End-to-end helpers: source text to DAG to template CNF."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .cnfgen import DEFAULT_MAX_ARITY, EncodeOptions, TemplateCnf, encode
from .frontend import ast as A
from .frontend import load_program
from .symex import EncodingState, NodeStore, execute


@dataclass
class Compiled:
    program: A.Program
    store: NodeStore
    state: EncodingState
    template: TemplateCnf


def compile_source(text: str, origin: str = "<memory>", defines: Optional[dict[str, int]] = None,
                   max_arity: Optional[int] = DEFAULT_MAX_ARITY, options: Optional[EncodeOptions] = None) -> Compiled:
    program, _ = load_program(text, origin, defines)
    store, state = execute(program)
    return Compiled(program, store, state, encode(store, state, max_arity, options))


def compile_file(path, defines: Optional[dict[str, int]] = None, max_arity: Optional[int] = DEFAULT_MAX_ARITY,
                 options: Optional[EncodeOptions] = None) -> Compiled:
    p = Path(path)
    return compile_source(p.read_text(), str(p), defines, max_arity, options)
