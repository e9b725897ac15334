"""Lexing, parsing and name resolution for .alg programs."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from . import ast
from .lexer import Token, tokenize
from .parser import parse, parse_tokens
from .printer import pretty
from .resolve import Scope, resolve


def load_program(text: str, origin: str = "<memory>", defines: Optional[dict[str, int]] = None):
    """Parse and resolve ``text``; returns ``(program, scope_tree)``."""
    if not text.strip():
        from ..diagnostics import CompileError, Diagnostic

        raise CompileError([Diagnostic("error", "empty program", 1, 1, origin)])
    return resolve(parse(text, origin), defines)


def load_file(path, defines: Optional[dict[str, int]] = None):
    p = Path(path)
    return load_program(p.read_text(), str(p), defines)


__all__ = ["Scope", "Token", "ast", "load_file", "load_program", "parse", "parse_tokens",
           "pretty", "resolve", "tokenize"]
