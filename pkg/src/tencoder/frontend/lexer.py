"""Tokenizer for the bit-oriented algorithm language (.alg files)."""

from __future__ import annotations

from dataclasses import dataclass

from ..diagnostics import CompileError, DiagnosticSink

KEYWORDS = frozenset(
    {"bit", "int", "void", "if", "else", "for", "return", "assert", "core_vars"}
)
ATTRIBUTES = frozenset({"__in", "__out", "__mem"})

# longest first so that maximal munch works with a simple prefix scan
OPERATORS = (
    "<<=", ">>=",
    "&&", "||", "==", "!=", "<=", ">=", "<<", ">>",
    "+=", "-=", "*=", "^=", "&=", "|=", "++", "--",
    "!", "~", "&", "|", "^", "<", ">", "+", "-", "*", "/", "%", "=",
)
PUNCTUATION = frozenset("(){}[],;:")


@dataclass(frozen=True)
class Token:
    kind: str  # ident | int | keyword | op | punct | attr | eof
    lexeme: str
    line: int
    column: int
    value: int | None = None

    def __repr__(self) -> str:
        return f"{self.kind}({self.lexeme})"


def _scan_int(text: str, i: int) -> int:
    n = len(text)
    if text.startswith(("0x", "0X"), i):
        j = i + 2
        while j < n and (text[j] in "0123456789abcdefABCDEF_"):
            j += 1
        return j
    if text.startswith(("0b", "0B"), i):
        j = i + 2
        while j < n and text[j] in "01_":
            j += 1
        return j
    j = i
    while j < n and (text[j].isdigit() or text[j] == "_"):
        j += 1
    return j


def tokenize(text: str, origin: str = "<memory>") -> list[Token]:
    """Split ``text`` into tokens, raising CompileError on lexical faults.

    Whitespace and ``//`` / ``/* */`` comments are skipped.  The returned
    list always ends with an ``eof`` token.
    """
    sink = DiagnosticSink(origin)
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(count: int) -> None:
        nonlocal i, line, col
        for ch in text[i:i + count]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += count

    while i < n:
        ch = text[i]
        if ch in " \t\r\n\f\v":
            advance(1)
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            advance((n if j < 0 else j) - i)
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j < 0:
                sink.error("unterminated comment", line, col)
                break
            advance(j + 2 - i)
            continue
        start_line, start_col = line, col
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word in KEYWORDS:
                kind = "keyword"
            elif word in ATTRIBUTES:
                kind = "attr"
            else:
                kind = "ident"
            tokens.append(Token(kind, word, start_line, start_col))
            advance(j - i)
            continue
        if ch.isdigit():
            j = _scan_int(text, i)
            lexeme = text[i:j]
            try:
                value = int(lexeme.replace("_", ""), 0)
            except ValueError:
                # int(…, 0) rejects decimal literals with leading zeros
                try:
                    value = int(lexeme.replace("_", ""), 10)
                except ValueError:
                    sink.error(f"malformed integer literal '{lexeme}'", start_line, start_col)
                    advance(j - i)
                    continue
            if j < n and (text[j].isalpha() or text[j] == "_"):
                sink.error(f"malformed integer literal '{text[i:j + 1]}'", start_line, start_col)
            tokens.append(Token("int", lexeme, start_line, start_col, value))
            advance(j - i)
            continue
        if ch in PUNCTUATION:
            tokens.append(Token("punct", ch, start_line, start_col))
            advance(1)
            continue
        for op in OPERATORS:
            if text.startswith(op, i):
                tokens.append(Token("op", op, start_line, start_col))
                advance(len(op))
                break
        else:
            sink.error(f"illegal character {ch!r}", start_line, start_col)
            advance(1)

    if sink.has_errors:
        raise CompileError(sink.items)
    tokens.append(Token("eof", "<eof>", line, col))
    return tokens
