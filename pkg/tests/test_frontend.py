import pytest
from hypothesis import HealthCheck, given, settings

from conftest import CORPUS, corpus_text, programs
from tencoder.diagnostics import CompileError
from tencoder.frontend import load_program, parse, pretty, tokenize


def kinds(text):
    return [(t.kind, t.lexeme) for t in tokenize(text) if t.kind != "eof"]


def errors(text):
    with pytest.raises(CompileError) as info:
        load_program(text)
    return info.value.diagnostics


def test_tokenize_declaration():
    assert kinds("bit x;") == [("keyword", "bit"), ("ident", "x"), ("punct", ";")]
    assert kinds("reg[18]") == [("ident", "reg"), ("punct", "["), ("int", "18"), ("punct", "]")]
    assert kinds("__in bit reg[19];")[0] == ("attr", "__in")


def test_tokenize_positions_and_comments():
    toks = tokenize("// c\nbit /* multi\nline */ y;")
    y = [t for t in toks if t.lexeme == "y"][0]
    assert (y.line, y.column) == (3, 9)
    assert [t.lexeme for t in toks if t.kind != "eof"] == ["bit", "y", ";"]


def test_maximal_munch():
    assert [l for _, l in kinds("a<<=b<=c<d")] == ["a", "<<=", "b", "<=", "c", "<", "d"]


@pytest.mark.parametrize("text, message, col", [
    ("bit x; @", "illegal character", 8),
    ("bit x; /* open", "unterminated comment", 8),
])
def test_lexical_errors(text, message, col):
    with pytest.raises(CompileError) as info:
        tokenize(text)
    d = info.value.diagnostics[0]
    assert message in d.message and d.line == 1


def test_parse_empty_main_and_if_else():
    p = parse("void main() {}")
    assert p.function("main") is not None
    p = parse("__out bit y; __in bit x; void main() { if (x) { y = 1; } else { y = 0; } }")
    stmt = p.function("main").body.stmts[0]
    assert type(stmt).__name__ == "If" and stmt.other is not None


def test_parse_error_reports_expected_and_found():
    d = errors("void main() { bit x = ; }")[0]
    assert "expected" in d.message and "found ';'" in d.message
    assert d.line == 1 and d.column > 1


@pytest.mark.parametrize("text, fragment", [
    ("bit x;", "missing entry point"),
    ("__out int k; void main() {}", "non-bit"),
    ("void main() { __in bit z; }", "global"),
    ("void main() { y = 1; }", "undeclared identifier 'y'"),
    ("bit a; bit a; void main() {}", "duplicate declaration"),
    ("__in bit x; void main() { for (int i = 0; x; i++) { } }", "non-constant loop bound"),
    ("bit a[4]; void main() { a[4] = 1; }", "out of bounds"),
    ("bit f() { return f(); } void main() { bit b = f(); }", "recursion"),
])
def test_resolve_errors(text, fragment):
    diags = errors(text)
    assert any(fragment in d.message for d in diags), [d.message for d in diags]
    for d in diags:
        assert d.line >= 1 and d.column >= 1


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_round_trip(name):
    p, _ = load_program(corpus_text(name))
    assert parse(pretty(p)) == p


@settings(max_examples=150, suppress_health_check=list(HealthCheck), deadline=None)
@given(programs())
def test_round_trip_random(src):
    p = parse(src)
    text = pretty(p)
    assert parse(text) == p
    assert pretty(parse(text)) == text


def test_resolve_is_deterministic():
    a, _ = load_program(corpus_text("grain_v1"))
    b, _ = load_program(corpus_text("grain_v1"))
    assert pretty(a) == pretty(b) and a == b


def test_defines_override_global_ints():
    p, _ = load_program(corpus_text("lfsr19"), defines={"E": 3})
    assert [d.size for d in p.outputs()] == [3]
