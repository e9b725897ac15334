"""Shared oracles and generators for the test suite."""

from __future__ import annotations

import itertools
from functools import lru_cache
from importlib import resources

from hypothesis import strategies as st

from tencoder.pipeline import compile_source

CORPUS = sorted(p.name[:-4] for p in (resources.files("tencoder") / "corpus").iterdir() if p.name.endswith(".alg"))


def corpus_text(name: str) -> str:
    return (resources.files("tencoder") / "corpus" / f"{name}.alg").read_text()


@lru_cache(maxsize=None)
def compiled(name: str, max_arity=8):
    return compile_source(corpus_text(name), f"{name}.alg", None, max_arity)


# -- brute-force oracles ---------------------------------------------------------

def satisfies(clauses, assignment) -> bool:
    """``assignment[v]`` in {0, 1}; index 0 unused."""
    return all(any((assignment[abs(l)] == 1) == (l > 0) for l in c) for c in clauses)


def brute_models(num_vars: int, clauses) -> list[tuple[int, ...]]:
    out = []
    for bits in itertools.product((0, 1), repeat=num_vars):
        a = (0,) + bits
        if satisfies(clauses, a):
            out.append(a)
    return out


def all_inputs(n: int):
    return [list(bits) for bits in itertools.product((0, 1), repeat=n)]


def bits_of(value: int, width: int) -> list[int]:
    return [(value >> i) & 1 for i in range(width)]


# -- random program generator ---------------------------------------------------------

N_IN, N_OUT = 5, 4


def _bit_expr(leaves):
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            st.builds(lambda a: f"~{a}", inner),
            st.builds(lambda a: f"!{a}", inner),
            st.builds(lambda a, op, b: f"({a} {op} {b})", inner, st.sampled_from(["&", "|", "^"]), inner),
            st.builds(lambda a, op, b: f"({a} {op} {b})", inner, st.sampled_from(["&", "|", "^"]), st.sampled_from(["0", "1"])),
            st.builds(lambda a, b: f"(({a} == {b}))", inner, inner),
        ),
        max_leaves=6,
    )


_leaf = st.one_of(
    st.integers(0, N_IN - 1).map(lambda i: f"x[{i}]"),
    st.integers(0, N_OUT - 1).map(lambda i: f"y[{i}]"),
    st.just("t"),
)
_loop_leaf = st.one_of(_leaf, st.integers(0, 3).map(lambda c: f"x[(i + {c}) % {N_IN}]"))


def _assign(expr):
    return st.builds(lambda i, e: f"y[{i}] = {e};", st.integers(0, N_OUT - 1), expr)


def _stmt(depth: int):
    base = st.one_of(
        _assign(_bit_expr(_leaf)),
        st.builds(lambda e: f"t = {e};", _bit_expr(_leaf)),
        st.sampled_from(["w = w + x[0:3];", "w = w * x[2:5];", "w = w ^ (x[0:3] << 1);",
                         "y[0:3] = w;", "w = ~w - x[1:4];", "y[3] = w < x[0:3];"]),
    )
    if depth == 0:
        return base
    inner = st.lists(_stmt(depth - 1), min_size=1, max_size=3).map(" ".join)
    return st.one_of(
        base,
        st.builds(lambda c, a, b: f"if ({c}) {{ {a} }} else {{ {b} }}", _bit_expr(_leaf), inner, inner),
        st.builds(lambda c, a: f"if ({c}) {{ {a} }}", _bit_expr(_leaf), inner),
        st.builds(lambda k, e, j: f"for (int i = 0; i < {k}; i++) {{ y[(i + {j}) % {N_OUT}] = {e}; }}",
                  st.integers(1, 4), _bit_expr(_loop_leaf), st.integers(0, 3)),
    )


@st.composite
def programs(draw):
    body = " ".join(draw(st.lists(_stmt(2), min_size=1, max_size=6)))
    return (f"__in bit x[{N_IN}];\n__out bit y[{N_OUT}];\n"
            f"void main() {{ bit t = x[0]; bit w[3] = x[2:5]; {body} }}\n")
