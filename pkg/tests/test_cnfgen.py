import random

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import CORPUS, N_IN, all_inputs, brute_models, compiled, corpus_text, programs, satisfies
from tencoder.cnfgen import (AigerError, EncodeOptions, NotATemplate, minimize_table, naive_table,
                             parse_aiger, parse_dimacs, read_template, simulate_aiger, to_aiger, to_dimacs)
from tencoder.cnfgen.fuse import fuse_tables
from tencoder.cnfgen.minimize import cover, prime_implicants
from tencoder.cnfgen.tseitin import xor_clauses
from tencoder.frontend import load_program
from tencoder.pipeline import compile_source
from tencoder.refinterp import Interpreter
from tencoder.satcore import Propagator
from tencoder.symex import execute
from tencoder.symex.nodes import TABLE


def table_semantics_ok(k, tt, clauses):
    """The clauses hold exactly when v equals the table on x."""
    for row in range(1 << k):
        x = [(row >> i) & 1 for i in range(k)]
        want = (tt >> row) & 1
        for v in (0, 1):
            a = [0] + x + [v]
            if satisfies(clauses, a) != (v == want):
                return False
    return True


# -- minimization ----------------------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(st.integers(0, 6).flatmap(lambda k: st.tuples(st.just(k), st.integers(0, (1 << (1 << k)) - 1))))
def test_minimized_table_is_exact(case):
    k, tt = case
    assert table_semantics_ok(k, tt, minimize_table(k, tt))
    assert table_semantics_ok(k, tt, naive_table(k, tt))


def test_minimized_never_larger_than_naive():
    rng = random.Random(5)
    for _ in range(100):
        k = rng.randint(1, 8)
        tt = rng.getrandbits(1 << k)
        assert len(minimize_table(k, tt)) <= len(naive_table(k, tt))


def test_cover_covers_on_set_with_primes():
    rng = random.Random(9)
    for _ in range(50):
        k = rng.randint(1, 6)
        tt = rng.getrandbits(1 << k)
        primes = prime_implicants(k, tt)
        chosen = cover(k, tt, primes)
        assert set(chosen) <= set(primes)
        for row in range(1 << k):
            hit = any((row & ~mask) == val for val, mask in chosen)
            assert hit == bool((tt >> row) & 1)


def test_and_table_minimizes_to_tseitin_and():
    clauses = sorted(sorted(c) for c in minimize_table(2, 0b1000))
    assert clauses == sorted(sorted(c) for c in [(-1, -2, 3), (1, -3), (2, -3)])


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_xor_clauses(k):
    lits = list(range(1, k + 1))
    cl = xor_clauses(lits)
    assert len(cl) == 2 ** (k - 1)
    for x in all_inputs(k):
        assert satisfies(cl, [0] + x) == (sum(x) % 2 == 0)


# -- template invariants ---------------------------------------------------------------------

def check_template(t, allow_output_units=False):
    assert t.input_vars == list(range(1, t.n + 1))
    assert t.output_vars == list(range(t.num_vars - t.m + 1, t.num_vars + 1))
    used = {abs(l) for c in t.clauses for l in c}
    assert used <= set(range(1, t.num_vars + 1))
    assert set(range(1, t.num_vars + 1)) - used <= set(t.unused_inputs)
    if not allow_output_units:
        assert not [c for c in t.clauses if len(c) == 1 and abs(c[0]) in t.output_vars]


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_numbering(name):
    check_template(compiled(name).template)


@pytest.mark.parametrize("max_arity", [None, 2, 3, 5, 8, 12])
@pytest.mark.parametrize("xor_max", [2, 3, 4, 6])
@settings(max_examples=15, suppress_health_check=list(HealthCheck), deadline=None)
@given(src=programs())
def test_up_completeness_random_programs(src, max_arity, xor_max):
    c = compile_source(src, max_arity=max_arity, options=EncodeOptions(xor_direct_max=xor_max))
    t = c.template
    check_template(t, allow_output_units=True)
    interp = Interpreter(c.program)
    prop = Propagator(t.num_vars, t.clauses)
    for x in all_inputs(N_IN):
        r = prop.run([v if b else -v for v, b in zip(t.input_vars, x)])
        assert r.ok and r.assigned_count() == t.num_vars
        assert [r.value(v) for v in t.output_vars] == interp.run(x)


def test_parsimonious_on_small_program():
    src = "__in bit x[3]; __out bit y[2]; void main() { y[0] = x[0] & x[1] | x[2]; y[1] = x[0] ^ x[2]; }"
    c = compile_source(src)
    t = c.template
    models = brute_models(t.num_vars, t.clauses)
    assert len(models) == 8
    assert sorted(m[1:4] for m in models) == [tuple(x) for x in all_inputs(3)]


def test_lfsr_size():
    t = compiled("lfsr19").template
    assert (t.n, t.m, t.num_vars) == (19, 8, 27)
    assert t.unused_inputs == list(range(14, 20))


def test_lfsr_single_step_matches_worked_example():
    c = compile_source(corpus_text("lfsr19"), defines={"E": 1})
    assert c.template.metrics()["vars"] == 20
    assert len(c.template.clauses) == 16
    assert to_dimacs(c.template).splitlines()[2] == "c output 20"


def test_constant_outputs_and_failed_asserts():
    c = compile_source("__in bit x; __out bit y[2]; void main() { y[0] = x & ~x; y[1] = 1; }")
    t = c.template
    models = brute_models(t.num_vars, t.clauses)
    assert {m[t.output_vars[0]] for m in models} == {0} and {m[t.output_vars[1]] for m in models} == {1}
    c = compile_source("__in bit x; __out bit y; void main() { y = x; assert(x & ~x); }")
    assert brute_models(c.template.num_vars, c.template.clauses) == []


def test_asserts_restrict_models():
    c = compile_source("__in bit x[2]; __out bit y; void main() { y = x[0] & x[1]; assert(x[0] | x[1]); }")
    t = c.template
    ins = sorted({m[1:3] for m in brute_models(t.num_vars, t.clauses)})
    assert ins == [(0, 1), (1, 0), (1, 1)]


def test_core_records_serialized():
    src = ("__in bit x[3]; __out bit y; bit m[2]; "
           "void main() { m[0] = x[0] & x[1]; m[1] = 1; core_vars(m); y = m[0] | x[2]; }")
    c = compile_source(src)
    (label, toks), = c.template.core_records
    assert label == "m" and toks[1] == "-0"
    assert int(toks[0]) != 0
    back = read_template(to_dimacs(c.template)).template
    assert back.core_records == c.template.core_records


# -- fusion ----------------------------------------------------------------------------------

SHARED = """__in bit x[6]; __out bit y[2]; {attr} bit m;
void main() {{ m = (x[0] & x[1]) ^ x[2]; y[0] = m | x[3]; y[1] = x[4] & x[5]; }}"""


def test_mem_mark_forces_a_variable():
    plain = compile_source(SHARED.format(attr=""))
    marked = compile_source(SHARED.format(attr="__mem"))
    assert marked.template.num_vars == plain.template.num_vars + 1


def test_shared_nodes_are_not_fused():
    src = "__in bit x[4]; __out bit y[2]; void main() { bit s = x[0] & x[1]; y[0] = s ^ x[2]; y[1] = s | x[3]; }"
    p, _ = load_program(src)
    store, state = execute(p)
    shared = store.mk_and(state.input_vars[0], state.input_vars[1])
    fused = fuse_tables(store, state, 8)
    for r in fused.output_bits:
        if store.kinds[r] == TABLE:
            assert shared in store.children[r] or store.mk_not(shared) in store.children[r]


def test_fusion_respects_arity():
    c = compiled("grain_v1")
    store, state = c.store, c.state
    fused = fuse_tables(store, state, 5)
    from tencoder.cnfgen.prune import prune
    for r in prune(store, fused):
        if store.kinds[r] == TABLE:
            assert len(store.children[r]) <= 5


def test_fusion_rejects_bad_arity():
    c = compiled("adder4")
    with pytest.raises(ValueError):
        fuse_tables(c.store, c.state, 13)


def test_fusion_reduces_size():
    text = corpus_text("toyhash6to3")
    raw = compile_source(text, max_arity=None).template
    fused = compile_source(text, max_arity=8).template
    assert fused.num_vars < raw.num_vars


# -- serialization -----------------------------------------------------------------------------

def test_dimacs_round_trip():
    t = compiled("geffe_small").template
    text = to_dimacs(t)
    back = read_template(text).template
    assert (back.num_vars, back.clauses, back.input_vars, back.output_vars) == \
        (t.num_vars, t.clauses, t.input_vars, t.output_vars)
    f = parse_dimacs(text)
    assert f.num_vars == t.num_vars and len(f.clauses) == len(t.clauses)


def test_read_template_requires_header():
    with pytest.raises(NotATemplate, match="not a t-encoding template"):
        read_template("p cnf 2 1\n1 2 0\n")


@pytest.mark.parametrize("bad", ["1 2 0\n", "p cnf 2 2\n1 2 0\n", "p cnf 1 1\n1 5 0\n", "p cnf x 1\n"])
def test_parse_dimacs_errors(bad):
    from tencoder.cnfgen import DimacsError
    with pytest.raises(DimacsError):
        parse_dimacs(bad)


@pytest.mark.parametrize("name", ["adder4", "toyhash6to3", "perm6", "lfsr19"])
def test_aiger_simulation_matches_interpreter(name):
    c = compiled(name)
    aig = parse_aiger(to_aiger(c.store, c.state))
    interp = Interpreter(c.program)
    rng = random.Random(3)
    for _ in range(64):
        x = [rng.getrandbits(1) for _ in range(c.state.n)]
        assert simulate_aiger(aig, x) == interp.run(x)


def test_aiger_rejects_asserts():
    c = compile_source("__in bit x; __out bit y; void main() { y = x; assert(x); }")
    with pytest.raises(AigerError):
        to_aiger(c.store, c.state)


def test_encoding_is_deterministic():
    a = to_dimacs(compile_source(corpus_text("bivium")).template)
    b = to_dimacs(compile_source(corpus_text("bivium")).template)
    assert a == b
