import itertools
import random

import pytest
from hypothesis import HealthCheck, given, settings

from conftest import N_IN, all_inputs, bits_of, compiled, corpus_text, programs
from tencoder.diagnostics import CompileError
from tencoder.frontend import load_program
from tencoder.refinterp import AssertionViolation, Interpreter
from tencoder.symex import FALSE, TRUE, ArityError, Memory, NodeStore, execute, merge_conditional
from tencoder.symex import arith
from tencoder.symex.nodes import AND, INPUT, ITE, XOR


def run(src):
    p, _ = load_program(src)
    return p, *execute(p)


# -- hash-consing -------------------------------------------------------------------

def test_hash_consing_shares_structure():
    s = NodeStore()
    a, b, c = s.new_input(), s.new_input(), s.new_input()
    assert s.mk_and(a, b) == s.mk_and(b, a)
    assert s.mk_xor_n([a, b, c]) == s.mk_xor_n([c, b, a])
    n = len(s)
    s.mk_or(a, b), s.mk_or(b, a)
    assert len(s) == n + 1


def test_constant_folding_and_complements():
    s = NodeStore()
    a, b = s.new_input(), s.new_input()
    assert s.mk_and(a, FALSE) == FALSE and s.mk_or(a, TRUE) == TRUE
    assert s.mk_and(a, TRUE) == a and s.mk_xor(a, a) == FALSE
    assert s.mk_not(s.mk_not(a)) == a
    assert s.mk_and(a, s.mk_not(a)) == FALSE
    assert s.mk_ite(TRUE, a, b) == a and s.mk_ite(b, a, a) == a


def test_nodes_are_topologically_ordered():
    store = compiled("grain_v1").store
    for r in range(2, len(store)):
        assert all(c < r for c in store.children[r])


def test_table_arity_limit():
    s = NodeStore()
    xs = [s.new_input() for _ in range(17)]
    with pytest.raises(ArityError):
        s.mk_table(xs, 0)


def test_table_evaluation_matches_truth_table():
    s = NodeStore()
    xs = [s.new_input() for _ in range(3)]
    tt = 0b10010110  # parity
    t = s.mk_table(xs, tt)
    for x in all_inputs(3):
        assert s.evaluate([t], x) == [sum(x) % 2]


# -- memory --------------------------------------------------------------------------

def test_memory_copy_on_write():
    m = Memory()
    m.create(1, [2, 3])
    c = m.clone()
    c.write(1, 0, 7)
    assert m.read(1) == [2, 3] and c.read(1) == [7, 3]
    m.write(1, 1, 9)
    assert m.read(1) == [2, 9] and c.read(1) == [7, 3]


def test_merge_conditional_builds_ite_only_where_cells_differ():
    s = NodeStore()
    c, a, b = s.new_input(), s.new_input(), s.new_input()
    t, e = Memory(), Memory()
    t.create(1, [a, b])
    e.create(1, [a, c])
    merged = merge_conditional(s, c, t, e)
    assert merged.read(1)[0] == a
    assert s.kinds[merged.read(1)[1]] in (ITE, AND, "or")
    assert merge_conditional(s, TRUE, t, e) is t
    e.create(2, [a])
    with pytest.raises(ValueError):
        merge_conditional(s, c, t, e)


# -- execution semantics against the interpreter --------------------------------------

@settings(max_examples=120, suppress_health_check=list(HealthCheck), deadline=None)
@given(programs())
def test_symbolic_matches_interpreter(src):
    p, store, state = run(src)
    interp = Interpreter(p)
    for x in all_inputs(N_IN):
        assert store.evaluate(state.output_bits, x) == interp.run(x)


@pytest.mark.parametrize("name", ["adder4", "toyhash6to3", "perm6", "geffe_small", "lfsr19"])
def test_corpus_dag_matches_interpreter(name):
    c = compiled(name)
    interp = Interpreter(c.program)
    rng = random.Random(7)
    for _ in range(64):
        x = [rng.getrandbits(1) for _ in range(c.state.n)]
        assert c.store.evaluate(c.state.output_bits, x) == interp.run(x)


@pytest.mark.parametrize("op", ["add", "sub", "mul"])
def test_arith_exhaustive(op):
    s = NodeStore()
    a = [s.new_input() for _ in range(3)]
    b = [s.new_input() for _ in range(3)]
    out = arith.bitvec_arith(s, op, a, b)
    f = {"add": lambda u, v: u + v, "sub": lambda u, v: u - v, "mul": lambda u, v: u * v}[op]
    for u, v in itertools.product(range(8), repeat=2):
        got = s.evaluate(out, bits_of(u, 3) + bits_of(v, 3))
        assert got == bits_of(f(u, v) % 8, 3)


@pytest.mark.parametrize("op", ["<", "<=", ">", ">=", "==", "!="])
def test_compare_exhaustive(op):
    s = NodeStore()
    a = [s.new_input() for _ in range(3)]
    b = [s.new_input() for _ in range(3)]
    r = arith.compare(s, op, a, b)
    for u, v in itertools.product(range(8), repeat=2):
        assert s.evaluate([r], bits_of(u, 3) + bits_of(v, 3)) == [int(eval(f"{u} {op} {v}"))]


def test_mul_program_brute_force():
    src = "__in bit a[4]; __in bit b[4]; __out bit p[4]; void main() { p = a * b; }"
    p, store, state = run(src)
    for u, v in itertools.product(range(16), repeat=2):
        assert store.evaluate(state.output_bits, bits_of(u, 4) + bits_of(v, 4)) == bits_of(u * v % 16, 4)


# -- copy elision ------------------------------------------------------------------------

def test_copy_elision_in_lfsr():
    c = compiled("lfsr19")
    kinds = {c.store.kinds[r] for r in c.state.output_bits}
    assert kinds == {XOR}
    # every live node is an input or one of the feedback XORs
    from tencoder.cnfgen.prune import prune
    live = prune(c.store, c.state)
    assert all(c.store.kinds[r] in (INPUT, XOR) for r in live)
    assert len([r for r in live if c.store.kinds[r] == XOR]) == 8


def test_moves_and_copies_allocate_nothing():
    p, store, state = run("__in bit x[4]; __out bit y[4]; void main() { bit t[4] = x; t = t; y = t; }")
    assert state.output_bits == state.input_vars
    assert len(store) == 2 + 4


# -- conditionals, asserts, core_vars, __mem ---------------------------------------------

def test_if_on_constant_condition_takes_one_branch():
    p, store, state = run("__in bit x; __out bit y; void main() { if (1) { y = x; } else { y = ~x; } }")
    assert state.output_bits == state.input_vars


def test_assert_records_guarded_constraint():
    src = "__in bit x[2]; __out bit y; void main() { y = x[0]; if (x[0]) { assert(x[1]); } }"
    p, store, state = run(src)
    assert len(state.asserts) == 1
    for x in all_inputs(2):
        ok = store.evaluate(state.asserts, x)[0]
        assert ok == int(not x[0] or x[1])
    with pytest.raises(AssertionViolation):
        Interpreter(p).run([1, 0])


def test_core_vars_and_mem_marks():
    src = ("__in bit x[3]; __out bit y; __mem bit m[2]; "
           "void main() { m[0] = x[0] & x[1]; m[1] = m[0] ^ x[2]; core_vars(m); y = m[1] | x[0]; }")
    p, store, state = run(src)
    assert [label for label, _ in state.core_records] == ["m"]
    assert len(state.core_records[0][1]) == 2
    assert state.mem_points


@pytest.mark.parametrize("src, fragment", [
    ("__in bit x; void main() { int i = 0; if (x) { i = 1; } }", "under a bit-valued condition"),
    ("bit a[2]; void main() { for (int i = 0; i < 3; i++) { a[i] = 1; } }", "iteration 2"),
    ("void main() { int z = 0; int q = 4 / z; }", "by zero"),
    ("__in bit x[2]; __out bit y; void main() { y = x; }", "does not fit"),
])
def test_execution_errors_carry_positions(src, fragment):
    p, _ = load_program(src)
    with pytest.raises(CompileError) as info:
        execute(p)
    d = info.value.diagnostics[0]
    assert fragment in d.message, d.message
    assert d.line >= 1 and d.column >= 1


def test_function_returning_bit_array():
    p, store, state = run(corpus_text("perm6"))
    outs = {tuple(store.evaluate(state.output_bits, x)) for x in all_inputs(6)}
    assert len(outs) == 64
