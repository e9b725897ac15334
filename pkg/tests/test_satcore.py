import os
import random
import stat
import sys
import textwrap

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_models, compiled, satisfies
from tencoder.cnfgen import to_dimacs
from tencoder.cnfgen.dimacs import write_cnf
from tencoder.satcore import (SAT, SOLVER_ENV, UNKNOWN, UNSAT, Budget, ModelVerificationError, Propagator,
                              Solver, SolverCommandError, UnparseableOutput, enumerate_models, external_solve,
                              parse_solver_output, solve, unit_propagate)


def random_cnf(rng, n, m, width=3):
    return [tuple(rng.choice((1, -1)) * v for v in rng.sample(range(1, n + 1), min(width, n))) for _ in range(m)]


cnfs = st.integers(1, 7).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.lists(st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v])), min_size=0, max_size=4)
             .map(tuple), max_size=25)))


# -- unit propagation ---------------------------------------------------------------------

def test_up_fixpoint_and_conflict():
    r = unit_propagate(3, [(1,), (-1, 2), (-2, 3)])
    assert r.ok and r.values[1:] == [1, 1, 1]
    r = unit_propagate(2, [(1,), (-1, 2), (-2,)])
    assert not r.ok
    r = unit_propagate(2, [(1, 2)])
    assert r.ok and r.assigned_count() == 0


@settings(max_examples=300, deadline=None)
@given(cnfs)
def test_up_is_sound(case):
    n, clauses = case
    r = unit_propagate(n, clauses)
    models = brute_models(n, clauses)
    if not r.ok:
        # a UP conflict at the root proves unsatisfiability
        assert models == []
        return
    for m in models:
        for v in range(1, n + 1):
            if r.values[v]:
                assert m[v] == (1 if r.values[v] > 0 else 0)


def test_propagator_reuse_is_independent():
    p = Propagator(3, [(-1, 2), (-2, 3)])
    assert p.run([1]).values[1:] == [1, 1, 1]
    assert p.run([-3]).values[1:] == [-1, -1, -1]
    with pytest.raises(ValueError):
        p.run([4])


# -- DPLL ---------------------------------------------------------------------------------------

@settings(max_examples=300, deadline=None)
@given(cnfs, st.sampled_from(["vsids", "fixed"]))
def test_dpll_agrees_with_brute_force(case, order):
    n, clauses = case
    res = solve(n, clauses, order=order)
    models = brute_models(n, clauses)
    assert res.status == (SAT if models else UNSAT)
    if res.sat:
        assert satisfies(clauses, res.model)


def test_random_3sat_near_threshold():
    rng = random.Random(11)
    for _ in range(60):
        n = rng.randint(8, 12)
        clauses = random_cnf(rng, n, int(4.26 * n))
        res = solve(n, clauses)
        assert res.status == (SAT if brute_models(n, clauses) else UNSAT)


def test_assumptions_and_priority():
    clauses = [(1, 2), (-1, 3)]
    assert solve(3, clauses, assumptions=[-2]).value(1) == 1
    assert solve(3, clauses, assumptions=[1, -3]).status == UNSAT
    res = solve(3, clauses, order="fixed", priority=[3])
    assert res.sat and satisfies(clauses, res.model)


def test_budget_yields_unknown():
    # pigeonhole 6 -> 5 needs many conflicts without learning
    holes, pigeons = 5, 6
    var = lambda p, h: p * holes + h + 1
    clauses = [tuple(var(p, h) for h in range(holes)) for p in range(pigeons)]
    for h in range(holes):
        for p in range(pigeons):
            for q in range(p + 1, pigeons):
                clauses.append((-var(p, h), -var(q, h)))
    n = pigeons * holes
    assert solve(n, clauses, budget=Budget(conflicts=10)).status == UNKNOWN
    assert solve(n, clauses, budget=Budget(propagations=50)).status == UNKNOWN
    assert solve(n, clauses, budget=Budget(seconds=0.0)).status == UNKNOWN


def test_empty_clause_and_bad_literals():
    assert solve(2, [(1,), ()]).status == UNSAT
    with pytest.raises(ValueError):
        Solver(2, [(1, 3)])
    with pytest.raises(ValueError):
        Solver(2, [], order="random")


def test_model_covers_unused_variables():
    res = solve(4, [(1, 2)])
    assert res.sat and len(res.model) == 5 and set(res.model[1:]) <= {0, 1}


# -- enumeration -------------------------------------------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(cnfs)
def test_enumeration_counts(case):
    n, clauses = case
    got = enumerate_models(n, clauses, cap=1 << n)
    assert not got.truncated and got.complete
    assert sorted(tuple(m) for m in got.models) == sorted(brute_models(n, clauses))


def test_enumeration_projection_and_cap():
    clauses = [(1, 2)]
    got = enumerate_models(3, clauses, cap=10, projection=[1, 2])
    assert sorted(got.projections([1, 2])) == [(0, 1), (1, 0), (1, 1)]
    capped = enumerate_models(3, clauses, cap=2)
    assert len(capped.models) == 2 and capped.truncated


# -- external bridge ---------------------------------------------------------------------------------

FAKE = """
import itertools, sys
mode = {mode!r}
lines = [l.split() for l in open(sys.argv[1]) if l.strip() and not l.startswith("c")]
n = int(lines[0][2]); clauses = [[int(x) for x in l[:-1]] for l in lines[1:]]
if mode == "garbage":
    print("hello"); sys.exit(0)
for bits in itertools.product((0, 1), repeat=n):
    if all(any((bits[abs(l) - 1] == 1) == (l > 0) for l in c) for c in clauses):
        print("s SATISFIABLE")
        lits = [(i + 1) * (1 if b else -1) for i, b in enumerate(bits)]
        if mode == "corrupt":
            lits = [-l for l in lits]
        print("v " + " ".join(map(str, lits)) + " 0")
        sys.exit(10)
print("s UNSATISFIABLE"); sys.exit(20)
"""


@pytest.fixture
def fake_solver(tmp_path):
    def make(mode="ok"):
        path = tmp_path / f"fake_{mode}.py"
        path.write_text(textwrap.dedent(FAKE.format(mode=mode)))
        path.chmod(path.stat().st_mode | stat.S_IEXEC)
        return f"{sys.executable} {path}"
    return make


def test_external_agrees_with_embedded(fake_solver):
    cmd = fake_solver()
    rng = random.Random(4)
    for _ in range(50):
        n = rng.randint(3, 8)
        clauses = random_cnf(rng, n, rng.randint(3, 40))
        ext = external_solve(write_cnf(n, clauses), cmd)
        assert ext.status == solve(n, clauses).status
        if ext.sat:
            assert satisfies(clauses, ext.model)


def test_external_env_variable(fake_solver, monkeypatch):
    monkeypatch.setenv(SOLVER_ENV, fake_solver())
    assert external_solve(write_cnf(2, [(1,), (-1, 2)])).value(2) == 1
    monkeypatch.delenv(SOLVER_ENV)
    with pytest.raises(SolverCommandError):
        external_solve(write_cnf(1, [(1,)]))


def test_external_unparseable_output(fake_solver):
    with pytest.raises(UnparseableOutput):
        external_solve(write_cnf(1, [(1,)]), fake_solver("garbage"))


def test_external_corrupted_model_is_rejected(fake_solver):
    with pytest.raises(ModelVerificationError):
        external_solve(write_cnf(2, [(1,), (2,)]), fake_solver("corrupt"))


def test_external_missing_command():
    with pytest.raises(SolverCommandError):
        external_solve(write_cnf(1, [(1,)]), "/nonexistent/solver-binary")


def test_parse_solver_output():
    r = parse_solver_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 3)
    assert r.model == [0, 1, 0, 1]
    assert parse_solver_output("s UNSATISFIABLE\n", 3).status == UNSAT
    assert parse_solver_output("s UNKNOWN\n", 3).status == UNKNOWN
    with pytest.raises(UnparseableOutput):
        parse_solver_output("s MAYBE\n", 3)
    with pytest.raises(UnparseableOutput):
        parse_solver_output("s SATISFIABLE\nv 1 x 0\n", 3)


def test_embedded_solves_template():
    t = compiled("adder4").template
    res = solve(t.num_vars, t.clauses)
    assert res.sat
    if os.environ.get(SOLVER_ENV):
        assert external_solve(to_dimacs(t)).sat
