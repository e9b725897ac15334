import importlib
import json
import random
import shutil
import subprocess
import sys

import pytest

from conftest import corpus_text
from tencoder.cli import main
from tencoder.frontend import load_program
from tencoder.refinterp import Interpreter


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def toy(tmp_path, capsys):
    path = tmp_path / "toy.cnf"
    assert run(capsys, "encode", "corpus:toyhash6to3", "-o", path)[0] == 0
    return path


def test_encode_prints_metrics(tmp_path, capsys):
    out = tmp_path / "l.cnf"
    code, stdout, _ = run(capsys, "encode", "corpus:lfsr19", "-o", out)
    assert code == 0 and "vars 27" in stdout and "literals" in stdout
    assert out.read_text().startswith("c t-encoding v1")


def test_encode_defines_and_flags(tmp_path, capsys):
    out = tmp_path / "l.cnf"
    code, stdout, _ = run(capsys, "encode", "corpus:lfsr19", "-D", "E=1", "--max-arity", "0",
                          "--xor-threshold", "2", "-o", out)
    assert code == 0 and "outputs 1" in stdout


def test_encode_aiger(capsys):
    code, stdout, _ = run(capsys, "encode", "corpus:adder4", "--format", "aiger")
    assert code == 0 and stdout.startswith("aag ")


def test_encode_errors(tmp_path, capsys):
    assert run(capsys, "encode", tmp_path / "missing.alg")[0] == 2
    bad = tmp_path / "bad.alg"
    bad.write_text("void main() { y = 1; }")
    code, _, err = run(capsys, "encode", bad)
    assert code == 1 and "undeclared identifier" in err and "bad.alg:1:" in err
    assert run(capsys, "encode", "corpus:adder4", "--max-arity", "40")[0] == 2
    assert run(capsys, "encode", "corpus:adder4", "-D", "oops")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_preimage_round_trip(toy, tmp_path, capsys):
    inst = tmp_path / "pre.cnf"
    assert run(capsys, "instantiate", toy, "--output", "101", "-o", inst)[0] == 0
    code, stdout, _ = run(capsys, "solve", inst, "--jsonl", "-")
    assert code == 0 and stdout.startswith("s SAT")
    record = json.loads(stdout.strip().splitlines()[-1])
    x = [int(b) for b in record["x"]]
    prog, _ = load_program(corpus_text("toyhash6to3"))
    assert Interpreter(prog).run(x) == [1, 0, 1]
    assert record["y"] == "101"


def test_output_file_and_hex(toy, tmp_path, capsys):
    ks = tmp_path / "y.txt"
    ks.write_text("1 1 0\n")
    inst = tmp_path / "pre.cnf"
    assert run(capsys, "instantiate", toy, "--output-file", ks, "-o", inst)[0] == 0
    assert "c bound output 110" in inst.read_text()
    assert run(capsys, "instantiate", toy, "--output", "0x3", "-o", inst)[0] == 0
    assert "c bound output 110" in inst.read_text()
    assert run(capsys, "instantiate", toy, "--output", "10", "-o", inst)[0] == 2


def test_unsat_and_unknown_exit_codes(tmp_path, capsys):
    perm = tmp_path / "perm.cnf"
    col = tmp_path / "col.cnf"
    run(capsys, "encode", "corpus:perm6", "-o", perm)
    assert run(capsys, "instantiate", perm, "--collision", "-o", col)[0] == 0
    code, stdout, _ = run(capsys, "solve", col)
    assert code == 20 and "UNSAT" in stdout
    grain = tmp_path / "grain.cnf"
    inst = tmp_path / "g.cnf"
    run(capsys, "encode", "corpus:grain_v1", "-o", grain)
    prog, _ = load_program(corpus_text("grain_v1"))
    rng = random.Random(1)
    y = Interpreter(prog).run([rng.getrandbits(1) for _ in range(160)])
    run(capsys, "instantiate", grain, "--output", "".join(map(str, y)), "-o", inst)
    code, stdout, _ = run(capsys, "solve", inst, "--conflicts", "5")
    assert code == 10 and "UNKNOWN" in stdout


def test_collision_reports_both_inputs(toy, tmp_path, capsys):
    col = tmp_path / "col.cnf"
    run(capsys, "instantiate", toy, "--collision", "-o", col)
    code, stdout, _ = run(capsys, "solve", col)
    lines = dict(l.split(" ", 1) for l in stdout.splitlines())
    assert code == 0 and lines["y"].split()[0] == lines["y2"].split()[0]
    assert lines["x"] != lines["x2"]


def test_missing_header(tmp_path, capsys):
    bare = tmp_path / "bare.cnf"
    bare.write_text("p cnf 1 1\n1 0\n")
    code, _, err = run(capsys, "solve", bare)
    assert code == 1 and "not a t-encoding template" in err


def test_guess_family_files(toy, tmp_path, capsys):
    out = tmp_path / "fam"
    assert run(capsys, "instantiate", toy, "--output", "101", "--guess", "1,2,3", "--exhaustive",
               "--out-dir", out)[0] == 0
    assert len(list(out.iterdir())) == 8
    code, stdout, _ = run(capsys, "instantiate", toy, "--output", "101", "--guess", "x0,x5", "--sample", "3")
    assert code == 0 and stdout.count("c --- instance") == 3
    assert run(capsys, "instantiate", toy, "--output", "101", "--guess", "z9")[0] == 2
    assert run(capsys, "instantiate", toy, "--guess", "1")[0] == 2


def test_switch_files(toy, tmp_path, capsys):
    cons = tmp_path / "r.txt"
    cons.write_text("c pin x1\n1 0\n")
    inst = tmp_path / "sw.cnf"
    assert run(capsys, "instantiate", toy, "--output", "101", "--switch", cons, "--activate", "all",
               "-o", inst)[0] == 0
    code, stdout, _ = run(capsys, "solve", inst)
    prog, _ = load_program(corpus_text("toyhash6to3"))
    interp = Interpreter(prog)
    pinned = [x for x in range(64) if x & 1 and interp.run([(x >> i) & 1 for i in range(6)]) == [1, 0, 1]]
    assert code == (0 if pinned else 20)
    if pinned:
        assert stdout.splitlines()[1].split()[1][0] == "1"
    assert run(capsys, "instantiate", toy, "--switch", cons, "--activate", "3")[0] == 2


def test_verify(capsys):
    code, stdout, _ = run(capsys, "verify", "corpus:lfsr19", "-k", "100")
    assert code == 0 and "100/100 pass" in stdout
    assert run(capsys, "verify", "corpus:lfsr19", "-k", "0")[0] == 2


def test_verify_detects_a_broken_encoder(monkeypatch, capsys):
    ts = importlib.import_module("tencoder.cnfgen.tseitin")
    real = ts.xor_clauses
    monkeypatch.setattr(ts, "xor_clauses", lambda lits: real(lits)[1:])
    code, stdout, _ = run(capsys, "verify", "corpus:lfsr19", "-k", "20", "-q")
    assert code == 1 and "FAIL" in stdout


def test_estimate_is_reproducible(toy, capsys):
    a = run(capsys, "estimate", toy, "--guess", "x0,x1,x2,x3,x4,x5", "-N", "10", "--seed", "4")
    b = run(capsys, "estimate", toy, "--guess", "x0,x1,x2,x3,x4,x5", "-N", "10", "--seed", "4")
    assert a == b and a[0] == 0
    assert "rho: 1.0" in a[1] and "simplified estimator" in a[1]
    assert run(capsys, "estimate", toy, "-N", "0")[0] == 1


def test_external_solver_flag(toy, tmp_path, capsys):
    fake = tmp_path / "fake.py"
    fake.write_text("import sys\nprint('s UNSATISFIABLE')\n")
    inst = tmp_path / "i.cnf"
    run(capsys, "instantiate", toy, "--output", "101", "-o", inst)
    code, stdout, _ = run(capsys, "solve", inst, "--external", f"{sys.executable} {fake}")
    assert code == 20
    fake.write_text("print('nonsense')\n")
    code, _, err = run(capsys, "solve", inst, "--external", f"{sys.executable} {fake}")
    assert code == 1 and "status line" in err


def test_corpus_commands(tmp_path, capsys):
    code, stdout, _ = run(capsys, "corpus", "list")
    assert code == 0 and "bivium" in stdout.split()
    code, stdout, _ = run(capsys, "corpus", "show", "lfsr19")
    assert "__in bit reg[19]" in stdout
    assert run(capsys, "corpus", "extract", tmp_path / "c")[0] == 0
    assert len(list((tmp_path / "c").glob("*.alg"))) == 9
    assert run(capsys, "corpus", "show", "nope")[0] == 2


@pytest.mark.skipif(shutil.which("t-encoder") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["t-encoder", "corpus", "list"], capture_output=True, text=True)
    assert proc.returncode == 0 and "adder4" in proc.stdout
