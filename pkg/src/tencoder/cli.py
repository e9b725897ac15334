"""Command-line interface: ``t-encoder <command> ...``.

Exit codes: 0 success or SAT, 1 diagnostics, 2 usage or I/O errors,
10 UNKNOWN (budget exhausted), 20 UNSAT.

Bit strings list values in variable order (first character = first
variable).  A ``0x`` prefix reads hex instead, taking the first variable as
the least significant bit of the number.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .cnfgen import DEFAULT_MAX_ARITY, EncodeOptions
from .cnfgen.aiger import AigerError, to_aiger
from .cnfgen.dimacs import DimacsError, NotATemplate, ParsedInstance, read_template, to_dimacs
from .cnfgen.tseitin import EncodingError
from .diagnostics import CompileError
from .instance import (BoundInstance, InstanceError, add_switching, bind_input, bind_output, bits_str,
                       collision_instance, embedded_solver, estimate_gd, external_solver, family_stream,
                       guess_family, set_switches)
from .pipeline import Compiled, compile_source
from .refinterp import InterpError, Interpreter
from .satcore import SAT, UNKNOWN, UNSAT, Budget, ExternalSolverError, Propagator, Solver, external_solve

EXIT_OK, EXIT_DIAG, EXIT_USAGE, EXIT_UNKNOWN, EXIT_UNSAT = 0, 1, 2, 10, 20
CORPUS_PREFIX = "corpus:"


class UsageError(Exception):
    pass


class Diag(Exception):
    pass


# -- helpers -------------------------------------------------------------------

def corpus_dir():
    return resources.files("tencoder") / "corpus"


def corpus_names() -> list[str]:
    return sorted(p.name[:-4] for p in corpus_dir().iterdir() if p.name.endswith(".alg"))


def read_program(source: str) -> tuple[str, str]:
    """Source text and origin of a path or a ``corpus:<name>`` reference."""
    if source.startswith(CORPUS_PREFIX):
        name = source[len(CORPUS_PREFIX):]
        if name not in corpus_names():
            raise UsageError(f"no corpus program named {name!r} (try 'corpus list')")
        return (corpus_dir() / f"{name}.alg").read_text(), f"{name}.alg"
    try:
        return Path(source).read_text(), source
    except OSError as exc:
        raise UsageError(f"cannot read {source}: {exc.strerror or exc}") from None


def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def write_out(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None


def parse_defines(items: Sequence[str]) -> dict[str, int]:
    out = {}
    for item in items:
        name, eq, value = item.partition("=")
        if not eq or not name.isidentifier():
            raise UsageError(f"bad define {item!r}, expected NAME=INT")
        try:
            out[name] = int(value, 0)
        except ValueError:
            raise UsageError(f"bad define {item!r}, expected NAME=INT") from None
    return out


def parse_bits(text: str, width: int, what: str) -> list[int]:
    text = text.strip().replace("_", "")
    if text.lower().startswith("0x"):
        try:
            value = int(text, 16)
        except ValueError:
            raise UsageError(f"{what}: bad hex value {text!r}") from None
        if value >> width:
            raise UsageError(f"{what}: value does not fit in {width} bits")
        return [(value >> i) & 1 for i in range(width)]
    if any(ch not in "01" for ch in text):
        raise UsageError(f"{what}: expected a 0/1 string or 0x-prefixed hex")
    if len(text) != width:
        raise UsageError(f"{what}: got {len(text)} bits, template expects {width}")
    return [int(ch) for ch in text]


def to_hex(bits: Sequence[int]) -> str:
    value = sum(b << i for i, b in enumerate(bits))
    return f"0x{value:0{max(1, (len(bits) + 3) // 4)}x}"


def parse_var_list(text: str, t) -> list[int]:
    """Comma list of variable numbers or labels ``x<i>`` (input i) / ``y<i>`` (output i), 0-based."""
    out = []
    for tok in filter(None, (s.strip() for s in text.split(","))):
        if tok[0] in "xy" and tok[1:].isdigit():
            seq = t.input_vars if tok[0] == "x" else t.output_vars
            i = int(tok[1:])
            if i >= len(seq):
                raise UsageError(f"unknown variable label {tok!r}")
            out.append(seq[i])
        elif tok.isdigit() and 1 <= int(tok) <= t.num_vars:
            out.append(int(tok))
        else:
            raise UsageError(f"unknown variable label {tok!r}")
    return out


def switch_at(switches: list[int], token: str) -> int:
    token = token.strip()
    if not token.isdigit() or int(token) >= len(switches):
        raise UsageError(f"unknown switch index {token!r}")
    return switches[int(token)]


def read_clause_file(path: str) -> list[tuple[int, ...]]:
    clauses = []
    for lineno, line in enumerate(read_text(path).splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        try:
            lits = [int(x) for x in line.split()]
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad literal") from None
        if lits and lits[-1] == 0:
            lits.pop()
        if lits:
            clauses.append(tuple(lits))
    return clauses


def load_template(path: str) -> ParsedInstance:
    try:
        return read_template(read_text(path))
    except NotATemplate as exc:
        raise Diag(f"{path}: {exc}") from None
    except DimacsError as exc:
        raise Diag(f"{path}: {exc}") from None


def header_vars(parsed: ParsedInstance, tag: str) -> list[int]:
    for c in parsed.comments:
        parts = c.split()
        if len(parts) >= 2 and parts[1] == tag:
            return [int(p) for p in parts[2:]]
    return []


def emit_json(path: Optional[str], record: dict) -> None:
    if not path:
        return
    line = json.dumps(record, sort_keys=True) + "\n"
    if path == "-":
        sys.stdout.write(line)
        return
    try:
        with open(path, "a") as fh:
            fh.write(line)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None


def compile_args(args) -> Compiled:
    text, origin = read_program(args.program)
    options = EncodeOptions(xor_direct_max=args.xor_threshold)
    return compile_source(text, origin, parse_defines(args.define), args.max_arity or None, options)


def budget_of(args) -> Budget:
    return Budget(conflicts=args.conflicts, propagations=args.propagations, seconds=args.timeout)


# -- commands ------------------------------------------------------------------

def cmd_encode(args) -> int:
    c = compile_args(args)
    if args.format == "aiger":
        try:
            write_out(args.output, to_aiger(c.store, c.state))
        except AigerError as exc:
            raise Diag(str(exc)) from None
    else:
        write_out(args.output, to_dimacs(c.template))
    met = c.template.metrics()
    summary = f"inputs {c.template.n} outputs {c.template.m} vars {met['vars']} clauses {met['clauses']} literals {met['literals']}"
    print(summary, file=sys.stderr if args.output in (None, "-") else sys.stdout)
    emit_json(args.jsonl, {"command": "encode", "program": args.program, "inputs": c.template.n,
                           "outputs": c.template.m, **met})
    return EXIT_OK


def cmd_instantiate(args) -> int:
    parsed = load_template(args.template)
    t = parsed.template
    modes = [m for m in (args.input, args.output, args.output_file) if m is not None] + ([1] if args.collision else [])
    if len(modes) > 1:
        raise UsageError("choose at most one of --input, --output, --output-file, --collision")
    y = None
    if args.output_file is not None:
        args.output = "".join(read_text(args.output_file).split())
    if args.input is not None:
        inst = bind_input(t, parse_bits(args.input, t.n, "--input"))
    elif args.output is not None:
        y = parse_bits(args.output, t.m, "--output")
        inst = bind_output(t, y)
    elif args.collision:
        inst = collision_instance(t)
    else:
        inst = BoundInstance(t)
    switches = []
    for path in args.switch:
        inst, u = add_switching(inst, read_clause_file(path))
        switches.append(u)
    if args.activate:
        chosen = switches if args.activate == "all" else [switch_at(switches, i) for i in args.activate.split(",")]
        inst = set_switches(inst, chosen, deactivate_rest=True)
    if args.guess is None:
        write_out(args.out, inst.to_dimacs())
        return EXIT_OK
    if y is None:
        raise UsageError("--guess requires --output")
    guessed = parse_var_list(args.guess, t)
    mode = "sample" if args.sample is not None else "exhaustive"
    family = guess_family(t, y, guessed, mode, args.sample or 0, args.seed)
    extra = inst.extra[len(bind_output(t, y).extra):]
    family = (BoundInstance(f.base, f.extra + extra, f.kind, inst.num_vars, f.bound, switches=inst.switches)
              for f in family)
    if args.out_dir:
        out = Path(args.out_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
            for i, f in enumerate(family):
                (out / f"instance_{i:06d}.cnf").write_text(f.to_dimacs())
        except OSError as exc:
            raise UsageError(f"cannot write to {out}: {exc.strerror or exc}") from None
    else:
        write_out(args.out, family_stream(family))
    return EXIT_OK


def cmd_solve(args) -> int:
    text = read_text(args.instance)
    try:
        parsed = read_template(text)
    except DimacsError as exc:
        raise Diag(f"{args.instance}: {exc}") from None
    t = parsed.template
    if args.external is not None or args.use_external:
        try:
            res = external_solve(text, args.external, timeout=args.timeout)
        except ExternalSolverError as exc:
            raise Diag(str(exc)) from None
    else:
        res = Solver(t.num_vars, t.clauses, order=args.order).solve(budget=budget_of(args))
    record = {"command": "solve", "instance": args.instance, "status": res.status}
    print(f"s {res.status}")
    if res.sat:
        groups = [("x", t.input_vars), ("y", t.output_vars),
                  ("x2", header_vars(parsed, "input2")), ("y2", header_vars(parsed, "output2"))]
        for name, vs in groups:
            if not vs and name.endswith("2"):
                continue
            bits = [res.model[v] for v in vs]
            print(f"{name} {bits_str(bits)} {to_hex(bits)}")
            record[name] = bits_str(bits)
    emit_json(args.jsonl, record)
    return {SAT: EXIT_OK, UNSAT: EXIT_UNSAT, UNKNOWN: EXIT_UNKNOWN}[res.status]


def cmd_verify(args) -> int:
    if args.samples <= 0:
        raise UsageError("--samples must be positive")
    c = compile_args(args)
    t = c.template
    interp = Interpreter(c.program)
    prop = Propagator(t.num_vars, t.clauses)
    rng = random.Random(args.seed)
    failures = 0
    for i in range(args.samples):
        x = [rng.getrandbits(1) for _ in range(t.n)]
        res = prop.run([v if b else -v for v, b in zip(t.input_vars, x)])
        reason = ""
        try:
            want = interp.run(x)
        except InterpError as exc:
            want, reason = None, f"interpreter: {exc}"
        if not res.ok:
            reason = reason or "conflict"
        elif res.assigned_count() != t.num_vars:
            reason = f"{t.num_vars - res.assigned_count()} variables unassigned"
        elif want is not None and [res.value(v) for v in t.output_vars] != want:
            reason = "outputs differ from the interpreter"
        failures += bool(reason)
        if not args.quiet or reason:
            print(f"sample {i}: {'FAIL ' + reason if reason else 'pass'} x={bits_str(x)}")
    print(f"{args.samples - failures}/{args.samples} pass")
    emit_json(args.jsonl, {"command": "verify", "program": args.program, "samples": args.samples,
                           "seed": args.seed, "failures": failures})
    return EXIT_DIAG if failures else EXIT_OK


def cmd_estimate(args) -> int:
    t = load_template(args.template).template
    guessed = parse_var_list(args.guess, t) if args.guess else []
    if args.external is not None or args.use_external:
        solver, unit = external_solver(args.external), "seconds"
    else:
        solver, unit = embedded_solver(args.unit), args.unit
    try:
        est = estimate_gd(t, guessed, args.samples, args.limit, solver, args.seed, unit)
    except ExternalSolverError as exc:
        raise Diag(str(exc)) from None
    d = est.as_dict()
    print(f"estimator: {d['estimator']}")
    for key in ("guessed", "samples", "seed", "unit", "limit", "solved", "rho", "t_mean", "epsilon", "T"):
        print(f"{key}: {d[key]}")
    emit_json(args.jsonl, {"command": "estimate", **d})
    return EXIT_OK


def cmd_corpus(args) -> int:
    names = corpus_names()
    if args.action == "list":
        for n in names:
            print(n)
        return EXIT_OK
    if args.action == "show":
        if not args.name:
            raise UsageError("corpus show needs a program name")
        sys.stdout.write(read_program(CORPUS_PREFIX + args.name)[0])
        return EXIT_OK
    if not args.name:
        raise UsageError("corpus extract needs a target directory")
    out = Path(args.name)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for n in names:
            (out / f"{n}.alg").write_text((corpus_dir() / f"{n}.alg").read_text())
    except OSError as exc:
        raise UsageError(f"cannot write to {out}: {exc.strerror or exc}") from None
    print(f"wrote {len(names)} programs to {out}")
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------

def _arity(text: str) -> int:
    k = int(text)
    if k != 0 and not 2 <= k <= 12:
        raise argparse.ArgumentTypeError("must be 0 (no fusion) or within 2..12")
    return k


def _xor(text: str) -> int:
    k = int(text)
    if k < 2:
        raise argparse.ArgumentTypeError("must be at least 2")
    return k


def _positive(text: str) -> int:
    k = int(text)
    if k < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return k


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="t-encoder", description="Compile bit-level programs to template CNF and work with instances.")
    sub = p.add_subparsers(dest="command", required=True)

    def program_opts(sp):
        sp.add_argument("program", help="path to a .alg program or corpus:<name>")
        sp.add_argument("-D", "--define", action="append", default=[], metavar="NAME=INT",
                        help="override a global int initializer")
        sp.add_argument("--max-arity", type=_arity, default=DEFAULT_MAX_ARITY, help="table fusion arity (0 disables)")
        sp.add_argument("--xor-threshold", type=_xor, default=4, help="largest XOR encoded without chaining")

    def solver_opts(sp):
        sp.add_argument("--embedded", action="store_true", help="use the embedded DPLL (default)")
        sp.add_argument("--external", metavar="CMD", help="external solver command")
        sp.add_argument("--use-external", action="store_true", help="external solver from $T_ENCODER_SOLVER")

    sp = sub.add_parser("encode", help="compile a program to a template")
    program_opts(sp)
    sp.add_argument("-o", "--output", help="output file (default stdout)")
    sp.add_argument("--format", choices=("dimacs", "aiger"), default="dimacs")
    sp.add_argument("--jsonl", help="append a JSON record to this file ('-' for stdout)")
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("instantiate", help="build instances from a template")
    sp.add_argument("template")
    sp.add_argument("--input", help="bind inputs to these bits")
    sp.add_argument("--output", help="bind outputs to these bits")
    sp.add_argument("--output-file", help="read the output bits from a file")
    sp.add_argument("--collision", action="store_true", help="two-copy collision instance")
    sp.add_argument("--switch", action="append", default=[], metavar="FILE",
                    help="clause file guarded by a fresh switch variable")
    sp.add_argument("--activate", help="'all' or comma list of switch indices to turn on; others are turned off")
    sp.add_argument("--guess", help="guessed variables: numbers or x<i>/y<i> labels")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--exhaustive", action="store_true", help="all 2^|B| assignments (default)")
    g.add_argument("--sample", type=_positive, help="draw this many random assignments")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--out", help="output file (default stdout)")
    sp.add_argument("--out-dir", help="write one numbered file per family member")
    sp.set_defaults(func=cmd_instantiate)

    sp = sub.add_parser("solve", help="solve an instance")
    sp.add_argument("instance")
    solver_opts(sp)
    sp.add_argument("--order", choices=("vsids", "fixed"), default="vsids")
    sp.add_argument("--conflicts", type=_positive)
    sp.add_argument("--propagations", type=_positive)
    sp.add_argument("--timeout", type=float, help="seconds")
    sp.add_argument("--jsonl")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("verify", help="check unit-propagation completeness against the interpreter")
    program_opts(sp)
    sp.add_argument("-k", "--samples", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-q", "--quiet", action="store_true", help="print failing samples only")
    sp.add_argument("--jsonl")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("estimate", help="Monte Carlo guess-and-determine estimate")
    sp.add_argument("template")
    sp.add_argument("--guess", default="", help="guessed variables: numbers or x<i>/y<i> labels")
    sp.add_argument("-N", "--samples", type=int, default=100)
    sp.add_argument("--limit", type=float, default=100000.0, help="per-instance budget in the cost unit")
    sp.add_argument("--unit", choices=("propagations", "seconds"), default="propagations")
    solver_opts(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jsonl")
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("corpus", help="list, print or extract the bundled programs")
    sp.add_argument("action", choices=("list", "show", "extract"))
    sp.add_argument("name", nargs="?", help="program name (show) or directory (extract)")
    sp.set_defaults(func=cmd_corpus)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CompileError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DIAG
    except (Diag, InstanceError, EncodingError, InterpError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAG


if __name__ == "__main__":
    sys.exit(main())
