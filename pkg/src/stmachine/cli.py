"""Command-line front end: instance generation, metered runs, sweeps, XPath,
sorting, joins and protocol extraction.

Exit status: 0 accept or success, 1 reject, 2 budget violation, 3 format
or usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import random
import re
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .algorithms import (
    CHASE_ALPHABET,
    DISJ_ALPHABET,
    FLAT_ALPHABET,
    RELPAIR_ALPHABET,
    Certificate,
    RecordFormatError,
    SorterSpec,
    chase_indices,
    disj_chunked,
    disj_decider,
    disj_trivial,
    encode_flat,
    encode_flat_join,
    join_emptiness,
    join_via_sort,
    keysort_scan,
    load_and_solve,
    parse_flat,
    parse_flat_join,
    random_records,
    verify_chase_certificate,
)
from .instances import (
    BitSet,
    DocumentParseError,
    FunctionTable,
    InstanceFormatError,
    chase_oracle,
    decode_relpair,
    disj_oracle,
    encode_relpair,
    join1_oracle,
    make_chase_string,
    make_disj_string,
    make_sets_tree,
    reduce_disj_to_join,
    sets_tree_oracle,
)
from .meter import (
    Budget,
    BudgetSyntaxError,
    ExtractionError,
    MeterError,
    TapeFormatError,
    check_budget,
    extract_protocol,
    load_tape,
    replay_protocol,
    run,
)
from .treelang import (
    FCNS,
    LCNS,
    WellFormednessError,
    dump_selection_pair,
    run_filter,
    run_selection,
    tokenize,
)
from .treelang.trees import UnrankedTree
from .xpath import (
    CompiledQuery,
    NotCompilableError,
    UnsupportedAxisError,
    XPathSyntaxError,
    eval_reference,
    parse_corexpath,
    query_tags,
)

EXIT_ACCEPT, EXIT_REJECT, EXIT_BUDGET, EXIT_FORMAT = 0, 1, 2, 3

ALGORITHMS = ("disj-trivial", "disj-chunked", "chase", "chase-cert", "keysort", "join", "load-solve")
DECIDERS = {"join-empty": (join_emptiness, RELPAIR_ALPHABET), "disj": (disj_decider, DISJ_ALPHABET), "true": (lambda _: True, None)}

# Sets-tree query: x_i is selected iff i is in X and in Y
SETS_TREE_QUERY = "/descendant::*[child::right/child::right/child::1]/child::left/child::1"


class UsageError(Exception):
    """Bad command-line parameters or unreadable input; exits with 3."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FORMAT, f"{self.prog}: error: {message}\n")


# -- input / output helpers -------------------------------------------------

_TAG = re.compile(r"<[^<>]*>")


def read_tokens(path: str) -> list[str]:
    """Tape tokens of an instance file: tag tokens for documents, characters otherwise."""
    try:
        text = Path(path).read_text().strip()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    if text.startswith("<"):
        tokens = _TAG.findall(text)
        if "".join(tokens) != text:
            raise UsageError(f"{path}: text outside tag tokens")
        return tokens
    return list(text)


def write_text(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def write_json(path: Optional[str], record: dict) -> None:
    if path:
        write_text(path, json.dumps(record, sort_keys=True, indent=2) + "\n")


def need_rng(args) -> random.Random:
    if args.seed is None:
        raise UsageError("random instances need --seed")
    return random.Random(args.seed)


def parse_members(text: str, n: int) -> BitSet:
    text = text.strip()
    members = [int(t) for t in text.split(",") if t.strip()] if text else []
    try:
        return BitSet.of(n, members)
    except InstanceFormatError as exc:
        raise UsageError(str(exc)) from None


def parse_relation(text: str) -> list[tuple[int, int]]:
    """``1:2,3:4`` as a relation of number pairs."""
    out = []
    for item in filter(None, (t.strip() for t in text.split(","))):
        a, sep, b = item.partition(":")
        if not sep or not a.isdigit() or not b.isdigit():
            raise UsageError(f"bad tuple {item!r}, expected i:j")
        out.append((int(a), int(b)))
    return out


def finish(args, report, verdict_code: int) -> int:
    """Write the report, apply the budget and pick the exit status."""
    write_json(args.report, report.to_dict())
    if args.budget:
        check = check_budget(report, parse_budget(args.budget))
        if not check:
            print(f"budget violated: {', '.join(check.violated)}", file=sys.stderr)
            return EXIT_BUDGET
    return verdict_code


def parse_budget(text: str) -> Budget:
    try:
        return Budget.parse(text)
    except BudgetSyntaxError as exc:
        raise UsageError(str(exc)) from None


def ceil_sqrt(n: int) -> int:
    return math.isqrt(n - 1) + 1 if n > 1 else 1


def verdict_code(report) -> int:
    return EXIT_REJECT if report.halted == "reject" else EXIT_ACCEPT


def print_output(items) -> None:
    for item in items:
        print("\t".join(map(str, item)) if isinstance(item, tuple) else item)


# -- gen ------------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.family == "disj":
        tokens, meta = gen_disj(args)
    elif args.family == "chase":
        tokens, meta = gen_chase(args)
    elif args.family == "relpair":
        tokens, meta = gen_relpair(args)
    else:
        tokens, meta = gen_sets_tree(args)
    meta = {"family": args.family, "n": len(tokens), **meta}
    write_text(args.out, "".join(tokens) + "\n")
    if args.out and args.out != "-":
        sidecar = Path(args.out).with_suffix(".meta.json")
        write_json(str(sidecar), meta)
    else:
        print(json.dumps(meta, sort_keys=True), file=sys.stderr)
    return EXIT_ACCEPT


def _bits(args, name: str, n: Optional[int], rng_holder: list) -> str:
    value = getattr(args, name)
    if value is None:
        if n is None:
            raise UsageError(f"need --n or --{name}")
        if not rng_holder:
            rng_holder.append(need_rng(args))
        return "".join(rng_holder[0].choice("01") for _ in range(n))
    if set(value) - {"0", "1"} or (n is not None and len(value) != n):
        raise UsageError(f"--{name} must be a bitstring of length {n}")
    return value


def gen_disj(args):
    holder: list = []
    x = _bits(args, "x", args.n, holder)
    y = _bits(args, "y", len(x), holder)
    try:
        tokens = make_disj_string(x, y)
    except InstanceFormatError as exc:
        raise UsageError(str(exc)) from None
    return tokens, {"split": len(x) + 1, "size": len(x), "x": x, "y": y, "verdict": disj_oracle(x, y)}


def gen_chase(args):
    if args.m is None:
        raise UsageError("chase needs --m")
    m = args.m
    if args.table:
        words = [w.strip() for w in args.table.split(",")]
    else:
        rng = need_rng(args)
        words = [format(rng.randrange(2 ** m), f"0{m}b") if m else "" for _ in range(2 ** m)]
    try:
        table = FunctionTable(m, tuple(words))
    except InstanceFormatError as exc:
        raise UsageError(str(exc)) from None
    tokens = make_chase_string(m, table)
    verdicts = {str(k): chase_oracle(k, tokens) for k in (1, 2, 3)}
    return tokens, {"split": m + 1, "m": m, "table": list(words), "verdict": verdicts}


def gen_relpair(args):
    if args.a is not None or args.b is not None:
        a, b = parse_relation(args.a or ""), parse_relation(args.b or "")
    else:
        holder: list = []
        x = _bits(args, "x", args.n, holder)
        y = _bits(args, "y", len(x), holder)
        a, b = reduce_disj_to_join(BitSet.from_bits(x), BitSet.from_bits(y))
    tokens = encode_relpair(a, b)
    split = tokens.index("<rel2>")
    empty = not join1_oracle(a, b)
    return tokens, {"split": split, "a": sorted(map(list, set(a))), "b": sorted(map(list, set(b))), "verdict": empty}


def gen_sets_tree(args):
    if args.n is None or args.n < 1:
        raise UsageError("sets-tree needs --n >= 1")
    n = args.n
    if args.x is None or args.y is None:
        rng = need_rng(args)
    x = parse_members(args.x, n) if args.x is not None else BitSet.of(n, [i for i in range(1, n + 1) if rng.random() < 0.5])
    y = parse_members(args.y, n) if args.y is not None else BitSet.of(n, [i for i in range(1, n + 1) if rng.random() < 0.5])
    inst = make_sets_tree(n, x, y)
    selected = sorted(sets_tree_oracle(inst))
    return list(inst.document), {
        "split": inst.split,
        "size": n,
        "x": sorted(x.members),
        "y": sorted(y.members),
        "selected": selected,
        "verdict": bool(selected),
    }


# -- run ------------------------------------------------------------------

def build_program(algo: str, param: Optional[str], cert: Optional[str], n_hint: int):
    """Program and tape alphabet for ``--algo``."""
    def int_param(default: Optional[int] = None) -> int:
        if param is None:
            if default is None:
                raise UsageError(f"{algo} needs --param")
            return default
        try:
            value = int(param)
        except ValueError:
            raise UsageError(f"--param must be an integer, got {param!r}") from None
        if value < 1:
            raise UsageError("--param must be at least 1")
        return value

    if algo == "disj-trivial":
        return disj_trivial(), DISJ_ALPHABET
    if algo == "disj-chunked":
        return disj_chunked(int_param(ceil_sqrt((n_hint - 1) // 2))), DISJ_ALPHABET
    if algo == "chase":
        return chase_indices(int_param(1)), CHASE_ALPHABET
    if algo == "chase-cert":
        k = int_param(1)
        if not cert:
            raise UsageError("chase-cert needs --cert j1,...,jk+1")
        try:
            indices = tuple(int(t) for t in cert.split(","))
        except ValueError:
            raise UsageError(f"bad certificate {cert!r}") from None
        if len(indices) != k + 1 or min(indices) < 0:
            raise UsageError(f"certificate needs {k + 1} natural numbers")
        return verify_chase_certificate(k, Certificate(indices)), CHASE_ALPHABET
    if algo == "keysort":
        return keysort_scan(int_param(1)), FLAT_ALPHABET
    if algo == "join":
        return join_via_sort(SorterSpec(int_param(1))), FLAT_ALPHABET
    if algo == "load-solve":
        name = param or "join-empty"
        if name not in DECIDERS:
            raise UsageError(f"load-solve deciders: {', '.join(DECIDERS)}")
        decider, alphabet = DECIDERS[name]
        return load_and_solve(decider, alphabet or RELPAIR_ALPHABET + DISJ_ALPHABET), alphabet
    raise UsageError(f"unknown algorithm {algo!r}")


def metered_run(program, tokens, alphabet):
    try:
        tape = load_tape(tokens, alphabet=alphabet)
    except TapeFormatError as exc:
        raise UsageError(str(exc)) from None
    return run(program, tape)


def cmd_run(args) -> int:
    tokens = read_tokens(args.input)
    if args.algo == "join" and tokens and tokens[0].startswith("<"):
        tokens = relpair_to_flat(tokens)
    program, alphabet = build_program(args.algo, args.param, args.cert, len(tokens))
    output, report = metered_run(program, tokens, alphabet)
    print_output(output)
    return finish(args, report, verdict_code(report))


def relpair_to_flat(tokens: Sequence[str]) -> list[str]:
    """Convert a relation-pair document to flat ``A#B`` records (binary fields)."""
    try:
        a, b = decode_relpair(tokens)
    except DocumentParseError as exc:
        raise UsageError(f"not a relation-pair document: {exc}") from None
    as_text = lambda rel: [(format(i, "b"), format(j, "b")) for i, j in rel]  # noqa: E731
    return encode_flat_join(as_text(a), as_text(b))


# -- sort / join ----------------------------------------------------------

def cmd_sort(args) -> int:
    tokens = read_tokens(args.input)
    try:
        parse_flat(tokens)
    except RecordFormatError as exc:
        raise UsageError(str(exc)) from None
    output, report = metered_run(keysort_scan(args.b), tokens, FLAT_ALPHABET)
    for key, value in output:
        print(f"{key}:{value}")
    return finish(args, report, verdict_code(report))


def cmd_join(args) -> int:
    tokens = read_tokens(args.input)
    if tokens and tokens[0].startswith("<"):
        tokens = relpair_to_flat(tokens)
    try:
        parse_flat_join(tokens)
    except RecordFormatError as exc:
        raise UsageError(str(exc)) from None
    output, report = metered_run(join_via_sort(SorterSpec(args.b)), tokens, FLAT_ALPHABET)
    print_output(output)
    return finish(args, report, verdict_code(report))


# -- xpath ----------------------------------------------------------------

def cmd_xpath(args) -> int:
    try:
        ast = parse_corexpath(args.query)
    except (XPathSyntaxError, UnsupportedAxisError) as exc:
        raise UsageError(f"query: {exc}") from None
    tokens = read_tokens(args.doc)
    try:
        events = tokenize(tokens)
    except WellFormednessError as exc:
        raise UsageError(f"document: {exc}") from None
    tree = UnrankedTree.from_events(events)
    if args.mode == "eval":
        result = sorted(eval_reference(ast, tree))
        print_output(result)
        return EXIT_ACCEPT if result else EXIT_REJECT
    try:
        compiled = CompiledQuery(ast)
    except NotCompilableError as exc:
        raise UsageError(str(exc)) from None
    tags = query_tags(ast, tree.labels())
    if args.mode == "compile":
        write_text(args.out, dump_selection_pair(compiled.selection_pair(args.encoding)))
        return EXIT_ACCEPT
    if args.mode == "filter-stream":
        nonempty, report = run_filter(compiled.automaton(LCNS), events, tags)
        print("nonempty" if nonempty else "empty")
        return finish(args, report, EXIT_ACCEPT if nonempty else EXIT_REJECT)
    encoding = FCNS if args.mode == "select-asc" else LCNS
    selected, report = run_selection(compiled.selection_pair(encoding), events, tags)
    print_output(selected)
    return finish(args, report, EXIT_ACCEPT if report.halted != "reject" else EXIT_REJECT)


# -- protocol -------------------------------------------------------------

def cmd_protocol(args) -> int:
    tokens = read_tokens(args.input)
    program, alphabet = build_program(args.algo, args.param, None, len(tokens))
    try:
        tape = load_tape(tokens, alphabet=alphabet)
    except TapeFormatError as exc:
        raise UsageError(str(exc)) from None
    boundary = args.boundary
    if boundary is None:
        if "#" not in tokens:
            raise UsageError("no '#' in the input; give --boundary")
        boundary = tokens.index("#") + 1
    if not 1 <= boundary <= len(tokens):
        raise UsageError(f"--boundary must lie in 1..{len(tokens)}")
    try:
        transcript = extract_protocol(program, tape, boundary)
    except ExtractionError as exc:
        raise UsageError(str(exc)) from None
    replayed = replay_protocol(program, tokens[:boundary], tokens[boundary:], transcript)
    record = transcript.to_dict()
    record["replay_ok"] = replayed
    write_json(args.report, record)
    print(f"messages={len(transcript.messages)} total_bits={transcript.total_bits} "
          f"r_used={transcript.r_used} replay={'ok' if replayed else 'mismatch'}")
    if not replayed:
        return EXIT_REJECT
    return EXIT_REJECT if transcript.halted == "reject" else EXIT_ACCEPT


# -- sweep ----------------------------------------------------------------

SWEEP_FIELDS = ("index", "n", "size", "param", "reversals", "r_used", "s_peak", "rs", "depth", "verdict")


def _int_list(text: str, flag: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{flag} takes a comma-separated list of integers") from None
    if not values:
        raise UsageError(f"{flag} is empty")
    return values


def sweep_rows(args):
    rng = need_rng(args)
    sizes = _int_list(args.sizes, "--sizes")
    params = _int_list(args.param, "--param") if args.param else [None]
    index = 0
    for size in sizes:
        for param in params:
            for _ in range(args.count):
                row = sweep_one(args.algo, size, param, rng)
                index += 1
                yield {"index": index, "size": size, **row}


def sweep_one(algo: str, size: int, param: Optional[int], rng: random.Random) -> dict:
    depth = ""
    if algo in ("disj-chunked", "disj-trivial"):
        x = "".join(rng.choice("01") for _ in range(size))
        y = "".join(rng.choice("01") for _ in range(size))
        if rng.random() < 0.5:
            # uniform pairs almost never are disjoint; force half of them to be
            y = "".join("0" if xi == "1" else yi for xi, yi in zip(x, y))
        c = param or ceil_sqrt(size)
        program = disj_chunked(c) if algo == "disj-chunked" else disj_trivial()
        _, report = run(program, load_tape(make_disj_string(x, y)))
        param = c if algo == "disj-chunked" else ""
    elif algo == "chase":
        k = param or 1
        table = FunctionTable.from_ints(size, [rng.randrange(2 ** size) for _ in range(2 ** size)])
        _, report = run(chase_indices(k), load_tape(make_chase_string(size, table)))
        param = k
    elif algo == "keysort":
        b = param or 1
        records = random_records(rng, size, max(2, size))
        _, report = run(keysort_scan(b), load_tape(encode_flat(records)))
        param = b
    elif algo == "filter":
        x = BitSet.of(size, [i for i in range(1, size + 1) if rng.random() < 0.5])
        y = BitSet.of(size, [i for i in range(1, size + 1) if rng.random() < 0.5])
        inst = make_sets_tree(size, x, y)
        compiled = _sets_tree_compiled()
        _, report = run_filter(compiled.automaton(LCNS), list(inst.document), ["root", "left", "right", "0", "1"])
        depth = UnrankedTree.parse(list(inst.document)).depth()
        param = ""
    else:
        raise UsageError(f"sweep does not support {algo!r}")
    return {
        "n": report.n,
        "param": param,
        "reversals": report.reversals,
        "r_used": report.r_used,
        "s_peak": report.s_peak,
        "rs": report.r_used * report.s_peak,
        "depth": depth,
        "verdict": report.halted,
    }


_COMPILED: dict = {}


def _sets_tree_compiled() -> CompiledQuery:
    if "q" not in _COMPILED:
        _COMPILED["q"] = CompiledQuery(SETS_TREE_QUERY)
    return _COMPILED["q"]


def cmd_sweep(args) -> int:
    if args.count < 1:
        raise UsageError("--count must be positive")
    out = open(args.out, "w", newline="") if args.out and args.out != "-" else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=SWEEP_FIELDS, lineterminator="\n")
        writer.writeheader()
        budget = parse_budget(args.budget) if args.budget else None
        violated = False
        for row in sweep_rows(args):
            writer.writerow(row)
            if budget is not None:
                r_ok = row["r_used"] <= budget.r(row["n"])
                s_ok = row["s_peak"] <= budget.s(row["n"])
                violated = violated or not (r_ok and s_ok)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_BUDGET if violated else EXIT_ACCEPT


# -- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="seed for every random choice")
    common.add_argument("--report", help="write the resource report (JSON) here")
    common.add_argument("--budget", help="budget such as 'r=1,s=n+8'; violation exits with 2")

    parser = _Parser(prog="stmachine", description="Metered streaming machines and their experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", parents=[common], help="generate an instance file and its .meta.json sidecar")
    gen.add_argument("family", choices=("disj", "chase", "relpair", "sets-tree"))
    gen.add_argument("--n", type=int, help="set size / bitstring length")
    gen.add_argument("--x", help="bitstring (disj, relpair) or members like 1,3 (sets-tree)")
    gen.add_argument("--y", help="bitstring (disj, relpair) or members like 2 (sets-tree)")
    gen.add_argument("--m", type=int, help="word width for chase")
    gen.add_argument("--table", help="chase words, comma separated")
    gen.add_argument("--a", help="relation A as i:j,i:j")
    gen.add_argument("--b", help="relation B as i:j,i:j")
    gen.add_argument("--out", help="instance file (default: stdout)")
    gen.set_defaults(func=cmd_gen)

    run_p = sub.add_parser("run", parents=[common], help="run an algorithm on an instance file")
    run_p.add_argument("--algo", required=True, choices=ALGORITHMS)
    run_p.add_argument("--param", help="c, k or b depending on the algorithm; decider name for load-solve")
    run_p.add_argument("--cert", help="certificate indices for chase-cert")
    run_p.add_argument("--input", required=True)
    run_p.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", parents=[common], help="CSV of resource usage over random instances")
    sweep.add_argument("--algo", required=True, choices=("disj-chunked", "disj-trivial", "chase", "keysort", "filter"))
    sweep.add_argument("--sizes", required=True, help="comma-separated sizes (n, m, N or tree parameter)")
    sweep.add_argument("--param", help="comma-separated parameter values (c, k or b)")
    sweep.add_argument("--count", type=int, default=1, help="instances per size and parameter")
    sweep.add_argument("--out", help="CSV file (default: stdout)")
    sweep.set_defaults(func=cmd_sweep)

    xp = sub.add_parser("xpath", parents=[common], help="evaluate, stream or compile a Core XPath query")
    xp.add_argument("--query", required=True)
    xp.add_argument("--doc", required=True)
    xp.add_argument("--mode", default="eval", choices=("eval", "filter-stream", "select-asc", "select-desc", "compile"))
    xp.add_argument("--encoding", default=FCNS, choices=(FCNS, LCNS), help="encoding for --mode compile")
    xp.add_argument("--out", help="automaton file for --mode compile (default: stdout)")
    xp.set_defaults(func=cmd_xpath)

    srt = sub.add_parser("sort", parents=[common], help="KEYSORT a flat record file without writing the tape")
    srt.add_argument("--input", required=True)
    srt.add_argument("--b", type=int, default=1, help="records held per pass")
    srt.set_defaults(func=cmd_sort)

    jn = sub.add_parser("join", parents=[common], help="natural join of A#B records (or a relation-pair document)")
    jn.add_argument("--input", required=True)
    jn.add_argument("--b", type=int, default=1, help="records held per pass")
    jn.set_defaults(func=cmd_join)

    pr = sub.add_parser("protocol", parents=[common], help="extract and replay the two-party protocol of a run")
    pr.add_argument("--algo", required=True, choices=("disj-trivial", "disj-chunked", "chase"))
    pr.add_argument("--param")
    pr.add_argument("--input", required=True)
    pr.add_argument("--boundary", type=int, help="last cell of the first party (default: the '#')")
    pr.set_defaults(func=cmd_protocol)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command in ("sort", "join") and args.b < 1:
            parser.error("--b must be at least 1")
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_FORMAT
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"stmachine: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except MeterError as exc:
        print(f"stmachine: {exc}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
