"""Command-line front end.

Every report carries ``schema``, ``version``, ``seed`` and the parsed config so
that a run can be repeated byte for byte. Exit codes: 0 success, 2 usage
error, 3 guard violation, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from . import __version__
from .codec import BitString, build_list, codeword_from_json, decode_codeword, encode, pad_left, to_json
from .errors import GuardError
from .grover import (
    MAX_STANDARD_BITS,
    StandardSearchProblem,
    search_report,
    single_shot_search,
    standard_grover_search,
    standard_optimal_iterations,
    standard_success_law,
)
from .sampler import RandomSource, TrialRecord, derive_seed, expected_runs, reconstruct, collect_until_complete, run_trials
from .treesearch import OrderedTree, classical_find, quantum_find, random_tree

SCHEMA = 1
SEED_ENV = "NONORTHO_SEED"

EXIT_OK, EXIT_USAGE, EXIT_GUARD, EXIT_IO = 0, 2, 3, 4

COUPON_COLUMNS = ("n", "trials", "seed", "mean_runs", "var_runs", "expected_runs", "completed", "conflicts")
TREE_COLUMNS = ("depth", "classical_examined", "quantum_queries", "measurement_runs", "seed")
STANDARD_COLUMNS = ("num_bits", "N", "M", "k", "success_probability", "closed_form")
SPACE_COLUMNS = ("n", "strings", "qubits_standard", "qubits_nonorthogonal", "dimension")


class UsageError(ValueError):
    pass


def report_space(n: int) -> dict:
    """Resources needed to hold all 2**(2n) strings under each encoding."""
    if n < 1:
        raise ValueError("n must be positive")
    return {
        "strings": 4 ** n,
        "qubits_standard": 2 * n,
        # ceil(log2 n) subspace qubits plus two for the bit pair
        "qubits_nonorthogonal": (n - 1).bit_length() + 2,
        "dimension": 4 * n,
    }


@dataclass
class Report:
    payload: dict | None = None
    columns: Sequence[str] = ()
    rows: list[tuple] | None = None


def _parse_bits(text: str | None) -> tuple[BitString, bool]:
    if text is None:
        raise UsageError("--bits is required")
    text = text.strip()
    if not text or any(c not in "01" for c in text):
        raise UsageError(f"invalid bit string {text!r}")
    if len(text) % 2:
        return pad_left(text), True
    return BitString.parse(text), False


def _header(args: argparse.Namespace) -> dict:
    return {"schema": SCHEMA, "version": __version__, "command": args.command, "seed": args.seed, "config": _config(args)}


def _config(args: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}


def cmd_encode(args) -> Report:
    bits, padded = _parse_bits(args.bits)
    cw = encode(bits)
    return Report({**_header(args), "bits": str(bits), "padded": padded, "codeword": to_json(cw), "space": report_space(cw.n)})


def cmd_decode(args) -> Report:
    if args.state is None:
        raise UsageError("--state is required")
    try:
        if args.state == "-":
            obj = json.load(sys.stdin)
        else:
            with open(args.state) as fh:
                obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON state: {exc}") from None
    if "codeword" in obj:
        obj = obj["codeword"]
    elif "state" in obj:
        obj = obj["state"]
    cw = codeword_from_json(obj)
    return Report({**_header(args), "n": cw.n, "bits": str(decode_codeword(cw))})


def cmd_search(args) -> Report:
    bits, padded = _parse_bits(args.bits)
    s = encode(bits)
    out = single_shot_search(s.n, s, args.oracle)
    return Report({**_header(args), **search_report(s, out, args.oracle), "padded": padded, "state": to_json(out)})


def cmd_sample(args) -> Report:
    bits, _ = _parse_bits(args.bits)
    s = encode(bits)
    out = single_shot_search(s.n, s, args.oracle)
    trials = []
    for i in range(args.trials):
        seed = derive_seed(args.seed, i)
        d = collect_until_complete(out, s.n, RandomSource(seed), args.max_runs)
        decoded = str(reconstruct(d)) if d.complete and not d.conflict else None
        trials.append((TrialRecord(s.n, seed, d.runs, d.complete, d.conflict), decoded))
    if args.format == "csv":
        return Report(columns=TrialRecord.CSV_HEADER, rows=[t.csv_row() for t, _ in trials])
    return Report({
        **_header(args),
        "target": str(bits),
        "trials": [
            {"seed": t.seed, "runs": t.runs, "completed": t.completed, "conflict": t.conflict, "decoded": dec}
            for t, dec in trials
        ],
    })


def _random_instance(depth: int, child_prob: float, seed: int):
    tree = random_tree(depth, child_prob, seed)
    target = random.Random(seed ^ 0x5DEECE66D).choice(sorted(tree.nodes_at_depth(depth)))
    return tree, target


def cmd_tree(args) -> Report:
    if args.tree is not None:
        try:
            with open(args.tree) as fh:
                tree = OrderedTree.from_json(json.load(fh))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise UsageError(f"malformed tree file: {exc}") from None
        if args.target is None:
            raise UsageError("--target is required with --tree")
        target = _coerce_node(tree, args.target)
    else:
        if args.n is None:
            raise UsageError("give --tree PATH --target ID, or --n DEPTH for a random tree")
        tree, target = _random_instance(_single_n(args), args.child_prob, args.seed)
    depth = tree.node_depth(target)
    path, examined = classical_find(tree, target, depth)
    q = quantum_find(tree, target, depth, RandomSource(args.seed), args.max_runs)
    return Report({
        **_header(args),
        "target": target,
        "depth": depth,
        "path": [list(l) for l in q.path],
        "classical_path": [list(l) for l in path],
        "classical_examined": examined,
        "quantum_queries": q.oracle_queries,
        "measurement_runs": q.measurement_runs,
    })


def _coerce_node(tree: OrderedTree, raw: str):
    if raw in tree.nodes:
        return raw
    try:
        as_int = int(raw)
    except ValueError:
        as_int = None
    if as_int is not None and as_int in tree.nodes:
        return as_int
    raise UsageError(f"target {raw!r} is not a node of the tree")


def _single_n(args) -> int:
    if len(args.n) != 1:
        raise UsageError("this command takes a single --n")
    return args.n[0]


def _coupon_chunk(task: tuple[int, int, int, int, int | None]) -> list[tuple[int, bool, bool]]:
    n, master, start, count, max_runs = task
    v = single_shot_search(n, encode("0" * (2 * n)), "reflection")
    return [(r.runs, r.completed, r.conflict) for r in run_trials(v, count, master, max_runs, start)]


def _coupon_row(n: int, args) -> tuple:
    # decoding statistics do not depend on which codeword is measured
    chunk = max(1, math.ceil(args.trials / max(1, args.workers)))
    tasks = [(n, args.seed, s, min(chunk, args.trials - s), args.max_runs) for s in range(0, args.trials, chunk)]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as ex:
            results = [r for part in ex.map(_coupon_chunk, tasks) for r in part]
    else:
        results = [r for t in tasks for r in _coupon_chunk(t)]
    runs = [r for r, _, _ in results]
    mean = math.fsum(runs) / len(runs)
    var = math.fsum((r - mean) ** 2 for r in runs) / (len(runs) - 1) if len(runs) > 1 else 0.0
    completed = sum(c for _, c, _ in results)
    conflicts = sum(c for _, _, c in results)
    return (n, args.trials, args.seed, round(mean, 6), round(var, 6), round(expected_runs(n), 6), completed, conflicts)


def cmd_bench(args) -> Report:
    ns = args.n or [8]
    if args.mode == "coupon":
        if args.trials < 1:
            raise UsageError("--trials must be positive")
        return Report(columns=COUPON_COLUMNS, rows=[_coupon_row(n, args) for n in ns])
    if args.mode == "tree":
        rows = []
        for depth in ns:
            for i in range(args.trials):
                seed = derive_seed(args.seed, i)
                tree, target = _random_instance(depth, args.child_prob, seed)
                _, examined = classical_find(tree, target, depth)
                q = quantum_find(tree, target, depth, RandomSource(seed), args.max_runs)
                rows.append((depth, examined, q.oracle_queries, q.measurement_runs, seed))
        return Report(columns=TREE_COLUMNS, rows=rows)
    if args.mode == "standard":
        rows = []
        for n in ns:
            if 2 * n > MAX_STANDARD_BITS:
                raise GuardError(f"standard baseline limited to {MAX_STANDARD_BITS} bits, got {2 * n}")
            N, M = 4 ** n, args.targets
            if not 1 <= M <= N:
                raise UsageError(f"--targets must lie in [1, {N}]")
            problem = StandardSearchProblem(2 * n, frozenset(range(M)))
            for k in range(standard_optimal_iterations(N, M) + 1):
                res = standard_grover_search(problem, k)
                rows.append((2 * n, N, M, k, round(res.success_probability, 12), round(standard_success_law(N, M, k), 12)))
        return Report(columns=STANDARD_COLUMNS, rows=rows)
    if args.mode == "space":
        return Report(columns=SPACE_COLUMNS, rows=[(n, *report_space(n).values()) for n in ns])
    raise UsageError(f"unknown bench mode {args.mode!r}")


def _render(report: Report, args) -> str:
    if report.rows is not None:
        if args.format == "json":
            payload = {**_header(args), "columns": list(report.columns), "rows": [list(r) for r in report.rows]}
            return json.dumps(payload, indent=2) + "\n"
        buf = io.StringIO()
        buf.write(f"# nonortho {__version__} schema={SCHEMA} seed={args.seed} config={json.dumps(_config(args))}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(report.columns)
        w.writerows(report.rows)
        return buf.getvalue()
    return json.dumps(report.payload, indent=2) + "\n"


def _seed_default() -> int:
    raw = os.environ.get(SEED_ENV)
    return _seed(raw) if raw else 0


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=None, help=f"64-bit seed (default ${SEED_ENV} or 0)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--bits", help="bit string, e.g. 0110; odd lengths are left-padded with 0")
    common.add_argument("--n", type=_positive, nargs="+", help="half string length (tree: depth)")
    common.add_argument("--trials", type=_positive, default=1)
    common.add_argument("--oracle", choices=("reflection", "diagonal"), default="reflection")
    common.add_argument("--max-runs", type=_positive, default=None, dest="max_runs")

    parser = argparse.ArgumentParser(prog="nonortho", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("encode", parents=[common], help="encode a bit string").set_defaults(func=cmd_encode)
    p = sub.add_parser("decode", parents=[common], help="decode a codeword JSON file")
    p.add_argument("--state", metavar="PATH", help="codeword JSON file, or - for stdin")
    p.set_defaults(func=cmd_decode)
    sub.add_parser("search", parents=[common], help="single-shot search for --bits").set_defaults(func=cmd_search)
    sub.add_parser("sample", parents=[common], help="search then decode by measurement").set_defaults(func=cmd_sample)
    p = sub.add_parser("tree", parents=[common], help="path search in an ordered tree")
    p.add_argument("--tree", metavar="PATH", help="tree JSON file")
    p.add_argument("--target", help="target node id (with --tree)")
    p.add_argument("--child-prob", type=float, default=0.5, dest="child_prob")
    p.set_defaults(func=cmd_tree)
    p = sub.add_parser("bench", parents=[common], help="benchmark sweeps")
    p.add_argument("--mode", choices=("coupon", "tree", "standard", "space"), default="coupon")
    p.add_argument("--targets", type=_positive, default=1, help="marked items for the standard baseline")
    p.add_argument("--child-prob", type=float, default=0.5, dest="child_prob")
    p.add_argument("--workers", type=_positive, default=1)
    p.set_defaults(func=cmd_bench)
    return parser


def _fail(code: int, exc: BaseException) -> int:
    err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    sys.stderr.write(json.dumps(err) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is None:
        try:
            args.seed = _seed_default()
        except argparse.ArgumentTypeError as exc:
            parser.error(str(exc))
    if args.format is None:
        args.format = "csv" if args.command == "bench" else "json"
    func = args.func
    try:
        text = _render(func(args), args)
    except GuardError as exc:
        return _fail(EXIT_GUARD, exc)
    except OSError as exc:
        return _fail(EXIT_IO, exc)
    except ValueError as exc:
        return _fail(EXIT_USAGE, exc)
    try:
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        return _fail(EXIT_IO, exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
