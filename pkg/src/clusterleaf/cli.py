"""Command-line entry point: mutation playground, verification pipelines, graph export.

Exit codes: 0 success, 1 verification failure or invalid mutation, 2 usage,
parse or fixture error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence

from .groupoid import FIXTURES
from .quiver import Quiver, QuiverError, QuiverParseError, UnknownVertex, load_quiver, mutate_quiver
from .report import VerificationReport

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _load(path: str) -> Quiver:
    try:
        return load_quiver(path)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except QuiverParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def resolve_vertex(q: Quiver, name: str) -> str:
    """A vertex label, or a 1-based index when no label matches."""
    if name in q.labels:
        return name
    if name.isdigit() and 1 <= int(name) <= len(q):
        return q.labels[int(name) - 1]
    raise UnknownVertex(f"unknown vertex {name!r}")


# -- mutate -------------------------------------------------------------------------------


def cmd_mutate(args, out=sys.stdout, err=sys.stderr) -> int:
    q = _load(args.file)
    done = []
    try:
        for k in args.k:
            v = resolve_vertex(q, k)
            q = mutate_quiver(q, v)
            done.append(v)
    except QuiverError as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=err)
        return EXIT_FAIL
    text = q.to_text()
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)
    print(f"mutated at {' '.join(done) or '(nothing)'}: {len(q)} vertices, {len(q.arrows())} arrows", file=err)
    return EXIT_OK


# -- export -------------------------------------------------------------------------------


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _weight_label(w: Fraction) -> str:
    return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"


def to_dot(q: Quiver, name: str = "quiver") -> str:
    """Graphviz text: one node per vertex (frozen ones boxed), arrows labelled by multiplicity."""
    lines = [f"digraph {_dot_id(name)} {{"]
    for l, f in zip(q.labels, q.frozen):
        shape = "box" if f else "circle"
        lines.append(f"  {_dot_id(l)} [shape={shape}];")
    for s, t, w in q.arrows():
        lines.append(f"  {_dot_id(s)} -> {_dot_id(t)} [label={_dot_id(_weight_label(w))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_export(args, out=sys.stdout, err=sys.stderr) -> int:
    q = _load(args.file)
    out.write(to_dot(q, Path(args.file).stem))
    return EXIT_OK


# -- verify -------------------------------------------------------------------------------


def _targets() -> Dict[str, Callable[[argparse.Namespace], VerificationReport]]:
    from . import reduction, suites

    fx = lambda a: a.fixtures
    return {
        "n5": lambda a: reduction.reduce_n5(fx(a)),
        "n6-case1": lambda a: reduction.reduce_n6_case1(fx(a)),
        "n6-permute": lambda a: reduction.verify_n6_permute(fx(a), seed=a.seed, trials=a.trials or 3),
        "skein": lambda a: suites.verify_skein_suite(a.n or 5),
        "markov": lambda a: suites.verify_markov((a.n,) if a.n else (3, 5)),
        "rank": lambda a: suites.verify_rank((a.n,) if a.n else (5, 6), trials=a.trials or 20, seed=a.seed),
        "pfaffian": lambda a: suites.verify_pfaffian(trials=a.trials or 10, seed=a.seed),
        "chi": lambda a: suites.verify_chi((a.n,) if a.n else (3, 4, 5, 6)),
        "weyl": lambda a: reduction.weyl_relations(),
    }


VERIFY_TARGETS = ["n5", "n6-case1", "n6-permute", "skein", "markov", "rank", "pfaffian", "chi", "weyl"]


def cmd_verify(args, out=sys.stdout, err=sys.stderr) -> int:
    from .reduction import FixtureMissing

    if args.fixtures and not Path(args.fixtures).is_dir():
        print(f"error: fixture directory {args.fixtures} not found", file=err)
        return EXIT_USAGE
    try:
        rep = _targets()[args.target](args)
    except (FixtureMissing, FileNotFoundError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    text = rep.to_kv() if args.format == "kv" else rep.to_text()
    out.write(text + "\n")
    if args.report:
        Path(args.report).write_text(text + "\n")
    return EXIT_OK if rep.passed else EXIT_FAIL


# -- parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fixtures", help=f"fixture directory (default {FIXTURES})")
    common.add_argument("--seed", type=int, default=0, help="seed for random points")
    common.add_argument("--trials", type=int, help="number of random points")
    common.add_argument("--report", help="also write the report to this path")
    common.add_argument("--format", choices=["text", "kv"], default="text", help="report format")

    p = argparse.ArgumentParser(prog="clusterleaf",
                                description="Quiver mutation, verification pipelines and graph export.")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mutate", parents=[common], help="mutate a quiver file")
    m.add_argument("file")
    m.add_argument("-k", action="append", default=[], metavar="VERTEX",
                   help="vertex to mutate at (label or 1-based index); repeatable")
    m.add_argument("-o", "--output", help="write the result here instead of standard output")
    m.set_defaults(func=cmd_mutate)

    v = sub.add_parser("verify", parents=[common], help="run a verification pipeline")
    v.add_argument("target", choices=VERIFY_TARGETS)
    v.add_argument("--n", type=int, help="size parameter for skein, markov, rank and chi")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("export", parents=[common], help="print a quiver as Graphviz text")
    e.add_argument("file")
    e.set_defaults(func=cmd_export)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args, out, err)
    except UsageError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
