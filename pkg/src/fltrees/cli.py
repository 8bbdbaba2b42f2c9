"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 parse or validation error, 3 trees not
isomorphic, 4 verification failure or oracle disagreement.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import tools
from .approx import APPROX_FACTOR, approximate_rearrangement, approximate_tree_distance
from .forest import (
    EditScript,
    ForestError,
    Permute,
    apply_script,
    format_forest,
    format_script,
    parse_script,
    read_forest,
    similar,
    write_forest,
)
from .isomorphism import NotIsomorphic
from .matching import GraphError, parse_graph, unweighted
from .permdist import permutation_distance, recover_permutation

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NOT_ISO, EXIT_VERIFY = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fltrees", description="Distances between fully-labelled rooted trees and forests.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def pair(name, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("first")
        s.add_argument("second")
        s.add_argument("--script", action="store_true", help="print the witness")
        s.add_argument("--script-out", metavar="PATH", help="write the witness script to PATH")
        s.add_argument("--oracle", action="store_true", help="cross-check against brute force (small inputs)")
        s.add_argument("--json", action="store_true")
        return s

    pair("perm", "exact permutation distance of two isomorphic trees")
    s = pair("rearrange", "approximate cut/permutation distance of two forests")
    s.add_argument("--trace", action="store_true", help="print per-step costs")
    s = pair("tree-rearrange", "approximate link-and-cut/permutation distance of two trees")
    s.add_argument("--trace", action="store_true", help="print per-step costs")

    s = sub.add_parser("gen", help="random tree")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--relabel", type=int, metavar="K", help="apply a random permutation moving up to K labels")
    s.add_argument("--out", help="output path (default stdout)")

    s = sub.add_parser("reduce", help="bipartite graph to a pair of trees")
    s.add_argument("graph")
    s.add_argument("--out-prefix", required=True)
    s.add_argument("--json", action="store_true")

    s = sub.add_parser("oracle", help="brute-force distance")
    s.add_argument("kind", choices=["perm", "rearrange"])
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--json", action="store_true")

    s = sub.add_parser("verify", help="check that a script takes F to a forest similar to F2")
    s.add_argument("forest")
    s.add_argument("script")
    s.add_argument("target")
    s.add_argument("--json", action="store_true")
    return p


def _emit(args, distance: Optional[int], size: Optional[int], verified: bool, lines=()) -> None:
    if getattr(args, "json", False):
        print(json.dumps({"distance": distance, "script_size": size, "verified": verified}, sort_keys=True))
        return
    if distance is not None:
        print(distance)
    for ln in lines:
        sys.stdout.write(ln if ln.endswith("\n") else ln + "\n")


def _write_script(args, text: str) -> None:
    if args.script_out:
        with open(args.script_out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _oracle_limit(n: int, cap: int) -> None:
    if n > cap:
        raise ForestError(f"--oracle supports at most {cap} nodes, got {n}")


def _cmd_perm(args) -> int:
    t1, t2 = read_forest(args.first), read_forest(args.second)
    d = permutation_distance(t1, t2)
    lines = []
    if args.script or args.script_out:
        pi = recover_permutation(t1, t2)
        text = format_script(EditScript([Permute(pi)] if pi.size else []))
        _write_script(args, text)
        if args.script:
            lines.append(text)
    if args.oracle:
        _oracle_limit(t1.n, tools.PERM_ORACLE_MAX_N)
        ref = tools.oracle_perm_distance(t1, t2)
        if not args.json:
            print(f"oracle {ref}", file=sys.stderr)
        _emit(args, d, d, ref == d, lines)
        return EXIT_OK if ref == d else EXIT_VERIFY
    _emit(args, d, d, True, lines)
    return EXIT_OK


def _check_bounds(ref: int, size: int) -> bool:
    return ref <= size <= APPROX_FACTOR * ref


def _cmd_rearrange(args) -> int:
    f1, f2 = read_forest(args.first), read_forest(args.second)
    script, trace = approximate_rearrangement(f1, f2)
    verified = similar(apply_script(f1, script), f2)
    lines = []
    _write_script(args, format_script(script))
    if args.script:
        lines.append(format_script(script))
    if args.trace:
        lines.append(trace.report())
    ok = verified
    if args.oracle:
        _oracle_limit(f1.n, tools.REARRANGE_ORACLE_MAX_N)
        ref = tools.oracle_rearrangement(f1, f2)
        if not args.json:
            print(f"oracle {ref}", file=sys.stderr)
        ok = ok and _check_bounds(ref, script.size)
    _emit(args, script.size, script.size, ok, lines)
    return EXIT_OK if ok else EXIT_VERIFY


def _cmd_tree_rearrange(args) -> int:
    t1, t2 = read_forest(args.first), read_forest(args.second)
    res = approximate_tree_distance(t1, t2)
    a1, a2 = res.anchored
    verified = similar(apply_script(a1, res.script), a2)
    lines = []
    text = format_script(res.link_script if res.link_script is not None else res.script)
    _write_script(args, text)
    if args.script:
        lines.append(text)
    if args.trace:
        lines.append(res.trace.report())
    ok = verified
    if args.oracle:
        _oracle_limit(t1.n, tools.TREE_ORACLE_MAX_N)
        ref = tools.oracle_tree_rearrangement(t1, t2)
        if not args.json:
            print(f"oracle {ref}", file=sys.stderr)
        ok = ok and _check_bounds(ref, res.size)
    _emit(args, res.size, res.size, ok, lines)
    return EXIT_OK if ok else EXIT_VERIFY


def _cmd_gen(args) -> int:
    if args.n < 1:
        raise ForestError("--n must be positive")
    tree = tools.random_tree(args.n, args.seed)
    if args.relabel is not None:
        # a separate stream so the shape matches the un-relabelled tree
        tree = tools.random_relabel(tree, min(max(args.relabel, 0), args.n), f"{args.seed}:relabel")
    if args.out:
        write_forest(args.out, tree)
    else:
        sys.stdout.write(format_forest(tree))
    return EXIT_OK


def _cmd_reduce(args) -> int:
    with open(args.graph, encoding="utf-8") as fh:
        graph = unweighted(parse_graph(fh.read()))
    out = tools.reduce_matching(graph)
    write_forest(f"{args.out_prefix}1.tree", out.t1)
    write_forest(f"{args.out_prefix}2.tree", out.t2)
    mm = tools.matching_size(graph)
    if args.json:
        print(json.dumps({"m": out.m, "n": out.n, "matching": mm, "splits": out.split_count}, sort_keys=True))
    else:
        print(f"m {out.m}\nn {out.n}\nmatching {mm}\nsplits {out.split_count}")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    f1, f2 = read_forest(args.first), read_forest(args.second)
    if args.kind == "perm":
        _oracle_limit(f1.n, tools.PERM_ORACLE_MAX_N)
        d = tools.oracle_perm_distance(f1, f2)
    else:
        _oracle_limit(f1.n, tools.REARRANGE_ORACLE_MAX_N)
        d = tools.oracle_rearrangement(f1, f2)
    _emit(args, d, None, True)
    return EXIT_OK


def _cmd_verify(args) -> int:
    f1, f2 = read_forest(args.forest), read_forest(args.target)
    with open(args.script, encoding="utf-8") as fh:
        script = parse_script(fh.read(), f1.n)
    try:
        ok = similar(apply_script(f1, script), f2)
    except ForestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        ok = False
    if args.json:
        _emit(args, None, script.size, ok)
    else:
        print("ok" if ok else "failed")
    return EXIT_OK if ok else EXIT_VERIFY


_COMMANDS = {
    "perm": _cmd_perm,
    "rearrange": _cmd_rearrange,
    "tree-rearrange": _cmd_tree_rearrange,
    "gen": _cmd_gen,
    "reduce": _cmd_reduce,
    "oracle": _cmd_oracle,
    "verify": _cmd_verify,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except NotIsomorphic as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_ISO
    except (ForestError, GraphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())
