"""Command line interface: ``hardsquares <command> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from contextlib import contextmanager

from .config import DEFAULT_CELL_CAP, BudgetExceeded, config_complex, subdivide_order
from .homology import betti_numbers
from .injective_words import reutenauer_basis, top_homology_products
from .puzzle import (
    PuzzleState,
    component_count,
    component_labels,
    enumerate_states,
    find_path,
    parity_class,
    path_certificate,
)
from .spectral import DoubleComplex, check_collapse, compute_pages, rightmost_cover
from .sweep import CACHE_ENV, SweepSpec, emit_table, exit_code, stability_sweep
from .wheels import enumerate_wheel_basis


def _int_list(text: str) -> tuple[int, ...]:
    """``"3"``, ``"1,2,5"`` or ``"1-3"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty list {text!r}")
    return tuple(out)


def _board(text: str) -> PuzzleState:
    """Rows top to bottom separated by ``/``, cells by ``,``; 0 is empty."""
    rows = [[int(x) for x in row.split(",")] for row in text.split("/")]
    if len({len(r) for r in rows}) != 1:
        raise argparse.ArgumentTypeError("rows must have equal length")
    return PuzzleState.from_rows(rows)


def _coefficients(text: str) -> str | int:
    if text in ("integers", "rationals"):
        return text
    return int(text)


@contextmanager
def _output(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w") as f:
            yield f


def cmd_sweep(args) -> int:
    spec = SweepSpec(
        n_values=args.n,
        w_max=args.w_max,
        h_max=args.h_max,
        k_max=args.k_max,
        coefficients=args.coefficients,
        budget=args.budget,
        cache_dir=args.cache_dir,
        jobs=args.jobs,
    )
    rows = stability_sweep(spec)
    with _output(args.out) as f:
        emit_table(rows, args.format, f)
    return exit_code(rows)


def cmd_homology(args) -> int:
    try:
        c = config_complex(args.w, args.h, args.n, cap=args.budget)
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return 3
    cc = subdivide_order(c).chain_complex() if args.kuhn else c.chain_complex()
    summary = betti_numbers(cc, args.coefficients)
    doc = {
        "w": args.w,
        "h": args.h,
        "n": args.n,
        "cells": list(cc.sizes),
        "betti": [s.betti for s in summary],
        "torsion": {str(s.degree): list(s.torsion) for s in summary if s.torsion},
        "betti_only": any(s.betti_only for s in summary),
    }
    with _output(args.out) as f:
        print(json.dumps(doc), file=f)
    return 0


def _puzzle_graph(args):
    pinned = [args.pinned] if args.pinned else []
    return enumerate_states(args.w, args.h, args.n, pinned=pinned)


def cmd_puzzle(args) -> int:
    with _output(args.out) as f:
        if args.puzzle_cmd == "components":
            g = _puzzle_graph(args)
            count, sizes = component_count(g)
            doc = {"states": len(g), "edges": g.n_edges, "components": count, "sizes": list(sizes)}
            if args.parity and len(g) and args.n == args.w * args.h - 1:
                lab = component_labels(g)
                seen = {}
                for i, c in enumerate(lab.tolist()):
                    if c not in seen:
                        seen[c] = parity_class(g.state(i))
                doc["parity"] = [seen[c] for c in sorted(seen)]
            print(json.dumps(doc), file=f)
        elif args.puzzle_cmd == "path":
            a, b = args.start, args.goal
            if (a.w, a.h) != (b.w, b.h) or a.labels != b.labels:
                print("start and goal boards do not match", file=sys.stderr)
                return 1
            g = enumerate_states(a.w, a.h, {l: 1 for l in a.labels})
            moves = find_path(g, a, b)
            if moves is None:
                print("no path: the boards lie in different components", file=sys.stderr)
                return 1
            print(path_certificate(moves), file=f)
        elif args.puzzle_cmd == "parity":
            print(parity_class(args.board), file=f)
    return 0


def cmd_basis(args) -> int:
    with _output(args.out) as f:
        if args.basis_cmd == "wheels":
            for p in enumerate_wheel_basis(args.n, args.k):
                print(p, file=f)
        elif args.basis_cmd == "reutenauer":
            for b in reutenauer_basis(args.letters):
                print(b, file=f)
        elif args.basis_cmd == "top":
            for b in top_homology_products(args.m, args.r):
                print(b.name, file=f)
    return 0


def cmd_spectral(args) -> int:
    c = subdivide_order(config_complex(args.w, args.h, args.n, cap=args.budget))
    cov = rightmost_cover(c, args.pinned or ())
    sp = compute_pages(DoubleComplex(cov), args.max_page)
    with _output(args.out) as f:
        print(sp.to_json(), file=f)
    return 0 if check_collapse(sp).passed else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hardsquares", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out=True):
        if out:
            p.add_argument("--out", help="write to this file instead of stdout")

    p = sub.add_parser("sweep", help="compare square and point configuration homology over a range")
    p.add_argument("--n", type=_int_list, default=(1, 2, 3), help="numbers of squares, e.g. 1-3")
    p.add_argument("--w-max", type=int, default=6)
    p.add_argument("--h-max", type=int, default=6)
    p.add_argument("--k-max", type=int, default=2)
    p.add_argument("--budget", type=int, default=DEFAULT_CELL_CAP, help="maximum number of cells per complex")
    p.add_argument("--cache-dir", default=os.environ.get(CACHE_ENV), help=f"defaults to ${CACHE_ENV}")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--coefficients", type=_coefficients, default="rationals")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("homology", help="Betti numbers of one configuration complex")
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--coefficients", type=_coefficients, default="integers")
    p.add_argument("--kuhn", action="store_true", help="use the simplicial subdivision")
    p.add_argument("--budget", type=int, default=DEFAULT_CELL_CAP)
    common(p)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("puzzle", help="sliding-square state graphs")
    psub = p.add_subparsers(dest="puzzle_cmd", required=True)
    q = psub.add_parser("components", help="count connected components")
    q.add_argument("--w", type=int, required=True)
    q.add_argument("--h", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--pinned", type=_int_list, help="labels pinned to the right wall, top to bottom")
    q.add_argument("--parity", action="store_true", help="report the parity class of each component")
    common(q)
    q = psub.add_parser("path", help="slide sequence between two boards")
    q.add_argument("--from", dest="start", type=_board, required=True, help="rows like 1,2/3,0")
    q.add_argument("--to", dest="goal", type=_board, required=True)
    common(q)
    q = psub.add_parser("parity", help="parity class of a board with one empty cell")
    q.add_argument("--board", type=_board, required=True)
    common(q)
    p.set_defaults(func=cmd_puzzle)

    p = sub.add_parser("basis", help="print algebraic bases")
    bsub = p.add_subparsers(dest="basis_cmd", required=True)
    q = bsub.add_parser("wheels", help="wheel products on 1..n in degree k")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--k", type=int, required=True)
    common(q)
    q = bsub.add_parser("reutenauer", help="left-normed brackets anchored at the least letter")
    q.add_argument("--letters", type=_int_list, required=True)
    common(q)
    q = bsub.add_parser("top", help="top homology basis of injective words")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--r", type=int, default=2)
    common(q)
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("spectral", help="Mayer-Vietoris spectral sequence of the right-most cover")
    ssub = p.add_subparsers(dest="spectral_cmd", required=True)
    q = ssub.add_parser("pages", help="page ranks as JSON")
    q.add_argument("--w", type=int, required=True)
    q.add_argument("--h", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--pinned", type=_int_list)
    q.add_argument("--max-page", type=int)
    q.add_argument("--budget", type=int, default=2_000_000)
    common(q)
    p.set_defaults(func=cmd_spectral)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
