"""Command line entry point: ``welschinger <command> ...``.

Exit codes: 0 success, 1 contradiction or failed verification, 2 invalid
key, flag or file, 3 missing fact.  Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from importlib import resources
from typing import Sequence

from .errors import InvalidKey, LatticeError, MissingFact
from .factbase import Bounds, Contradiction, FactBase, key_to_json
from .genfun import build_from_key, verify_blowup_identities, verify_wall_identity
from .lattice import parse_class, parse_surface
from .presets import PRESETS, TABLES, Table, load_preset
from .relations import InvariantKey
from .splitting import CONTEXT_KINDS, ContextError, derive_wall_crossing

EXIT_OK, EXIT_CONTRADICTION, EXIT_INVALID, EXIT_MISSING = 0, 1, 2, 3

SEED_FILE = "seeds.jsonl"
EMPTY = "empty"


class UsageError(ValueError):
    pass


def shipped_seeds() -> FactBase:
    """The bundled seed file with every printed table entry."""
    with resources.as_file(resources.files("welschinger") / "data" / SEED_FILE) as path:
        return FactBase.load(path)


def _store(args) -> FactBase:
    if args.facts:
        store = FactBase.load(args.facts)
        if args.preset and args.preset != EMPTY:
            load_preset(args.preset, store)
        return store
    if args.preset == EMPTY:
        return FactBase()
    if args.preset:
        return load_preset(args.preset)
    return shipped_seeds()


def _bounds(args) -> Bounds:
    return Bounds(args.max_blowups, args.max_degree)


def _parse_s(text: str) -> int:
    raw = text[2:] if text.startswith("s=") else text
    try:
        s = int(raw)
    except ValueError:
        raise UsageError(f"expected s=N, got {text!r}") from None
    return s


def _key(args, s: int) -> InvariantKey:
    surface = parse_surface(args.surface)
    d = parse_class(args.cls, surface)
    return InvariantKey(surface, d, s, args.l_label, args.f_label)


def _emit(args, text: str, payload=None):
    if args.format == "json" and payload is not None:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


# -- commands --------------------------------------------------------------------

def cmd_query(args) -> int:
    key = _key(args, _parse_s(args.s))
    store = _store(args)
    store.derive_closure(_bounds(args))
    hit = store.query(key)
    if hit is None:
        raise MissingFact(f"no fact for {key}")
    value, tree = hit
    _emit(args, f"{value}\n{tree.render()}",
          {"key": key_to_json(key), "value": value, "provenance": tree.render()})
    return EXIT_OK


def cmd_derive(args) -> int:
    store = _store(args)
    added = store.derive_closure(_bounds(args))
    if args.out:
        store.export(args.out)
    _emit(args, f"{added} facts derived", {"derived": added, "total": len(store)})
    return EXIT_OK


def _polynomial_keys(store: FactBase) -> list[InvariantKey]:
    keys = []
    for k in sorted(store.facts):
        if k.s == 0 and all(store.value(k.at(s)) is not None for s in range(k.s_max + 1)):
            keys.append(k)
    return keys


def _verify_polynomials(store: FactBase) -> list:
    reports = []
    for k in _polynomial_keys(store):
        if k.c1d >= 4:
            try:
                reports.append(verify_wall_identity(store, k.surface, k.d, k.l_label, k.f_label))
            except MissingFact:
                pass
        for r, s in ((1, 0), (0, 1)):
            try:
                reports.append(verify_blowup_identities(store, k.surface, k.d, r, s,
                                                        k.l_label, k.f_label))
            except (MissingFact, InvalidKey):
                pass
    return reports


def cmd_check(args) -> int:
    store = _store(args)
    store.derive_closure(_bounds(args))
    problem = store.check_consistency()
    if problem is not None:
        print(problem.render(), file=sys.stderr)
        return EXIT_CONTRADICTION
    reports = _verify_polynomials(store)
    failed = [r for r in reports if not r.ok]
    lines = [f"{len(store)} facts consistent", "parity ok",
             f"{len(reports) - len(failed)}/{len(reports)} generating-function identities ok"]
    for r in failed:
        print(str(r), file=sys.stderr)
    _emit(args, "\n".join(lines),
          {"facts": len(store), "consistent": True,
           "identities": len(reports), "failed": [str(r) for r in failed]})
    return EXIT_CONTRADICTION if failed else EXIT_OK


def _cell(v) -> str:
    return "-" if v is None else str(v)


def render_tables(tables: list[Table], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{"title": t.title, "columns": t.columns, "rows": t.rows,
                            "cells": t.cells} for t in tables], indent=2)
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        for i, t in enumerate(tables):
            if i:
                buf.write("\n")
            w.writerow(t.columns)
            for row in t.cells:
                w.writerow([_cell(v) for v in row])
        return buf.getvalue().rstrip("\n")
    for i, t in enumerate(tables):
        if i:
            buf.write("\n")
        width = max(len(r) for r in t.rows)
        cols = [max(len(c), *(len(_cell(row[j])) for row in t.cells)) for j, c in enumerate(t.columns)]
        buf.write(t.title + "\n")
        buf.write(" " * width + "  " + "  ".join(c.rjust(n) for c, n in zip(t.columns, cols)) + "\n")
        for label, row in zip(t.rows, t.cells):
            buf.write(label.ljust(width) + "  "
                      + "  ".join(_cell(v).rjust(n) for v, n in zip(row, cols)) + "\n")
    return buf.getvalue().rstrip("\n")


def cmd_table(args) -> int:
    name = args.name or args.preset
    if name not in TABLES:
        raise UsageError(f"unknown table {name!r}; choose from {', '.join(sorted(TABLES))}")
    store = _store(args)
    store.derive_closure(_bounds(args))
    try:
        tables = TABLES[name](store)
    except LookupError as exc:
        raise MissingFact(str(exc)) from None
    fmt = "csv" if args.format is None else args.format
    print(render_tables(tables, fmt))
    return EXIT_OK


def cmd_genfun(args) -> int:
    key = _key(args, 0)
    store = _store(args)
    store.derive_closure(_bounds(args))
    poly = build_from_key(store, key)
    _emit(args, str(poly), poly.to_json())
    return EXIT_OK


def parse_context(text: str):
    """``kind[,name=value...]``, e.g. ``real-point,n=2,points=conjugated,class=3H``."""
    # commas inside braces belong to surface names such as CP2_{2,0}
    kind, *rest = [p.strip() for p in re.split(r",(?![^{]*\})", text) if p.strip()] or [""]
    opts = {}
    for item in rest:
        if "=" not in item:
            raise UsageError(f"context option {item!r} is not name=value")
        k, v = item.split("=", 1)
        opts[k.strip()] = v.strip()
    if kind == "wall":
        return kind, opts
    if kind not in CONTEXT_KINDS:
        raise UsageError(f"unknown context {kind!r}; choose from "
                         + ", ".join(sorted(CONTEXT_KINDS) + ["wall"]))
    surface = parse_surface(opts.pop("surface", "CP2"))
    d = parse_class(opts.pop("class", "3H"), surface)

    def integer(name, default):
        try:
            return int(opts.pop(name, default))
        except ValueError:
            raise UsageError(f"{name} must be an integer") from None

    if kind == "real-point":
        ctx = CONTEXT_KINDS[kind](d, integer("n", 0), opts.pop("points", "real"))
    elif kind == "exceptional":
        ctx = CONTEXT_KINDS[kind](d, integer("j", 0), opts.pop("contacts", "real"))
    elif kind == "conj-pair":
        ctx = CONTEXT_KINDS[kind](d, integer("n", 0))
    elif kind == "conj-exceptional":
        ctx = CONTEXT_KINDS[kind](d, integer("j", 0))
    elif kind == "two-spheres":
        v1 = parse_class(opts.pop("v1", "E1"), surface)
        v2 = parse_class(opts.pop("v2", "E2"), surface)
        ctx = CONTEXT_KINDS[kind](d, v1, v2)
    elif kind == "plane-line":
        ctx = CONTEXT_KINDS[kind](integer("budget", 1))
    else:
        ctx = CONTEXT_KINDS[kind](integer("budget", 0))
    if opts:
        raise UsageError(f"unused context options: {', '.join(sorted(opts))}")
    return kind, ctx


SPLIT_HEADER = ["plus", "minus", "tangency", "multiplicity", "mass_shift"]


def cmd_split(args) -> int:
    kind, ctx = parse_context(args.context)
    if kind == "wall":
        d = None
        if ctx:
            surface = parse_surface(ctx.pop("surface", "CP2"))
            d = parse_class(ctx.pop("class", "3H"), surface)
        if ctx:
            raise UsageError(f"unused context options: {', '.join(sorted(ctx))}")
        report = derive_wall_crossing(d)
        _emit(args, report.render(), {"below": report.below, "above": report.above,
                                      "theta": report.theta, "symbols": report.symbols,
                                      "holds": report.holds})
        return EXIT_OK if report.holds else EXIT_CONTRADICTION
    feasible = ctx.feasible()
    brute = ctx.feasible(brute=True)
    solutions = ctx.classify()
    rows = [s.row() for s in solutions]
    if args.format == "json":
        print(json.dumps({"fields": list(ctx.fields), "feasible": feasible,
                          "brute_force_agrees": feasible == brute,
                          "solutions": [dict(zip(SPLIT_HEADER, r)) for r in rows]}, indent=2))
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SPLIT_HEADER)
        w.writerows(rows)
        print(buf.getvalue().rstrip("\n"))
    else:
        names = ", ".join(ctx.fields)
        print(f"feasible ({names}): {feasible}")
        print(f"brute force agrees: {'yes' if feasible == brute else 'NO'}")
        widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
                  for i, h in enumerate(SPLIT_HEADER)]
        print("  ".join(h.ljust(n) for h, n in zip(SPLIT_HEADER, widths)).rstrip())
        for r in rows:
            print("  ".join(c.ljust(n) for c, n in zip(r, widths)).rstrip())
    return EXIT_OK if feasible == brute else EXIT_CONTRADICTION


def cmd_export(args) -> int:
    store = _store(args)
    if args.derive:
        store.derive_closure(_bounds(args))
    n = store.export(args.path)
    print(f"{n} facts written to {args.path}")
    return EXIT_OK


def cmd_import(args) -> int:
    incoming = FactBase.load(args.path)
    problem = incoming.check_consistency(_bounds(args))
    if problem is not None:
        print(problem.render(), file=sys.stderr)
        return EXIT_CONTRADICTION
    if args.facts:
        store = FactBase.load(args.facts)
        for k in sorted(incoming.facts):
            store.add(incoming.facts[k])
        problem = store.check_consistency(_bounds(args))
        if problem is not None:
            print(problem.render(), file=sys.stderr)
            return EXIT_CONTRADICTION
        store.export(args.facts)
        print(f"{len(incoming)} facts imported into {args.facts}")
    else:
        print(f"{len(incoming)} facts read, consistent")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--facts", help="fact file (JSON lines)")
    common.add_argument("--preset", choices=sorted(PRESETS) + [EMPTY],
                        help="built-in seed set (default: the bundled seed file)")
    common.add_argument("--max-blowups", type=_nonneg, default=Bounds().max_blowups)
    common.add_argument("--max-degree", type=_nonneg, default=Bounds().max_degree)
    common.add_argument("--format", choices=("csv", "json", "text"), default=None)

    p = argparse.ArgumentParser(prog="welschinger",
                                description="Welschinger invariants of real blow-ups.")
    sub = p.add_subparsers(dest="command", required=True)

    def keyed(q):
        q.add_argument("surface", help="e.g. CP2, CP2_{1,1}, P1xP1_{0,3}, B2_{0,1}, X1")
        q.add_argument("cls", metavar="class", help="e.g. 3H, 4H - (E'1+E''1), 2c1")
        q.add_argument("--l-label")
        q.add_argument("--f-label")

    q = sub.add_parser("query", parents=[common], help="value and provenance of one key")
    keyed(q)
    q.add_argument("s", help="s=N, the number of conjugated pairs")
    q.set_defaults(func=cmd_query)

    q = sub.add_parser("derive", parents=[common], help="run closure")
    q.add_argument("--out", help="write the closed store here")
    q.set_defaults(func=cmd_derive)

    q = sub.add_parser("check", parents=[common],
                       help="consistency, parity and generating-function identities")
    q.set_defaults(func=cmd_check)

    q = sub.add_parser("table", parents=[common], help="reproduce a table")
    q.add_argument("name", nargs="?", choices=sorted(TABLES))
    q.set_defaults(func=cmd_table)

    q = sub.add_parser("genfun", parents=[common], help="print W^d(T)")
    keyed(q)
    q.set_defaults(func=cmd_genfun)

    q = sub.add_parser("split", parents=[common], help="classify a degeneration")
    q.add_argument("--context", required=True,
                   help="kind[,name=value...]; kinds: " + ", ".join(sorted(CONTEXT_KINDS) + ["wall"]))
    q.set_defaults(func=cmd_split)

    q = sub.add_parser("export", parents=[common], help="write the store to a file")
    q.add_argument("path")
    q.add_argument("--derive", action="store_true", help="run closure before writing")
    q.set_defaults(func=cmd_export)

    q = sub.add_parser("import", parents=[common],
                       help="validate a fact file, merging it into --facts if given")
    q.add_argument("path")
    q.set_defaults(func=cmd_import)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        return args.func(args)
    except Contradiction as exc:
        print(exc.render(), file=sys.stderr)
        return EXIT_CONTRADICTION
    except MissingFact as exc:
        print(f"missing fact: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (UsageError, InvalidKey, LatticeError, ContextError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
