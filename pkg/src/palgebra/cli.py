"""Command-line interface.

JSON results go to stdout (the nf command prints plain term text),
diagnostics to stderr.  Exit codes: 0 success / identity or quasi-identity
holds; 1 usage errors, parse errors, or a failing verdict; 2 a size cap or
valuation budget was exceeded (with a machine-readable reason on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys

from .algebras import (
    TableAlgebra,
    algebra_dumps,
    algebra_loads,
    build_chain,
    build_si,
    validate,
)
from .congruences import cm_all, cm_posets
from .decide import (
    Equation,
    QuasiIdentity,
    check_identity,
    check_quasi_identity,
    structural_completeness_report,
)
from .errors import BudgetExceeded, CapExceeded, MalformedTables, ParseError
from .free import build_free, count_jirr, free_distributive, free_skeleton, normal_form
from .posets import export_dot
from .terms import parse, to_text


def _print_json(doc) -> None:
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _level(text: str) -> int | None:
    if text in ("omega", "w"):
        return None
    n = int(text)
    if n < 0:
        raise ValueError("level must be >= 0 or omega")
    return n


def _variety(text: str) -> int | None:
    if text == "pa":
        return None
    if text.startswith("pa") and text[2:].isdigit():
        return int(text[2:])
    raise ValueError(f"bad variety {text!r}: use pa or pa<N>")


def load_algebra(spec: str):
    """si:n | chain:m | free:n,k | dist:s | path to an algebra JSON file."""
    head, sep, tail = spec.partition(":")
    if sep and head in ("si", "chain", "free", "dist"):
        try:
            if head == "si":
                return build_si(int(tail))
            if head == "chain":
                return build_chain(int(tail))
            if head == "dist":
                return free_distributive(int(tail))
            n_text, _, k_text = tail.partition(",")
            return build_free(_level(n_text), int(k_text)).algebra
        except ValueError as exc:
            raise ValueError(f"bad algebra spec {spec!r}: {exc}") from exc
    try:
        with open(spec, encoding="utf-8") as fh:
            A = algebra_loads(fh.read())
    except OSError as exc:
        raise ValueError(f"cannot read algebra file {spec!r}: {exc}") from exc
    # hand-written table files get linted (the law check is cubic, so only
    # at sizes where it is instant; upset algebras are correct by shape)
    if isinstance(A, TableAlgebra) and A.size <= 256:
        problems = validate(A)
        if problems:
            raise ValueError(
                f"algebra file {spec!r} violates the laws: {problems[0]}")
    return A


def cmd_free(args) -> int:
    n = _level(args.n)
    out = {"n": "omega" if n is None else n, "k": args.k,
           "jCount": count_jirr(n, args.k)}
    if args.export or not args.count_only:
        indices, poset = free_skeleton(n, args.k)
        if args.export:
            dot = export_dot(poset, labels=[str(j.to_json_dict()) for j in indices])
            if args.export == "-":
                sys.stdout.write(dot)
            else:
                with open(args.export, "w", encoding="utf-8") as fh:
                    fh.write(dot)
        if not args.count_only:
            out["elements"] = build_free(n, args.k).size
    _print_json(out)
    return 0


def cmd_nf(args) -> int:
    t = parse(args.term)
    sys.stdout.write(to_text(normal_form(t, _level(args.n))) + "\n")
    return 0


def cmd_eq(args) -> int:
    e = Equation(parse(args.lhs), parse(args.rhs))
    verdict = check_identity(e, _variety(args.variety), want_witness=args.witness)
    _print_json(verdict.to_json_dict())
    return 0 if verdict.holds else 1


def cmd_qi(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read quasi-identity file {args.file!r}: {exc}")
    except json.JSONDecodeError as exc:
        raise ValueError(f"bad JSON in {args.file!r}: {exc}")
    q = QuasiIdentity.from_json_dict(doc)
    A = load_algebra(args.algebra)
    verdict = check_quasi_identity(q, A, args.strategy)
    _print_json(verdict.to_json_dict())
    return 0 if verdict.holds else 1


def cmd_si(args) -> int:
    sys.stdout.write(algebra_dumps(build_si(args.n)))
    return 0


def cmd_dual(args) -> int:
    A = load_algebra(args.algebra)
    records = cm_all(A)
    by_subset, by_one = cm_posets(records)
    _print_json({
        "algebra": args.algebra,
        "count": len(records),
        "records": [r.to_json_dict() for r in records],
        "bySubset": {"covers": sorted(by_subset.covers())},
        "byOneClass": {"covers": sorted(by_one.covers())},
        "storeys": {
            "I": sum(1 for r in records if r.storey == "I"),
            "II": sum(1 for r in records if r.storey == "II"),
        },
    })
    return 0


def cmd_report(args) -> int:
    _print_json(structural_completeness_report(args.n))
    return 0


def cmd_convert(args) -> int:
    A = load_algebra(args.algebra)
    sys.stdout.write(algebra_dumps(A))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="palgebra",
        description="Finite distributive p-algebras: free algebras, normal "
                    "forms, congruence duals, and identity/quasi-identity "
                    "decision procedures.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("free", help="free algebra by level and rank")
    p.add_argument("-n", required=True,
                   help="level: a nonnegative integer, or omega")
    p.add_argument("-k", type=int, required=True, help="number of generators")
    p.add_argument("--export", metavar="FILE",
                   help="write the index poset as DOT (- for stdout)")
    p.add_argument("--count-only", action="store_true",
                   help="skip element materialization")
    p.set_defaults(fn=cmd_free)

    p = sub.add_parser("nf", help="normal form of a term")
    p.add_argument("term")
    p.add_argument("-n", required=True, help="level (integer or omega)")
    p.set_defaults(fn=cmd_nf)

    p = sub.add_parser("eq", help="decide an identity")
    p.add_argument("lhs")
    p.add_argument("rhs")
    p.add_argument("--variety", default="pa",
                   help="pa (default) or pa<N> for a fixed level")
    p.add_argument("--witness", action="store_true",
                   help="produce a counter-valuation on failure")
    p.set_defaults(fn=cmd_eq)

    p = sub.add_parser("qi", help="evaluate a quasi-identity on an algebra")
    p.add_argument("file", help="JSON file: {premises: [{lhs, rhs}...], "
                                "conclusion: {lhs, rhs}}; terms as text or "
                                "JSON trees")
    p.add_argument("--algebra", required=True,
                   help="si:n | chain:m | free:n,k | dist:s | JSON path")
    p.add_argument("--strategy", choices=("exhaustive", "pruned"),
                   default="exhaustive")
    p.set_defaults(fn=cmd_qi)

    p = sub.add_parser("si", help="print the level-n subdirectly irreducible "
                                  "algebra as JSON tables")
    p.add_argument("n", type=int)
    p.set_defaults(fn=cmd_si)

    p = sub.add_parser("dual", help="congruence records of an algebra with "
                                    "both orders")
    p.add_argument("algebra",
                   help="si:n | chain:m | free:n,k | dist:s | JSON path")
    p.set_defaults(fn=cmd_dual)

    p = sub.add_parser("report", help="structural completeness report for a "
                                      "level")
    p.add_argument("n", type=int)
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("convert", help="load an algebra spec and print its "
                                       "JSON tables")
    p.add_argument("algebra",
                   help="si:n | chain:m | free:n,k | dist:s | JSON path")
    p.set_defaults(fn=cmd_convert)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except CapExceeded as exc:
        sys.stderr.write(json.dumps({
            "error": "cap-exceeded", "what": exc.what,
            "count": exc.count, "cap": exc.cap}) + "\n")
        return 2
    except BudgetExceeded as exc:
        sys.stderr.write(json.dumps({
            "error": "budget-exceeded", "what": exc.what,
            "needed": exc.needed, "budget": exc.budget}) + "\n")
        return 2
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return 1
    except (ValueError, MalformedTables) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
