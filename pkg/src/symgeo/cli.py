"""symgeo command line.

    symgeo bounds "<x,y|[x,y]>" --target=chi
    symgeo construct "<a|a^5>"
    symgeo abelianize "<x,y|x^2 y^4, x^6 y^8>"
    symgeo geography --class=minimal_trivial --format=csv --samples=11 --from=-1 --to=3/2
    symgeo table zn --max 16

Exit status: 0 on success, 2 on usage or input errors, 3 when an internal
consistency check fails.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .bounds import (
    CHI, TARGETS, BoundReport, Contribution, UnrecognizedFamily,
    corvague_upper, family_report, is_family_spec, layered_report, parse_family,
)
from .geography import (
    TABLES, EnvelopeFn, Witness, known_tables, sample_points, sample_rows, to_csv,
    upper_envelope,
)
from .manifold import (
    ConstructionError, InvariantViolation, atomic, cyclic_monodromy, dehn_twist_monodromy,
    derived_checks, odd_rank_trace, theorem1_construct, theorem2_trace, z3_trace,
)
from .presentation import PresentationError, abelianize, deficiency, parse_presentation

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT = 0, 2, 3


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


# -- bounds ------------------------------------------------------------------------

def _bounds(args, out) -> None:
    text = args.input
    if is_family_spec(text):
        report = family_report(parse_family(text), args.target, args.assume_bmy)
        P = None
    else:
        P = parse_presentation(text)
        report = layered_report(P, args.target, args.assume_bmy)
    if args.corvague:
        if P is None:
            raise UsageError("--corvague needs a presentation input")
        try:
            k, l = (int(x) for x in args.corvague.split(","))
        except ValueError:
            raise UsageError("--corvague expects K,L") from None
        value = corvague_upper(k, l, P.g, P.r, args.hypothetical)
        if args.target != CHI:
            raise UsageError("--corvague only bounds chi")
        name = "small summands (hypothetical)" if args.hypothetical else "small summands"
        report = BoundReport(report.target, report.group, report.contributions + (
            Contribution(name, "upper", value, "k + l(g+r) from summands E and K", None, args.hypothetical),),
            report.congruence, report.caveats)
    for checks in map(derived_checks, report.witnesses()):
        if not checks["ok"]:
            raise InvariantViolation(f"witness {checks['name']} fails {checks['checks']}")
    out.write(_dump(report.to_dict()) if args.format == "json" else report.to_text())


# -- construct -----------------------------------------------------------------------

def _construct(args, out) -> None:
    text = args.input.strip()
    head, _, arg = text.partition(":")
    try:
        if text == "z3":
            trace = z3_trace()
        elif head == "odd":
            trace = odd_rank_trace(int(arg))
        elif head == "cyclic":
            trace = theorem2_trace(1, cyclic_monodromy(int(arg)))
        elif head == "free":
            trace = theorem2_trace(int(arg), dehn_twist_monodromy(int(arg)))
        else:
            trace = theorem1_construct(parse_presentation(text))
    except ValueError as exc:
        if isinstance(exc, (PresentationError, ConstructionError)):
            raise
        raise UsageError(f"bad construction spec {text!r}") from None
    checks = derived_checks(trace.final)
    if not checks["ok"]:
        raise InvariantViolation(f"constructed class fails {checks['checks']}")
    doc = trace.to_dict()
    doc["checks"] = checks["checks"]
    out.write(_dump(doc))


# -- abelianize ------------------------------------------------------------------------

def _abelianize(args, out) -> None:
    P = parse_presentation(args.input)
    ab = abelianize(P)
    if args.format == "json":
        out.write(_dump({"format_version": 1, "presentation": str(P), "generators": P.g,
                         "relators": P.r, "deficiency": deficiency(P), **ab.to_dict(),
                         "group": str(ab)}))
    else:
        out.write(f"{ab}\nrank {ab.rank}\ntorsion {list(ab.torsion)}\ndeficiency {deficiency(P)}\n")


# -- geography ------------------------------------------------------------------------

def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _witness(text: str) -> Witness:
    parts = text.split(",", 2)
    if len(parts) < 2:
        raise UsageError(f"witness must be CHI,SIGMA[,LABEL]: {text!r}")
    try:
        chi, sigma = int(parts[0]), int(parts[1])
    except ValueError:
        raise UsageError(f"witness must be CHI,SIGMA[,LABEL]: {text!r}") from None
    return Witness(chi, sigma, parts[2] if len(parts) > 2 else f"({chi},{sigma})")


def _atom(text: str) -> Witness:
    name, _, arg = text.partition(":")
    params = [int(a) for a in arg.split(",")] if arg else []
    return Witness.of(atomic(name, *params))


def _geography_functions(args) -> list[tuple[str, EnvelopeFn]]:
    ws = [_witness(w) for w in args.witness] + [_atom(a) for a in args.atom]
    lo = None if args.lo is None else _fraction(args.lo)
    hi = None if args.hi is None else _fraction(args.hi)
    funcs = []
    for tag in args.cls:
        f = known_tables(tag)
        if lo is not None or hi is not None:
            f = f.restrict(lo, hi)
        funcs.append((tag, f))
    if ws:
        funcs.append(("upper envelope", upper_envelope(ws, lo, hi)))
    if not funcs:
        funcs = [(tag, known_tables(tag)) for tag in ("smooth_trivial", "symplectic_trivial",
                                                      "minimal_trivial")]
    return funcs


def _plot_range(funcs, lo, hi) -> tuple[Fraction, Fraction]:
    if lo is not None and hi is not None:
        return lo, hi
    ends = [x for _, f in funcs for x in (f.lo, f.hi) if x is not None]
    a = lo if lo is not None else (min(ends) - 1 if ends else Fraction(-4))
    z = hi if hi is not None else (max(ends) + 1 if ends else Fraction(4))
    return a, z


def _geography(args, out) -> None:
    funcs = _geography_functions(args)
    lo = None if args.lo is None else _fraction(args.lo)
    hi = None if args.hi is None else _fraction(args.hi)
    a, z = _plot_range(funcs, lo, hi)
    if args.format in ("csv",) and len(funcs) != 1:
        raise UsageError("csv output needs exactly one function")
    if args.format == "csv":
        out.write(to_csv(funcs[0][1], sample_points(a, z, args.samples)))
    elif args.format == "json":
        pts = sample_points(a, z, args.samples) if args.samples else []
        doc = {"format_version": 1, "functions": []}
        for title, f in funcs:
            d = {"name": title, **f.to_dict()}
            if pts:
                d["samples"] = [dict(zip(("b", "value", "label", "status"), r))
                                for r in sample_rows(f, pts)]
            doc["functions"].append(d)
        out.write(_dump(doc))
    elif args.format == "svg":
        from .plotting import render_svg
        out.write(render_svg(funcs, a, z))
    else:
        for title, f in funcs:
            out.write(f"{title}\n{f.to_text()}")
    if args.figure:
        from .plotting import render_svg
        with open(args.figure, "w", encoding="utf-8") as fh:
            fh.write(render_svg(funcs, a, z))


# -- table ------------------------------------------------------------------------------

_TABLE_FAMILIES = {"free": "free:{}", "cyclic": "cyclic:{}", "zn": "zn:{}", "surface": "surface:{}"}


def _table(args, out) -> None:
    if args.family not in _TABLE_FAMILIES:
        raise UsageError(f"table family must be one of {sorted(_TABLE_FAMILIES)}")
    start = 2 if args.family == "cyclic" else (1 if args.family in ("free", "surface") else 0)
    rows = []
    for n in range(start, args.max + 1):
        F = parse_family(_TABLE_FAMILIES[args.family].format(n))
        r = family_report(F, args.target, args.assume_bmy)
        w = r.best_witness()
        rows.append((str(n), str(F), _s(r.lower), _s(r.upper), "yes" if r.exact else "no",
                     "" if w is None else str(w.expr)))
    header = ("n", "group", "lower", "upper", "exact", "witness")
    if args.format == "csv":
        import csv
        out.write("# format_version=1\n")
        csv.writer(out, lineterminator="\n").writerows([header] + rows)
    elif args.format == "json":
        out.write(_dump({"format_version": 1, "family": args.family, "target": args.target,
                         "rows": [dict(zip(header, r)) for r in rows]}))
    else:
        widths = [max(len(r[i]) for r in rows + [header]) for i in range(6)]
        for r in [header] + rows:
            out.write("  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip() + "\n")


def _s(v) -> str:
    return "-" if v is None else str(v)


# -- entry ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symgeo", description="Geography of symplectic 4-manifolds.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)

    b = sub.add_parser("bounds", help="bounds on chi or chi+sigma for a group")
    b.add_argument("input", help="presentation '<gens | relators>' or family spec such as zn:6")
    b.add_argument("--target", choices=TARGETS, default=CHI)
    b.add_argument("--format", choices=("text", "json"), default="text")
    b.add_argument("--assume-bmy", action="store_true", help="add the conjectural BMY bound")
    b.add_argument("--corvague", metavar="K,L", help="chi of the summands E and K")
    b.add_argument("--hypothetical", action="store_true", help="allow summands smaller than known")

    c = sub.add_parser("construct", help="JSON construction trace")
    c.add_argument("input", help="presentation, or odd:n, cyclic:n, free:n, z3")

    a = sub.add_parser("abelianize", help="abelianization of a presentation")
    a.add_argument("input")
    a.add_argument("--format", choices=("text", "json"), default="text")

    g = sub.add_parser("geography", help="envelope functions b -> f(1,b)")
    g.add_argument("--class", dest="cls", action="append", default=[], choices=TABLES)
    g.add_argument("--witness", action="append", default=[], metavar="CHI,SIGMA[,LABEL]")
    g.add_argument("--atom", action="append", default=[], metavar="NAME[:PARAMS]")
    g.add_argument("--format", choices=("text", "json", "csv", "svg"), default="text")
    g.add_argument("--samples", type=int, default=0)
    g.add_argument("--from", dest="lo")
    g.add_argument("--to", dest="hi")
    g.add_argument("--figure", metavar="PATH", help="also write an SVG plot to PATH")

    t = sub.add_parser("table", help="scan a family of groups")
    t.add_argument("family")
    t.add_argument("--max", type=int, default=12)
    t.add_argument("--target", choices=TARGETS, default=CHI)
    t.add_argument("--format", choices=("text", "json", "csv"), default="text")
    t.add_argument("--assume-bmy", action="store_true")
    return p


_VERBS = {"bounds": _bounds, "construct": _construct, "abelianize": _abelianize,
          "geography": _geography, "table": _table}


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.verb == "geography" and args.format == "csv" and args.samples < 1:
        args.samples = 11
    try:
        _VERBS[args.verb](args, out)
    except (InvariantViolation, AssertionError) as exc:
        err.write(f"symgeo: internal check failed: {exc}\n")
        return EXIT_INVARIANT
    except PresentationError as exc:
        err.write(f"symgeo: parse error: {exc}\n")
        return EXIT_USAGE
    except (UsageError, UnrecognizedFamily, ConstructionError, ValueError, OSError) as exc:
        err.write(f"symgeo: {exc}\n")
        return EXIT_USAGE
    return EXIT_OK


def main() -> None:
    sys.exit(run())
