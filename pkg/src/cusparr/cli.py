"""Command-line interface.

Exit codes: 0 success or positive answer, 1 negative answer, 2 usage or
format error, 3 audit found points of multiplicity other than 2 or 3.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import arrange, gf, projplane, realize, triples

EXIT_OK, EXIT_NO, EXIT_ERROR, EXIT_BAD_MULT = 0, 1, 2, 3

FORMATS = """\
file formats:
  field header   field p=<p> n=<n> modulus=<c0,c1,...,cn>   (low degree first)
  arrangement    header, then '<label> <a>:<b>:<c>' per line (normalized)
  points         header, then '<x>:<y>:<z>' per line
  triple system  'ground <l1> <l2> ...', then 'a b c' per triple (a<b<c, lex-sorted)
field elements are written as their integer encoding sum(c_i * p^i).
"""


class UsageError(Exception):
    pass


def _field(p: int, n: int, modulus: str | None) -> gf.FieldCtx:
    mod = [int(c) for c in modulus.split(",")] if modulus else None
    return gf.field_new(p, n, mod)


def _emit(args, lines: list[str], data: dict) -> None:
    out = json.dumps(data, indent=1) + "\n" if args.json else "\n".join(lines) + "\n"
    sys.stdout.write(out)


def _write_or_print(path: str | None, text: str) -> None:
    if path and path != "-":
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


# --- commands -----------------------------------------------------------------

def cmd_build(args) -> int:
    ctx = _field(args.p, args.n, args.modulus)
    a = arrange.build(args.construction, ctx)
    _write_or_print(args.output, arrange.format_arrangement(a))
    return EXIT_OK


def _detect_construction(a: arrange.Arrangement) -> str | None:
    for kind, builder in arrange.BUILDERS.items():
        try:
            ref = builder(a.ctx)
        except arrange.ArrangementError:
            continue
        if ref.labels == a.labels and ref.lines == a.lines:
            return kind
    return None


def cmd_audit(args) -> int:
    a = arrange.read_arrangement(args.arrangement)
    spec = arrange.audit(a)
    lines = spec.report_lines(with_points=args.points)
    data: dict = spec.as_dict()
    kind = _detect_construction(a)
    if kind is not None:
        notes = arrange.compare_stated(kind, a.ctx.q, spec)
        lines.insert(1, f"construction={kind}")
        lines.extend(notes)
        data["construction"] = kind
        data["mismatches"] = len(notes)
        for i, note in enumerate(notes):
            data[f"mismatch[{i}]"] = note
    _emit(args, lines, data)
    return EXIT_OK if spec.only_double_and_triple() else EXIT_BAD_MULT


def cmd_configuration(args) -> int:
    a = arrange.read_arrangement(args.arrangement)
    rep = arrange.check_configuration(a, arrange.audit(a), args.r, args.k)
    lines = [f"configuration={'ok' if rep.ok else 'violated'}"] + rep.violations
    data = {"configuration": "ok" if rep.ok else "violated", "violations": len(rep.violations)}
    _emit(args, lines, data)
    return EXIT_OK if rep.ok else EXIT_NO


def cmd_dual_points(args) -> int:
    a = arrange.read_arrangement(args.arrangement)
    text = a.ctx.header() + "\n" + "".join(f"{pt}\n" for pt in arrange.dual_points(a))
    _write_or_print(args.output, text)
    return EXIT_OK


def cmd_cubic_fit(args) -> int:
    ctx, pts = projplane.read_points(args.points)
    if not pts:
        raise UsageError("points file has no points")
    basis = projplane.cubics_through(pts)
    lines = [f"points={len(pts)}", f"dim={len(basis)}"]
    data: dict = {"points": len(pts), "dim": len(basis)}
    for i, f in enumerate(basis):
        lines.append(f"basis[{i}]={f}")
        data[f"basis[{i}]"] = str(f)
        if len(basis) <= 2:
            cls = projplane.classify_cubic(f)
            sing = ",".join(str(p) for p in cls.singular_points) or "-"
            lines.append(f"class[{i}]={cls.kind} singular={sing}")
            data[f"class[{i}]"] = cls.kind
            data[f"singular[{i}]"] = sing
    _emit(args, lines, data)
    return EXIT_OK


def cmd_matroid_extract(args) -> int:
    a = arrange.read_arrangement(args.arrangement)
    ts = triples.from_arrangement(a, arrange.audit(a))
    _write_or_print(args.output, ts.format())
    return EXIT_OK


def cmd_matroid_make(args) -> int:
    if args.kind == "projection":
        ts = triples.make_projection_matroid(args.n)
    else:
        ctx = _field(args.p, args.n, args.modulus)
        ts = triples.make_Mq(ctx) if args.kind == "M" else triples.make_Nq(ctx)
    _write_or_print(args.output, ts.format())
    return EXIT_OK


def cmd_matroid_iso(args) -> int:
    t1 = triples.read_triple_system(args.first)
    t2 = triples.read_triple_system(args.second)
    w = triples.isomorphic(t1, t2)
    if w is None:
        _emit(args, ["isomorphic=no"], {"isomorphic": "no"})
        return EXIT_NO
    lines = ["isomorphic=yes"] + [f"{k} -> {v}" for k, v in w.mapping.items()]
    data = {"isomorphic": "yes"}
    data.update({f"map[{k}]": v for k, v in w.mapping.items()})
    _emit(args, lines, data)
    return EXIT_OK


def cmd_matroid_aut(args) -> int:
    ts = triples.read_triple_system(args.system)
    g = triples.automorphism_order(ts)
    lines = [f"order={g.order}", f"generators={len(g.generators)}", f"nodes={g.nodes}"]
    if args.generators:
        for gen in g.generators:
            lines.append(" ".join(f"{k}>{v}" for k, v in gen.items() if k != v))
    _emit(args, lines, {"order": g.order, "generators": len(g.generators), "nodes": g.nodes})
    return EXIT_OK


def cmd_matroid_restrict(args) -> int:
    ts = triples.read_triple_system(args.system)
    if bool(args.labels) == bool(args.span):
        raise UsageError("give exactly one of --labels or --span")
    if args.labels:
        subset = _int_list(args.labels)
    else:
        p, n, basis = args.span
        ctx = _field(int(p), int(n), args.modulus)
        subset = [e.value for e in gf.span_members(ctx, [ctx(v) for v in _int_list(basis)])]
    _write_or_print(args.output, triples.restrict(ts, subset).format())
    return EXIT_OK


def cmd_matroid_steiner(args) -> int:
    ts = triples.read_triple_system(args.system)
    ok = triples.is_steiner(ts)
    _emit(args, [f"steiner={'yes' if ok else 'no'}"], {"steiner": "yes" if ok else "no"})
    return EXIT_OK if ok else EXIT_NO


def cmd_realize(args) -> int:
    ts = triples.read_triple_system(args.system)
    ctx = _field(args.field[0], args.field[1], args.modulus)
    problem = realize.RealizationProblem(ts, ctx)
    if not problem.in_exhaustive_scope and not args.best_effort:
        raise UsageError(
            f"ground {len(ts.ground)} / field size {ctx.q} exceed the exhaustive scope "
            f"(ground <= {realize.MAX_EXHAUSTIVE_GROUND}, q <= {realize.MAX_EXHAUSTIVE_Q}); "
            "pass --best-effort"
        )
    res = realize.realize_over(problem, count_all=args.count_all)
    status = res.status
    if not res.realizable and not problem.in_exhaustive_scope:
        status = "unknown"
    lines = [f"status={status}"] + res.report_lines()[1:]
    data: dict = {
        "status": status,
        "frame": ",".join(map(str, res.frame)),
        "normalization": res.normalization,
        "witnesses": len(res.witnesses),
        "nodes": res.nodes,
        "forced": res.forced,
    }
    if res.witnesses:
        data.update({f"point[{lab}]": str(pt) for lab, pt in res.witnesses[0].items()})
    _emit(args, lines, data)
    return EXIT_OK if res.realizable else EXIT_NO


def cmd_export_ideal(args) -> int:
    ts = triples.read_triple_system(args.system)
    ideal = realize.export_ideal(ts, normalize=args.normalize)
    _write_or_print(args.output, ideal.format())
    if args.output and args.output != "-":
        data = {
            "variables": len(ideal.variables),
            "vanishing": len(ideal.vanishing),
            "nonvanishing": len(ideal.nonvanishing),
        }
        _emit(args, [f"{k}={v}" for k, v in data.items()], data)
    return EXIT_OK


# --- parser -------------------------------------------------------------------

def _sub(subparsers, name: str, func, help: str, epilog: str = "") -> argparse.ArgumentParser:
    sp = subparsers.add_parser(
        name,
        help=help,
        description=help,
        epilog=epilog + "\n" + FORMATS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sp.add_argument("--json", action="store_true", help="print the report as a flat JSON object")
    sp.set_defaults(func=func)
    return sp


def _field_args(sp, required: bool = True) -> None:
    sp.add_argument("--p", type=int, required=required, help="field characteristic")
    sp.add_argument("--n", type=int, default=1, help="extension degree (default 1)")
    sp.add_argument("--modulus", help="comma-separated modulus coefficients, low degree first")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cusparr",
        description="Line arrangements with only triple points from the cuspidal cubic.",
        epilog="exit codes: 0 ok/positive, 1 negative answer, 2 usage or format error, "
        "3 audit found multiplicities outside {2,3}",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = _sub(sub, "build", cmd_build, "write an arrangement dual to cubic points",
              "constructions: char3 (p=3, all of K), char2 (p=2, K minus 0), "
              "generic (p>=5, all of K), ceva (9 Ceva(3) lines, q = 1 mod 3).\nexit: 0, or 2 on mismatch.")
    sp.add_argument("--construction", required=True, choices=["char3", "char2", "generic", "ceva"])
    _field_args(sp)
    sp.add_argument("-o", "--output", help="output file (default stdout)")

    sp = _sub(sub, "audit", cmd_audit, "count points where exactly k lines meet",
              "prints lines=, t[k]= ascending; constructions are recognized and their "
              "stated closed forms compared.\nexit: 0 if only double/triple points, 3 otherwise.")
    sp.add_argument("arrangement")
    sp.add_argument("--points", action="store_true", help="also list every intersection point")

    sp = _sub(sub, "configuration", cmd_configuration,
              "check every multiple point has multiplicity k and every line carries r of them",
              "exit: 0 if the configuration holds, 1 with violations listed.")
    sp.add_argument("arrangement")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--k", type=int, default=3)

    sp = _sub(sub, "dual-points", cmd_dual_points, "write the dual points of an arrangement")
    sp.add_argument("arrangement")
    sp.add_argument("-o", "--output")

    sp = _sub(sub, "cubic-fit", cmd_cubic_fit, "cubic forms through a point set",
              "prints dim and a basis; classifies each basis element when dim <= 2.")
    sp.add_argument("points")

    sp = _sub(sub, "matroid", lambda a: EXIT_ERROR, "triple-system operations")
    msub = sp.add_subparsers(dest="matroid_command", required=True)

    sp = _sub(msub, "extract", cmd_matroid_extract, "triples of concurrent lines of an arrangement")
    sp.add_argument("arrangement")
    sp.add_argument("-o", "--output")

    sp = _sub(msub, "make", cmd_matroid_make, "zero-sum systems M_q (p=3), N_q (p=2) or PG(n-1,2) lines")
    sp.add_argument("--kind", required=True, choices=["M", "N", "projection"])
    _field_args(sp, required=False)
    sp.add_argument("-o", "--output")

    sp = _sub(msub, "iso", cmd_matroid_iso, "search an isomorphism between two triple systems",
              "exit: 0 with the witness, 1 when the search is exhausted.")
    sp.add_argument("first")
    sp.add_argument("second")

    sp = _sub(msub, "aut", cmd_matroid_aut, "order of the automorphism group")
    sp.add_argument("system")
    sp.add_argument("--generators", action="store_true", help="list generators")

    sp = _sub(msub, "restrict", cmd_matroid_restrict, "restrict to a subset of labels",
              "--span P N B1,B2,... restricts to the F_p-span of the given encodings in GF(P^N).")
    sp.add_argument("system")
    sp.add_argument("--labels", help="comma-separated labels")
    sp.add_argument("--span", nargs=3, metavar=("P", "N", "BASIS"))
    sp.add_argument("--modulus")
    sp.add_argument("-o", "--output")

    sp = _sub(msub, "steiner", cmd_matroid_steiner, "is every pair in exactly one triple",
              "exit: 0 yes, 1 no.")
    sp.add_argument("system")

    sp = _sub(sub, "realize", cmd_realize, "decide realizability over GF(p^n)",
              f"exhaustive for ground <= {realize.MAX_EXHAUSTIVE_GROUND} and q <= "
              f"{realize.MAX_EXHAUSTIVE_Q}; beyond that --best-effort is required and a failed "
              "search reports status=unknown.\nexit: 0 realizable, 1 unrealizable/unknown, 2 error.")
    sp.add_argument("system")
    sp.add_argument("--field", nargs=2, type=int, required=True, metavar=("P", "N"))
    sp.add_argument("--modulus")
    sp.add_argument("--count-all", action="store_true", help="enumerate every frame-fixed witness")
    sp.add_argument("--best-effort", action="store_true")

    sp = _sub(sub, "export-ideal", cmd_export_ideal, "write the determinantal realization ideal",
              "sections '== vanishing ==' (one determinant per triple) and '== nonvanishing =='.")
    sp.add_argument("system")
    sp.add_argument("--normalize", action="store_true", help="substitute a frame")
    sp.add_argument("-o", "--output")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, OSError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
