"""Line arrangements dual to points of the cuspidal cubic, and their audit."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

from .gf import FieldCtx, FieldError, enumerate_field, parse_header
from .projplane import (
    GeometryError,
    ProjLine,
    ProjPoint,
    all_point_keys,
    cross_ints,
    cusp_point,
    dot_ints,
    dual_line,
    dual_point,
    _normalize,
)


class ArrangementError(ValueError):
    pass


@dataclass(frozen=True)
class Arrangement:
    ctx: FieldCtx
    labels: tuple[int, ...]
    lines: tuple[ProjLine, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.lines):
            raise ArrangementError("labels and lines differ in length")
        if len(set(self.labels)) != len(self.labels):
            raise ArrangementError("duplicate labels")
        seen = {}
        for lab, ln in zip(self.labels, self.lines):
            if ln.ctx != self.ctx:
                raise ArrangementError(f"line {lab} lives over another field")
            if ln.key in seen:
                raise ArrangementError(f"lines {seen[ln.key]} and {lab} coincide: {ln}")
            seen[ln.key] = lab

    def __len__(self):
        return len(self.lines)

    def line_of(self, label: int) -> ProjLine:
        return self.lines[self.labels.index(label)]

    def items(self):
        return zip(self.labels, self.lines)


def _dual_of_params(ctx: FieldCtx, params) -> Arrangement:
    labels = tuple(s.value for s in params)
    lines = tuple(dual_line(cusp_point(ctx, s)) for s in params)
    return Arrangement(ctx, labels, lines)


def build_char3(ctx: FieldCtx) -> Arrangement:
    """q lines s x + y + s^3 z = 0, one per s in K (characteristic 3)."""
    if ctx.p != 3:
        raise ArrangementError(f"build_char3 needs characteristic 3, got {ctx.p}")
    return _dual_of_params(ctx, enumerate_field(ctx))


def build_char2(ctx: FieldCtx) -> Arrangement:
    """q - 1 lines dual to the curve points with nonzero parameter (characteristic 2)."""
    if ctx.p != 2:
        raise ArrangementError(f"build_char2 needs characteristic 2, got {ctx.p}")
    if ctx.n < 2:
        raise ArrangementError("build_char2 needs q >= 4")
    return _dual_of_params(ctx, enumerate_field(ctx)[1:])


def build_generic(ctx: FieldCtx) -> Arrangement:
    if ctx.p < 5:
        raise ArrangementError(f"build_generic needs characteristic >= 5, got {ctx.p}")
    return _dual_of_params(ctx, enumerate_field(ctx))


def build_ceva(ctx: FieldCtx) -> Arrangement:
    """The nine lines of (x^3 - y^3)(x^3 - z^3)(z^3 - y^3) = 0.

    Needs the three cube roots of unity in K, i.e. q = 1 mod 3.  Labels run
    0..8 in the order x - w y, x - w z, z - w y for w = 1, w1, w2.
    """
    if ctx.q % 3 != 1:
        raise ArrangementError("Ceva(3) needs cube roots of unity (q = 1 mod 3)")
    roots = [v for v in range(1, ctx.q) if ctx.pow_int(v, 3) == 1]
    lines = []
    for i, j in ((0, 1), (0, 2), (2, 1)):
        for w in roots:
            coeffs = [0, 0, 0]
            coeffs[i] = 1
            coeffs[j] = ctx.neg_int(w)
            lines.append(ProjLine.from_ints(ctx, coeffs))
    return Arrangement(ctx, tuple(range(9)), tuple(lines))


def build_pencil_complement(ctx: FieldCtx, center: ProjPoint) -> Arrangement:
    """All lines of P^2(K) that avoid the point center, labeled 0.. in order."""
    lines = tuple(
        ProjLine(ctx, k) for k in all_point_keys(ctx) if dot_ints(ctx, k, center.key) != 0
    )
    return Arrangement(ctx, tuple(range(len(lines))), lines)


def dual_points(a: Arrangement) -> list[ProjPoint]:
    return [dual_point(ln) for ln in a.lines]


# --- audit ------------------------------------------------------------------

@dataclass(frozen=True)
class SingularitySpectrum:
    n_lines: int
    counts: dict[int, int]
    points: tuple[tuple[ProjPoint, frozenset[int]], ...] = field(repr=False)

    def t(self, k: int) -> int:
        return self.counts.get(k, 0)

    @property
    def max_multiplicity(self) -> int:
        return max(self.counts, default=0)

    def only_double_and_triple(self) -> bool:
        return all(k in (2, 3) for k, v in self.counts.items() if v)

    def report_lines(self, with_points: bool = False) -> list[str]:
        out = [f"lines={self.n_lines}"]
        for k in range(2, max(3, self.max_multiplicity) + 1):
            out.append(f"t[{k}]={self.t(k)}")
        if with_points:
            for pt, labs in self.points:
                out.append(f"{pt} -> {{{','.join(map(str, sorted(labs)))}}}")
        return out

    def as_dict(self) -> dict[str, int]:
        d = {"lines": self.n_lines}
        for k in range(2, max(3, self.max_multiplicity) + 1):
            d[f"t[{k}]"] = self.t(k)
        return d


def audit(a: Arrangement) -> SingularitySpectrum:
    """Intersect every pair of lines and bucket the meets by normalized point."""
    if len(a) < 2:
        raise ArrangementError("audit needs at least two lines")
    ctx = a.ctx
    buckets: dict[tuple[int, int, int], set[int]] = {}
    keys = [ln.key for ln in a.lines]
    for (i, u), (j, v) in combinations(enumerate(keys), 2):
        pt = _normalize(ctx, cross_ints(ctx, u, v))
        labs = buckets.setdefault(pt, set())
        labs.add(a.labels[i])
        labs.add(a.labels[j])

    counts = Counter(len(labs) for labs in buckets.values())
    if sum(comb(k, 2) * t for k, t in counts.items()) != comb(len(a), 2):
        raise AssertionError("pair count identity violated")
    for pt, labs in buckets.items():
        on = {lab for lab, k in zip(a.labels, keys) if dot_ints(ctx, pt, k) == 0}
        if on != labs:
            raise AssertionError(f"incidence mismatch at {pt}")

    points = tuple(
        (ProjPoint(ctx, pt), frozenset(labs)) for pt, labs in sorted(buckets.items())
    )
    return SingularitySpectrum(len(a), dict(sorted(counts.items())), points)


@dataclass
class ConfigurationReport:
    ok: bool
    violations: list[str]


def check_configuration(a: Arrangement, spec: SingularitySpectrum, r: int, k: int) -> ConfigurationReport:
    """Check the dual (n_r, b_k) configuration.

    Every multiple point must have multiplicity exactly k, and every line
    must carry exactly r points of multiplicity k.
    """
    violations = []
    per_line = Counter()
    for pt, labs in spec.points:
        if len(labs) != k:
            violations.append(f"point {pt} has multiplicity {len(labs)}, expected {k}")
        else:
            per_line.update(labs)
    for lab in a.labels:
        if per_line[lab] != r:
            violations.append(f"line {lab} carries {per_line[lab]} points of multiplicity {k}, expected {r}")
    return ConfigurationReport(not violations, violations)


# closed-form counts stated for each construction, as (expression, value)
def stated_counts(kind: str, q: int) -> dict[int, tuple[str, Fraction]]:
    if kind == "char3":
        return {3: ("q(q-1)/6", Fraction(q * (q - 1), 6)), 2: ("0", Fraction(0))}
    if kind == "char2":
        return {3: ("(q-1)(q-2)/6", Fraction((q - 1) * (q - 2), 6)), 2: ("0", Fraction(0))}
    if kind == "generic":
        return {3: ("q(q-3)/6", Fraction(q * (q - 3), 6)), 2: ("q", Fraction(q))}
    raise ArrangementError(f"unknown construction {kind!r}")


def brute_force_counts(ctx: FieldCtx, params: Sequence[int]) -> dict[int, int]:
    """Count 2- and 3-rich lines through the curve points with the given
    parameters by testing every triple with the zero-sum rule."""
    ps = sorted(params)
    pset = set(ps)
    three = 0
    two = 0
    for a, b in combinations(ps, 2):
        c = ctx.neg_int(ctx.add_int(a, b))
        if c in pset and c != a and c != b:
            if b < c:
                three += 1
        else:
            two += 1
    return {2: two, 3: three}


def compare_stated(kind: str, q: int, spec: SingularitySpectrum) -> list[str]:
    """Lines flagging where measured t_k differs from the stated closed form."""
    notes = []
    for k, (expr, val) in sorted(stated_counts(kind, q).items()):
        measured = spec.t(k)
        if val != measured:
            shown = str(val) if val.denominator == 1 else f"{val} (not an integer)"
            notes.append(f"mismatch t[{k}]: measured {measured}, stated {expr} = {shown}")
    return notes


# --- files --------------------------------------------------------------------

def write_arrangement(path, a: Arrangement) -> None:
    with open(path, "w") as fh:
        fh.write(format_arrangement(a))


def format_arrangement(a: Arrangement) -> str:
    rows = [a.ctx.header()]
    rows += [f"{lab} {ln}" for lab, ln in a.items()]
    return "\n".join(rows) + "\n"


def read_arrangement(path) -> Arrangement:
    with open(path) as fh:
        return parse_arrangement(fh.read(), str(path))


def parse_arrangement(text: str, name: str = "<string>") -> Arrangement:
    rows = text.splitlines()
    if not rows:
        raise ArrangementError(f"{name}: empty file")
    try:
        ctx = parse_header(rows[0])
    except FieldError as exc:
        raise ArrangementError(f"{name}:1: {exc}") from exc
    labels, lines, seen = [], [], {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row.strip():
            continue
        parts = row.split()
        if len(parts) != 2:
            raise ArrangementError(f"{name}:{lineno}: expected '<label> a:b:c'")
        try:
            lab = int(parts[0])
            raw = [int(v) for v in parts[1].split(":")]
        except ValueError as exc:
            raise ArrangementError(f"{name}:{lineno}: {exc}") from exc
        try:
            ln = ProjLine.from_ints(ctx, raw)
        except (GeometryError, FieldError) as exc:
            raise ArrangementError(f"{name}:{lineno}: {exc}") from exc
        if list(ln.key) != raw:
            raise ArrangementError(f"{name}:{lineno}: line {parts[1]} is not normalized")
        if lab in labels:
            raise ArrangementError(f"{name}:{lineno}: duplicate label {lab}")
        if ln.key in seen:
            raise ArrangementError(f"{name}:{lineno}: duplicate line (same as label {seen[ln.key]})")
        seen[ln.key] = lab
        labels.append(lab)
        lines.append(ln)
    return Arrangement(ctx, tuple(labels), tuple(lines))


def construction_params(kind: str, ctx: FieldCtx) -> list[int]:
    if kind == "char2":
        return list(range(1, ctx.q))
    return list(range(ctx.q))


BUILDERS = {"char3": build_char3, "char2": build_char2, "generic": build_generic}


def build(kind: str, ctx: FieldCtx) -> Arrangement:
    if kind == "ceva":
        return build_ceva(ctx)
    try:
        return BUILDERS[kind](ctx)
    except KeyError:
        raise ArrangementError(f"unknown construction {kind!r}") from None
