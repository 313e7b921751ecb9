"""The projective plane over a finite field, and the cuspidal cubic in it.

The curve is x^3 - y^2 z = 0 with smooth points parametrized by
s -> (s : 1 : s^3).  Under this chart three distinct smooth points are
collinear exactly when their parameters sum to zero, the flex O = (0:1:0)
has parameter 0 and the cusp sits at (0:0:1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .gf import FieldCtx, FieldElem, FieldError, enumerate_field, parse_header


class GeometryError(ValueError):
    pass


def _normalize(ctx: FieldCtx, vals: Sequence[int]) -> tuple[int, int, int]:
    for v in vals:
        if v:
            s = ctx.inv_int(v)
            return tuple(ctx.mul_int(s, w) for w in vals)  # type: ignore[return-value]
    raise GeometryError("all three homogeneous coordinates are zero")


class _Triple:
    """Normalized homogeneous triple; first nonzero coordinate is 1."""

    __slots__ = ("ctx", "key")

    def __init__(self, ctx: FieldCtx, key: tuple[int, int, int]):
        # key must already be normalized; use from_coords/from_ints otherwise
        self.ctx = ctx
        self.key = key

    @classmethod
    def from_ints(cls, ctx: FieldCtx, vals: Sequence[int]):
        if len(vals) != 3:
            raise GeometryError("need exactly three coordinates")
        for v in vals:
            if not 0 <= v < ctx.q:
                raise FieldError(f"encoding {v} outside [0, {ctx.q})")
        return cls(ctx, _normalize(ctx, vals))

    @classmethod
    def from_coords(cls, coords: Sequence[FieldElem]):
        ctx = coords[0].ctx
        for c in coords[1:]:
            coords[0]._check(c)
        return cls(ctx, _normalize(ctx, [c.value for c in coords]))

    @property
    def coords(self) -> tuple[FieldElem, FieldElem, FieldElem]:
        return tuple(FieldElem(self.ctx, v) for v in self.key)  # type: ignore[return-value]

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.key == other.key and self.ctx == other.ctx

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return self.key < other.key

    def __str__(self):
        return "%d:%d:%d" % self.key

    def __repr__(self):
        return f"{type(self).__name__}({self})"

    @classmethod
    def parse(cls, ctx: FieldCtx, text: str):
        parts = text.strip().split(":")
        if len(parts) != 3:
            raise GeometryError(f"expected x:y:z, got {text!r}")
        try:
            vals = [int(v) for v in parts]
        except ValueError as exc:
            raise GeometryError(f"non-integer coordinate in {text!r}") from exc
        return cls.from_ints(ctx, vals)


class ProjPoint(_Triple):
    __slots__ = ()


class ProjLine(_Triple):
    __slots__ = ()

    def contains(self, pt: ProjPoint) -> bool:
        return incident(pt, self)


def point(ctx: FieldCtx, x: int, y: int, z: int) -> ProjPoint:
    return ProjPoint.from_ints(ctx, (x, y, z))


def line(ctx: FieldCtx, a: int, b: int, c: int) -> ProjLine:
    return ProjLine.from_ints(ctx, (a, b, c))


def _same_ctx(a: _Triple, b: _Triple) -> FieldCtx:
    if a.ctx is not b.ctx and a.ctx != b.ctx:
        raise FieldError("objects live over different fields")
    return a.ctx


def cross_ints(ctx: FieldCtx, u: Sequence[int], v: Sequence[int]) -> tuple[int, int, int]:
    m, s = ctx.mul_int, ctx.sub_int
    return (
        s(m(u[1], v[2]), m(u[2], v[1])),
        s(m(u[2], v[0]), m(u[0], v[2])),
        s(m(u[0], v[1]), m(u[1], v[0])),
    )


def dot_ints(ctx: FieldCtx, u: Sequence[int], v: Sequence[int]) -> int:
    m, a = ctx.mul_int, ctx.add_int
    return a(a(m(u[0], v[0]), m(u[1], v[1])), m(u[2], v[2]))


def incident(pt: ProjPoint, ln: ProjLine) -> bool:
    ctx = _same_ctx(pt, ln)
    return dot_ints(ctx, pt.key, ln.key) == 0


def meet(l1: ProjLine, l2: ProjLine) -> ProjPoint:
    """Common point of two distinct lines."""
    ctx = _same_ctx(l1, l2)
    if l1.key == l2.key:
        raise GeometryError(f"lines coincide: {l1}")
    return ProjPoint(ctx, _normalize(ctx, cross_ints(ctx, l1.key, l2.key)))


def join(p1: ProjPoint, p2: ProjPoint) -> ProjLine:
    """Line through two distinct points."""
    ctx = _same_ctx(p1, p2)
    if p1.key == p2.key:
        raise GeometryError(f"points coincide: {p1}")
    return ProjLine(ctx, _normalize(ctx, cross_ints(ctx, p1.key, p2.key)))


def dual_point(ln: ProjLine) -> ProjPoint:
    return ProjPoint(ln.ctx, ln.key)


def dual_line(pt: ProjPoint) -> ProjLine:
    return ProjLine(pt.ctx, pt.key)


def all_point_keys(ctx: FieldCtx) -> list[tuple[int, int, int]]:
    """Normalized triples of P^2(K) in lexicographic encoding order."""
    q = ctx.q
    keys = [(0, 0, 1)]
    keys += [(0, 1, z) for z in range(q)]
    keys += [(1, y, z) for y in range(q) for z in range(q)]
    return keys


def all_points(ctx: FieldCtx) -> list[ProjPoint]:
    return [ProjPoint(ctx, k) for k in all_point_keys(ctx)]


def det3(rows: Sequence[Sequence[FieldElem]]) -> FieldElem:
    (a, b, c), (d, e, f), (g, h, i) = rows
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


# --- points files -------------------------------------------------------------

def write_points(path, ctx: FieldCtx, points: Iterable[ProjPoint]) -> None:
    with open(path, "w") as fh:
        fh.write(ctx.header() + "\n")
        for pt in points:
            fh.write(f"{pt}\n")


def read_points(path) -> tuple[FieldCtx, list[ProjPoint]]:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise GeometryError(f"{path}: empty points file")
    try:
        ctx = parse_header(lines[0])
    except FieldError as exc:
        raise GeometryError(f"{path}:1: {exc}") from exc
    pts = []
    for lineno, text in enumerate(lines[1:], start=2):
        if not text.strip():
            continue
        try:
            pts.append(ProjPoint.parse(ctx, text))
        except (GeometryError, FieldError) as exc:
            raise GeometryError(f"{path}:{lineno}: {exc}") from exc
    return ctx, pts


# --- the cuspidal cubic -------------------------------------------------------

@dataclass(frozen=True)
class CuspCurve:
    """The curve x^3 - y^2 z = 0 over ctx."""

    ctx: FieldCtx

    @property
    def cusp(self) -> ProjPoint:
        return point(self.ctx, 0, 0, 1)

    @property
    def flex(self) -> ProjPoint:
        return point(self.ctx, 0, 1, 0)

    def contains(self, pt: ProjPoint) -> bool:
        x, y, z = pt.coords
        return (x * x * x - y * y * z).is_zero()

    def form(self) -> "CubicForm":
        coeffs = [0] * 10
        coeffs[MONOMIALS.index((3, 0, 0))] = 1
        coeffs[MONOMIALS.index((0, 2, 1))] = self.ctx.neg_int(1)
        return CubicForm(self.ctx, tuple(coeffs))


def cusp_point(ctx: FieldCtx, s: FieldElem) -> ProjPoint:
    """Smooth point of the cuspidal cubic with parameter s: (s : 1 : s^3)."""
    return ProjPoint.from_coords((s, ctx.one, s * s * s))


def collinear(ctx: FieldCtx, s1: FieldElem, s2: FieldElem, s3: FieldElem) -> bool:
    """Whether three distinct curve points are on a line (determinant test)."""
    if s1 == s2 or s1 == s3 or s2 == s3:
        raise GeometryError("collinear() needs three distinct parameters")
    rows = [(s, ctx.one, s * s * s) for s in (s1, s2, s3)]
    return det3(rows).is_zero()


def _poly_divmod(num: list[FieldElem], den: list[FieldElem]) -> tuple[list[FieldElem], list[FieldElem]]:
    """Long division of univariate polynomials (coefficients low degree first)."""
    num = list(num)
    zero = den[0].ctx.zero
    while den and den[-1].is_zero():
        den = den[:-1]
    lead_inv = den[-1].inv()
    quot = [zero] * max(len(num) - len(den) + 1, 1)
    for shift in range(len(num) - len(den), -1, -1):
        c = num[shift + len(den) - 1] * lead_inv
        quot[shift] = c
        for i, d in enumerate(den):
            num[shift + i] = num[shift + i] - c * d
    return quot, num[: len(den) - 1]


def _residual_on_line(ctx: FieldCtx, ln: ProjLine, known: Sequence[FieldElem]) -> FieldElem:
    """Third parameter where ln meets the curve, given two known roots.

    Restricting a x + b y + c z to (u : 1 : u^3) gives c u^3 + a u + b; the
    known roots (with multiplicity) are divided out, leaving a linear factor.
    """
    a, b, c = ln.coords
    if c.is_zero():
        raise GeometryError(f"line {ln} passes through the cusp")
    cubic = [b, a, ctx.zero, c]
    factor = [ctx.one]
    for r in known:
        factor = _mul_linear(factor, -r)
    quot, rem = _poly_divmod(cubic, factor)
    if any(not r.is_zero() for r in rem):
        raise GeometryError("known parameters are not on the line")  # pragma: no cover
    # quot = q0 + q1 u, root at -q0/q1
    return -quot[0] / quot[1]


def _mul_linear(poly: list[FieldElem], c: FieldElem) -> list[FieldElem]:
    """poly * (u + c)."""
    out = [c * poly[0]]
    for i in range(1, len(poly)):
        out.append(poly[i - 1] + c * poly[i])
    out.append(poly[-1])
    return out


def chord_third(ctx: FieldCtx, s1: FieldElem, s2: FieldElem) -> FieldElem:
    """Residual intersection of the chord through two distinct curve points."""
    if s1 == s2:
        raise GeometryError("chord_third() needs distinct parameters")
    ln = join(cusp_point(ctx, s1), cusp_point(ctx, s2))
    return _residual_on_line(ctx, ln, (s1, s2))


def tangent_line(ctx: FieldCtx, s: FieldElem) -> ProjLine:
    # gradient of x^3 - y^2 z is (3x^2, -2yz, -y^2)
    x, y, z = s, ctx.one, s * s * s
    return ProjLine.from_coords((ctx.scalar(3) * x * x, -(ctx.scalar(2) * y * z), -(y * y)))


def tangent_residual(ctx: FieldCtx, s: FieldElem) -> FieldElem:
    """Residual point of the tangent line at the curve point with parameter s."""
    return _residual_on_line(ctx, tangent_line(ctx, s), (s, s))


def group_add(ctx: FieldCtx, s1: FieldElem, s2: FieldElem) -> FieldElem:
    """Chord-tangent sum with O = parameter 0 as the neutral element."""
    r = chord_third(ctx, s1, s2) if s1 != s2 else tangent_residual(ctx, s1)
    if r.is_zero():
        return tangent_residual(ctx, r)
    return chord_third(ctx, r, ctx.zero)


# --- plane cubics -------------------------------------------------------------

MONOMIALS: tuple[tuple[int, int, int], ...] = (
    (3, 0, 0), (2, 1, 0), (2, 0, 1), (1, 2, 0), (1, 1, 1),
    (1, 0, 2), (0, 3, 0), (0, 2, 1), (0, 1, 2), (0, 0, 3),
)
"""Exponents of x, y, z; order x^3, x^2y, x^2z, xy^2, xyz, xz^2, y^3, y^2z, yz^2, z^3."""


def _monomial_name(e: tuple[int, ...], names: Sequence[str] = ("x", "y", "z")) -> str:
    parts = []
    for v, k in zip(names, e):
        if k == 1:
            parts.append(v)
        elif k > 1:
            parts.append(f"{v}^{k}")
    return "*".join(parts) or "1"


@dataclass(frozen=True)
class CubicForm:
    """Homogeneous cubic; coeffs are encodings indexed like MONOMIALS."""

    ctx: FieldCtx
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(MONOMIALS):
            raise GeometryError("a cubic form has 10 coefficients")

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def normalized(self) -> "CubicForm":
        for c in self.coeffs:
            if c:
                s = self.ctx.inv_int(c)
                return CubicForm(self.ctx, tuple(self.ctx.mul_int(s, v) for v in self.coeffs))
        return self

    def evaluate(self, pt: Sequence[int]) -> int:
        return _eval_terms(self.ctx, zip(self.coeffs, MONOMIALS), pt)

    def partials(self) -> list[list[tuple[int, tuple[int, int, int]]]]:
        """Formal partial derivatives as (coefficient, exponent) term lists."""
        ctx = self.ctx
        out = []
        for var in range(3):
            terms = []
            for c, e in zip(self.coeffs, MONOMIALS):
                if c and e[var]:
                    k = ctx.mul_int(ctx.scalar(e[var]).value, c)
                    if k:
                        d = list(e)
                        d[var] -= 1
                        terms.append((k, tuple(d)))
            out.append(terms)
        return out

    def __str__(self):
        terms = [
            f"{c}*{_monomial_name(e)}" if c != 1 else _monomial_name(e)
            for c, e in zip(self.coeffs, MONOMIALS)
            if c
        ]
        return " + ".join(terms) or "0"


def _eval_terms(ctx: FieldCtx, terms, pt: Sequence[int]) -> int:
    total = 0
    for c, e in terms:
        if c:
            v = c
            for coord, k in zip(pt, e):
                for _ in range(k):
                    v = ctx.mul_int(v, coord)
            total = ctx.add_int(total, v)
    return total


def _kernel(ctx: FieldCtx, rows: list[list[int]], ncols: int) -> list[list[int]]:
    """Basis of the right kernel of an integer-encoded matrix (exact RREF)."""
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        s = ctx.inv_int(m[r][col])
        m[r] = [ctx.mul_int(s, v) for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [ctx.sub_int(a, ctx.mul_int(f, b)) for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        vec = [0] * ncols
        vec[free] = 1
        for i, pc in enumerate(pivots):
            vec[pc] = ctx.neg_int(m[i][free])
        basis.append(vec)
    return basis


def cubics_through(points: Sequence[ProjPoint]) -> list[CubicForm]:
    """Basis of the space of cubic forms vanishing at every given point."""
    if not points:
        raise GeometryError("need at least one point")
    ctx = points[0].ctx
    rows = []
    for pt in points:
        _same_ctx(points[0], pt)
        rows.append([_eval_terms(ctx, [(1, e)], pt.key) for e in MONOMIALS])
    return [CubicForm(ctx, tuple(v)).normalized() for v in _kernel(ctx, rows, len(MONOMIALS))]


@dataclass(frozen=True)
class CubicClass:
    kind: str  # smooth | node | cusp | degenerate
    singular_points: tuple[ProjPoint, ...]
    detail: str = ""


def singular_points(f: CubicForm) -> list[ProjPoint]:
    """K-rational points where f and its three formal partials all vanish."""
    ctx = f.ctx
    partials = f.partials()
    out = []
    for key in all_point_keys(ctx):
        if f.evaluate(key):
            continue
        if all(_eval_terms(ctx, d, key) == 0 for d in partials):
            out.append(ProjPoint(ctx, key))
    return out


def _local_quadratic(f: CubicForm, pt: ProjPoint) -> tuple[int, int, int]:
    """Coefficients (alpha, beta, gamma) of the degree-2 part of f near pt.

    pt is moved to the origin of the affine chart where its first nonzero
    coordinate is 1; u, v are the offsets of the remaining two coordinates.
    """
    ctx = f.ctx
    key = pt.key
    pivot = next(i for i, v in enumerate(key) if v)
    others = [i for i in range(3) if i != pivot]
    # each coordinate as a polynomial in (u, v): dict (i, j) -> coeff
    var_polys = {pivot: {(0, 0): 1}}
    for slot, idx in enumerate(others):
        poly = {(1, 0) if slot == 0 else (0, 1): 1}
        if key[idx]:
            poly[(0, 0)] = key[idx]
        var_polys[idx] = poly

    def pmul(a, b):
        out: dict = {}
        for (i1, j1), c1 in a.items():
            for (i2, j2), c2 in b.items():
                k = (i1 + i2, j1 + j2)
                out[k] = ctx.add_int(out.get(k, 0), ctx.mul_int(c1, c2))
        return out

    total: dict = {}
    for c, e in zip(f.coeffs, MONOMIALS):
        if not c:
            continue
        term = {(0, 0): c}
        for idx in range(3):
            for _ in range(e[idx]):
                term = pmul(term, var_polys[idx])
        for k, v in term.items():
            total[k] = ctx.add_int(total.get(k, 0), v)
    for low in ((0, 0), (1, 0), (0, 1)):
        if total.get(low, 0):
            raise GeometryError(f"{pt} is not a singular point")  # pragma: no cover
    return total.get((2, 0), 0), total.get((1, 1), 0), total.get((0, 2), 0)


def _is_square_form(ctx: FieldCtx, a: int, b: int, c: int) -> bool:
    if ctx.p == 2:
        return b == 0
    disc = ctx.sub_int(ctx.mul_int(b, b), ctx.mul_int(ctx.scalar(4).value, ctx.mul_int(a, c)))
    return disc == 0


def classify_cubic(f: CubicForm) -> CubicClass:
    """Classify a plane cubic by its K-rational singular points.

    Exactly one singular point is classified through its tangent cone: a
    nonzero perfect square is a cusp, any other nonzero quadratic a node.
    Singularities over extension fields are not seen.
    """
    if f.is_zero():
        raise GeometryError("zero cubic form")
    sing = singular_points(f)
    if not sing:
        return CubicClass("smooth", (), "no K-rational singular point")
    if len(sing) > 1:
        return CubicClass("degenerate", tuple(sing), f"{len(sing)} singular points")
    a, b, c = _local_quadratic(f, sing[0])
    if not (a or b or c):
        return CubicClass("degenerate", tuple(sing), "point of multiplicity 3")
    if _is_square_form(f.ctx, a, b, c):
        return CubicClass("cusp", tuple(sing), "tangent cone is a double line")
    return CubicClass("node", tuple(sing), "tangent cone has rank 2")


def cubic_from_terms(ctx: FieldCtx, terms: dict[tuple[int, int, int], int]) -> CubicForm:
    """Build a cubic from {exponent: integer coefficient} (integers reduced mod p)."""
    coeffs = [0] * 10
    for e, c in terms.items():
        coeffs[MONOMIALS.index(tuple(e))] = ctx.scalar(c).value
    return CubicForm(ctx, tuple(coeffs))


def parameters(ctx: FieldCtx, nonzero: bool = False) -> list[FieldElem]:
    els = enumerate_field(ctx)
    return els[1:] if nonzero else els
