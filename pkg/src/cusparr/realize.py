"""Realizability of rank-3 collinearity matroids over small finite fields.

A realization assigns to every label the dual point of its line; triples must
be collinear, every other 3-subset must not be, and all points are distinct.
Four labels in general position are pinned to the standard frame, which
removes the PGL_3 action.  After that each placement shrinks the candidate
sets (bitmasks over P^2(K)) of the remaining labels, singletons are placed
immediately, and the search branches only when nothing is forced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .gf import FieldCtx
from .projplane import ProjPoint, _normalize, all_point_keys, cross_ints, det3, dot_ints
from .triples import TripleSystem

FRAME_KEYS = ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1))
MAX_EXHAUSTIVE_GROUND = 31
MAX_EXHAUSTIVE_Q = 27


class RealizeError(ValueError):
    pass


@dataclass(frozen=True)
class RealizationProblem:
    ts: TripleSystem
    ctx: FieldCtx

    def __post_init__(self):
        if len(self.ts.ground) < 3:
            raise RealizeError("a realization problem needs at least 3 labels")

    @property
    def in_exhaustive_scope(self) -> bool:
        return len(self.ts.ground) <= MAX_EXHAUSTIVE_GROUND and self.ctx.q <= MAX_EXHAUSTIVE_Q


@dataclass
class RealizationResult:
    status: str  # realizable | unrealizable
    witnesses: list[dict[int, ProjPoint]]
    frame: tuple[int, ...]
    normalization: str
    nodes: int = 0
    forced: int = 0

    @property
    def realizable(self) -> bool:
        return self.status == "realizable"

    def report_lines(self) -> list[str]:
        out = [
            f"status={self.status}",
            f"frame={','.join(map(str, self.frame))}",
            f"normalization={self.normalization}",
            f"witnesses={len(self.witnesses)}",
            f"nodes={self.nodes}",
            f"forced={self.forced}",
        ]
        if self.witnesses:
            w = self.witnesses[0]
            out += [f"{lab} {pt}" for lab, pt in w.items()]
        return out


def find_frame(ts: TripleSystem) -> tuple[int, int, int, int] | None:
    """Lexicographically first 4 labels with no 3 of them forming a triple."""
    trip = ts.triples
    for quad in combinations(sorted(ts.ground), 4):
        if not any(t in trip for t in combinations(quad, 3)):
            return quad  # type: ignore[return-value]
    return None


class _Plane:
    """Integer-indexed P^2(K): points and lines share the key list."""

    _cache: dict[FieldCtx, "_Plane"] = {}

    def __init__(self, ctx: FieldCtx):
        self.ctx = ctx
        self.keys = all_point_keys(ctx)
        self.index = {k: i for i, k in enumerate(self.keys)}
        self.masks = self._line_masks()
        self._join: dict[int, int] = {}

    @classmethod
    def of(cls, ctx: FieldCtx) -> "_Plane":
        plane = cls._cache.get(ctx)
        if plane is None:
            plane = cls._cache[ctx] = cls(ctx)
        return plane

    def _line_masks(self) -> list[int]:
        ctx, keys = self.ctx, self.keys
        if ctx.mul_table is None:
            return [
                sum(1 << i for i, p in enumerate(keys) if dot_ints(ctx, p, ln) == 0)
                for ln in keys
            ]
        q = ctx.q
        mul = np.array(ctx.mul_table, dtype=np.int64).reshape(q, q)
        add = np.array(ctx.add_table, dtype=np.int64).reshape(q, q)
        pts = np.array(keys, dtype=np.int64)
        X, Y, Z = pts[:, 0], pts[:, 1], pts[:, 2]
        masks = []
        for a, b, c in keys:
            vals = add[add[mul[a, X], mul[b, Y]], mul[c, Z]]
            masks.append(sum(1 << int(i) for i in np.flatnonzero(vals == 0)))
        return masks

    def join(self, i: int, j: int) -> int:
        k = i * len(self.keys) + j
        ln = self._join.get(k)
        if ln is None:
            ctx = self.ctx
            ln = self.index[_normalize(ctx, cross_ints(ctx, self.keys[i], self.keys[j]))]
            self._join[k] = ln
            self._join[j * len(self.keys) + i] = ln
        return ln


class _Solver:
    def __init__(self, ts: TripleSystem, ctx: FieldCtx, count_all: bool):
        self.ts, self.ctx, self.count_all = ts, ctx, count_all
        self.plane = _Plane.of(ctx)
        self.labels = list(ts.ground)
        n = self.n = len(self.labels)
        idx = {x: i for i, x in enumerate(self.labels)}
        self.thirds = [[frozenset()] * n for _ in range(n)]
        self.tri_of = [[] for _ in range(n)]
        for t in ts.triples:
            a, b, c = (idx[x] for x in t)
            for u, v, w in ((a, b, c), (a, c, b), (b, c, a)):
                self.thirds[u][v] = self.thirds[u][v] | {w}
                self.thirds[v][u] = self.thirds[u][v]
            for x in (a, b, c):
                self.tri_of[x].append((a, b, c))
        self.witnesses: list[list[int]] = []
        self.nodes = 0
        self.forced = 0

    # state = (pos, dom); both plain lists, copied per node
    def place(self, pos: list[int], dom: list[int], x: int, P: int) -> bool:
        """Put label x at point P and propagate forced placements."""
        queue = [(x, P)]
        masks, join = self.plane.masks, self.plane.join
        while queue:
            x, P = queue.pop()
            if pos[x] >= 0:
                if pos[x] != P:
                    return False
                continue
            if not (dom[x] >> P) & 1:
                return False
            pos[x] = P
            dom[x] = 1 << P
            bit = ~(1 << P)
            placed = [(u, masks[join(P, pos[u])]) for u in range(self.n) if pos[u] >= 0 and u != x]
            thirds_x = self.thirds[x]
            for c in range(self.n):
                if pos[c] >= 0:
                    continue
                d = dom[c] & bit
                for u, m in placed:
                    if c in thirds_x[u]:
                        d &= m
                    else:
                        d &= ~m
                if not d:
                    return False
                dom[c] = d
                if d & (d - 1) == 0:
                    queue.append((c, d.bit_length() - 1))
                    self.forced += 1
        return True

    def choose(self, pos: list[int]) -> int:
        best, best_score = -1, -1
        for c in range(self.n):
            if pos[c] >= 0:
                continue
            score = sum(
                1 for t in self.tri_of[c] if sum(pos[v] >= 0 for v in t if v != c) == 2
            )
            if score > best_score:
                best, best_score = c, score
        return best

    def search(self, pos: list[int], dom: list[int]) -> bool:
        """Depth-first search; True means stop (first witness found)."""
        if all(p >= 0 for p in pos):
            self.witnesses.append(list(pos))
            return not self.count_all
        c = self.choose(pos)
        d = dom[c]
        while d:
            low = d & -d
            P = low.bit_length() - 1
            d ^= low
            self.nodes += 1
            p2, d2 = list(pos), list(dom)
            if self.place(p2, d2, c, P) and self.search(p2, d2):
                return True
        return False


def realize_over(problem: RealizationProblem, count_all: bool = False) -> RealizationResult:
    """Search realizations of problem.ts over problem.ctx with a pinned frame.

    Without a 4-label frame, the first 3 labels that are not a triple go to
    the coordinate points; if every 3-subset is a triple, two labels go to
    (1:0:0) and (0:1:0).
    """
    ts, ctx = problem.ts, problem.ctx
    solver = _Solver(ts, ctx, count_all)
    plane = solver.plane
    idx = {x: i for i, x in enumerate(solver.labels)}
    frame = find_frame(ts)
    if frame is not None:
        pinned = frame
        normalization = "frame"
    else:
        trio = next(
            (c for c in combinations(sorted(ts.ground), 3) if c not in ts.triples), None
        )
        if trio is not None:
            pinned = trio
            normalization = "three-points"
        else:
            pinned = tuple(sorted(ts.ground)[:2])
            normalization = "two-points"

    full = (1 << len(plane.keys)) - 1
    pos = [-1] * solver.n
    dom = [full] * solver.n
    ok = True
    for lab, key in zip(pinned, FRAME_KEYS):
        if not solver.place(pos, dom, idx[lab], plane.index[key]):
            ok = False
            break
    if ok:
        solver.search(pos, dom)

    witnesses = [
        {lab: ProjPoint(ctx, plane.keys[w[i]]) for i, lab in enumerate(solver.labels)}
        for w in solver.witnesses
    ]
    for w in witnesses:
        if not check_realization(ts, w):
            raise AssertionError("solver produced an invalid realization")  # pragma: no cover
    status = "realizable" if witnesses else "unrealizable"
    return RealizationResult(status, witnesses, tuple(pinned), normalization, solver.nodes, solver.forced)


def check_realization(ts: TripleSystem, points: dict[int, ProjPoint]) -> bool:
    """Independent re-check of every 3-subset with field determinants."""
    labels = sorted(ts.ground)
    if set(points) != set(labels):
        return False
    if len({points[x].key for x in labels}) != len(labels):
        return False
    for t in combinations(labels, 3):
        rows = [points[x].coords for x in t]
        if det3(rows).is_zero() != (t in ts.triples):
            return False
    return True


# --- realization ideal --------------------------------------------------------

_PERMS = (((0, 1, 2), 1), ((0, 2, 1), -1), ((1, 0, 2), -1),
          ((1, 2, 0), 1), ((2, 0, 1), 1), ((2, 1, 0), -1))


def _det_poly(rows: Sequence[Sequence[object]]) -> dict[tuple[str, ...], int]:
    """Leibniz expansion; entries are variable names or integer constants."""
    poly: dict[tuple[str, ...], int] = {}
    for perm, sign in _PERMS:
        coef = sign
        mono: list[str] = []
        for r, col in enumerate(perm):
            e = rows[r][col]
            if isinstance(e, str):
                mono.append(e)
            else:
                coef *= e
        if coef:
            key = tuple(mono)
            poly[key] = poly.get(key, 0) + coef
    return {k: v for k, v in poly.items() if v}


def _format_poly(poly: dict[tuple[str, ...], int]) -> str:
    out = []
    for mono, coef in poly.items():
        body = "*".join(mono)
        mag = abs(coef)
        if not body:
            body = str(mag)
        elif mag != 1:
            body = f"{mag}*{body}"
        if not out:
            out.append(body if coef > 0 else f"-{body}")
        else:
            out.append(f"{'+' if coef > 0 else '-'} {body}")
    return " ".join(out)


@dataclass
class RealizationIdeal:
    variables: list[str]
    vanishing: list[dict[tuple[str, ...], int]]
    nonvanishing: list[dict[tuple[str, ...], int]]
    frame: tuple[int, ...] = ()
    dropped_units: int = field(default=0)

    def format(self) -> str:
        rows = [f"ring vars={','.join(self.variables)}"]
        if self.frame:
            rows.append(f"# frame labels {','.join(map(str, self.frame))} fixed to the standard frame")
        rows.append("== vanishing ==")
        rows += [_format_poly(p) for p in self.vanishing]
        rows.append("== nonvanishing ==")
        rows += [_format_poly(p) for p in self.nonvanishing]
        return "\n".join(rows) + "\n"


def export_ideal(ts: TripleSystem, normalize: bool = False) -> RealizationIdeal:
    """Determinantal equations of the realization space.

    One determinant per triple must vanish; one per other 3-subset must not
    (to be saturated by the receiving system).  With normalize, a frame is
    substituted and non-vanishing constants are dropped.
    """
    labels = list(ts.ground)
    frame: tuple[int, ...] = ()
    if normalize:
        frame = find_frame(ts) or ()
    fixed = dict(zip(frame, FRAME_KEYS))
    rows = {}
    variables = []
    for lab in labels:
        if lab in fixed:
            rows[lab] = fixed[lab]
        else:
            names = (f"x{lab}", f"y{lab}", f"z{lab}")
            rows[lab] = names
            variables.extend(names)
    vanishing, nonvanishing = [], []
    dropped = 0
    for t in combinations(labels, 3):
        poly = _det_poly([rows[x] for x in t])
        key = tuple(sorted(t))
        if key in ts.triples:
            vanishing.append(poly)
        elif any(poly):
            nonvanishing.append(poly)
        else:
            dropped += 1
    return RealizationIdeal(variables, vanishing, nonvanishing, frame, dropped)
