"""Triple systems: the concurrency matroids of line arrangements.

Isomorphism and automorphism search share one backtracking engine.  Once
the images of a and b are fixed and {a, b, c} is the only triple on that
pair, the image of c is forced to the third point of the image pair.  The
order in which labels get branched on or derived only depends on the source
system, so it is compiled once into a plan of levels and replayed for every
candidate image.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .arrange import Arrangement, SingularitySpectrum
from .gf import FieldCtx


class TripleSystemError(ValueError):
    pass


def _sorted3(a, b, c) -> tuple[int, int, int]:
    return tuple(sorted((a, b, c)))  # type: ignore[return-value]


@dataclass(frozen=True)
class TripleSystem:
    ground: tuple[int, ...]
    triples: frozenset[tuple[int, int, int]]

    def __post_init__(self):
        if len(set(self.ground)) != len(self.ground):
            raise TripleSystemError("duplicate labels in ground set")
        g = set(self.ground)
        for t in self.triples:
            if len(set(t)) != 3 or tuple(sorted(t)) != t:
                raise TripleSystemError(f"malformed triple {t}")
            if not g.issuperset(t):
                raise TripleSystemError(f"triple {t} uses labels outside the ground set")

    @classmethod
    def of(cls, ground: Iterable[int], triples: Iterable[Iterable[int]]) -> "TripleSystem":
        return cls(tuple(ground), frozenset(_sorted3(*t) for t in triples))

    def __len__(self):
        return len(self.triples)

    def sorted_triples(self) -> list[tuple[int, int, int]]:
        return sorted(self.triples)

    def degrees(self) -> Counter:
        deg = Counter({x: 0 for x in self.ground})
        for t in self.triples:
            deg.update(t)
        return deg

    def thirds(self) -> dict[frozenset, list[int]]:
        out: dict[frozenset, list[int]] = {}
        for a, b, c in self.triples:
            out.setdefault(frozenset((a, b)), []).append(c)
            out.setdefault(frozenset((a, c)), []).append(b)
            out.setdefault(frozenset((b, c)), []).append(a)
        return out

    def relabel(self, mapping: dict[int, int]) -> "TripleSystem":
        return TripleSystem.of(
            (mapping[x] for x in self.ground),
            ((mapping[a], mapping[b], mapping[c]) for a, b, c in self.triples),
        )

    def format(self) -> str:
        rows = ["ground " + " ".join(map(str, self.ground))]
        rows += ["%d %d %d" % t for t in self.sorted_triples()]
        return "\n".join(rows) + "\n"


# --- constructions ------------------------------------------------------------

def from_arrangement(a: Arrangement, spec: SingularitySpectrum) -> TripleSystem:
    """All label triples through points of multiplicity >= 3."""
    triples = []
    for _, labs in spec.points:
        if len(labs) >= 3:
            triples.extend(combinations(sorted(labs), 3))
    return TripleSystem.of(a.labels, triples)


def make_Mq(ctx: FieldCtx) -> TripleSystem:
    """Zero-sum 3-subsets of K in characteristic 3."""
    if ctx.p != 3:
        raise TripleSystemError(f"make_Mq needs characteristic 3, got {ctx.p}")
    triples = []
    for a, b in combinations(range(ctx.q), 2):
        c = ctx.neg_int(ctx.add_int(a, b))
        if c > b:
            triples.append((a, b, c))
    return TripleSystem.of(range(ctx.q), triples)


def make_Nq(ctx: FieldCtx) -> TripleSystem:
    """Triples {a, b, a + b} of nonzero elements in characteristic 2."""
    if ctx.p != 2:
        raise TripleSystemError(f"make_Nq needs characteristic 2, got {ctx.p}")
    if ctx.q < 4:
        raise TripleSystemError("make_Nq needs q >= 4")
    triples = []
    for a, b in combinations(range(1, ctx.q), 2):
        c = ctx.add_int(a, b)
        if c > b:
            triples.append((a, b, c))
    return TripleSystem.of(range(1, ctx.q), triples)


def make_projection_matroid(n: int) -> TripleSystem:
    """Lines of PG(n-1, 2): triples {u, v, u xor v} of nonzero bit vectors."""
    if n < 2:
        raise TripleSystemError("need n >= 2")
    top = 1 << n
    triples = [(u, v, u ^ v) for u, v in combinations(range(1, top), 2) if (u ^ v) > v]
    return TripleSystem.of(range(1, top), triples)


def is_steiner(ts: TripleSystem) -> bool:
    """Every pair of ground labels lies in exactly one triple."""
    cover = Counter()
    for a, b, c in ts.triples:
        cover.update((frozenset((a, b)), frozenset((a, c)), frozenset((b, c))))
    n = len(ts.ground)
    return len(cover) == n * (n - 1) // 2 and all(v == 1 for v in cover.values())


def restrict(ts: TripleSystem, subset: Iterable[int]) -> TripleSystem:
    keep = list(dict.fromkeys(subset))
    bad = set(keep) - set(ts.ground)
    if bad:
        raise TripleSystemError(f"labels outside the ground set: {sorted(bad)}")
    order = {x: i for i, x in enumerate(ts.ground)}
    keep.sort(key=order.__getitem__)
    ks = set(keep)
    return TripleSystem(tuple(keep), frozenset(t for t in ts.triples if ks.issuperset(t)))


# --- search engine ------------------------------------------------------------

@dataclass(frozen=True)
class IsoWitness:
    mapping: dict[int, int]

    def inverse(self) -> "IsoWitness":
        return IsoWitness({v: k for k, v in self.mapping.items()})

    def format(self) -> str:
        return "\n".join(f"{k} -> {v}" for k, v in self.mapping.items())


def verify_witness(ts1: TripleSystem, ts2: TripleSystem, mapping: dict[int, int]) -> bool:
    """Independent check: a bijection sending triples onto triples."""
    if set(mapping) != set(ts1.ground) or set(mapping.values()) != set(ts2.ground):
        return False
    if len(set(mapping.values())) != len(mapping) or len(ts1) != len(ts2):
        return False
    return ts1.relabel(mapping).triples == ts2.triples


_NONE, _MANY = -1, -2


def _third_table(ts: TripleSystem) -> list[int]:
    n = len(ts.ground)
    idx = {x: i for i, x in enumerate(ts.ground)}
    table = [_NONE] * (n * n)
    for t in ts.triples:
        a, b, c = (idx[x] for x in t)
        for u, v, w in ((a, b, c), (a, c, b), (b, c, a)):
            for k in (u * n + v, v * n + u):
                table[k] = w if table[k] == _NONE else _MANY
    return table


def _compile_plan(ts: TripleSystem):
    """Levels of (branch index, derivations, triple checks) in source indices."""
    n = len(ts.ground)
    idx = {x: i for i, x in enumerate(ts.ground)}
    third = _third_table(ts)
    tri_idx = [tuple(idx[x] for x in t) for t in ts.sorted_triples()]
    by_label: dict[int, list[tuple[int, int, int]]] = {i: [] for i in range(n)}
    for t in tri_idx:
        for x in t:
            by_label[x].append(t)

    assigned: list[int] = []
    is_assigned = [False] * n
    covered: set[tuple[int, int, int]] = set()
    levels = []
    while len(assigned) < n:
        branch = next(i for i in range(n) if not is_assigned[i])
        derivs: list[tuple[int, int, int]] = []
        checks: list[tuple[int, int, int]] = []
        queue = [branch]
        is_assigned[branch] = True
        assigned.append(branch)
        while queue:
            x = queue.pop(0)
            for u in assigned:
                if u == x:
                    continue
                c = third[x * n + u]
                if c >= 0 and not is_assigned[c]:
                    derivs.append((c, x, u))
                    covered.add(tuple(sorted((x, u, c))))
                    is_assigned[c] = True
                    assigned.append(c)
                    queue.append(c)
        new = set(assigned[len(assigned) - 1 - len(derivs):])
        for t in sorted({t for x in new for t in by_label[x]}):
            if t not in covered and all(is_assigned[x] for x in t):
                checks.append(t)
                covered.add(t)
        levels.append((branch, derivs, checks))
    return levels


class _Search:
    def __init__(self, ts1: TripleSystem, ts2: TripleSystem):
        self.ts1, self.ts2 = ts1, ts2
        self.n = n = len(ts1.ground)
        self.levels = _compile_plan(ts1)
        self.third2 = _third_table(ts2)
        idx2 = {x: i for i, x in enumerate(ts2.ground)}
        self.triples2 = {tuple(sorted(idx2[x] for x in t)) for t in ts2.triples}
        deg1, deg2 = ts1.degrees(), ts2.degrees()
        d1 = [deg1[x] for x in ts1.ground]
        d2 = [deg2[x] for x in ts2.ground]
        self.candidates = [[j for j in range(n) if d2[j] == d1[i]] for i in range(n)]
        self.f = [-1] * n
        self.used = [False] * n
        self.nodes = 0

    def run(self, level: int = 0) -> Iterator[list[int]]:
        if level == len(self.levels):
            yield self.f
            return
        branch, derivs, checks = self.levels[level]
        f, used, third2, n = self.f, self.used, self.third2, self.n
        for y in self.candidates[branch]:
            if used[y]:
                continue
            self.nodes += 1
            f[branch] = y
            used[y] = True
            done = [y]
            ok = True
            for c, a, b in derivs:
                d = third2[f[a] * n + f[b]]
                if d < 0 or used[d]:
                    ok = False
                    break
                f[c] = d
                used[d] = True
                done.append(d)
            if ok:
                for a, b, c in checks:
                    fc = f[c]
                    d = third2[f[a] * n + f[b]]
                    if d != fc and (d != _MANY or tuple(sorted((f[a], f[b], fc))) not in self.triples2):
                        ok = False
                        break
            if ok:
                yield from self.run(level + 1)
            for d in done:
                used[d] = False
            for c, _, _ in derivs:
                f[c] = -1
            f[branch] = -1

    def mapping(self, f: Sequence[int]) -> dict[int, int]:
        g2 = self.ts2.ground
        return {x: g2[f[i]] for i, x in enumerate(self.ts1.ground)}


def _compatible(ts1: TripleSystem, ts2: TripleSystem) -> bool:
    return (
        len(ts1.ground) == len(ts2.ground)
        and len(ts1) == len(ts2)
        and sorted(ts1.degrees().values()) == sorted(ts2.degrees().values())
    )


def isomorphic(ts1: TripleSystem, ts2: TripleSystem) -> IsoWitness | None:
    """A verified label bijection carrying ts1 onto ts2, or None when none exists."""
    if not _compatible(ts1, ts2):
        return None
    if not ts1.ground:
        return IsoWitness({})
    search = _Search(ts1, ts2)
    for f in search.run():
        mapping = search.mapping(f)
        if not verify_witness(ts1, ts2, mapping):
            raise AssertionError("search produced an invalid witness")  # pragma: no cover
        return IsoWitness(mapping)
    return None


@dataclass(frozen=True)
class AutomorphismGroup:
    order: int
    generators: tuple[dict[int, int], ...]
    nodes: int


def automorphism_order(ts: TripleSystem) -> AutomorphismGroup:
    """Count every automorphism; generators come from the search transversals.

    A leaf whose first non-fixed branch label is level i, with all earlier
    branch labels fixed, represents one coset of the stabilizer chain; the
    first such leaf per (level, image) is kept, and together they generate
    the group.
    """
    if not ts.ground:
        return AutomorphismGroup(1, (), 0)
    search = _Search(ts, ts)
    branches = [lv[0] for lv in search.levels]
    seen: set[tuple[int, int]] = set()
    gens = []
    count = 0
    for f in search.run():
        count += 1
        for i, b in enumerate(branches):
            if f[b] != b:
                if (i, f[b]) not in seen:
                    seen.add((i, f[b]))
                    gens.append(search.mapping(f))
                break
    return AutomorphismGroup(count, tuple(gens), search.nodes)


def closure_order(ts: TripleSystem, generators: Sequence[dict[int, int]], limit: int = 10**6) -> int:
    """Order of the permutation group generated by the given maps (BFS)."""
    ground = ts.ground
    identity = tuple(ground)
    gens = [tuple(g[x] for x in ground) for g in generators]
    pos = {x: i for i, x in enumerate(ground)}
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                # composition g after h
                k = tuple(g[pos[v]] for v in h)
                if k not in seen:
                    seen.add(k)
                    nxt.append(k)
                    if len(seen) > limit:
                        raise OverflowError("group larger than limit")
        frontier = nxt
    return len(seen)


# --- files --------------------------------------------------------------------

def write_triple_system(path, ts: TripleSystem) -> None:
    with open(path, "w") as fh:
        fh.write(ts.format())


def read_triple_system(path) -> TripleSystem:
    with open(path) as fh:
        return parse_triple_system(fh.read(), str(path))


def parse_triple_system(text: str, name: str = "<string>") -> TripleSystem:
    rows = text.splitlines()
    if not rows or not rows[0].startswith("ground"):
        raise TripleSystemError(f"{name}:1: expected 'ground <labels>'")
    try:
        ground = [int(x) for x in rows[0].split()[1:]]
    except ValueError as exc:
        raise TripleSystemError(f"{name}:1: {exc}") from exc
    if len(set(ground)) != len(ground):
        raise TripleSystemError(f"{name}:1: duplicate labels")
    gset = set(ground)
    triples = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row.strip():
            continue
        try:
            t = tuple(int(x) for x in row.split())
        except ValueError as exc:
            raise TripleSystemError(f"{name}:{lineno}: {exc}") from exc
        if len(t) != 3 or not (t[0] < t[1] < t[2]):
            raise TripleSystemError(f"{name}:{lineno}: expected 'a b c' with a < b < c")
        if not gset.issuperset(t):
            raise TripleSystemError(f"{name}:{lineno}: label outside the ground set")
        if triples and t <= triples[-1]:
            raise TripleSystemError(f"{name}:{lineno}: triples must be strictly lex-sorted")
        triples.append(t)
    return TripleSystem(tuple(ground), frozenset(triples))
