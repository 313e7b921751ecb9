import random
from itertools import combinations, product

import pytest

from cusparr.arrange import audit, build_ceva, build_char2, build_char3, build_generic, build_pencil_complement
from cusparr.gf import additive_coords, enumerate_field, field_new, span_members
from cusparr.projplane import point
from cusparr.triples import (
    TripleSystem,
    TripleSystemError,
    automorphism_order,
    closure_order,
    from_arrangement,
    is_steiner,
    isomorphic,
    make_Mq,
    make_Nq,
    make_projection_matroid,
    parse_triple_system,
    read_triple_system,
    restrict,
    verify_witness,
    write_triple_system,
)

from oracles import naive_automorphisms, naive_isomorphic


def matroid_of(a):
    return from_arrangement(a, audit(a))


def zero_sum_pairs_scan(ctx):
    """Triples by testing every 3-subset directly."""
    return {
        t for t in combinations(range(ctx.q), 3)
        if ctx.add_int(ctx.add_int(t[0], t[1]), t[2]) == 0
    }


def test_from_arrangement_small():
    m3 = matroid_of(build_char3(field_new(3)))
    assert m3.ground == (0, 1, 2) and m3.triples == {(0, 1, 2)}
    assert len(matroid_of(build_char3(field_new(3, 2)))) == 12
    c7 = matroid_of(build_char2(field_new(2, 3)))
    assert len(c7.ground) == 7 and len(c7) == 7


def test_from_arrangement_expands_high_multiplicity():
    F3 = field_new(3)
    from cusparr.arrange import Arrangement
    from cusparr.projplane import line

    # four lines through (0:0:1)
    a = Arrangement(F3, (0, 1, 2, 3), tuple(line(F3, 1, v, 0) for v in range(3)) + (line(F3, 0, 1, 0),))
    ts = from_arrangement(a, audit(a))
    assert len(ts) == 4


def test_make_mq():
    assert make_Mq(field_new(3)).triples == {(0, 1, 2)}
    assert len(make_Mq(field_new(3, 2))) == 12
    F27 = field_new(3, 3)
    m27 = make_Mq(F27)
    assert len(m27) == 117 == 27 * 26 // 6
    assert m27.triples == zero_sum_pairs_scan(F27)


def test_make_nq():
    F4 = field_new(2, 2)
    t = F4.gen.value
    assert make_Nq(F4).triples == {tuple(sorted((1, t, t ^ 1)))}
    assert len(make_Nq(field_new(2, 3))) == 7
    assert len(make_Nq(field_new(2, 4))) == 35
    with pytest.raises(TripleSystemError):
        make_Nq(field_new(3))


def test_projection_matroid():
    assert make_projection_matroid(2).triples == {(1, 2, 3)}
    assert len(make_projection_matroid(3)) == 7
    assert len(make_projection_matroid(4)) == 35


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_mq_equals_extracted_matroid(n):
    ctx = field_new(3, n)
    assert make_Mq(ctx) == matroid_of(build_char3(ctx))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_nq_equals_extracted_matroid(n):
    ctx = field_new(2, n)
    assert make_Nq(ctx) == matroid_of(build_char2(ctx))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_additive_coords_transport(n):
    ctx = field_new(2, n)
    phi = {
        e.value: sum(c << i for i, c in enumerate(additive_coords(e)))
        for e in enumerate_field(ctx)[1:]
    }
    assert verify_witness(make_Nq(ctx), make_projection_matroid(n), phi)


def test_steiner():
    assert is_steiner(make_Mq(field_new(3, 2)))
    assert is_steiner(make_Nq(field_new(2, 4)))
    assert not is_steiner(matroid_of(build_generic(field_new(7))))
    for n in (1, 2, 3, 4):
        assert is_steiner(make_Mq(field_new(3, n)))
    for n in (2, 3, 4, 5, 6):
        q = 2 ** n
        ts = make_Nq(field_new(2, n))
        assert is_steiner(ts) and len(ts) == (q - 1) * (q - 2) // 6


def test_iso_ceva_and_m9():
    m9 = matroid_of(build_char3(field_new(3, 2)))
    ceva = matroid_of(build_ceva(field_new(7)))
    w = isomorphic(m9, ceva)
    assert w is not None and verify_witness(m9, ceva, w.mapping)
    assert naive_isomorphic(m9, ceva)
    F3 = field_new(3)
    affine = matroid_of(build_pencil_complement(F3, point(F3, 0, 0, 1)))
    assert isomorphic(affine, m9) is not None


def test_iso_fano():
    c7 = matroid_of(build_char2(field_new(2, 3)))
    fano = make_projection_matroid(3)
    w = isomorphic(c7, fano)
    assert w is not None and verify_witness(c7, fano, w.mapping)


def test_iso_rejects():
    assert isomorphic(make_Mq(field_new(3, 2)), make_Nq(field_new(2, 4))) is None
    # same size and triple count, different structure: two disjoint triples vs two sharing a point
    a = TripleSystem.of(range(6), [(0, 1, 2), (3, 4, 5)])
    b = TripleSystem.of(range(6), [(0, 1, 2), (0, 3, 4)])
    assert isomorphic(a, b) is None
    assert not naive_isomorphic(a, b)


def test_iso_non_steiner_systems():
    g7 = matroid_of(build_generic(field_new(7)))
    relabel = dict(zip(g7.ground, reversed(g7.ground)))
    other = g7.relabel(relabel)
    w = isomorphic(g7, other)
    assert w is not None and verify_witness(g7, other, w.mapping)


def test_iso_equivalence():
    ts = make_Mq(field_new(3, 2))
    w = isomorphic(ts, ts)
    assert w.mapping == {x: x for x in ts.ground}
    ceva = matroid_of(build_ceva(field_new(7)))
    fwd = isomorphic(ts, ceva)
    assert verify_witness(ceva, ts, fwd.inverse().mapping)


@pytest.mark.parametrize(
    "ts,order",
    [
        (make_Mq(field_new(3)), 6),
        (make_projection_matroid(3), 168),
    ],
)
def test_automorphisms_against_naive(ts, order):
    g = automorphism_order(ts)
    assert g.order == order == naive_automorphisms(ts)
    assert closure_order(ts, g.generators) == order


def test_automorphisms_m9():
    ts = make_Mq(field_new(3, 2))
    g = automorphism_order(ts)
    assert g.order == 432 == 9 * 48
    assert closure_order(ts, g.generators) == 432


@pytest.mark.slow
def test_automorphisms_m9_naive():
    assert naive_automorphisms(make_Mq(field_new(3, 2))) == 432


def test_automorphism_of_non_steiner():
    ts = TripleSystem.of(range(6), [(0, 1, 2), (3, 4, 5)])
    assert automorphism_order(ts).order == 72 == naive_automorphisms(ts)
    g7 = matroid_of(build_generic(field_new(7)))
    assert automorphism_order(g7).order == naive_automorphisms(g7)


def _gl_n_f3(n):
    count = 0
    for entries in product(range(3), repeat=n * n):
        rows = [entries[i * n:(i + 1) * n] for i in range(n)]
        if _det_mod3(rows) % 3:
            count += 1
    return count


def _det_mod3(m):
    if len(m) == 1:
        return m[0][0]
    return sum(
        (-1) ** j * m[0][j] * _det_mod3([r[:j] + r[j + 1:] for r in m[1:]]) for j in range(len(m))
    )


def test_affine_maps_are_automorphisms():
    rng = random.Random(7)
    for n in (1, 2, 3):
        ctx = field_new(3, n)
        ts = make_Mq(ctx)
        els = enumerate_field(ctx)
        for _ in range(10):
            while True:
                A = [[rng.randrange(3) for _ in range(n)] for _ in range(n)]
                if _det_mod3(A) % 3:
                    break
            shift = [rng.randrange(3) for _ in range(n)]
            mapping = {}
            for e in els:
                v = additive_coords(e)
                img = [(sum(A[i][j] * v[j] for j in range(n)) + shift[i]) % 3 for i in range(n)]
                mapping[e.value] = ctx.from_coeffs(img).value
            assert verify_witness(ts, ts, mapping)


def test_affine_group_orders_small():
    # |AGL_n(F_3)| = 3^n |GL_n(F_3)|
    assert 3 * _gl_n_f3(1) == 6
    assert 9 * _gl_n_f3(2) == 432
    assert automorphism_order(make_Mq(field_new(3, 2))).order == 9 * _gl_n_f3(2)


def test_restrict():
    F27 = field_new(3, 3)
    m27 = make_Mq(F27)
    sub = restrict(m27, [e.value for e in span_members(F27, [F27.one])])
    assert isomorphic(sub, make_Mq(field_new(3))) is not None
    assert restrict(m27, m27.ground) == m27
    with pytest.raises(TripleSystemError):
        restrict(m27, [0, 99])


def test_restrict_m81_to_subspace():
    F81 = field_new(3, 4)
    m81 = make_Mq(F81)
    t = F81.gen
    span = span_members(F81, [F81.one, t, t * t])
    sub = restrict(m81, [e.value for e in span])
    assert len(sub.ground) == 27 and len(sub) == 117
    assert isomorphic(sub, make_Mq(field_new(3, 3))) is not None


def test_file_format(tmp_path):
    ts = make_projection_matroid(3)
    path = tmp_path / "fano.ts"
    write_triple_system(path, ts)
    lines = path.read_text().splitlines()
    assert lines[0] == "ground 1 2 3 4 5 6 7"
    assert lines[1:] == sorted(lines[1:], key=lambda s: tuple(map(int, s.split())))
    assert read_triple_system(path) == ts
    with pytest.raises(TripleSystemError, match=":2:"):
        parse_triple_system("ground 1 2 3\n3 2 1\n")
    with pytest.raises(TripleSystemError, match=":3:"):
        parse_triple_system("ground 1 2 3 4\n1 2 4\n1 2 3\n")
    with pytest.raises(TripleSystemError):
        parse_triple_system("1 2 3\n")
    with pytest.raises(TripleSystemError):
        parse_triple_system("ground 1 2 3\n1 2 5\n")
