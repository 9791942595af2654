import itertools

import pytest

from orelco.complexes import (CellImage, CellMorphism, EdgeRec, Graph,
                              MapKind, TwoComplex, classify_map,
                              identity_morphism, non_tree_edge_count)
from orelco.errors import FactorizationError, NotImmersionError, NotMorphismError
from orelco.folding import factor_unique, fold
from orelco.words import free_reduce

ROSE_AB = TwoComplex(skeleton=Graph.rose(["a", "b"]), cells={})
ROSE_A = TwoComplex(skeleton=Graph.rose(["a"]), cells={})


def two_loop_wedge(names=("e1", "e2")):
    g = Graph(vertices=frozenset({"v"}),
              edges={n: EdgeRec("v", "v", "a") for n in names})
    src = TwoComplex(skeleton=g, cells={}, base_vertex="v")
    return CellMorphism(src, ROSE_A, {"v": "*"},
                        {n: ("a", 1) for n in names}, {})


def test_fold_two_loops_to_one():
    res = fold(two_loop_wedge())
    assert set(res.folded.skeleton.edges) == {"e1"}
    assert set(res.folded.skeleton.vertices) == {"v"}
    assert non_tree_edge_count(res.folded.skeleton) == 1
    assert res.projection.edge_map == {"e1": ("e1", 1), "e2": ("e1", 1)}
    assert res.trace == (("dart", ("e1", 1), ("e2", 1)),)
    assert classify_map(res.inclusion).kind >= MapKind.IMMERSION


def test_fold_is_relabel_robust():
    res = fold(two_loop_wedge(names=("z", "w")))
    assert len(res.folded.skeleton.edges) == 1
    assert len(res.folded.skeleton.vertices) == 1


def test_fold_rejects_non_morphism():
    g = Graph(vertices=frozenset({"v"}), edges={"e": EdgeRec("v", "v", "a")})
    src = TwoComplex(skeleton=g, cells={})
    bad = CellMorphism(src, ROSE_A, {"v": "*"}, {}, {})
    with pytest.raises(NotMorphismError):
        fold(bad)


def build_stallings_source():
    """Wedge spelling the generators a and b a b~ as subdivided loops."""
    g = Graph(
        vertices=frozenset({"u0", "u1", "u2"}),
        edges={
            "x": EdgeRec("u0", "u0", "a"),
            "y1": EdgeRec("u0", "u1", "b"),
            "y2": EdgeRec("u1", "u2", "a"),
            "y3": EdgeRec("u0", "u2", "b"),
        },
    )
    src = TwoComplex(skeleton=g, cells={}, base_vertex="u0")
    return CellMorphism(
        src, ROSE_AB, {v: "*" for v in g.vertices},
        {"x": ("a", 1), "y1": ("b", 1), "y2": ("a", 1), "y3": ("b", 1)}, {})


def _accepted_words(m: CellMorphism, base: str, max_len: int):
    """Reduced words readable as closed loops at the base of an immersion."""
    g = m.source.skeleton
    step = {}
    for v in g.vertices:
        for d in g.darts_at(v):
            step[(v, m.dart_image(d))] = g.dart_terminus(d)
    out = set()
    frontier = [(base, ())]
    while frontier:
        nxt = []
        for v, word in frontier:
            if word and v == base:
                out.add(word)
            if len(word) == max_len:
                continue
            for letter in [("a", 1), ("a", -1), ("b", 1), ("b", -1)]:
                if word and letter == (word[-1][0], -word[-1][1]):
                    continue
                if (v, letter) in step:
                    nxt.append((step[(v, letter)], word + (letter,)))
        frontier = nxt
    return out


def test_fold_stallings_membership():
    res = fold(build_stallings_source())
    folded = res.folded
    assert len(folded.skeleton.vertices) == 2
    assert len(folded.skeleton.edges) == 3
    assert non_tree_edge_count(folded.skeleton) == 2
    accepted = _accepted_words(res.inclusion, folded.base_vertex, 6)

    gens = {"x": (("a", 1),), "y": (("b", 1), ("a", 1), ("b", -1))}
    expected = set()
    alphabet = [("x", 1), ("x", -1), ("y", 1), ("y", -1)]
    frontier = [()]
    for _ in range(6):
        nxt = []
        for word in frontier:
            for letter in alphabet:
                if word and letter == (word[-1][0], -word[-1][1]):
                    continue
                nxt.append(word + (letter,))
        frontier = nxt
        for word in frontier:
            image = []
            for sym, sign in word:
                piece = gens[sym] if sign > 0 else tuple(
                    (s, -sg) for s, sg in reversed(gens[sym]))
                image.extend(piece)
            red = free_reduce(tuple(image))
            if 0 < len(red) <= 6:
                expected.add(red)
    assert accepted == expected


def rose_square_complex():
    g = Graph.rose(["a", "b"])
    return TwoComplex(skeleton=g, cells={"T": (("a", 1), ("b", 1))})


def test_fold_merges_duplicate_cells():
    tgt = rose_square_complex()
    g = Graph.rose(["a", "b"])
    src = TwoComplex(skeleton=g,
                     cells={"c0": (("a", 1), ("b", 1)),
                            "c1": (("a", 1), ("b", 1))})
    m = CellMorphism(src, tgt, {"*": "*"},
                     {"a": ("a", 1), "b": ("b", 1)},
                     {"c0": CellImage("T", 0, 1), "c1": CellImage("T", 0, 1)})
    res = fold(m)
    assert set(res.folded.cells) == {"c0"}
    assert ("cell", "c0", "c1") in res.trace
    assert res.projection.cell_map["c1"] == CellImage("c0", 0, 1)
    assert classify_map(res.inclusion).kind >= MapKind.IMMERSION


def test_fold_merges_mirror_cells():
    # same disk attached with opposite orientations must merge, otherwise the
    # two copies would share every target side and the result could not immerse
    tgt = rose_square_complex()
    g = Graph.rose(["a", "b"])
    src = TwoComplex(skeleton=g,
                     cells={"c0": (("a", 1), ("b", 1)),
                            "c1": (("b", -1), ("a", -1))})
    m = CellMorphism(src, tgt, {"*": "*"},
                     {"a": ("a", 1), "b": ("b", 1)},
                     {"c0": CellImage("T", 0, 1), "c1": CellImage("T", 1, -1)})
    res = fold(m)
    assert set(res.folded.cells) == {"c0"}
    assert res.projection.cell_map["c1"] == CellImage("c0", 1, -1)
    assert classify_map(res.inclusion).kind >= MapKind.IMMERSION


def test_fold_merges_rotated_cells():
    g = Graph.rose(["a", "b"])
    tgt = TwoComplex(skeleton=g, cells={"T": (("a", 1), ("b", 1), ("a", 1), ("b", 1))})
    src = TwoComplex(skeleton=g,
                     cells={"c0": (("a", 1), ("b", 1), ("a", 1), ("b", 1)),
                            "c1": (("b", 1), ("a", 1), ("b", 1), ("a", 1))})
    m = CellMorphism(src, tgt, {"*": "*"},
                     {"a": ("a", 1), "b": ("b", 1)},
                     {"c0": CellImage("T", 0, 1), "c1": CellImage("T", 1, 1)})
    res = fold(m)
    assert set(res.folded.cells) == {"c0"}
    assert res.projection.cell_map["c1"] == CellImage("c0", 1, 1)


def cover_map_x0():
    g = Graph(
        vertices=frozenset({"p0", "p1"}),
        edges={
            "a0": EdgeRec("p0", "p1", "a"),
            "a1": EdgeRec("p1", "p0", "a"),
            "b0": EdgeRec("p0", "p0", "b"),
            "b1": EdgeRec("p1", "p1", "b"),
        },
    )
    src = TwoComplex(skeleton=g,
                     cells={"f0": (("a0", 1), ("b1", 1), ("a1", 1), ("b0", 1))},
                     base_vertex="p0")
    tgt = TwoComplex(skeleton=Graph.rose(["a", "b"]),
                     cells={"d0": (("a", 1), ("b", 1), ("a", 1), ("b", 1))})
    return CellMorphism(
        src, tgt, {"p0": "*", "p1": "*"},
        {"a0": ("a", 1), "a1": ("a", 1), "b0": ("b", 1), "b1": ("b", 1)},
        {"f0": CellImage("d0", 0, 1)})


def test_fold_idempotent_on_immersion():
    m = cover_map_x0()
    res = fold(m)
    assert res.trace == ()
    assert res.folded == m.source
    assert res.projection == identity_morphism(m.source)
    assert res.inclusion == m


def test_fold_never_increases_counts():
    for m in [two_loop_wedge(), build_stallings_source(), cover_map_x0()]:
        res = fold(m)
        a, c = m.source, res.folded
        assert len(c.skeleton.vertices) <= len(a.skeleton.vertices)
        assert len(c.skeleton.edges) <= len(a.skeleton.edges)
        assert len(c.cells) <= len(a.cells)
        assert non_tree_edge_count(c.skeleton) <= non_tree_edge_count(a.skeleton)


def test_factor_unique_through_identity():
    res = fold(two_loop_wedge())
    factor = factor_unique(res, identity_morphism(ROSE_A), two_loop_wedge())
    assert factor == res.inclusion


def test_factor_unique_through_own_inclusion():
    res = fold(two_loop_wedge())
    factor = factor_unique(res, res.inclusion, res.projection)
    assert factor == identity_morphism(res.folded)


def test_factor_unique_with_cells():
    m = cover_map_x0()
    res = fold(m)
    factor = factor_unique(res, res.inclusion, res.projection)
    assert factor == identity_morphism(res.folded)
    factor2 = factor_unique(res, identity_morphism(m.target), m)
    assert factor2 == res.inclusion


def test_factor_unique_recovers_deck_transformation():
    from orelco.complexes import compose
    m = cover_map_x0()
    d = m.source
    relabel = CellMorphism(
        d, d,
        {"p0": "p1", "p1": "p0"},
        {"a0": ("a1", 1), "a1": ("a0", 1), "b0": ("b1", 1), "b1": ("b0", 1)},
        {"f0": CellImage("f0", 2, 1)})
    assert classify_map(relabel).kind == MapKind.COVERING
    shifted = compose(m, relabel)
    res = fold(shifted)
    assert res.trace == ()
    lifted = factor_unique(res, m, relabel)
    assert lifted == relabel


def test_factor_unique_rejects_non_commuting():
    res = fold(two_loop_wedge())
    src = two_loop_wedge().source
    wrong = CellMorphism(src, ROSE_A, {"v": "*"},
                         {"e1": ("a", 1), "e2": ("a", -1)}, {})
    with pytest.raises(FactorizationError):
        factor_unique(res, identity_morphism(ROSE_A), wrong)


def test_factor_unique_rejects_unimmersed_target():
    res = fold(two_loop_wedge())
    with pytest.raises(NotImmersionError):
        factor_unique(res, two_loop_wedge(), identity_morphism(two_loop_wedge().source))
