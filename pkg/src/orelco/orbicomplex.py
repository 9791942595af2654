"""One-relator orbicomplexes and maps of complexes into them.

An orbicomplex here is a graph together with a single cyclically immersed,
primitive relator loop w and a branch index n: the 2-cell is a disk whose
boundary wraps n times around w.  A complex mapping in has every 2-cell
boundary of length n|w| spelling the n-th power of w up to rotation and
orientation; boundary position p lies over side (p + offset) mod |w| of the
disk.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .complexes import (Classification, Dart, Graph, MapKind, TwoComplex,
                        CellImage, CellMorphism, dart_reverse,
                        euler_characteristic, find_free_faces_and_edges,
                        non_tree_edge_count)
from .errors import NotImmersionError
from .words import Word


@dataclass(frozen=True)
class OneRelatorOrbicomplex:
    gamma: Graph
    relator: tuple[Dart, ...]
    branch_index: int

    @property
    def relator_length(self) -> int:
        return len(self.relator)

    @property
    def boundary_length(self) -> int:
        return self.branch_index * len(self.relator)

    def relator_power_path(self) -> tuple[Dart, ...]:
        return self.relator * self.branch_index

    def relator_word(self) -> Word:
        """The relator as a word; requires every traversed edge to be labeled."""
        letters = []
        for d in self.relator:
            letter = self.gamma.dart_label(d)
            if letter is None:
                raise ValueError(f"relator crosses unlabeled edge {d[0]}")
            letters.append(letter)
        return tuple(letters)


def build_orbicomplex(gamma: Graph, relator: tuple[Dart, ...],
                      branch_index: int) -> OneRelatorOrbicomplex:
    """Validated constructor: relator must be a closed, cyclically immersed,
    primitive loop and the branch index a positive integer."""
    if branch_index < 1:
        raise ValueError("branch index must be >= 1")
    if not relator:
        raise ValueError("relator must be nonempty")
    for d in relator:
        if d[0] not in gamma.edges:
            raise ValueError(f"relator references missing edge {d[0]}")
    m = len(relator)
    for i in range(m):
        if gamma.dart_terminus(relator[i]) != gamma.dart_origin(relator[(i + 1) % m]):
            raise ValueError("relator path is not closed")
        if relator[(i + 1) % m] == dart_reverse(relator[i]):
            raise ValueError("relator backtracks, so it is not cyclically immersed")
    for d in range(1, m):
        if m % d == 0 and relator == relator[:d] * (m // d):
            raise ValueError("relator is a proper power")
    return OneRelatorOrbicomplex(gamma, tuple(relator), branch_index)


@dataclass(frozen=True)
class OrbiMorphism:
    source: TwoComplex
    target: OneRelatorOrbicomplex
    vertex_map: dict[str, str]
    edge_map: dict[str, Dart]
    cell_align: dict[str, tuple[int, int]]

    def dart_image(self, d: Dart) -> Dart:
        e, s = self.edge_map[d[0]]
        return (e, s * d[1])

    def boundary_position(self, cid: str, pos: int) -> int:
        offset, orient = self.cell_align[cid]
        m = self.target.boundary_length
        return (pos + offset) % m if orient > 0 else (offset - pos) % m

    def side_label(self, cid: str, pos: int) -> int:
        """Side of the branched disk under boundary position ``pos`` of ``cid``."""
        return self.boundary_position(cid, pos) % self.target.relator_length


def check_orbi_immersion(m: OrbiMorphism) -> Classification:
    """Classify a map into an orbicomplex as not_morphism, morphism or immersion.

    Immersion means the skeleton map is link-injective and, over every source
    edge, the incident cell sides land on pairwise distinct sides of the disk.
    """
    x = m.target
    g = m.source.skeleton
    for v in sorted(g.vertices):
        if v not in m.vertex_map or m.vertex_map[v] not in x.gamma.vertices:
            return Classification(MapKind.NOT_MORPHISM, f"vertex {v} unmapped")
    for e in sorted(g.edges):
        if e not in m.edge_map or m.edge_map[e][0] not in x.gamma.edges:
            return Classification(MapKind.NOT_MORPHISM, f"edge {e} unmapped")
        d = (e, 1)
        for dart in (d, dart_reverse(d)):
            if x.gamma.dart_origin(m.dart_image(dart)) != m.vertex_map[g.dart_origin(dart)]:
                return Classification(
                    MapKind.NOT_MORPHISM, f"dart {dart} breaks origin commutation")
    q = x.relator_power_path()
    big = x.boundary_length
    for cid in sorted(m.source.cells):
        if cid not in m.cell_align:
            return Classification(MapKind.NOT_MORPHISM, f"cell {cid} unmapped")
        offset, orient = m.cell_align[cid]
        if orient not in (1, -1):
            return Classification(MapKind.NOT_MORPHISM, f"cell {cid} bad orientation")
        path = m.source.cells[cid]
        if len(path) != big:
            return Classification(
                MapKind.NOT_MORPHISM,
                f"cell {cid} boundary length {len(path)} != {big}")
        for i, d in enumerate(path):
            want = (q[(i + offset) % big] if orient > 0
                    else dart_reverse(q[(offset - i) % big]))
            if m.dart_image(d) != want:
                return Classification(
                    MapKind.NOT_MORPHISM,
                    f"cell {cid} position {i} does not spell the relator power")
    for v in sorted(g.vertices):
        seen: dict[Dart, Dart] = {}
        for d in g.darts_at(v):
            img = m.dart_image(d)
            if img in seen:
                return Classification(
                    MapKind.MORPHISM,
                    f"darts {seen[img]} and {d} at {v} share image {img}")
            seen[img] = d
    for e in sorted(g.edges):
        used: dict[int, tuple[str, int]] = {}
        for cid, pos in m.source.sides_over[e]:
            side = m.side_label(cid, pos)
            if side in used:
                return Classification(
                    MapKind.MORPHISM,
                    f"sides {used[side]} and {(cid, pos)} over edge {e}"
                    f" share disk side {side}")
            used[side] = (cid, pos)
    return Classification(MapKind.IMMERSION, None)


def degree(m) -> int:
    """Minimum number of preimages of a generic 2-cell point; immersions only.

    For an orbicomplex target every source cell covers the branched disk
    n-fold, so the degree is n times the source cell count.  For an ordinary
    2-complex target it is the minimum preimage count over target cells.
    """
    if isinstance(m, OrbiMorphism):
        cls = check_orbi_immersion(m)
        if cls.kind < MapKind.IMMERSION:
            raise NotImmersionError(cls.witness or "map is not an immersion")
        return m.target.branch_index * len(m.source.cells)
    if isinstance(m, CellMorphism):
        from .complexes import classify_map
        cls = classify_map(m)
        if cls.kind < MapKind.IMMERSION:
            raise NotImmersionError(cls.witness or "map is not an immersion")
        if not m.target.cells:
            return 0
        counts = {cid: 0 for cid in m.target.cells}
        for cid in m.source.cells:
            counts[m.cell_map[cid].cell] += 1
        return min(counts[cid] for cid in sorted(counts))
    raise TypeError(f"degree undefined for {type(m).__name__}")


@dataclass(frozen=True)
class WCyclesAudit:
    chi1: int
    deg: int
    slack1: int
    chi2: int
    cells: int
    slack2: int
    passed: bool
    irreducible: bool
    free_face_count: int
    nontree_edges: int
    cell_bound: Fraction | None
    cell_bound_ok: bool | None


def wcycles_audit(m: OrbiMorphism) -> WCyclesAudit:
    """Audit the inequalities chi(Y^1) + deg <= 0 and chi(Y) + (n-1)|cells| <= 0.

    The map must be an immersion (otherwise the degree is undefined and the
    call is refused).  A reducible source is still audited but flagged, since
    the guarantee only covers irreducible complexes.
    """
    cls = check_orbi_immersion(m)
    if cls.kind < MapKind.IMMERSION:
        raise NotImmersionError(cls.witness or "map is not an immersion")
    n = m.target.branch_index
    cells = len(m.source.cells)
    deg = n * cells
    chi1 = euler_characteristic(m.source, dimension=1)
    chi2 = euler_characteristic(m.source, dimension=2)
    slack1 = chi1 + deg
    slack2 = chi2 + (n - 1) * cells
    faces, _ = find_free_faces_and_edges(m.source)
    g = non_tree_edge_count(m.source.skeleton)
    if n >= 2:
        bound = Fraction(g - 1, n - 1)
        bound_ok = Fraction(cells) <= bound
    else:
        bound, bound_ok = None, None
    return WCyclesAudit(
        chi1=chi1, deg=deg, slack1=slack1, chi2=chi2, cells=cells,
        slack2=slack2, passed=(slack1 <= 0 and slack2 <= 0),
        irreducible=not faces, free_face_count=len(faces),
        nontree_edges=g, cell_bound=bound, cell_bound_ok=bound_ok)


def presentation_complex(x: OneRelatorOrbicomplex) -> tuple[TwoComplex, OrbiMorphism]:
    """The ordinary complex with one disk glued along the full relator power,
    together with its natural map to the orbicomplex (offset 0, positive)."""
    cx = TwoComplex(x.gamma, {"d0": x.relator_power_path()})
    m = OrbiMorphism(
        cx, x,
        {v: v for v in x.gamma.vertices},
        {e: (e, 1) for e in x.gamma.edges},
        {"d0": (0, 1)},
    )
    return cx, m


def as_orbi(m: CellMorphism, into: OrbiMorphism) -> OrbiMorphism:
    """Compose a map of complexes with a map into an orbicomplex."""
    if m.target != into.source:
        raise ValueError("composition mismatch")
    vmap = {v: into.vertex_map[w] for v, w in m.vertex_map.items()}
    emap = {e: into.dart_image(d) for e, d in m.edge_map.items()}
    align: dict[str, tuple[int, int]] = {}
    big = into.target.boundary_length
    for cid, im in m.cell_map.items():
        offset, orient = into.cell_align[im.cell]
        align[cid] = ((offset + orient * im.offset) % big, orient * im.orient)
    return OrbiMorphism(m.source, into.target, vmap, emap, align)
