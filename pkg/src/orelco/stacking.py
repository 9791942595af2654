"""Stackings: boundary lifts with heights, and the good-stacking check.

A stacking assigns a rational height to every boundary position of every
2-cell; for an orbicomplex the domain is the single relator circle.  The
heights lift the boundary immersion into (1-skeleton) x (line); the lift must
be an embedding, so no two positions over the same edge may share a height.
The stacking is good when every boundary circle contains a position of
globally maximal height over its edge and a position of globally minimal
height over its edge, where "globally" ranges over all circles.

Only the order type of the heights matters, so rationals compared exactly
stand in for real heights.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .complexes import TwoComplex
from .orbicomplex import OneRelatorOrbicomplex

# the single boundary circle of an orbicomplex goes by this component id
ORBI_CIRCLE = "w"

Position = tuple[str, int]


@dataclass(frozen=True)
class Stacking:
    complex: TwoComplex | OneRelatorOrbicomplex
    heights: dict[Position, Fraction]


@dataclass(frozen=True)
class StackingVerdict:
    good: bool
    witness: str | None = None


def boundary_circles(c) -> dict[str, tuple[str, ...]]:
    """The edge traversed at each position of each boundary circle."""
    if isinstance(c, OneRelatorOrbicomplex):
        return {ORBI_CIRCLE: tuple(e for e, _ in c.relator)}
    return {cid: tuple(e for e, _ in path) for cid, path in c.cells.items()}


def validate_stacking(s: Stacking) -> list[str]:
    """Domain coverage and the embedding invariant; empty when valid."""
    problems: list[str] = []
    circles = boundary_circles(s.complex)
    wanted = {(cid, i) for cid, edges in circles.items()
              for i in range(len(edges))}
    missing = sorted(wanted - set(s.heights))
    extra = sorted(set(s.heights) - wanted)
    for pos in missing:
        problems.append(f"no height for position {pos}")
    for pos in extra:
        problems.append(f"height for unknown position {pos}")
    if problems:
        return problems
    seen: dict[tuple[str, Fraction], Position] = {}
    for pos in sorted(wanted):
        e = circles[pos[0]][pos[1]]
        h = s.heights[pos]
        prior = seen.get((e, h))
        if prior is not None:
            problems.append(
                f"positions {prior} and {pos} over edge {e} share height {h}")
        else:
            seen[(e, h)] = pos
    return problems


def check_good_stacking(s: Stacking) -> StackingVerdict:
    """Good means each circle attains a global per-edge maximum and minimum."""
    problems = validate_stacking(s)
    if problems:
        raise ValueError("stacking is not an embedding: "
                         + "; ".join(problems))
    circles = boundary_circles(s.complex)
    high: dict[str, Fraction] = {}
    low: dict[str, Fraction] = {}
    for cid, edges in circles.items():
        for i, e in enumerate(edges):
            h = s.heights[(cid, i)]
            high[e] = h if e not in high else max(high[e], h)
            low[e] = h if e not in low else min(low[e], h)
    for cid in sorted(circles):
        edges = circles[cid]
        if not any(s.heights[(cid, i)] == high[e] for i, e in enumerate(edges)):
            return StackingVerdict(
                False, f"component {cid} has no global-maximum position")
        if not any(s.heights[(cid, i)] == low[e] for i, e in enumerate(edges)):
            return StackingVerdict(
                False, f"component {cid} has no global-minimum position")
    return StackingVerdict(True)


def is_branched(s: Stacking) -> bool:
    """Branched stackings live on orbicomplexes with branch index >= 2, where
    every 2-cell carries a cone point of index at least 2."""
    return (isinstance(s.complex, OneRelatorOrbicomplex)
            and s.complex.branch_index >= 2)


# ---------------------------------------------------------------------------
# text format


def format_stacking(s: Stacking) -> str:
    lines = [f"h {cid} {i} {h}" for (cid, i), h in sorted(s.heights.items())]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_stacking(text: str, complex) -> Stacking:
    """Read `h <cell> <position> <rational>` lines; other lines are ignored
    so a stacking may ride along in a complex file."""
    heights: dict[Position, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] != "h":
            continue
        if len(tokens) != 4:
            raise ValueError(f"line {lineno}: expected 'h <cell> <position> "
                             f"<rational>', got {raw!r}")
        cid, pos_text, h_text = tokens[1], tokens[2], tokens[3]
        try:
            pos = int(pos_text)
            h = Fraction(h_text)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
        if (cid, pos) in heights:
            raise ValueError(f"line {lineno}: duplicate height for "
                             f"({cid}, {pos})")
        heights[(cid, pos)] = h
    return Stacking(complex, heights)
