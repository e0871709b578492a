"""Square-grid decomposition of a unit-disk graph into per-box subgraphs.

Boxes are half-open ``[low, low + s)`` in both coordinates, anchored at the
componentwise minimum of the vertex coordinates. With ``s > 2r`` an edge can
only join vertices in the same or neighbouring boxes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from rydqubo.embedding import UnitDiskGraph, Vertex

DEFAULT_BOX_FACTOR = 2.5
MAX_SPLIT_DEPTH = 12


@dataclass(frozen=True, eq=False)
class GridPartition:
    box_side: float
    origin: tuple[float, float]
    assignment: dict[int, tuple[int, int]]

    def boxes(self) -> list[tuple[int, int]]:
        return sorted(set(self.assignment.values()))

    def dump(self) -> str:
        """Diagnostic listing, one ``box_i box_j vertex_id`` line per vertex."""
        rows = sorted((b[0], b[1], vid) for vid, b in self.assignment.items())
        return "".join(f"{i} {j} {vid}\n" for i, j, vid in rows)


@dataclass(frozen=True, eq=False)
class Subgraph(UnitDiskGraph):
    """A box's share of the parent graph.

    ``level`` counts quadrisections applied to an oversized box; at level L
    ``box_index`` addresses the grid of side ``s / 2**L`` sharing the same
    origin, so level-0 indices are the plain partition boxes.
    """

    box_index: tuple[int, int] = (0, 0)
    level: int = 0


def box_of(x: float, y: float, origin, side: float) -> tuple[int, int]:
    return (int(np.floor((x - origin[0]) / side)), int(np.floor((y - origin[1]) / side)))


def partition(g: UnitDiskGraph, s: float | None = None) -> GridPartition:
    r = g.blockade_radius
    if s is None:
        s = DEFAULT_BOX_FACTOR * r
    if not s > 2 * r:
        raise ValueError(f"box side s={s} must exceed twice the blockade radius (2r={2 * r})")
    if len(g) == 0:
        return GridPartition(s, (0.0, 0.0), {})
    xy = g.coords
    origin = (float(xy[:, 0].min()), float(xy[:, 1].min()))
    assignment = {v.id: box_of(v.x, v.y, origin, s) for v in g.vertices}
    return GridPartition(s, origin, assignment)


def _split(verts: list[Vertex], r: float, box: tuple[int, int], level: int,
           p: GridPartition, max_atoms: int) -> list[Subgraph]:
    if len(verts) <= max_atoms or level >= MAX_SPLIT_DEPTH:
        return [Subgraph(verts, r, box_index=box, level=level)]
    side = p.box_side / 2 ** (level + 1)
    groups: dict[tuple[int, int], list[Vertex]] = {}
    for v in verts:
        groups.setdefault(box_of(v.x, v.y, p.origin, side), []).append(v)
    out = []
    for child in sorted(groups):
        out.extend(_split(groups[child], r, child, level + 1, p, max_atoms))
    return out


def extract_subgraphs(g: UnitDiskGraph, p: GridPartition,
                      max_atoms: int | None = None) -> list[Subgraph]:
    """One subgraph per non-empty box, in sorted box order.

    If ``max_atoms`` is given, boxes holding more vertices are quadrisected
    recursively until every part fits. Sibling sub-boxes are then closer than
    ``2r`` apart, so cross-part conflicts are left for the merge step.
    """
    members: dict[tuple[int, int], list[Vertex]] = {}
    for v in g.vertices:
        members.setdefault(p.assignment[v.id], []).append(v)
    cap = max_atoms if max_atoms is not None else max(len(g), 1)
    out: list[Subgraph] = []
    for box in sorted(members):
        out.extend(_split(members[box], g.blockade_radius, box, 0, p, cap))
    return out
