"""Greedy join of per-box independent sets into one global solution."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from rydqubo.ahs import SubgraphSolution
from rydqubo.embedding import UnitDiskGraph, distance_matrix
from rydqubo.errors import InvariantViolation
from rydqubo.qubo import QuboMatrix, energy


@dataclass(frozen=True, eq=False)
class GlobalSolution:
    independent_set: list[int]
    assignment: np.ndarray
    qubo_energy: float
    mwis_weight: float


def merge(g: UnitDiskGraph, solutions: list[SubgraphSolution]) -> list[int]:
    """Union the local selections, then keep candidates heaviest-first.

    A candidate is kept only if it lies strictly farther than ``r`` from
    everything already kept; equal weights are visited in id order.
    """
    candidates = sorted({vid for sol in solutions for vid in sol.ids})
    missing = [vid for vid in candidates if vid not in g._by_id]
    if missing:
        raise ValueError(f"local solutions reference unknown vertices {missing}")
    order = sorted(candidates, key=lambda vid: (-g.vertex(vid).weight, vid))
    if not order:
        return []
    xy = np.array([[g.vertex(v).x, g.vertex(v).y] for v in order])
    d = distance_matrix(xy)
    r = g.blockade_radius
    kept: list[int] = []
    for a in range(len(order)):
        if all(d[a, b] > r for b in kept):
            kept.append(a)
    return [order[a] for a in kept]


def check_independent(g: UnitDiskGraph, ids) -> None:
    ids = list(ids)
    if len(set(ids)) != len(ids):
        raise InvariantViolation("duplicate vertex ids in selection")
    xy = np.array([[g.vertex(v).x, g.vertex(v).y] for v in ids]).reshape(-1, 2)
    d = distance_matrix(xy)
    close = np.argwhere(np.triu(d <= g.blockade_radius, k=1))
    if close.size:
        a, b = close[0]
        raise InvariantViolation(
            f"vertices {ids[a]} and {ids[b]} are {d[a, b]:.6g} apart, within r={g.blockade_radius}")


def finalize(q: QuboMatrix, g: UnitDiskGraph, ids) -> GlobalSolution:
    ids = list(ids)
    check_independent(g, ids)
    x = np.zeros(q.n, dtype=np.int8)
    x[ids] = 1
    return GlobalSolution(
        independent_set=ids,
        assignment=x,
        qubo_energy=energy(q, x),
        mwis_weight=float(sum(g.vertex(v).weight for v in ids)),
    )
