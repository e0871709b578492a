"""Place QUBO variables as weighted atoms in the plane (a unit-disk graph).

Strong positive couplings ``J_ij > theta`` become blockade edges: the layout
pulls those pairs to ``0.8 r`` and pushes every other pair out to ``1.5 r``.
Couplings that are negative or below ``theta`` have no geometric encoding;
:class:`EmbeddingReport` records how many intended edges survived the layout
and how many spurious ones appeared.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from rydqubo.qubo import IsingDecomposition, QuboMatrix, decompose

CONFLICT_TARGET = 0.8
FREE_TARGET = 1.5
LAYOUT_MAX_ITER = 500
LAYOUT_TOL = 1e-6


@dataclass(frozen=True)
class Vertex:
    id: int
    x: float
    y: float
    weight: float

    def __post_init__(self):
        if not self.weight > 0:
            raise ValueError(f"vertex {self.id}: weight must be positive, got {self.weight}")
        if not (np.isfinite(self.x) and np.isfinite(self.y)):
            raise ValueError(f"vertex {self.id}: non-finite coordinates")


def distance_matrix(xy: np.ndarray) -> np.ndarray:
    """Pairwise euclidean distances. Every blockade test in the package goes through here."""
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    return np.hypot(xy[:, None, 0] - xy[None, :, 0], xy[:, None, 1] - xy[None, :, 1])


def unit_disk_pairs(xy: np.ndarray, r: float) -> set[tuple[int, int]]:
    """Index pairs ``(a, b)``, ``a < b``, at distance <= r (inclusive)."""
    d = distance_matrix(xy)
    a, b = np.nonzero(np.triu(d <= r, k=1))
    return set(zip(a.tolist(), b.tolist()))


@dataclass(frozen=True, eq=False)
class UnitDiskGraph:
    vertices: list[Vertex]
    blockade_radius: float

    def __post_init__(self):
        if not self.blockade_radius > 0:
            raise ValueError("blockade radius must be positive")
        ids = [v.id for v in self.vertices]
        if len(set(ids)) != len(ids):
            raise ValueError("vertex ids must be distinct")
        object.__setattr__(self, "vertices", list(self.vertices))

    def __len__(self):
        return len(self.vertices)

    @cached_property
    def coords(self) -> np.ndarray:
        return np.array([[v.x, v.y] for v in self.vertices], dtype=float).reshape(-1, 2)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([v.weight for v in self.vertices], dtype=float)

    @cached_property
    def ids(self) -> list[int]:
        return [v.id for v in self.vertices]

    @cached_property
    def index_edges(self) -> set[tuple[int, int]]:
        """Edges as positions into ``vertices``."""
        return unit_disk_pairs(self.coords, self.blockade_radius)

    def vertex(self, vid: int) -> Vertex:
        return self._by_id[vid]

    @cached_property
    def _by_id(self) -> dict[int, Vertex]:
        return {v.id: v for v in self.vertices}

    def to_text(self) -> str:
        lines = [f"{len(self.vertices)} {self.blockade_radius!r}"]
        lines += [f"{v.id} {v.x!r} {v.y!r} {v.weight!r}" for v in self.vertices]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> UnitDiskGraph:
        lines = [ln.split() for ln in text.splitlines() if ln.strip()]
        n, r = int(lines[0][0]), float(lines[0][1])
        if len(lines) - 1 != n:
            raise ValueError(f"expected {n} vertex lines, got {len(lines) - 1}")
        verts = [Vertex(int(a), float(b), float(c), float(d)) for a, b, c, d in lines[1:]]
        return cls(verts, r)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> UnitDiskGraph:
        return cls.from_text(Path(path).read_text())


def edges(g: UnitDiskGraph) -> set[tuple[int, int]]:
    """All unordered vertex-id pairs within the blockade radius."""
    ids = g.ids
    return {tuple(sorted((ids[a], ids[b]))) for a, b in g.index_edges}


@dataclass(frozen=True)
class EmbeddingReport:
    intended_edges: int
    realized_edges: int
    spurious_edges: int
    edge_fidelity: float


def default_theta(dec: IsingDecomposition) -> float:
    top = float(np.abs(dec.J).max()) if dec.J.size else 0.0
    return 0.1 * top if top > 0 else 1.0


def intended_conflict_graph(dec: IsingDecomposition, theta: float) -> set[tuple[int, int]]:
    if not theta > 0:
        raise ValueError("theta must be positive")
    a, b = np.nonzero(np.triu(dec.J > theta, k=1))
    return set(zip(a.tolist(), b.tolist()))


def vertex_weights(h: np.ndarray) -> np.ndarray:
    """``max(h) - h + eps``: positive, and lower cost maps to higher weight."""
    h = np.asarray(h, dtype=float)
    span = float(h.max() - h.min())
    eps = 0.01 * (span if span > 0 else 1.0)
    return h.max() - h + eps


def _stress(X: np.ndarray, D: np.ndarray, W: np.ndarray) -> float:
    iu = np.triu_indices(len(X), k=1)
    return float((W[iu] * (distance_matrix(X)[iu] - D[iu]) ** 2).sum())


def classical_mds(D: np.ndarray) -> np.ndarray:
    """Torgerson embedding: top two eigenvectors of the double-centred squared distances."""
    n = D.shape[0]
    C = np.eye(n) - 1.0 / n
    B = -0.5 * C @ (D**2) @ C
    vals, vecs = np.linalg.eigh(B)
    top = np.argsort(vals)[::-1][:2]
    return vecs[:, top] * np.sqrt(np.maximum(vals[top], 0.0))


def stress_layout(D: np.ndarray, seed: int, max_iter: int = LAYOUT_MAX_ITER,
                  tol: float = LAYOUT_TOL) -> np.ndarray:
    """Weighted stress majorization (SMACOF) in 2D, weights ``D_ij**-2``.

    Starts from classical MDS plus seeded jitter and returns coordinates
    centred on the origin.
    """
    n = D.shape[0]
    if n == 1:
        return np.zeros((1, 2))
    rng = np.random.default_rng(seed)
    X = classical_mds(D) + rng.normal(0.0, 0.1 * D[D > 0].mean(), (n, 2))
    W = np.zeros_like(D)
    off = ~np.eye(n, dtype=bool)
    W[off] = D[off] ** -2.0
    L = -W.copy()
    L[np.diag_indices(n)] = W.sum(axis=1)
    L_pinv = np.linalg.pinv(L)
    WD = W * D

    prev = _stress(X, D, W)
    for _ in range(max_iter):
        dist = distance_matrix(X)
        with np.errstate(divide="ignore", invalid="ignore"):
            B = np.where(dist > 0, -WD / dist, 0.0)
        B[np.diag_indices(n)] = 0.0
        B[np.diag_indices(n)] = -B.sum(axis=1)
        X = L_pinv @ (B @ X)
        cur = _stress(X, D, W)
        if prev == 0 or abs(prev - cur) / prev < tol:
            break
        prev = cur
    return X - X.mean(axis=0)


def embed(q: QuboMatrix, r: float, theta: float | None = None,
          seed: int = 0) -> tuple[UnitDiskGraph, EmbeddingReport]:
    """Lay out ``q`` as a weighted unit-disk graph with blockade radius ``r``."""
    if not r > 0:
        raise ValueError("blockade radius must be positive")
    dec = decompose(q)
    if theta is None:
        theta = default_theta(dec)
    conflicts = intended_conflict_graph(dec, theta)

    n = q.n
    D = np.full((n, n), FREE_TARGET * r)
    for a, b in conflicts:
        D[a, b] = D[b, a] = CONFLICT_TARGET * r
    np.fill_diagonal(D, 0.0)
    xy = stress_layout(D, seed)

    w = vertex_weights(dec.h)
    g = UnitDiskGraph([Vertex(i, float(xy[i, 0]), float(xy[i, 1]), float(w[i])) for i in range(n)], r)

    realized_pairs = g.index_edges
    realized = len(conflicts & realized_pairs)
    spurious = len(realized_pairs - conflicts)
    fidelity = realized / len(conflicts) if conflicts else 1.0
    return g, EmbeddingReport(len(conflicts), realized, spurious, fidelity)
