"""QUBO instances: energy, h/J split, exhaustive oracle, random generation."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from rydqubo.errors import SizeLimitError

BRUTE_FORCE_LIMIT = 24


@dataclass(frozen=True, eq=False)
class QuboMatrix:
    """Symmetric real cost matrix; the objective is ``x^T Q x`` over binary ``x``.

    Asymmetric input is replaced by ``(Q + Q^T) / 2``, which leaves every
    objective value unchanged.
    """

    entries: np.ndarray

    def __post_init__(self):
        q = np.array(self.entries, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] == 0:
            raise ValueError(f"QUBO matrix must be square and non-empty, got shape {q.shape}")
        if not np.all(np.isfinite(q)):
            raise ValueError("QUBO matrix has non-finite entries")
        if not np.array_equal(q, q.T):
            q = 0.5 * (q + q.T)
        q.setflags(write=False)
        object.__setattr__(self, "entries", q)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other):
        return isinstance(other, QuboMatrix) and np.array_equal(self.entries, other.entries)

    def to_text(self) -> str:
        rows = [" ".join(repr(float(v)) for v in row) for row in self.entries]
        return "\n".join([str(self.n), *rows]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> QuboMatrix:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty QUBO file")
        try:
            n = int(lines[0])
            rows = [[float(tok) for tok in ln.split()] for ln in lines[1:]]
        except ValueError as exc:
            raise ValueError(f"malformed QUBO text: {exc}") from None
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError(f"expected {n} rows of {n} values")
        return cls(np.array(rows))

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> QuboMatrix:
        return cls.from_text(Path(path).read_text())


@dataclass(frozen=True, eq=False)
class IsingDecomposition:
    """Linear fields ``h`` (the diagonal) and zero-diagonal couplings ``J``."""

    h: np.ndarray
    J: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return np.diag(self.h) + self.J


def _as_bits(x, n: int) -> np.ndarray:
    bits = np.asarray(x)
    if bits.shape != (n,):
        raise ValueError(f"assignment length {bits.shape} does not match n={n}")
    if not np.all((bits == 0) | (bits == 1)):
        raise ValueError("assignment entries must be 0 or 1")
    return bits.astype(float)


def energy(q: QuboMatrix, x) -> float:
    """Return ``x^T Q x``."""
    bits = _as_bits(x, q.n)
    return float(bits @ q.entries @ bits)


def decompose(q: QuboMatrix) -> IsingDecomposition:
    h = np.diag(q.entries).copy()
    J = q.entries.copy()
    np.fill_diagonal(J, 0.0)
    h.setflags(write=False)
    J.setflags(write=False)
    return IsingDecomposition(h=h, J=J)


def _bit_table(k: int) -> np.ndarray:
    idx = np.arange(2**k, dtype=np.int64)
    return ((idx[:, None] >> np.arange(k)) & 1).astype(float)


def brute_force_solve(q: QuboMatrix) -> tuple[np.ndarray, float]:
    """Exhaustively minimise the QUBO.

    Ties go to the assignment with the smallest integer encoding, bit 0 being
    the least significant. The search is split into low and high halves of the
    bitstring so that only ``2**(n/2)``-row tables are ever materialised.
    """
    n = q.n
    if n > BRUTE_FORCE_LIMIT:
        raise SizeLimitError(f"brute force limited to n <= {BRUTE_FORCE_LIMIT}, got {n}")
    Q = q.entries
    n_lo = (n + 1) // 2
    n_hi = n - n_lo
    lo = _bit_table(n_lo)
    hi = _bit_table(n_hi)
    Q_ll = Q[:n_lo, :n_lo]
    Q_hh = Q[n_lo:, n_lo:]
    Q_lh = Q[:n_lo, n_lo:]
    e_lo = np.einsum("ki,ij,kj->k", lo, Q_ll, lo)
    e_hi = np.einsum("ki,ij,kj->k", hi, Q_hh, hi)
    cross = 2.0 * (lo @ Q_lh @ hi.T)  # (2**n_lo, 2**n_hi)

    best_e = np.inf
    best_idx = 0
    for h_idx in range(hi.shape[0]):
        col = e_lo + e_hi[h_idx] + cross[:, h_idx]
        l_idx = int(np.argmin(col))
        if col[l_idx] < best_e:
            best_e = col[l_idx]
            best_idx = l_idx | (h_idx << n_lo)
    x = ((best_idx >> np.arange(n)) & 1).astype(np.int8)
    return x, energy(q, x)


def random_instance(n: int, density: float, seed: int) -> QuboMatrix:
    """Random symmetric QUBO with uniform[-1, 1] entries.

    Each off-diagonal pair is nonzero with probability ``density``; the
    diagonal is always drawn.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, k=1)
    keep = rng.random(iu[0].size) < density
    vals = rng.uniform(-1.0, 1.0, iu[0].size)
    # a kept pair must stay nonzero even on an exact 0.0 draw
    vals[vals == 0.0] = np.finfo(float).tiny
    Q = np.zeros((n, n))
    Q[iu] = np.where(keep, vals, 0.0)
    Q = Q + Q.T
    Q[np.diag_indices(n)] = rng.uniform(-1.0, 1.0, n)
    return QuboMatrix(Q)
