"""Single-flip Metropolis simulated annealing for QUBO (the classical baseline)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from rydqubo.qubo import QuboMatrix, energy


@dataclass(frozen=True)
class AnnealConfig:
    """Geometric cooling from ``t_start`` to ``t_end`` over ``sweeps`` sweeps.

    ``t_start=None`` means ``2 * max|Q|`` of the instance being solved.
    """

    sweeps: int = 2000
    t_start: float | None = None
    t_end: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.sweeps < 0:
            raise ValueError("sweeps must be non-negative")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if self.t_start is not None and not self.t_start > self.t_end:
            raise ValueError("t_start must exceed t_end")

    def start_temperature(self, q: QuboMatrix) -> float:
        if self.t_start is not None:
            return self.t_start
        return max(2.0 * float(np.abs(q.entries).max()), 10.0 * self.t_end)


def temperatures(t_start: float, t_end: float, sweeps: int) -> np.ndarray:
    if sweeps <= 1:
        return np.full(sweeps, t_start)
    return t_start * (t_end / t_start) ** (np.arange(sweeps) / (sweeps - 1))


def flip_delta(Q: np.ndarray, x: np.ndarray, field: np.ndarray, i: int) -> float:
    """Energy change of flipping bit ``i``; ``field[i] = sum_{j != i} Q_ij x_j``."""
    return (1 - 2 * x[i]) * (Q[i, i] + 2.0 * field[i])


def anneal(q: QuboMatrix, cfg: AnnealConfig = AnnealConfig()) -> tuple[np.ndarray, float]:
    """Return the best assignment visited and its energy."""
    Q = q.entries
    n = q.n
    rng = np.random.default_rng(cfg.seed)
    x = rng.integers(0, 2, n).astype(float)
    field = Q @ x - np.diag(Q) * x
    e = energy(q, x)
    best_x, best_e = x.copy(), e

    for T in temperatures(cfg.start_temperature(q), cfg.t_end, cfg.sweeps):
        order = rng.permutation(n)
        u = rng.random(n)
        for i, ui in zip(order, u):
            delta = flip_delta(Q, x, field, i)
            if delta <= 0 or ui < np.exp(-delta / T):
                d = 1.0 - 2.0 * x[i]
                x[i] += d
                field += d * Q[i]
                field[i] -= d * Q[i, i]
                e += delta
                if e < best_e:
                    best_e, best_x = e, x.copy()
    best_x = best_x.astype(np.int8)
    return best_x, energy(q, best_x)
