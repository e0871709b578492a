"""State-vector simulation of adiabatic Rydberg-array MWIS solving.

Units: micrometres for positions, microseconds for time, rad/us for
frequencies. Basis index bit ``i`` is the occupation ``n_i`` of atom ``i``
(1 = Rydberg). The register Hamiltonian is

    H(t) = sum_i Omega(t)/2 X_i
           - sum_i (Delta_global + Delta_local(t) * w_i) n_i
           + sum_{i<j} C6 / d_ij**6 n_i n_j

with pair interactions dropped beyond ``2.5 r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from rydqubo.embedding import distance_matrix
from rydqubo.errors import SizeLimitError
from rydqubo.partition import Subgraph

TWO_PI = 2 * math.pi
ATOM_CAP = 14
EXACT_LIMIT = 24
INTERACTION_CUTOFF = 2.5
DEFAULT_SHOTS = 100
# registers up to DENSE_MAX_ATOMS always use dense eigendecompositions; up to
# STIFF_DENSE_MAX_ATOMS they do so when the diagonal spread makes Lanczos slow
DENSE_MAX_ATOMS = 6
STIFF_DENSE_MAX_ATOMS = 8
STIFFNESS_LIMIT = 20.0  # diagonal spread x step length above which Lanczos needs many matvecs
KRYLOV_TOL = 1e-12
KRYLOV_MAX_DIM = 60
STEPPERS = ("gauss4", "midpoint")
_GAUSS_OFFSET = math.sqrt(3) / 6  # Gauss-Legendre nodes sit at mid -/+ this fraction of a step
_GAUSS_HEAVY = 0.5 + math.sqrt(3) / 3  # twice the larger commutator-free weight
_GAUSS_LIGHT = 0.5 - math.sqrt(3) / 3


@dataclass(frozen=True)
class DriveSchedule:
    """Trapezoidal Rabi pulse with a linear local-detuning ramp.

    ``delta_local_final`` may be left as ``None``; :meth:`for_weights` then
    picks it so the lightest atom ends with local detuning
    ``min_weight_detuning``. Weights lighter than ``w_max / max_weight_ratio``
    are treated as that floor when picking the scale, which keeps every
    resonance crossing after the Rabi ramp-up.
    """

    total_time: float = 4.0
    omega_max: float = TWO_PI * 1.2
    delta_global: float = -TWO_PI * 1.0
    delta_local_final: float | None = None
    ramp_fraction: float = 0.3
    min_weight_detuning: float = TWO_PI * 2.0
    max_weight_ratio: float = 2.0
    stepper: str = "gauss4"

    def __post_init__(self):
        if not self.total_time > 0:
            raise ValueError("total_time must be positive")
        if not self.omega_max >= 0:
            raise ValueError("omega_max must be non-negative")
        if not self.delta_global < 0:
            raise ValueError("delta_global must be negative")
        if self.delta_local_final is not None and not self.delta_local_final > 0:
            raise ValueError("delta_local_final must be positive")
        if not 0 < self.ramp_fraction < 0.5:
            raise ValueError("ramp_fraction must lie in (0, 0.5)")
        if not (self.min_weight_detuning > 0 and self.max_weight_ratio >= 1):
            raise ValueError("min_weight_detuning must be positive and max_weight_ratio >= 1")
        if self.stepper not in STEPPERS:
            raise ValueError(f"stepper must be one of {STEPPERS}")

    @property
    def default_dt(self) -> float:
        return self.total_time / 400

    def for_weights(self, weights) -> DriveSchedule:
        if self.delta_local_final is not None:
            return self
        if not len(weights):
            return replace(self, delta_local_final=self.min_weight_detuning)
        floor = max(float(np.min(weights)), float(np.max(weights)) / self.max_weight_ratio)
        return replace(self, delta_local_final=self.min_weight_detuning / floor)

    def omega(self, t: float) -> float:
        ramp = self.ramp_fraction * self.total_time
        if t <= 0 or t >= self.total_time:
            return 0.0
        if t < ramp:
            return self.omega_max * t / ramp
        if t > self.total_time - ramp:
            return self.omega_max * (self.total_time - t) / ramp
        return self.omega_max

    def delta_local(self, t: float) -> float:
        final = self.delta_local_final or 0.0
        return final * min(max(t / self.total_time, 0.0), 1.0)


@dataclass(frozen=True)
class InteractionModel:
    c6: float
    blockade_radius: float

    def __post_init__(self):
        if not (self.c6 > 0 and self.blockade_radius > 0):
            raise ValueError("c6 and blockade radius must be positive")

    @classmethod
    def calibrated(cls, blockade_radius: float, omega_max: float) -> InteractionModel:
        """Choose C6 so the interaction equals ``omega_max`` at the blockade radius."""
        return cls(c6=omega_max * blockade_radius**6, blockade_radius=blockade_radius)

    def potential(self, d):
        return self.c6 / np.asarray(d, dtype=float) ** 6


@dataclass(frozen=True, eq=False)
class QuantumState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        k = int(round(math.log2(amp.size))) if amp.size else -1
        if amp.ndim != 1 or amp.size != 2**k:
            raise ValueError("amplitude vector length must be a power of two")
        if abs(np.linalg.norm(amp) - 1.0) > 1e-9:
            raise ValueError("state is not normalised")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def n_atoms(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @classmethod
    def ground(cls, k: int) -> QuantumState:
        amp = np.zeros(2**k, dtype=complex)
        amp[0] = 1.0
        return cls(amp)


@dataclass(frozen=True)
class SubgraphSolution:
    ids: tuple[int, ...]
    selected: tuple[tuple[float, float, float], ...]
    total_weight: float
    shots_used: int = 0

    @classmethod
    def from_positions(cls, sub: Subgraph, positions, shots_used: int = 0) -> SubgraphSolution:
        positions = sorted(positions, key=lambda a: sub.vertices[a].id)
        verts = [sub.vertices[a] for a in positions]
        return cls(
            ids=tuple(v.id for v in verts),
            selected=tuple((v.x, v.y, v.weight) for v in verts),
            total_weight=float(sum(v.weight for v in verts)),
            shots_used=shots_used,
        )


class _Register:
    """Static pieces of the Hamiltonian for one subgraph."""

    def __init__(self, sub: Subgraph, model: InteractionModel):
        k = len(sub)
        if k > ATOM_CAP:
            raise SizeLimitError(f"state-vector simulation capped at {ATOM_CAP} atoms, got {k}")
        self.k = k
        dim = 2**k
        idx = np.arange(dim)
        self.occ = ((idx[None, :] >> np.arange(k)[:, None]) & 1).astype(float)  # (k, dim)
        self.n_total = self.occ.sum(axis=0)
        self.n_weighted = sub.weights @ self.occ if k else np.zeros(dim)

        vdiag = np.zeros(dim)
        d = distance_matrix(sub.coords)
        for i, j in combinations(range(k), 2):
            if d[i, j] <= INTERACTION_CUTOFF * model.blockade_radius:
                vdiag += float(model.potential(d[i, j])) * self.occ[i] * self.occ[j]
        self.vdiag = vdiag

        rows = np.concatenate([idx ^ (1 << i) for i in range(k)]) if k else np.zeros(0, int)
        cols = np.tile(idx, k)
        self.xsum = sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(dim, dim))

    def apply_xsum(self, v: np.ndarray) -> np.ndarray:
        """``sum_i X_i v`` using strided views instead of a sparse product."""
        out = np.zeros_like(v)
        for i in range(self.k):
            out += v.reshape(-1, 2, 2**i)[:, ::-1, :].reshape(-1)
        return out

    def diagonal(self, delta_global: float, delta_local_scale: float) -> np.ndarray:
        return -delta_global * self.n_total - delta_local_scale * self.n_weighted + self.vdiag

    def sparse(self, omega, delta_global, delta_local_scale):
        return (0.5 * omega) * self.xsum + sp.diags(self.diagonal(delta_global, delta_local_scale))

    def dense(self, omega, delta_global, delta_local_scale) -> np.ndarray:
        H = (0.5 * omega) * self.xsum.toarray()
        H[np.diag_indices_from(H)] += self.diagonal(delta_global, delta_local_scale)
        return H


def _krylov_step(matvec, psi: np.ndarray, h: float) -> np.ndarray:
    """``exp(-i h H) psi`` by Lanczos with full reorthogonalisation.

    The subspace grows until the standard a-posteriori error estimate drops
    below ``KRYLOV_TOL``; if it never does, the step is halved.
    """
    beta0 = np.linalg.norm(psi)
    V = np.empty((KRYLOV_MAX_DIM + 1, psi.size), dtype=complex)
    V[0] = psi / beta0
    alpha = np.zeros(KRYLOV_MAX_DIM)
    beta = np.zeros(KRYLOV_MAX_DIM)
    for j in range(KRYLOV_MAX_DIM):
        w = matvec(V[j])
        alpha[j] = np.vdot(V[j], w).real
        w -= alpha[j] * V[j]
        if j:
            w -= beta[j - 1] * V[j - 1]
        w -= V[: j + 1].T @ (V[: j + 1] @ w.conj()).conj()
        beta[j] = np.linalg.norm(w)
        m = j + 1
        evals, evecs = scipy.linalg.eigh_tridiagonal(alpha[:m], beta[: m - 1])
        c = evecs @ (np.exp(-1j * h * evals) * evecs[0].conj())
        if beta[j] < 1e-14 * max(1.0, abs(alpha[j])) or beta[j] * abs(c[-1]) < KRYLOV_TOL:
            return beta0 * (V[:m].T @ c)
        V[j + 1] = w / beta[j]
    half = _krylov_step(matvec, psi, h / 2)
    return _krylov_step(matvec, half, h / 2)


def _prefer_dense(reg: _Register, sched: DriveSchedule, h: float) -> bool:
    if reg.k <= DENSE_MAX_ATOMS:
        return True
    if reg.k > STIFF_DENSE_MAX_ATOMS:
        return False
    diag = reg.diagonal(sched.delta_global, sched.delta_local_final)
    return float(np.ptp(diag)) * h > STIFFNESS_LIMIT


def _dense_sweep(reg: _Register, delta_global: float, factors, psi: np.ndarray,
                 chunk: int = 256) -> np.ndarray:
    """Apply ``exp(-i h H)`` for each ``(h, omega, delta_local)`` in order.

    Each frozen Hamiltonian is real symmetric, so its exponential comes from
    an eigendecomposition; unlike scaling and squaring the cost does not grow
    with ``|H| h``, which matters for tightly packed registers whose blockade
    energies are huge. Steps are diagonalised in stacked batches.
    """
    X = reg.xsum.toarray()
    diag_idx = np.diag_indices(X.shape[0])
    for start in range(0, len(factors), chunk):
        block = np.asarray(factors[start:start + chunk])
        h, omega, delta_local = block[:, 0], block[:, 1], block[:, 2]
        H = 0.5 * omega[:, None, None] * X
        H[:, diag_idx[0], diag_idx[1]] += reg.diagonal(delta_global, delta_local[:, None])
        evals, evecs = np.linalg.eigh(H)
        phases = np.exp(-1j * h[:, None] * evals)
        for s in range(len(block)):
            psi = evecs[s] @ (phases[s] * (evecs[s].T @ psi))
    return psi


def build_hamiltonian(sub: Subgraph, model: InteractionModel, omega: float,
                      delta_global: float, delta_local_scale: float) -> np.ndarray:
    """Dense ``2**k`` register Hamiltonian at fixed drive parameters."""
    return _Register(sub, model).dense(omega, delta_global, delta_local_scale).astype(complex)


def _step_parameters(sched: DriveSchedule, t0: float, t1: float):
    """Drive values ``(h, omega, delta_local)`` of the exponentials making up one step.

    ``midpoint`` samples the waveforms once at mid-step. ``gauss4`` is the
    fourth-order commutator-free scheme: two half-length exponentials whose
    generators blend the waveforms at the two Gauss-Legendre nodes, the
    earlier node weighted more heavily in the first factor.
    """
    h = t1 - t0
    tm = 0.5 * (t0 + t1)
    if sched.stepper == "midpoint":
        return [(h, sched.omega(tm), sched.delta_local(tm))]
    ta, tb = tm - _GAUSS_OFFSET * h, tm + _GAUSS_OFFSET * h
    oa, ob = sched.omega(ta), sched.omega(tb)
    la, lb = sched.delta_local(ta), sched.delta_local(tb)
    return [
        (0.5 * h, _GAUSS_HEAVY * oa + _GAUSS_LIGHT * ob, _GAUSS_HEAVY * la + _GAUSS_LIGHT * lb),
        (0.5 * h, _GAUSS_LIGHT * oa + _GAUSS_HEAVY * ob, _GAUSS_LIGHT * la + _GAUSS_HEAVY * lb),
    ]


def evolve(sub: Subgraph, model: InteractionModel, sched: DriveSchedule,
           dt: float | None = None, normalize: bool = True) -> QuantumState | np.ndarray:
    """Integrate the schedule from ``|0...0>`` in steps of ``dt``.

    Within a step the Hamiltonian is frozen at drive values chosen by
    ``sched.stepper``. Small or stiff registers apply each step propagator
    through a full eigendecomposition, the rest by Lanczos converged to
    ``KRYLOV_TOL``. With ``normalize=False`` the raw amplitude vector is
    returned, which lets callers inspect the accumulated norm drift.
    """
    sched = sched.for_weights(sub.weights)
    T = sched.total_time
    if dt is None:
        dt = sched.default_dt
    if not 0 < dt <= T / 100 * (1 + 1e-12):
        raise ValueError(f"dt must lie in (0, T/100], got {dt}")
    reg = _Register(sub, model)
    psi = np.zeros(2**reg.k, dtype=complex)
    psi[0] = 1.0
    if reg.k == 0:
        return QuantumState(psi)

    n_steps = max(1, math.ceil(T / dt - 1e-9))
    edges = np.linspace(0.0, T, n_steps + 1)
    factors = [f for t0, t1 in zip(edges[:-1], edges[1:]) for f in _step_parameters(sched, t0, t1)]
    if _prefer_dense(reg, sched, max(f[0] for f in factors)):
        psi = _dense_sweep(reg, sched.delta_global, factors, psi)
    else:
        for h, omega, delta_local in factors:
            half_omega, diag = 0.5 * omega, reg.diagonal(sched.delta_global, delta_local)
            psi = _krylov_step(lambda v: half_omega * reg.apply_xsum(v) + diag * v, psi, h)
    if not normalize:
        return psi
    return QuantumState(psi / np.linalg.norm(psi))


def sample(state: QuantumState, shots: int, seed: int) -> np.ndarray:
    """Draw ``shots`` measurement outcomes; row ``s`` column ``i`` is ``n_i``."""
    if shots < 1:
        raise ValueError("shots must be positive")
    p = state.probabilities()
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    outcomes = rng.choice(p.size, size=shots, p=p)
    k = state.n_atoms
    return ((outcomes[:, None] >> np.arange(k)) & 1).astype(np.uint8)


def _as_bit_rows(shots, k: int) -> list[tuple[int, ...]]:
    rows = []
    for s in shots:
        bits = tuple(int(c) for c in s)
        if len(bits) != k:
            raise ValueError(f"bitstring length {len(bits)} does not match {k} atoms")
        rows.append(bits)
    return rows


def _repair(bits, weights, ids, adj) -> list[int]:
    chosen = {a for a, b in enumerate(bits) if b}
    while True:
        violators = {a for a in chosen if adj[a] & chosen}
        if not violators:
            return sorted(chosen)
        chosen.remove(min(violators, key=lambda a: (weights[a], ids[a])))


def repair_and_select(sub: Subgraph, shots) -> SubgraphSolution:
    """Turn raw samples into the best independent set they support.

    Each shot is made independent by dropping the lightest vertex on a
    violated edge until none remain. The heaviest repaired set wins and is
    then greedily extended with any vertex that still fits.
    """
    k = len(sub)
    rows = _as_bit_rows(shots, k)
    if not rows:
        raise ValueError("need at least one shot")
    weights, ids = sub.weights, sub.ids
    adj = [set() for _ in range(k)]
    for a, b in sub.index_edges:
        adj[a].add(b)
        adj[b].add(a)

    best, best_key = None, None
    for bits in dict.fromkeys(rows):
        chosen = _repair(bits, weights, ids, adj)
        key = (-sum(weights[a] for a in chosen), sorted(ids[a] for a in chosen))
        if best_key is None or key < best_key:
            best, best_key = chosen, key

    selected = set(best)
    for a in sorted(range(k), key=lambda a: (-weights[a], ids[a])):
        if a not in selected and not adj[a] & selected:
            selected.add(a)
    return SubgraphSolution.from_positions(sub, selected, shots_used=len(rows))


def exact_mwis(sub: Subgraph) -> SubgraphSolution:
    """Exhaustive maximum-weight independent set.

    Ties resolve to the lexicographically smallest sorted id tuple.
    """
    k = len(sub)
    if k > EXACT_LIMIT:
        raise SizeLimitError(f"exact MWIS limited to {EXACT_LIMIT} vertices, got {k}")
    if k == 0:
        return SubgraphSolution((), (), 0.0)
    w = sub.weights
    nbr = np.zeros(k, dtype=np.int64)
    for a, b in sub.index_edges:
        nbr[a] |= 1 << b
        nbr[b] |= 1 << a

    k_lo = (k + 1) // 2
    lo_masks = np.arange(2**k_lo, dtype=np.int64)
    hi_masks = np.arange(2 ** (k - k_lo), dtype=np.int64) << k_lo

    def table(masks, positions):
        bits = (masks[:, None] >> np.array(positions, dtype=np.int64)) & 1
        weight = bits @ w[positions] if positions else np.zeros(masks.size)
        blocked = np.zeros(masks.size, dtype=np.int64)
        for col, a in enumerate(positions):
            blocked |= np.where(bits[:, col] == 1, nbr[a], 0)
        return weight, blocked

    w_lo, blk_lo = table(lo_masks, list(range(k_lo)))
    w_hi, blk_hi = table(hi_masks, list(range(k_lo, k)))
    ok_lo = (blk_lo & lo_masks) == 0
    ok_hi = (blk_hi & hi_masks) == 0

    best_w, best_masks = -np.inf, []
    tol = 1e-12 * max(1.0, float(w.sum()))
    for h in np.nonzero(ok_hi)[0]:
        valid = ok_lo & ((blk_hi[h] & lo_masks) == 0)
        tot = np.where(valid, w_lo + w_hi[h], -np.inf)
        m = tot.max()
        if m > best_w + tol:
            best_w, best_masks = m, []
        if m >= best_w - tol:
            best_masks += [int(lo_masks[i] | hi_masks[h]) for i in np.nonzero(tot >= m - tol)[0]]

    ids = sub.ids
    candidates = [[a for a in range(k) if mask >> a & 1] for mask in best_masks]
    heaviest = max(sum(w[a] for a in c) for c in candidates)
    chosen = min((c for c in candidates if sum(w[a] for a in c) >= heaviest - tol),
                 key=lambda c: sorted(ids[a] for a in c))
    return SubgraphSolution.from_positions(sub, chosen)


def job_seed(global_seed: int, sub: Subgraph) -> int:
    """Per-box seed, independent of the order in which boxes are solved."""
    i, j = sub.box_index
    ss = np.random.SeedSequence(global_seed, spawn_key=(sub.level, i & 0xFFFFFFFF, j & 0xFFFFFFFF))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def solve_subgraph(sub: Subgraph, model: InteractionModel, sched: DriveSchedule,
                   shots: int = DEFAULT_SHOTS, seed: int = 0, dt: float | None = None) -> SubgraphSolution:
    k = len(sub)
    if k == 0:
        return SubgraphSolution((), (), 0.0)
    if k <= ATOM_CAP:
        state = evolve(sub, model, sched, dt)
        return repair_and_select(sub, sample(state, shots, seed))
    return exact_mwis(sub)
