"""End-to-end QUBO solve: embed, partition, simulate each box, merge."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from rydqubo.ahs import ATOM_CAP, DEFAULT_SHOTS, DriveSchedule, InteractionModel, job_seed, solve_subgraph
from rydqubo.annealing import AnnealConfig
from rydqubo.embedding import EmbeddingReport, UnitDiskGraph, distance_matrix, embed
from rydqubo.merger import GlobalSolution, finalize, merge
from rydqubo.partition import DEFAULT_BOX_FACTOR, extract_subgraphs, partition
from rydqubo.qubo import QuboMatrix

DEFAULT_RADIUS = 7.5  # um


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage} stage failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    blockade_radius: float = DEFAULT_RADIUS
    box_side: float | None = None
    theta: float | None = None
    schedule: DriveSchedule = field(default_factory=DriveSchedule)
    dt: float | None = None
    shots: int = DEFAULT_SHOTS
    atom_cap: int = ATOM_CAP
    sa: AnnealConfig = field(default_factory=AnnealConfig)
    gamma: float = 0.5
    repeats: int = 5
    global_seed: int = 0

    def __post_init__(self):
        if not self.blockade_radius > 0:
            raise ValueError("blockade_radius must be positive")
        if self.box_side is not None and not self.box_side > 2 * self.blockade_radius:
            raise ValueError("box_side must exceed 2 * blockade_radius")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if not 1 <= self.atom_cap <= ATOM_CAP:
            raise ValueError(f"atom_cap must lie in [1, {ATOM_CAP}]")

    @property
    def resolved_box_side(self) -> float:
        return self.box_side if self.box_side is not None else DEFAULT_BOX_FACTOR * self.blockade_radius

    def interaction(self) -> InteractionModel:
        return InteractionModel.calibrated(self.blockade_radius, self.schedule.omega_max)

    @classmethod
    def from_mapping(cls, data: dict) -> PipelineConfig:
        """Build from a parsed config; ``[schedule]`` and ``[sa]`` tables are optional."""
        data = dict(data)
        sched = data.pop("schedule", {})
        sa = data.pop("sa", {})
        for key in list(data):
            if key.startswith("schedule.") or key.startswith("sa."):
                table, _, name = key.partition(".")
                (sched if table == "schedule" else sa)[name] = data.pop(key)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(schedule=DriveSchedule(**sched), sa=AnnealConfig(**sa), **data)

    @classmethod
    def load(cls, path) -> PipelineConfig:
        with open(path, "rb") as fh:
            return cls.from_mapping(tomllib.load(fh))


@dataclass(frozen=True, eq=False)
class PipelineTrace:
    graph: UnitDiskGraph
    report: EmbeddingReport
    n_subgraphs: int
    largest_subgraph: int


def run_pipeline_traced(q: QuboMatrix, cfg: PipelineConfig,
                        seed: int = 0) -> tuple[GlobalSolution, PipelineTrace]:
    stage = "embed"
    try:
        g, report = embed(q, cfg.blockade_radius, cfg.theta, seed)
        stage = "partition"
        p = partition(g, cfg.resolved_box_side)
        subs = extract_subgraphs(g, p, max_atoms=cfg.atom_cap)
        stage = "solve"
        model = cfg.interaction()
        local = [solve_subgraph(sub, model, cfg.schedule, cfg.shots, job_seed(seed, sub), cfg.dt)
                 for sub in subs]
        stage = "merge"
        ids = merge(g, local)
        stage = "finalize"
        sol = finalize(q, g, ids)
    except Exception as exc:
        raise PipelineError(stage, exc) from exc
    trace = PipelineTrace(g, report, len(subs), max((len(s) for s in subs), default=0))
    return sol, trace


def run_pipeline(q: QuboMatrix, cfg: PipelineConfig, seed: int = 0) -> GlobalSolution:
    """Approximate ``argmin x^T Q x`` through the grid-partitioned Rydberg MWIS route."""
    return run_pipeline_traced(q, cfg, seed)[0]


def min_separation(g: UnitDiskGraph, ids) -> float:
    """Smallest pairwise distance among ``ids`` (inf for fewer than two)."""
    ids = list(ids)
    if len(ids) < 2:
        return float("inf")
    xy = np.array([[g.vertex(v).x, g.vertex(v).y] for v in ids])
    d = distance_matrix(xy)
    return float(d[np.triu_indices(len(ids), k=1)].min())
