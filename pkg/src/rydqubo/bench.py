"""Repeated-seed comparison of the Rydberg pipeline against simulated annealing."""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from rydqubo.annealing import anneal
from rydqubo.errors import DataError
from rydqubo.pipeline import PipelineConfig, min_separation, run_pipeline_traced
from rydqubo.portfolio import annualize, build_markowitz_qubo, load_prices, log_returns
from rydqubo.qubo import QuboMatrix, brute_force_solve, energy, random_instance

log = logging.getLogger(__name__)

METHODS = ("gp_naqc", "sim_annealing")
RANDOM_DENSITY = 0.3
ORACLE_MAX_N = 16


@dataclass(frozen=True)
class BenchmarkRow:
    instance_name: str
    method: str
    mean_energy: float
    std_energy: float
    repeats: int
    wall_time_s: float
    n: int = 0
    optimum: float | None = None

    @property
    def gap(self) -> float | None:
        return None if self.optimum is None else self.mean_energy - self.optimum


@dataclass(frozen=True)
class RunRecord:
    instance_name: str
    method: str
    repeat: int
    seed: int
    energy: float
    bits: str
    min_separation_over_r: float | None  # None for SA or fewer than two selected vertices


def run_seed(global_seed: int, instance_idx: int, method_idx: int, repeat: int) -> int:
    ss = np.random.SeedSequence(global_seed, spawn_key=(instance_idx, method_idx, repeat))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def instance_suite(mode: str, sizes, source=None, seed: int = 0,
                   gamma: float = 0.5, density: float = RANDOM_DENSITY) -> list[tuple[str, QuboMatrix]]:
    """Named instances ``Q<k>`` for each size ``k``.

    Portfolio instances use the first ``k`` price columns, so smaller
    instances are nested inside larger ones.
    """
    sizes = list(sizes)
    if not sizes:
        return []
    if mode == "portfolio":
        if source is None:
            raise ValueError("portfolio mode needs a price CSV")
        ps = load_prices(source)
        if max(sizes) > len(ps.asset_ids):
            raise DataError(f"suite needs {max(sizes)} assets but {source} has {len(ps.asset_ids)}")
        returns = log_returns(ps)
        return [(f"Q{k}", build_markowitz_qubo(annualize(returns[:, :k]), gamma)) for k in sizes]
    if mode == "random":
        return [(f"Q{k}", random_instance(k, density, seed + 7919 * k)) for k in sizes]
    raise ValueError(f"unknown instance mode {mode!r}")


def _solve_once(method: str, q: QuboMatrix, cfg: PipelineConfig, seed: int):
    if method == "gp_naqc":
        sol, trace = run_pipeline_traced(q, cfg, seed)
        sep = min_separation(trace.graph, sol.independent_set)
        ratio = None if np.isinf(sep) else sep / cfg.blockade_radius
        return sol.assignment, sol.qubo_energy, ratio
    x, e = anneal(q, replace(cfg.sa, seed=seed))
    return x, e, None


def run_benchmark(instances, cfg: PipelineConfig) -> tuple[list[BenchmarkRow], list[RunRecord]]:
    """Solve every instance ``cfg.repeats`` times with each method.

    An instance that raises is logged and skipped; the others still run.
    """
    if not instances:
        raise ValueError("instance list is empty")
    rows: list[BenchmarkRow] = []
    runs: list[RunRecord] = []
    for idx, (name, q) in enumerate(instances):
        try:
            optimum = brute_force_solve(q)[1] if q.n <= ORACLE_MAX_N else None
            inst_rows, inst_runs = [], []
            for m_idx, method in enumerate(METHODS):
                energies = []
                t0 = time.perf_counter()
                for rep in range(cfg.repeats):
                    seed = run_seed(cfg.global_seed, idx, m_idx, rep)
                    x, e, sep = _solve_once(method, q, cfg, seed)
                    if energy(q, x) != e:
                        raise RuntimeError(f"{name}/{method}/{rep}: reported energy does not rescore")
                    energies.append(e)
                    bits = "".join(str(int(b)) for b in x)
                    inst_runs.append(RunRecord(name, method, rep, seed, e, bits, sep))
                wall = time.perf_counter() - t0
                std = float(np.std(energies, ddof=1)) if len(energies) > 1 else 0.0
                inst_rows.append(BenchmarkRow(name, method, float(np.mean(energies)), std,
                                              cfg.repeats, wall, q.n, optimum))
                log.info("%s %s mean=%.4f std=%.4f (%.1fs)", name, method, inst_rows[-1].mean_energy, std, wall)
        except Exception:
            log.exception("instance %s failed; skipping", name)
            continue
        rows += inst_rows
        runs += inst_runs
    return rows, runs


def _num(v) -> str:
    return "" if v is None else f"{v:.6f}"


def write_results(out_dir, rows: list[BenchmarkRow], runs: list[RunRecord]) -> None:
    """Write results.csv, table.csv, runs.csv, timings.csv and per-run solution files.

    Everything except timings.csv depends only on config, seed and inputs.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "results.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["instance", "method", "n", "mean_energy", "std_energy", "repeats", "optimum", "gap"])
        for r in rows:
            w.writerow([r.instance_name, r.method, r.n, _num(r.mean_energy), _num(r.std_energy),
                        r.repeats, _num(r.optimum), _num(r.gap)])

    with open(out / "table.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["instance", "gp_naqc_mean", "gp_naqc_std", "sim_annealing_mean", "sim_annealing_std"])
        by_inst: dict[str, dict[str, BenchmarkRow]] = {}
        for r in rows:
            by_inst.setdefault(r.instance_name, {})[r.method] = r
        for name, per in by_inst.items():
            a, b = per.get("gp_naqc"), per.get("sim_annealing")
            w.writerow([name, _num(a and a.mean_energy), _num(a and a.std_energy),
                        _num(b and b.mean_energy), _num(b and b.std_energy)])

    with open(out / "runs.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["instance", "method", "repeat", "seed", "energy", "min_separation_over_r", "bitstring"])
        for r in runs:
            w.writerow([r.instance_name, r.method, r.repeat, r.seed, repr(r.energy),
                        _num(r.min_separation_over_r), r.bits])
            (out / f"solution_{r.instance_name}_{r.method}_{r.repeat}.txt").write_text(r.bits + "\n")

    with open(out / "timings.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["instance", "method", "wall_time_s"])
        for r in rows:
            w.writerow([r.instance_name, r.method, f"{r.wall_time_s:.3f}"])
