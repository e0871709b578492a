"""Command line: ``solve``, ``bench``, ``oracle`` and ``gen``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from rydqubo.annealing import anneal
from rydqubo.bench import instance_suite, run_benchmark, write_results
from rydqubo.pipeline import PipelineConfig, run_pipeline_traced
from rydqubo.qubo import QuboMatrix, brute_force_solve, random_instance


def _bits(x) -> str:
    return "".join(str(int(b)) for b in x)


def _config(args) -> PipelineConfig:
    cfg = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, global_seed=args.seed)
    if getattr(args, "repeats", None) is not None:
        cfg = dataclasses.replace(cfg, repeats=args.repeats)
    return cfg


def cmd_solve(args) -> int:
    q = QuboMatrix.load(args.instance)
    cfg = _config(args)
    if args.method == "gp_naqc":
        sol, trace = run_pipeline_traced(q, cfg, cfg.global_seed)
        x, e = sol.assignment, sol.qubo_energy
        rep = trace.report
        print(f"# embedding: {rep.realized_edges}/{rep.intended_edges} conflict edges realised, "
              f"{rep.spurious_edges} spurious, {trace.n_subgraphs} boxes (largest {trace.largest_subgraph})")
    else:
        x, e = anneal(q, dataclasses.replace(cfg.sa, seed=cfg.global_seed))
    print(_bits(x))
    print(f"energy {e!r}")
    if args.out:
        Path(args.out).write_text(_bits(x) + "\n")
    return 0


def cmd_oracle(args) -> int:
    x, e = brute_force_solve(QuboMatrix.load(args.instance))
    print(_bits(x))
    print(f"energy {e!r}")
    return 0


def cmd_gen(args) -> int:
    q = random_instance(args.n, args.density, args.seed)
    if args.out:
        q.save(args.out)
    else:
        sys.stdout.write(q.to_text())
    return 0


def cmd_bench(args) -> int:
    cfg = _config(args)
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    suite = instance_suite(args.mode, sizes, args.prices, cfg.global_seed, gamma=cfg.gamma)
    if not suite:
        print("no instances requested", file=sys.stderr)
        return 1
    rows, runs = run_benchmark(suite, cfg)
    write_results(args.out, rows, runs)
    print(f"{'instance':<10}{'method':<16}{'mean':>12}{'std':>10}")
    for r in rows:
        print(f"{r.instance_name:<10}{r.method:<16}{r.mean_energy:>12.4f}{r.std_energy:>10.4f}")
    missing = {name for name, _ in suite} - {r.instance_name for r in rows}
    if missing:
        print(f"failed instances: {sorted(missing)}", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rydqubo", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key = value config file (TOML)")
        sp.add_argument("--seed", type=int, help="overrides global_seed")

    s = sub.add_parser("solve", help="solve one QUBO file")
    s.add_argument("instance")
    s.add_argument("--method", choices=["gp_naqc", "sa"], default="gp_naqc")
    s.add_argument("--out", help="write the bitstring here")
    common(s)
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="repeated-seed benchmark over an instance suite")
    b.add_argument("--mode", choices=["portfolio", "random"], default="random")
    b.add_argument("--sizes", default="10,20,30,40,50")
    b.add_argument("--prices", help="price CSV for portfolio mode")
    b.add_argument("--repeats", type=int)
    b.add_argument("--out", default="bench_out")
    common(b)
    b.set_defaults(func=cmd_bench)

    o = sub.add_parser("oracle", help="exact minimum by enumeration (n <= 24)")
    o.add_argument("instance")
    o.set_defaults(func=cmd_oracle)

    g = sub.add_parser("gen", help="write a random QUBO instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--density", type=float, default=0.3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
