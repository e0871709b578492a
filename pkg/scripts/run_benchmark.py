"""Generate a 50-asset synthetic price file and run the Q10..Q50 bench on it.

    python scripts/run_benchmark.py --out bench_out
"""

import argparse
import sys
from pathlib import Path

from rydqubo.cli import main
from rydqubo.portfolio import synthetic_prices

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "portfolio_bench.toml"

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="bench_out")
    ap.add_argument("--config", default=str(CONFIG))
    ap.add_argument("--seed", type=int, default=0, help="price generator seed")
    a = ap.parse_args()
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    prices = out / "prices.csv"
    synthetic_prices(50, 1080, a.seed).to_csv(prices)
    sys.exit(main(["-v", "bench", "--mode", "portfolio", "--prices", str(prices),
                   "--sizes", "10,20,30,40,50", "--config", a.config, "--out", str(out)]))
