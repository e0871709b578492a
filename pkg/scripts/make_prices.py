"""Write a synthetic adjusted-close CSV (correlated GBM with a few gaps).

    python scripts/make_prices.py --assets 50 --days 1080 --out prices.csv
"""

import argparse

from rydqubo.portfolio import synthetic_prices

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--assets", type=int, default=50)
    ap.add_argument("--days", type=int, default=1080)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="prices.csv")
    a = ap.parse_args()
    synthetic_prices(a.assets, a.days, a.seed).to_csv(a.out)
