"""Markowitz mean-variance QUBO from historical adjusted closing prices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from rydqubo.errors import DataError
from rydqubo.qubo import QuboMatrix

TRADING_DAYS = 252
DEFAULT_GAMMA = 0.5


@dataclass(frozen=True, eq=False)
class PriceSeries:
    asset_ids: list[str]
    dates: list  # datetime.date, strictly increasing
    prices: np.ndarray  # (T, n)

    def __post_init__(self):
        if self.prices.shape != (len(self.dates), len(self.asset_ids)):
            raise ValueError("price matrix shape does not match dates x assets")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")
        if not np.all(np.isfinite(self.prices)) or np.any(self.prices <= 0):
            raise DataError("prices must be finite and positive after gap filling")


@dataclass(frozen=True, eq=False)
class ReturnStatistics:
    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        if not np.allclose(self.sigma, self.sigma.T, rtol=0, atol=1e-12):
            raise ValueError("covariance must be symmetric")
        if self.sigma.size and np.linalg.eigvalsh(self.sigma).min() < -1e-8:
            raise ValueError("covariance is not positive semidefinite")


def _numeric(col: pd.Series) -> pd.Series:
    col = col.str.strip()
    return pd.to_numeric(col.where(col != "", None))


def load_prices(path) -> PriceSeries:
    """Read a ``date,TICKER,...`` CSV and fill gaps per asset.

    Dates on which every asset is missing are dropped. Remaining gaps are
    forward filled, then leading gaps are back filled.
    """
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise ValueError(f"cannot parse price file {path}: {exc}") from None
    if df.shape[1] < 2 or df.columns[0].strip().lower() != "date":
        raise ValueError(f"{path}: header must be 'date,TICKER1,...'")
    try:
        dates = pd.to_datetime(df.iloc[:, 0].str.strip(), format="%Y-%m-%d")
        values = df.iloc[:, 1:].apply(_numeric)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    if not dates.is_monotonic_increasing or dates.duplicated().any():
        raise ValueError(f"{path}: dates are out of order or duplicated")

    values.index = dates
    for name in values.columns:
        if values[name].isna().all():
            raise DataError(f"asset {name!r} has no price data")
    values = values.dropna(how="all").ffill().bfill()
    return PriceSeries(
        asset_ids=[str(c) for c in values.columns],
        dates=[d.date() for d in values.index],
        prices=values.to_numpy(dtype=float),
    )


def log_returns(ps: PriceSeries) -> np.ndarray:
    if ps.prices.shape[0] < 2:
        raise DataError("need at least two price dates to form returns")
    return np.diff(np.log(ps.prices), axis=0)


def annualize(returns: np.ndarray) -> ReturnStatistics:
    """Annualised mean and unbiased sample covariance of daily returns."""
    r = np.asarray(returns, dtype=float)
    if r.ndim != 2 or r.shape[0] < 2:
        raise DataError("need at least two return rows")
    mu = r.mean(axis=0) * TRADING_DAYS
    sigma = np.atleast_2d(np.cov(r, rowvar=False, ddof=1)) * TRADING_DAYS
    sigma = 0.5 * (sigma + sigma.T)
    return ReturnStatistics(mu=mu, sigma=sigma)


def build_markowitz_qubo(stats: ReturnStatistics, gamma: float = DEFAULT_GAMMA) -> QuboMatrix:
    mu = np.asarray(stats.mu, dtype=float)
    sigma = np.asarray(stats.sigma, dtype=float)
    if gamma < 0:
        raise ValueError("risk aversion gamma must be non-negative")
    if sigma.shape != (mu.size, mu.size):
        raise ValueError(f"mu has {mu.size} assets but sigma has shape {sigma.shape}")
    Q = gamma * sigma
    Q[np.diag_indices(mu.size)] -= mu
    return QuboMatrix(Q)


def synthetic_prices(n_assets: int, n_days: int, seed: int = 0, gap_rate: float = 0.002) -> pd.DataFrame:
    """One-factor correlated geometric Brownian motion with random missing cells.

    Returns a frame indexed by ``date`` strings, ready for ``to_csv``.
    """
    rng = np.random.default_rng(seed)
    factor = rng.normal(0, 0.01, n_days)
    beta = rng.uniform(0.5, 1.5, n_assets)
    drift = rng.normal(0.0004, 0.0004, n_assets)
    idio = rng.normal(0, 0.012, (n_days, n_assets))
    logp = np.log(rng.uniform(20, 400, n_assets)) + np.cumsum(drift + factor[:, None] * beta + idio, axis=0)
    prices = np.round(np.exp(logp), 4)
    prices[rng.random(prices.shape) < gap_rate] = np.nan
    dates = pd.bdate_range("2021-01-04", periods=n_days)
    cols = [f"A{i:03d}" for i in range(n_assets)]
    return pd.DataFrame(prices, index=pd.Index(dates.strftime("%Y-%m-%d"), name="date"), columns=cols)


def portfolio_qubo(path, n_assets: int | None = None, gamma: float = DEFAULT_GAMMA) -> QuboMatrix:
    """Convenience chain: CSV -> returns -> statistics -> QUBO on the first ``n_assets`` columns."""
    ps = load_prices(path)
    k = len(ps.asset_ids) if n_assets is None else n_assets
    if k > len(ps.asset_ids):
        raise DataError(f"requested {k} assets but {path} has only {len(ps.asset_ids)}")
    stats = annualize(log_returns(ps)[:, :k])
    return build_markowitz_qubo(stats, gamma)
