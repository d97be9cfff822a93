"""Derive balance parameters from raw macro-financial indicators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from liquidyn.errors import DegenerateInputError, ValidationError
from liquidyn.model import ParameterSet

MIN_OBS_PER_YEAR = 30
TRADING_DAYS = 252

SHOCK_ESTIMATOR_FORMULA = (
    "sigma_W = std(r) * sqrt(252) * R / (std(r) * sqrt(n)), "
    "R = max - min of cumsum(r - mean(r)) including the origin, population std"
)


@dataclass(frozen=True)
class IndicatorBundle:
    equity_index_prices: pd.Series
    sovereign_bond_prices: pd.Series
    velocity_series: pd.Series
    inflation_rate: float
    gini: float
    credit_to_gdp: float
    lcr: float
    cds_spread: float
    beta: float
    risk_premium: float
    shock_intensity: Optional[float] = None

    def __post_init__(self):
        for name in ("equity_index_prices", "sovereign_bond_prices"):
            _check_price_series(getattr(self, name), name)
        _check_dated(self.velocity_series, "velocity_series")
        scalars = ("inflation_rate", "gini", "credit_to_gdp", "lcr", "cds_spread",
                   "beta", "risk_premium", "shock_intensity")
        for name in scalars:
            value = getattr(self, name)
            if value is None:
                continue
            if not math.isfinite(float(value)):
                raise ValidationError(f"must be finite, got {value}", name)
        if not 0.0 <= self.gini <= 1.0:
            raise ValidationError(f"must lie in [0, 1], got {self.gini}", "gini")
        for name in ("lcr", "credit_to_gdp"):
            if getattr(self, name) < 0:
                raise ValidationError(f"must be >= 0, got {getattr(self, name)}", name)


def _check_dated(series: pd.Series, name: str) -> None:
    if len(series) == 0:
        raise ValidationError("series is empty", name)
    index = pd.DatetimeIndex(series.index)
    if not index.is_monotonic_increasing or index.has_duplicates:
        raise ValidationError("dates must be strictly increasing", name)
    if not np.all(np.isfinite(series.to_numpy(dtype=float))):
        raise ValidationError("series contains non-finite values", name)


def _check_price_series(series: pd.Series, name: str) -> None:
    _check_dated(series, name)
    if (series.to_numpy(dtype=float) <= 0).any():
        raise ValidationError("prices must be strictly positive", name)


def annual_volatility(prices: pd.Series, name: str = "prices") -> pd.Series:
    """Population std of simple daily returns, one value per calendar year.

    A return is bucketed into the year of its closing date. Years with fewer
    than ``MIN_OBS_PER_YEAR`` returns are dropped.
    """
    prices = pd.Series(prices.to_numpy(dtype=float), index=pd.DatetimeIndex(prices.index))
    returns = prices.pct_change().iloc[1:]
    by_year = returns.groupby(returns.index.year)
    counts = by_year.count()
    stds = by_year.std(ddof=0)[counts >= MIN_OBS_PER_YEAR]
    if len(stds) < 2:
        raise ValidationError(
            f"need at least 2 calendar years with >= {MIN_OBS_PER_YEAR} returns, "
            f"got {len(stds)}", name)
    return stds


def market_inertia(equity_prices: pd.Series, bond_prices: pd.Series) -> dict[str, float]:
    """Relative equity/bond volatility and the market inertia ``rho = 1 / ratio``."""
    equity = annual_volatility(equity_prices, "equity_index_prices").mean()
    bonds = annual_volatility(bond_prices, "sovereign_bond_prices").mean()
    if bonds == 0:
        raise DegenerateInputError("bond-side volatility is zero", "sovereign_bond_prices")
    if equity == 0:
        raise DegenerateInputError("equity-side volatility is zero", "equity_index_prices")
    ratio = float(equity / bonds)
    return {"relative_volatility": ratio, "rho": 1.0 / ratio}


def velocity_delta(v_now: float, v_prev: float) -> float:
    return float(v_now) - float(v_prev)


def estimate_shock_intensity(returns, periods_per_year: int = TRADING_DAYS) -> float:
    """Stand-in estimator for the stochastic shock scale.

    Annualised volatility multiplied by the rescaled range ``R / (s * sqrt(n))``
    of the demeaned cumulative returns. See ``SHOCK_ESTIMATOR_FORMULA``. The
    estimate is positively homogeneous of degree one in ``returns``.
    """
    r = np.asarray(returns, dtype=float)
    if r.ndim != 1 or r.size < 30:
        raise ValidationError(f"need at least 30 returns, got {r.size}", "returns")
    if not np.all(np.isfinite(r)):
        raise ValidationError("returns contain non-finite values", "returns")
    s = r.std()
    if s == 0 or s < 1e-15 * np.abs(r).max():
        raise DegenerateInputError("returns have zero volatility", "returns")
    path = np.concatenate(([0.0], np.cumsum(r - r.mean())))
    rescaled_range = (path.max() - path.min()) / (s * math.sqrt(r.size))
    return float(s * math.sqrt(periods_per_year) * rescaled_range)


def derive_parameters(bundle: IndicatorBundle, cyclical_force: float,
                      epsilon: float) -> ParameterSet:
    """Map an indicator bundle onto the thirteen balance parameters."""
    velocity = bundle.velocity_series
    if len(velocity) < 2:
        raise ValidationError("need at least 2 observations", "velocity_series")
    inertia = market_inertia(bundle.equity_index_prices, bundle.sovereign_bond_prices)
    shock = bundle.shock_intensity
    if shock is None:
        try:
            shock = estimate_shock_intensity(bundle.equity_index_prices.pct_change().iloc[1:])
        except ValidationError as exc:
            raise ValidationError(str(exc), "shock_intensity") from exc
    v_prev, v_now = (float(x) for x in velocity.iloc[-2:])
    return ParameterSet(
        rho=inertia["rho"],
        dv_dt=velocity_delta(v_now, v_prev),
        internal_tension=bundle.gini,
        velocity=v_now,
        pressure=bundle.inflation_rate,
        stickiness=bundle.credit_to_gdp,
        diffusion=bundle.lcr,
        shock=shock,
        risk_premium=bundle.risk_premium,
        cds=bundle.cds_spread,
        beta=bundle.beta,
        cyclical_force=cyclical_force,
        epsilon=epsilon,
    )


def synthetic_price_pair(ratio: float, start: str = "2020-01-01", end: str = "2024-12-31",
                         bond_vol: float = 0.004, seed: int = 0) -> tuple[pd.Series, pd.Series]:
    """Business-day equity/bond price pair whose per-year return std ratio is exactly ``ratio``.

    Returns within each calendar year are standardised and rescaled, so every
    year's population std is ``ratio * bond_vol`` (equity) and ``bond_vol``
    (bonds) up to float rounding.
    """
    dates = pd.bdate_range(start, end)
    rng = np.random.default_rng(seed)
    years = dates[1:].year
    series = []
    for scale in (ratio * bond_vol, bond_vol):
        z = rng.standard_normal(len(dates) - 1)
        for year in np.unique(years):
            mask = years == year
            chunk = z[mask]
            z[mask] = (chunk - chunk.mean()) / chunk.std()
        prices = 100.0 * np.concatenate(([1.0], np.cumprod(1.0 + scale * z)))
        series.append(pd.Series(prices, index=dates))
    return series[0], series[1]
