"""Bundled reference inputs for the Georgia 2024 calibration."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import pandas as pd

from liquidyn.indicators import IndicatorBundle, synthetic_price_pair

# relative volatility behind the calibrated rho = 0.7421
REFERENCE_RATIO = 1 / 0.7421


def data_path(name: str) -> Path:
    return Path(str(resources.files("liquidyn") / "data" / name))


INDICATORS = "georgia_indicators.csv"
GDP_GROWTH = "georgia_gdp_growth.csv"
STRESS = "stress.scn"


def reference_bundle() -> IndicatorBundle:
    """Georgia 2024 indicators with synthetic daily prices (2020-2024).

    The price pair is generated so each year's equity/bond return-volatility
    ratio equals ``REFERENCE_RATIO``; the vendor series are not redistributed.
    """
    equity, bonds = synthetic_price_pair(REFERENCE_RATIO, seed=2024)
    velocity = pd.Series([3.69, 3.46], index=pd.DatetimeIndex(["2023-12-29", "2024-12-31"]))
    return IndicatorBundle(
        equity_index_prices=equity,
        sovereign_bond_prices=bonds,
        velocity_series=velocity,
        inflation_rate=0.019,
        gini=0.36,
        credit_to_gdp=0.6606,
        lcr=1.0,
        cds_spread=0.0298,
        beta=1.2,
        risk_premium=0.0835,
        shock_intensity=1.3475,
    )


def write_reference_indicators(path) -> None:
    from liquidyn.io import dump_indicators

    dump_indicators(reference_bundle(), path)
