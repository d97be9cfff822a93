"""Shared hypothesis strategies and fixtures data."""

from hypothesis import strategies as st

from liquidyn.model import ParameterSet

_real = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
_nonneg = st.floats(min_value=0, max_value=10, allow_nan=False, allow_infinity=False)
_pos = st.floats(min_value=1e-3, max_value=10, allow_nan=False, allow_infinity=False)

param_sets = st.builds(
    ParameterSet,
    rho=_pos, dv_dt=_real, internal_tension=_real, velocity=_pos, pressure=_real,
    stickiness=_nonneg, diffusion=_nonneg, shock=_real, risk_premium=_real, cds=_nonneg,
    beta=_nonneg, cyclical_force=_real, epsilon=_real,
)

STRESS_VALUES = dict(
    shock=2.2, dv_dt=-0.35, internal_tension=0.45, cyclical_force=0.04,
    stickiness=0.78, risk_premium=0.105, cds=0.045, beta=1.6, pressure=0.055,
)
