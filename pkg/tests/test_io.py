import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liquidyn.errors import ValidationError
from liquidyn.io import (
    InputError,
    dump_indicators,
    dump_params,
    dump_scenario,
    format_scenario,
    load_indicators,
    load_params,
    load_scenario,
    load_time_series,
    parse_number,
    parse_scenario,
)
from liquidyn.model import GEORGIA_2024
from liquidyn.reference import GDP_GROWTH, INDICATORS, STRESS, data_path, reference_bundle
from liquidyn.scenario import TARGETS, Perturbation, Scenario

HEADER = "date,equity_price,bond_price,velocity,inflation,gini,credit_to_gdp,lcr,cds,beta,risk_premium"


def test_parse_number():
    assert parse_number("66.06%") == pytest.approx(0.6606, abs=1e-15)
    assert parse_number("−5.5%") == pytest.approx(-0.055)
    assert parse_number(" 1.2 ") == 1.2
    with pytest.raises(ValidationError):
        parse_number("abc")


def test_reference_dataset_reproduces_inputs():
    bundle = load_indicators(data_path(INDICATORS))
    ref = reference_bundle()
    assert bundle.credit_to_gdp == pytest.approx(0.6606, abs=1e-15)
    assert bundle.inflation_rate == pytest.approx(0.019, abs=1e-15)
    assert bundle.lcr == 1.0
    assert bundle.cds_spread == pytest.approx(0.0298, abs=1e-15)
    assert bundle.risk_premium == pytest.approx(0.0835, abs=1e-15)
    assert (bundle.gini, bundle.beta, bundle.shock_intensity) == (0.36, 1.2, 1.3475)
    assert bundle.velocity_series.tolist() == [3.69, 3.46]
    assert np.array_equal(bundle.equity_index_prices.to_numpy(), ref.equity_index_prices.to_numpy())


def test_headers_only(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text(HEADER + "\n")
    with pytest.raises(ValidationError, match="no data rows"):
        load_indicators(path)


def test_percent_cell_normalised(tmp_path):
    rows = [HEADER]
    dates = pd.bdate_range("2023-01-02", "2024-12-31")
    rng = np.random.default_rng(0)
    for i, d in enumerate(dates):
        scalars = ",2%,0.3,66.06%,1.1,0.03,1.1,0.08" if i == len(dates) - 1 else ",,,,,,,"
        velocity = "3.5" if i == 0 else ("3.4" if i == len(dates) - 1 else "")
        rows.append(f"{d.date()},{100 + rng.random()},{100 + rng.random()},{velocity}{scalars}")
    path = tmp_path / "pct.csv"
    path.write_text("\n".join(rows) + "\n")
    bundle = load_indicators(path)
    assert bundle.credit_to_gdp == pytest.approx(0.6606, abs=1e-15)
    assert bundle.inflation_rate == pytest.approx(0.02, abs=1e-15)
    assert bundle.shock_intensity is None


def _write_rows(tmp_path, rows):
    path = tmp_path / "bad.csv"
    path.write_text("\n".join([HEADER] + rows) + "\n")
    return path


def test_missing_column(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("date,equity_price\n2024-01-01,1\n")
    with pytest.raises(ValidationError, match="missing column"):
        load_indicators(path)


def test_non_numeric_cell_reports_row_and_column(tmp_path):
    path = _write_rows(tmp_path, ["2024-01-01,100,100,,,,,,,,", "2024-01-02,abc,100,,,,,,,,"])
    with pytest.raises(ValidationError, match="row 3, column equity_price"):
        load_indicators(path)


def test_non_increasing_dates(tmp_path):
    path = _write_rows(tmp_path, ["2024-01-02,100,100,,,,,,,,", "2024-01-01,100,100,,,,,,,,"])
    with pytest.raises(ValidationError, match="increasing"):
        load_indicators(path)


def test_missing_file():
    with pytest.raises(InputError):
        load_indicators("/nonexistent/file.csv")


def test_indicator_round_trip_idempotent(tmp_path):
    first = load_indicators(data_path(INDICATORS))
    dump_indicators(first, tmp_path / "a.csv")
    second = load_indicators(tmp_path / "a.csv")
    dump_indicators(second, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    for name in ("inflation_rate", "credit_to_gdp", "lcr", "cds_spread", "risk_premium"):
        assert getattr(first, name) == getattr(second, name)
    assert second.equity_index_prices.equals(first.equity_index_prices)


def test_time_series(tmp_path):
    ts = load_time_series(data_path(GDP_GROWTH))
    assert ts.start_time == 2010 and ts.step == 1 and len(ts) == 15
    assert ts.values[0] == pytest.approx(0.062)
    path = tmp_path / "gap.csv"
    path.write_text("year,v\n2010,1\n2011,2\n2013,3\n")
    with pytest.raises(ValidationError, match="evenly"):
        load_time_series(path)


# --- scenarios ------------------------------------------------------------------

def test_reference_stress_scenario():
    s = load_scenario(data_path(STRESS), baseline=GEORGIA_2024)
    assert s.name == "stress"
    assert s.fixed_epsilon == 0.4547
    assert len(s.perturbations) == 9
    assert [p.target for p in s.indicators] == ["velocity"]
    assert s.indicators[0].new_value == 2.8
    assert s.warnings == ()
    values = {p.target: p.new_value for p in s.perturbations}
    assert values["pressure"] == pytest.approx(0.055)
    assert values["diffusion_term"] == 0.78


def test_empty_scenario_file(tmp_path):
    path = tmp_path / "empty.scn"
    path.write_text("")
    s = load_scenario(path)
    assert s.perturbations == () and s.name == "empty"


def test_baseline_mismatch_warns():
    s = parse_scenario("beta: 1.2 -> 1.6", baseline=GEORGIA_2024.replace(beta=1.3))
    assert s.perturbations[0].new_value == 1.6
    assert len(s.warnings) == 1 and "beta" in s.warnings[0]


@pytest.mark.parametrize("text, match", [
    ("gamma: 1 -> 2", "unknown"),
    ("beta: 1 -> 2\nbeta: 2 -> 3", "duplicate"),
    ("beta: 1.2 ->", "malformed"),
    ("beta: -> 1.2", "malformed"),
    ("beta: 1 -> 2 -> 3", "malformed"),
    ("beta 1.2", "expected"),
])
def test_scenario_errors(text, match):
    with pytest.raises(ValidationError, match=match):
        parse_scenario(text)


def test_aliases_and_unicode_arrow():
    s = parse_scenario("inflation: 1.9% → 5.5%\nsigma_w: 2.2\n")
    assert [p.target for p in s.perturbations] == ["pressure", "shock"]
    assert s.perturbations[1].old_value is None


_values = st.floats(-1e6, 1e6, allow_nan=False)


@settings(max_examples=100)
@given(
    st.lists(st.sampled_from([t for t in TARGETS if t not in ("velocity", "stickiness")]),
             unique=True, max_size=8),
    st.data(),
    st.one_of(st.none(), _values),
)
def test_scenario_round_trip(targets, data, eps):
    perts = tuple(Perturbation(t, data.draw(_values), data.draw(st.one_of(st.none(), _values)))
                  for t in targets)
    indicators = (Perturbation("velocity", 2.8, 3.46),)
    s = Scenario(name="rt", perturbations=perts, fixed_epsilon=eps, indicators=indicators)
    assert parse_scenario(format_scenario(s)) == s


def test_dump_scenario_file(tmp_path):
    s = load_scenario(data_path(STRESS))
    dump_scenario(s, tmp_path / "x.scn")
    again = load_scenario(tmp_path / "x.scn")
    assert again == s


def test_params_round_trip(tmp_path):
    dump_params(GEORGIA_2024, tmp_path / "p.json")
    assert load_params(tmp_path / "p.json") == GEORGIA_2024
    (tmp_path / "partial.json").write_text('{"beta": 1.6, "inflation": "5.5%"}')
    p = load_params(tmp_path / "partial.json", base=GEORGIA_2024)
    assert p.beta == 1.6 and p.pressure == pytest.approx(0.055)
    (tmp_path / "bad.json").write_text('{"gamma": 1}')
    with pytest.raises(ValidationError, match="gamma"):
        load_params(tmp_path / "bad.json", base=GEORGIA_2024)
