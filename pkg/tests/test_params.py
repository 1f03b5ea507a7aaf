"""Parameter containers, validation, and flat-file config round trips."""
import dataclasses
import json
import math

import pytest
from hypothesis import given, strategies as st

from steeplab import (ParamError, RateReport, SystemParams, format_config,
                      parse_config, validate)

finite_pos = st.floats(min_value=1e-6, max_value=1e6,
                       allow_nan=False, allow_infinity=False)


def test_defaults_validate():
    p = SystemParams()
    assert validate(p) is p
    assert p.p_A == 1.0 and p.n_E == 2 and p.m_A == 4 and p.m_B == 0


@pytest.mark.parametrize("field,bad", [
    ("p_A", 0.0), ("p_A", -1.0),
    ("sigma_B2", 0.0), ("sigma_A2", -2.0),
    ("sigma_EA2", 0.0), ("sigma_EB2", -0.5),
    ("sigma_s2", 0.0),
    ("eps_A", -1e-9), ("eps_E", -1.0),
    ("n_E", 0), ("m_A", -1), ("m_B", -3),
])
def test_rejects_nonpositive(field, bad):
    p = dataclasses.replace(SystemParams(), **{field: bad})
    with pytest.raises(ParamError) as err:
        validate(p)
    assert field in str(err.value)


@pytest.mark.parametrize("rho", [1.0, -1.0, 1.2, 0.6 + 0.9j])
def test_rejects_rho_outside_unit_disc(rho):
    with pytest.raises(ParamError, match=r"\|rho\| must be < 1"):
        validate(dataclasses.replace(SystemParams(), rho=rho))


def test_accepts_complex_rho_inside_disc():
    validate(dataclasses.replace(SystemParams(), rho=0.3 - 0.4j))


def test_rejects_nonfinite():
    with pytest.raises(ParamError):
        validate(dataclasses.replace(SystemParams(), p_A=math.inf))
    with pytest.raises(ParamError):
        validate(dataclasses.replace(SystemParams(), sigma_s2=math.nan))


def test_eps_zero_is_allowed_in_container():
    # the no-return-noise regime is legal for formulas, only simulation
    # of the echo rejects it
    validate(dataclasses.replace(SystemParams(), eps_A=0.0, eps_E=0.0))


# ---------------------------------------------------------------- config

def test_parse_config_basic():
    text = """
    # comment line
    p_A = 2.5
    rho = 0.25
    n_E = 3
    m_A = 16
    """
    p = parse_config(text)
    assert p.p_A == 2.5 and p.rho == 0.25 and p.n_E == 3 and p.m_A == 16
    assert p.sigma_B2 == 1.0  # untouched default


def test_parse_config_unknown_key():
    with pytest.raises(ParamError, match="unknown config key 'bogus'"):
        parse_config("bogus = 1.0")


def test_parse_config_bad_syntax():
    with pytest.raises(ParamError):
        parse_config("p_A 2.5")


def test_parse_config_complex_rho():
    p = parse_config("rho = 0.3-0.4j")
    assert p.rho == 0.3 - 0.4j


@given(
    p_A=finite_pos, sigma_B2=finite_pos, sigma_s2=finite_pos,
    rho=st.floats(min_value=-0.99, max_value=0.99, allow_nan=False),
    n_E=st.integers(min_value=1, max_value=8),
    m_A=st.integers(min_value=0, max_value=100),
)
def test_config_round_trip(p_A, sigma_B2, sigma_s2, rho, n_E, m_A):
    p = dataclasses.replace(SystemParams(), p_A=p_A, sigma_B2=sigma_B2,
                            sigma_s2=sigma_s2, rho=rho, n_E=n_E, m_A=m_A)
    assert parse_config(format_config(p)) == p


# ---------------------------------------------------------------- report

def test_rate_report_json_round_trip():
    rep = RateReport(params=SystemParams(), values={"alpha": 0.5},
                     stderr={"alpha": 0.01}, notes=["n"])
    back = RateReport.from_json(rep.to_json())
    assert back.values == rep.values
    assert back.stderr == rep.stderr
    assert back.notes == rep.notes
    assert back.params == rep.params


def test_rate_report_json_round_trip_complex_rho():
    p = dataclasses.replace(SystemParams(), rho=0.3 - 0.4j)
    rep = RateReport(params=p, values={"a": 1.0}, stderr={}, notes=[])
    assert RateReport.from_json(rep.to_json()).params == p


def test_rate_report_json_is_plain_json():
    rep = RateReport(params=SystemParams(), values={"x": 1.0},
                     stderr={}, notes=[])
    payload = json.loads(rep.to_json())
    assert payload["values"]["x"] == 1.0


def test_rate_report_check_rejects_nonfinite():
    rep = RateReport(params=SystemParams(), values={"x": math.inf},
                     stderr={}, notes=[])
    with pytest.raises(ParamError):
        rep.check()
