import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padic_transport.errors import ParseError
from padic_transport.parser import parse_connection, parse_form, parse_rational
from padic_transport.ratfunc import RationalFunction, simple_fraction_residues

coef = st.integers(min_value=-9, max_value=9)
roots = st.integers(min_value=-6, max_value=6)


def test_form_to_rational_function():
    f = parse_form("2*dlog(z) - dlog(1-z) + 1/(z-3)*dz")
    # 2/z + 1/(z-1) ... with the sign of dlog(1-z) = dz/(z-1)
    expected = {Fraction(0): Fraction(2), Fraction(1): Fraction(-1), Fraction(3): Fraction(1)}
    assert simple_fraction_residues(f.rational_form()) == expected


def test_zero_form_and_coefficient_without_star():
    assert parse_form("0").is_zero()
    assert parse_form("3 dz").rational_form() == RationalFunction(3)
    assert parse_form("-dlog(z)").rational_form() == -parse_rational("1/z")


@given(st.lists(st.tuples(coef, roots), min_size=1, max_size=4))
@settings(max_examples=60, deadline=None)
def test_render_round_trip(terms):
    text = " + ".join(f"({c})*dlog(z - ({a}))" for c, a in terms)
    f = parse_form(text)
    again = parse_form(f.render())
    assert again.rational_form() == f.rational_form()


@given(st.lists(coef, min_size=1, max_size=5), st.fractions(min_value=-5, max_value=5, max_denominator=7))
@settings(max_examples=60, deadline=None)
def test_polynomial_evaluation(cs, x):
    text = " + ".join(f"({c})*z^{k}" for k, c in enumerate(cs))
    r = parse_rational(text)
    assert r(x) == sum(Fraction(c) * x ** k for k, c in enumerate(cs))


@pytest.mark.parametrize(
    "text",
    ["dlog(z", "dz dz", "2*", "dlog(0)", "z^", "dlog(z) +", "5 * * dz", "dlog(z) $"],
)
def test_malformed_forms(text):
    with pytest.raises(ParseError):
        parse_form(text)


def test_error_carries_position():
    with pytest.raises(ParseError) as info:
        parse_form("dlog(z")
    assert "column 7" in str(info.value)
    assert info.value.exit_code == 2


def test_connection_document():
    doc = {
        "prime": 5,
        "precision": 12,
        "rank": 2,
        "variable": "z",
        "matrix": [["0", "dlog(z)"], ["0", "0"]],
        "frobenius_lift": "z^p",
        "singularities": ["0", "inf"],
    }
    spec = parse_connection(json.dumps(doc))
    assert spec.prime == 5 and spec.precision == 12 and spec.rank == 2
    assert spec.rational_matrix()[0][1] == parse_rational("1/z")
    assert spec.frobenius_lift == parse_rational("z^5")
    assert spec.singularities == [Fraction(0), "inf"]


@pytest.mark.parametrize(
    "doc",
    [
        "{not json",
        json.dumps({"matrix": []}),
        json.dumps({"matrix": [["0", "0"], ["0"]]}),
        json.dumps({"rank": 3, "matrix": [["0"]]}),
        json.dumps({"matrix": [[1]]}),
        json.dumps({"matrix": [["dlog(z"]]}),
        json.dumps({"matrix": [["0"]], "frobenius_lift": "z^p"}),
        json.dumps({"matrix": [["0"]], "frobenius_lift": "1/z", "prime": 5}),
    ],
)
def test_bad_connection_documents(doc):
    with pytest.raises(ParseError):
        parse_connection(doc)
