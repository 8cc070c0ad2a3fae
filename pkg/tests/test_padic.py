from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padic_transport.errors import ContextMismatch, ParseError
from padic_transport.padic import (
    PadicContext,
    is_prime,
    parse_padic,
    rational_reconstruct,
    render_padic,
    teichmuller,
    valuation_fraction,
)

from oracles import frac_mod, vp

P = 5
PREC = 12
CTX = PadicContext(P, PREC)

small = st.fractions(min_value=-1000, max_value=1000, max_denominator=50)
units = st.integers(min_value=1, max_value=10 ** 6).filter(lambda n: n % P)


def test_primality():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_valuations():
    assert valuation_fraction(Fraction(50, 3), 5) == 2
    assert valuation_fraction(Fraction(3, 125), 5) == -3
    assert CTX(Fraction(7, 25)).valuation == -2


@given(small, small)
@settings(max_examples=60, deadline=None)
def test_ring_operations_match_fractions(a, b):
    x, y = CTX(a), CTX(b)
    assert x + y == CTX(a + b)
    assert x - y == CTX(a - b)
    assert x * y == CTX(a * b)
    if b != 0:
        assert x / y == CTX(a / b)


@given(units)
@settings(max_examples=60, deadline=None)
def test_unit_residues_agree_with_modular_arithmetic(n):
    x = CTX(Fraction(1, n))
    assert x.lift() % P ** PREC == frac_mod(Fraction(1, n), P, PREC)


@given(small)
@settings(max_examples=40, deadline=None)
def test_render_parse_round_trip(a):
    x = CTX(a)
    assert parse_padic(render_padic(x), CTX) == x


@given(st.fractions(min_value=-30, max_value=30, max_denominator=30))
@settings(max_examples=40, deadline=None)
def test_rational_reconstruction(a):
    ctx = PadicContext(P, 20)
    assert rational_reconstruct(ctx(a)) == a


def test_precision_propagates_pessimistically():
    a = CTX(1).add_bigoh(4)
    b = CTX(P ** 2)
    assert (a + b).precision == 4
    assert (a * b).precision == 6
    assert CTX(P ** 3).invert().valuation == -3


def test_valuation_against_oracle():
    for n in [1, 5, 25, 250, 3 * 5 ** 6]:
        assert CTX(n).valuation == vp(n, P)


@pytest.mark.parametrize("p", [5, 7])
def test_teichmuller_is_root_of_unity(p):
    ctx = PadicContext(p, 15)
    for a in range(1, p):
        w = teichmuller(a, ctx)
        assert w ** (p - 1) == ctx.one()
        assert w.residue() == a


def test_unramified_extension_frobenius():
    ctx = PadicContext(5, 10, 2)
    t = ctx.gen()
    assert t.frobenius().frobenius() == t
    assert t.frobenius() != t
    assert (t * t).frobenius() == t.frobenius() * t.frobenius()


def test_mixing_contexts_is_rejected():
    with pytest.raises(ContextMismatch):
        CTX(1) + PadicContext(7, 12)(1)


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_padic("5^0 * (1 + ", CTX)
