from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padic_transport.errors import PreconditionError
from padic_transport.logring import (
    KstElement,
    kst_derivation_N,
    kst_specialize,
    log_one_unit,
    plog,
    render_kst,
)
from padic_transport.padic import PadicContext, teichmuller

from oracles import frac_mod, iwasawa_plog

P = 5
CTX = PadicContext(P, 20)

nonzero = st.fractions(min_value=-500, max_value=500, max_denominator=40).filter(lambda a: a != 0)


def _matches_oracle(x, p, n):
    ctx = PadicContext(p, n)
    value = plog(ctx(x))
    unit, lcoef = iwasawa_plog(x, p, n)
    c0 = value.coefficient(0)
    # capped absolute precision: a rational with valuation v enters with O(p^n),
    # so its unit part (and hence Log) is known to O(p^(n - |v|))
    assert c0.prec >= n - abs(lcoef)
    return (c0.lift() - unit) % p ** c0.prec == 0 and value.coefficient(1) == ctx(lcoef)


@pytest.mark.parametrize("x", [2, 3, Fraction(1, 7), Fraction(-50, 3), 125])
def test_plog_matches_iwasawa_oracle(x):
    assert _matches_oracle(Fraction(x), P, 20)


def test_plog_matches_oracle_for_p7():
    for x in [Fraction(2), Fraction(10, 49), Fraction(-3)]:
        assert _matches_oracle(x, 7, 15)


@given(nonzero, nonzero)
@settings(max_examples=40, deadline=None)
def test_plog_is_a_homomorphism(a, b):
    assert plog(CTX(a * b)) == plog(CTX(a)) + plog(CTX(b))


def test_plog_of_p_is_the_symbol():
    assert plog(CTX(P)) == KstElement.symbol(CTX)
    assert render_kst(plog(CTX(P))).endswith("*L")


@pytest.mark.parametrize("a", [1, 2, 3, 4])
def test_plog_vanishes_on_roots_of_unity(a):
    assert plog(teichmuller(a, CTX)).is_zero()


def test_sign_is_minus_the_customary_logarithm():
    # customary log(1 + 5) = 5 - 25/2 + ..., so the branch starts with -5
    v = plog(CTX(6)).coefficient(0)
    assert (v + CTX(5)).valuation >= 2


def test_log_one_unit_requires_one_unit():
    with pytest.raises(PreconditionError):
        log_one_unit(CTX(2))


def test_derivation_and_specialization():
    L = KstElement.symbol(CTX)
    v = L * L * CTX(3) + L + CTX(1)
    assert kst_derivation_N(v) == L * CTX(6) + CTX(1)
    assert kst_specialize(v, 2) == CTX(15)
    assert v.degree == 2
    e2 = KstElement.symbol(CTX, e=2)
    assert kst_derivation_N(e2 * e2) == e2 * CTX(4)


def test_frobenius_fixes_symbol_for_rational_coefficients():
    v = plog(CTX(Fraction(3, 25)))
    assert v.frobenius() == v


def test_oracle_self_consistency():
    unit, _ = iwasawa_plog(Fraction(1), P, 10)
    assert unit == 0
    assert frac_mod(Fraction(1, 2), P, 3) * 2 % 125 == 1
