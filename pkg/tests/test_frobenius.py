from fractions import Fraction

import pytest

from padic_transport.connection import LogConnection, canonical_gauge
from padic_transport.errors import PreconditionError
from padic_transport.frobenius import (
    FCrystal,
    FrobLift,
    change_of_lift,
    check_horizontality,
    dwork_extend,
    kummer_crystal,
    phi_on_psi,
    polylog_crystal,
    relation_holds,
    solve_frobenius_structure,
)
from padic_transport.padic import PadicContext
from padic_transport.parser import parse_rational
from padic_transport.ratfunc import Poly, RationalFunction
from padic_transport.series import DiskFunction

P = 5
CTX = PadicContext(P, 10)
ORDER = 30


def diag(*xs):
    return [[CTX(x) if i == j else CTX(0) for j in range(len(xs))] for i, x in enumerate(xs)]


def test_kummer_crystal():
    cr = kummer_crystal(CTX, ORDER)
    assert check_horizontality(cr) == 0
    psi = phi_on_psi(cr)
    assert psi.matrix == diag(1, P)
    assert relation_holds(psi)


@pytest.mark.parametrize("level", [2, 3])
def test_polylog_crystal(level):
    cr = polylog_crystal(CTX, level, ORDER)
    assert check_horizontality(cr) == 0
    psi = phi_on_psi(cr)
    assert relation_holds(psi)
    assert psi.psi.dimension == level


def test_phi_on_psi_is_independent_of_the_lift():
    cr = polylog_crystal(CTX, 3, ORDER)
    other = FrobLift.from_polynomial(Poly([0, 0, 0, 0, 0, 1, P]), CTX, ORDER)
    assert not other.is_standard()
    moved = change_of_lift(cr, other)
    assert check_horizontality(moved) == 0
    assert phi_on_psi(moved).matrix == phi_on_psi(cr).matrix


def test_wrong_structure_has_a_deficit():
    cr = kummer_crystal(CTX, ORDER)
    bad = [[DiskFunction.constant(CTX, 1, ORDER), DiskFunction.zero(CTX, ORDER)],
           [DiskFunction.zero(CTX, ORDER), DiskFunction.constant(CTX, 1, ORDER)]]
    assert check_horizontality(FCrystal(cr.conn, bad, cr.lift)) > 0


def test_lift_must_be_frobenius_like():
    with pytest.raises(PreconditionError):
        FrobLift(DiskFunction(CTX, [0, 1] + [0] * 8))
    with pytest.raises(PreconditionError):
        FrobLift(DiskFunction(CTX, [0] * 5 + [2] + [0] * 4))


def test_dwork_extension_agrees_with_direct_frame():
    one_minus = RationalFunction(0)
    conn = LogConnection.from_rational([[one_minus, parse_rational("1/(1-z)")], [one_minus, one_minus]], 0, CTX, 60)
    lift = FrobLift.standard(CTX, 60)
    phi = solve_frobenius_structure(conn, lift, diag(1, P))
    assert check_horizontality(FCrystal(conn, phi, lift)) == 0
    frame = canonical_gauge(conn)
    ext = dwork_extend(phi, lift.series, frame.gauge, 2, 1)
    assert ext.steps == 1
    for y in (CTX(10), CTX(15), CTX(Fraction(5, 3))):
        assert ext.evaluate(y) == frame.gauge_at(y)
