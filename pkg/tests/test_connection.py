from fractions import Fraction

import pytest

from padic_transport.connection import (
    LogConnection,
    NotUnipotentError,
    canonical_gauge,
    certified_radius,
    horizontality_residual,
    is_unipotent,
    kst_identity,
    kst_mat_equal,
    kst_mat_mul,
    local_transport,
    psi_un,
    residue,
    std_log,
)
from padic_transport.logring import plog
from padic_transport.padic import PadicContext
from padic_transport.parser import parse_rational
from padic_transport.ratfunc import RationalFunction

from oracles import taylor_transport

P = 5
PREC = 12
CTX = PadicContext(P, PREC)
ORDER = 40


def rat(text):
    return parse_rational(text) if text != "0" else RationalFunction(0)


def conn_of(rows, order=ORDER, ctx=CTX):
    return LogConnection.from_rational([[rat(t) for t in row] for row in rows], 0, ctx, order)


LEVEL3 = [["0", "1/z", "0"], ["0", "0", "1/(1-z)"], ["0", "0", "0"]]
LEVEL3_FORMS = {(0, 1): ([1], [0, 1]), (1, 2): ([1], [1, -1])}


def test_transport_matches_taylor_oracle():
    x0, x1 = Fraction(5), Fraction(30)
    t = local_transport(conn_of(LEVEL3), CTX(x0), CTX(x1))
    ref = taylor_transport(LEVEL3_FORMS, x0, x1, 80)
    for i in range(3):
        for j in range(3):
            assert t[i][j].degree <= 0
            assert t[i][j].coefficient(0) == CTX(ref[i][j]), (i, j)


def test_model_transport_is_exponential_of_log():
    n = [[CTX(0), CTX(1)], [CTX(0), CTX(0)]]
    conn = LogConnection.model(n, CTX, 20)
    t = local_transport(conn, CTX(2 * P), CTX(3 * P))
    # dY = N dlog z Y gives Y_01 = log(x1) - log(x0) in the customary sign
    assert t[0][1] == std_log(CTX(3 * P)) - std_log(CTX(2 * P))
    assert t[0][1] == plog(CTX(2)) - plog(CTX(3))


def test_groupoid_law_in_one_disk():
    conn = conn_of(LEVEL3)
    a, b, c = CTX(5), CTX(30), CTX(55)
    lhs = kst_mat_mul(local_transport(conn, b, c), local_transport(conn, a, b), CTX)
    assert kst_mat_equal(lhs, local_transport(conn, a, c))
    assert kst_mat_equal(local_transport(conn, a, a), kst_identity(CTX, 3))


def test_gauge_is_horizontal():
    conn = conn_of(LEVEL3, order=20)
    frame = canonical_gauge(conn)
    for row in horizontality_residual(conn, frame):
        for v in row:
            for f in v.terms.values():
                assert all(c.is_zero() for c in f.coeffs[: conn.order - 1])


def test_certified_radius_of_geometric_gauge():
    frame = canonical_gauge(conn_of(LEVEL3, order=20))
    # coefficients like 1/k^2 decay slowly: convergent on the open unit disk only
    rho = certified_radius(frame)
    assert 0 < rho < 1


@pytest.mark.parametrize(
    "rows,level",
    [
        ([["0", "1/z"], ["0", "0"]], 2),
        (LEVEL3, 2),
        ([["0", "1/z", "0"], ["0", "0", "1/z"], ["0", "0", "0"]], 3),
        ([["0", "1/(z-1)"], ["0", "0"]], 1),
    ],
)
def test_unipotent_catalog(rows, level):
    conn = conn_of(rows, order=15)
    psi, _ = psi_un(conn)
    assert psi.dimension == conn.rank
    assert is_unipotent(conn) == (True, level)


@pytest.mark.parametrize("a", [Fraction(1, 2), Fraction(1, 3), Fraction(2, 7)])
def test_scalar_non_integer_residue_is_not_unipotent(a):
    conn = conn_of([[f"{a.numerator}/({a.denominator}*z)"]], order=10)
    assert not residue(conn).nilpotent
    with pytest.raises(NotUnipotentError):
        psi_un(conn)
    assert is_unipotent(conn) == (False, None)


def test_tensor_dual_direct_sum_ranks():
    a = conn_of([["0", "1/z"], ["0", "0"]], order=10)
    assert a.tensor(a).rank == 4
    assert a.direct_sum(a).rank == 4
    assert a.dual().rank == 2
    psi, _ = psi_un(a.tensor(a))
    assert psi.dimension == 4
