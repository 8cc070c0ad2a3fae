import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padic_transport.errors import ParseError, PreconditionError, UniquenessError
from padic_transport.padic import PadicContext
from padic_transport.phimod import (
    PhiNModule,
    TowerOfModules,
    analyze,
    canonical_element,
    check_monodromy_axioms,
    is_mixed,
    is_pure,
    is_weakly_admissible,
    monodromy_filtration,
    parse_module,
    parse_tower,
    t_H,
    t_N,
    weight_decomposition,
)

from generators import random_nilpotent
from oracles import brute_force_monodromy

P = 5
CTX = PadicContext(P, 20)


def padic_matrix(m):
    return [[CTX(x) for x in row] for row in m]


def dims_of(filt, n):
    return {i: len(filt.level(i)) for i in range(-n, n + 1)}


@given(st.integers(min_value=1, max_value=4), st.integers(min_value=0, max_value=10 ** 6))
@settings(max_examples=25, deadline=None)
def test_filtration_matches_brute_force(n, seed):
    N = random_nilpotent(random.Random(seed), n)
    filt = monodromy_filtration(padic_matrix(N))
    assert check_monodromy_axioms(padic_matrix(N), filt)
    found = brute_force_monodromy(N)
    assert found == [dims_of(filt, n)]


@given(st.integers(min_value=5, max_value=8), st.integers(min_value=0, max_value=10 ** 6))
@settings(max_examples=10, deadline=None)
def test_filtration_axioms_in_larger_dimension(n, seed):
    N = padic_matrix(random_nilpotent(random.Random(seed), n))
    assert check_monodromy_axioms(N, monodromy_filtration(N))


def test_jordan_block_filtration():
    n = 3
    N = [[Fraction(int(j == i + 1)) for j in range(n)] for i in range(n)]
    filt = monodromy_filtration(N)
    assert filt.graded_dims() == {-2: 1, -1: 0, 0: 1, 1: 0, 2: 1}


def test_axiom_checker_rejects_a_wrong_filtration():
    N = [[Fraction(0), Fraction(1)], [Fraction(0), Fraction(0)]]
    filt = monodromy_filtration(N)
    filt.M[-1] = [[Fraction(0), Fraction(1)]]
    filt.M[0] = [[Fraction(1), Fraction(0)]]
    assert not check_monodromy_axioms(N, filt)


def test_non_nilpotent_rejected():
    with pytest.raises(PreconditionError):
        monodromy_filtration([[Fraction(1)]])


def kummer_module():
    return PhiNModule(padic_matrix([[1, 0], [0, P]]), padic_matrix([[0, 1], [0, 0]]))


def test_relation_and_weights():
    m = kummer_module()
    assert m.relation_holds()
    assert weight_decomposition(m).dims() == {0: 1, 2: 1}
    # gr_(-1) carries eigenvalue 1 and gr_1 eigenvalue p: pure of weight 1
    assert is_pure(m, 1)
    assert not is_pure(m, 0)
    swapped = PhiNModule(padic_matrix([[P, 0], [0, 1]]), padic_matrix([[0, 1], [0, 0]]))
    assert not swapped.relation_holds()


def test_mixed_module():
    good = PhiNModule(
        padic_matrix([[P, 0], [0, 1]]),
        padic_matrix([[0, 0], [0, 0]]),
        W={0: [[CTX(0), CTX(1)]], 2: [[CTX(1), CTX(0)], [CTX(0), CTX(1)]]},
    )
    assert is_mixed(good)
    shifted = PhiNModule(good.phi, good.N, W={1: good.W[0], 2: good.W[2]})
    assert not is_mixed(shifted)


def test_hodge_and_newton_numbers():
    m = PhiNModule([[Fraction(1), 0], [0, Fraction(P)]], hodge=[0, 1], p=P)
    assert t_H(m) == 1 and t_N(m) == 1
    assert t_H(m, [[0, Fraction(1)]]) == 1
    assert t_N(m, [[0, Fraction(1)]]) == 1
    assert t_N(m, [[Fraction(1), 0]]) == 0


def test_weak_admissibility_examples():
    bad = PhiNModule([[Fraction(1)]], hodge=[1], p=P)
    res = is_weakly_admissible(bad)
    assert not res.admissible and (res.t_H, res.t_N) == (1, 0)
    good = PhiNModule([[Fraction(1), 0], [0, Fraction(P)]], hodge=[0, 1], p=P)
    assert is_weakly_admissible(good).admissible
    # the Hodge jump on the unit eigenline makes that line destabilizing
    swapped = PhiNModule([[Fraction(1), 0], [0, Fraction(P)]], hodge=[1, 0], p=P)
    res = is_weakly_admissible(swapped)
    assert not res.admissible and res.t_H == 1 and res.t_N == 0


def g_m_tower():
    ctx = PadicContext(P, 20)
    z, o = ctx.zero(), ctx.one()
    lv1 = PhiNModule([[o]])
    lv2 = PhiNModule([[o, z], [z, ctx(P)]], [[z, o], [z, z]])
    proj = [[o, z]]
    return TowerOfModules([lv1, lv2], [proj], [o])


def test_canonical_element_of_small_tower():
    can = canonical_element(g_m_tower())
    assert can.dimensions == [1, 1]
    assert can.element[0] == CTX(1)


def test_tower_with_extra_fixed_line_is_not_unique():
    ctx = CTX
    z, o = ctx.zero(), ctx.one()
    lv2 = PhiNModule([[o, z], [z, o]])
    t = TowerOfModules([PhiNModule([[o]]), lv2], [[[o, z]]], [o])
    with pytest.raises(UniquenessError) as info:
        canonical_element(t)
    assert info.value.exit_code == 5


def test_parse_module_and_analyze():
    doc = {"p": 5, "phi": [[1, 0], [0, 5]], "N": [[0, 1], [0, 0]], "hodge": [0, 1]}
    m = parse_module(json.dumps(doc))
    report = analyze(m)
    assert report["relation"] is True
    assert report["t_H"] == 1 and report["t_N"] == "1"
    assert report["monodromy_dims"] == {-1: 1, 0: 1, 1: 2}


@pytest.mark.parametrize(
    "doc",
    [
        "[1, 2",
        json.dumps({"phi": [[1]]}),
        json.dumps({"p": 5, "phi": [[1, 0]]}),
        json.dumps({"p": 5, "phi": [[1]], "weights": {"x": [[1]]}}),
        json.dumps({"p": 5, "phi": [[1]], "hodge": ["a"]}),
    ],
)
def test_parse_module_errors(doc):
    with pytest.raises(ParseError):
        parse_module(doc)


def test_parse_tower_round_trip():
    doc = {
        "p": 5,
        "levels": [{"phi": [[1]]}, {"phi": [[1, 0], [0, 5]], "N": [[0, 1], [0, 0]]}],
        "projections": [[[1, 0]]],
        "unit": [1],
    }
    can = canonical_element(parse_tower(json.dumps(doc)))
    assert can.dimensions == [1, 1]
