import random
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from gaussforms import intmat
from gaussforms.enhance import BilinearForm
from gaussforms.errors import CapExceeded
from gaussforms.exactnum import QmodZ
from gaussforms.fingroup import (FinAbGroup, SubgroupSpan, enumerate_group, orthogonal_complement,
                                 p_part_embedding, quotient, span_from_mask, subquotient_group)
from oracles import enumerate_elements

small_groups = st.lists(st.integers(1, 8), min_size=0, max_size=3).map(FinAbGroup)


def brute_span(T, gens):
    out = {T.zero()}
    frontier = [T.zero()]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = T.add(x, g)
            if y not in out:
                out.add(y)
                frontier.append(y)
    return out


def order_profile(elements_orders):
    return sorted(Counter(elements_orders).items())


def test_enumeration_examples():
    assert len(enumerate_group(FinAbGroup([2, 2]))) == 4
    assert enumerate_group(FinAbGroup([])) == [()]
    Z6 = FinAbGroup([6])
    els = enumerate_group(Z6)
    assert len(els) == 6 and all(Z6.add(a, b) in els for a in els for b in els)


@given(small_groups)
def test_coordinates_and_indexing(T):
    assert [tuple(map(int, r)) for r in T.coords] == enumerate_elements(T.orders)
    for i in range(T.order):
        assert T.index(T.at(i)) == i


def test_cap(monkeypatch):
    monkeypatch.setenv("FORMS_ENUM_CAP", "50")
    with pytest.raises(CapExceeded):
        FinAbGroup([8, 8])
    FinAbGroup([7, 7])


@given(small_groups, st.data())
def test_span_matches_closure(T, data):
    idx = data.draw(st.lists(st.integers(0, T.order - 1), max_size=3))
    gens = [T.at(i) for i in idx]
    S = SubgroupSpan(T, gens)
    assert set(S.elements()) == brute_span(T, gens)
    again = span_from_mask(T, S.mask)
    assert np.array_equal(again.mask, S.mask)


@given(small_groups, st.data())
def test_quotient_has_right_isomorphism_type(T, data):
    idx = data.draw(st.lists(st.integers(0, T.order - 1), max_size=2))
    K = SubgroupSpan(T, [T.at(i) for i in idx])
    q = quotient(T, K)
    assert q.group.order * K.order == T.order
    # coset orders computed by brute force determine S/K up to isomorphism
    kset = set(K.elements())
    coset_orders = []
    seen = set()
    for t in enumerate_group(T):
        key = frozenset(T.add(t, k) for k in kset)
        if key in seen:
            continue
        seen.add(key)
        n = 1
        while T.scale(n, t) not in kset:
            n += 1
        coset_orders.append(n)
    Q = q.group
    q_orders = [Q.element_order(y) for y in enumerate_group(Q)]
    assert order_profile(q_orders) == order_profile(coset_orders)
    # projection is a homomorphism and the section is a right inverse
    for _ in range(10):
        a, b = T.at(data.draw(st.integers(0, T.order - 1))), T.at(data.draw(st.integers(0, T.order - 1)))
        assert q.project(T.add(a, b)) == Q.add(q.project(a), q.project(b))
        assert q.project(q.lift(q.project(a))) == q.project(a)


def test_quotient_examples():
    Z4 = FinAbGroup([4])
    assert quotient(Z4, SubgroupSpan(Z4, [(2,)])).group.orders == (2,)
    assert quotient(Z4, SubgroupSpan(Z4, [(1,)])).group.order == 1
    T = FinAbGroup([2, 4])
    assert sorted(quotient(T, SubgroupSpan(T, [(0, 2)])).group.orders) == [2, 2]


def test_subquotient_rejects_bad_inclusion():
    T = FinAbGroup([4])
    with pytest.raises(ValueError):
        subquotient_group(T, SubgroupSpan(T, [(2,)]), SubgroupSpan(T, [(1,)]))


def test_orthogonal_complement_examples():
    Z4 = FinAbGroup([4])
    b = BilinearForm(Z4, [[QmodZ(1, 4)]])
    perp = orthogonal_complement(Z4, b, SubgroupSpan(Z4, [(2,)]))
    assert set(perp.elements()) == {(0,), (2,)}
    assert orthogonal_complement(Z4, b, SubgroupSpan(Z4, [])).order == 4
    zero = BilinearForm(Z4, [[QmodZ(0)]])
    assert orthogonal_complement(Z4, zero, SubgroupSpan(Z4, [(1,)])).order == 4


@given(st.integers(0, 10**6))
def test_orthogonal_complement_brute_force(seed):
    rng = random.Random(seed)
    T = FinAbGroup([rng.randint(1, 6) for _ in range(rng.randint(1, 3))])
    k = T.rank
    gram = [[None] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            g = np.gcd(T.orders[i], T.orders[j])
            gram[i][j] = gram[j][i] = QmodZ(rng.randrange(g), g)
    b = BilinearForm(T, gram)
    K = SubgroupSpan(T, [T.at(rng.randrange(T.order))])
    expected = {t for t in enumerate_group(T) if all(b.value(t, x) == 0 for x in K.elements())}
    assert set(orthogonal_complement(T, b, K).elements()) == expected


def test_primary_parts():
    assert p_part_embedding(FinAbGroup([6]), 2)[0].orders == (2,)
    assert p_part_embedding(FinAbGroup([6]), 5)[0].order == 1
    assert p_part_embedding(FinAbGroup([12, 9]), 3)[0].orders == (3, 9)


@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=3, max_size=3))
def test_smith_form_against_sympy(rows):
    U, D, V, Vinv = intmat.smith_normal_form(rows)
    assert intmat.matmul(intmat.matmul(U, rows), V) == D
    assert intmat.matmul(V, Vinv) == intmat.identity(3)
    assert abs(intmat.det(U)) == 1 and abs(intmat.det(V)) == 1
    theirs = sympy_snf(sympy.Matrix(rows), domain=sympy.ZZ)
    assert [abs(D[i][i]) for i in range(3)] == [abs(int(theirs[i, i])) for i in range(3)]


@given(st.lists(st.lists(st.integers(-9, 9), min_size=4, max_size=4), min_size=4, max_size=4))
def test_det_and_inverse_against_sympy(rows):
    M = sympy.Matrix(rows)
    assert intmat.det(rows) == M.det()
    if M.det() != 0:
        inv = intmat.inverse_fraction(rows)
        assert [[Fraction(x) for x in r] for r in inv] == \
            [[Fraction(int(sympy.fraction(v)[0]), int(sympy.fraction(v)[1])) for v in M.inv().row(i)]
             for i in range(4)]
