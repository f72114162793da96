import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaussforms.enhance import (Hom, TwoLinearForm, hom_form, negate, orthogonal_sum, radical,
                                scalar_mul, shift_by_element, uf, zero_form)
from gaussforms.errors import NotTame, TheoremViolated
from gaussforms.exactnum import CycSum, QmodZ
from gaussforms.fingroup import FinAbGroup, SubgroupSpan
from gaussforms.gauss import (NOT_TAME, beta, beta_and_e, eighth_phases_batch, gauss_norm,
                              gauss_sum, magnitude_check, phase_from_sum, verify_delta_beta,
                              verify_phase_batch, verify_shift, verify_subquotient)
from gaussforms.generators import random_group, random_isotropic_subgroup, random_two_linear
from oracles import numeric_phase, numeric_sum

seeds = st.integers(0, 2**32)
Q = QmodZ


def random_form(seed, max_order=200, **kw):
    rng = random.Random(seed)
    return random_two_linear(rng, random_group(rng, max_order), **kw)


def test_sum_examples():
    assert gauss_sum(zero_form(FinAbGroup([7]))) == 7
    assert gauss_sum(uf(2)) == CycSum(4, [1, 1, 0, 0])
    h = hom_form(Hom(FinAbGroup([6]), [Q(1, 3)]))
    assert gauss_sum(h).is_zero()


@given(seeds)
def test_exact_sum_matches_numeric_sum(seed):
    psi = random_form(seed)
    assert abs(gauss_sum(psi).numeric() - numeric_sum(psi)) < 1e-6


def test_magnitude_examples():
    assert str(magnitude_check(uf(2))) == "SqrtOf(2)"
    assert str(magnitude_check(scalar_mul(2, uf(2)))) == "Zero"
    assert magnitude_check(scalar_mul(2, uf(4))).square == 8


@given(seeds)
def test_magnitude_law(seed):
    psi = random_form(seed)
    z = numeric_sum(psi)
    rad = radical(psi)
    expected = rad.order * psi.group.order if rad.is_zero() else 0
    assert abs(abs(z) ** 2 - expected) < 1e-6
    assert magnitude_check(psi).square == expected
    assert gauss_norm(gauss_sum(psi)).integer_value() == expected


@pytest.mark.parametrize("psi,expected", [
    (uf(2), Q(1, 8)), (uf(3), Q(1, 4)), (uf(5), Q(0)), (uf(4), Q(1, 8)),
    (scalar_mul(3, uf(2)), Q(7, 8)), (scalar_mul(2, uf(3)), Q(3, 4)),
    (scalar_mul(2, uf(4)), Q(1, 8)), (negate(uf(2)), Q(7, 8)),
])
def test_beta_examples(psi, expected):
    assert beta(psi) == expected


def test_beta_not_tame():
    assert beta(scalar_mul(2, uf(2))) is NOT_TAME
    assert str(NOT_TAME) == "NOT TAME" and not NOT_TAME


@given(seeds)
def test_beta_matches_numeric_angle(seed):
    psi = random_form(seed)
    b = beta(psi)
    z = numeric_sum(psi)
    if b is NOT_TAME:
        assert abs(z) < 1e-6
        return
    L = 8 * psi.den
    assert b.at_denominator(L) == numeric_phase(z, L)


@given(seeds)
def test_large_level_path_agrees_with_full_scan(seed):
    psi = random_form(seed, 400)
    if beta(psi) is NOT_TAME:
        return
    g = gauss_sum(psi)
    assert phase_from_sum(g, scan=True) == phase_from_sum(g, scan=False)


def test_large_cyclic_forms():
    # phases of x^2/n for n large enough to use the numeric proposal
    for n, want in [(1009, Q(0)), (1019, Q(1, 4)), (2048, Q(1, 8)), (4096 * 3, Q(1, 8))]:
        assert beta(uf(n)) == want


def test_beta_and_e():
    assert beta_and_e(uf(9), 3) == (Q(0), 2)
    assert beta_and_e(scalar_mul(3, uf(9)), 3) == (Q(1, 4), 1)
    b, e = beta_and_e(scalar_mul(2, uf(2)), 2)
    assert b is NOT_TAME and e is None


# structural identities ------------------------------------------------------


def test_subquotient_examples():
    psi = orthogonal_sum(uf(2), negate(uf(2)))
    assert verify_subquotient(psi, SubgroupSpan(psi.group, []))
    K = SubgroupSpan(psi.group, [(1, 1)])
    assert verify_subquotient(psi, K)
    assert gauss_sum(psi) == 2


@given(seeds)
def test_subquotient_identity_random(seed):
    rng = random.Random(seed)
    psi = random_two_linear(rng, random_group(rng, 200))
    K = random_isotropic_subgroup(rng, psi)
    if K is not None:
        assert verify_subquotient(psi, K)


def test_shift_examples():
    assert verify_shift(uf(2), (0,))
    assert verify_shift(uf(2), (1,))
    assert beta(shift_by_element(uf(2), (1,))) == Q(7, 8) == beta(negate(uf(2)))
    with pytest.raises(NotTame):
        verify_shift(scalar_mul(2, uf(2)), (1,))


@given(seeds)
def test_shift_and_delta_beta_random(seed):
    psi = random_form(seed, 120)
    b = beta(psi)
    if b is NOT_TAME:
        return
    T = psi.group
    for i in range(0, T.order, max(1, T.order // 5)):
        x = T.at(i)
        z = numeric_sum(shift_by_element(psi, x))
        L = 8 * 2 * psi.den
        assert (b - psi.value(x)).at_denominator(L) == numeric_phase(z, L)
    assert verify_delta_beta(psi)


def test_magnitude_check_raises_on_inconsistency(monkeypatch):
    import gaussforms.gauss as g
    monkeypatch.setattr(g, "radical", lambda psi: type("R", (), {"order": 5, "is_zero": lambda s: True})())
    with pytest.raises(TheoremViolated):
        g.magnitude_check(uf(3))


# batched checks -------------------------------------------------------------


def test_verify_phase_batch():
    n = 11
    x = np.arange(n)
    tables = np.stack([(a * x * x) % n for a in range(1, n)])
    # a psi has phase 1/4 for residues, 3/4 for non-residues (11 = 3 mod 4)
    squares = {(y * y) % n for y in range(1, n)}
    expected = [Q(1, 4) if a in squares else Q(3, 4) for a in range(1, n)]
    assert verify_phase_batch(tables, n, expected).all()
    wrong = [e + Q(1, 2) for e in expected]
    assert not verify_phase_batch(tables, n, wrong).any()
    zero = np.stack([np.zeros(4, dtype=np.int64) + (np.arange(4) % 2) * 2])
    assert not verify_phase_batch(zero, 4, [Q(0)]).any()


def test_eighth_phases_batch():
    x = np.arange(4)
    tables = np.stack([(c * x * x) % 8 for c in range(8)])
    zero, phase = eighth_phases_batch(tables, 8)
    for c in range(8):
        psi = TwoLinearForm(FinAbGroup([4]), tables[c], 8)
        b = beta(psi)
        if b is NOT_TAME:
            assert zero[c]
        else:
            assert not zero[c] and QmodZ(int(phase[c]), 8) == b
