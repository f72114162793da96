import random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from gaussforms import intmat
from gaussforms.enhance import orthogonal_sum, scalar_mul, uf
from gaussforms.errors import DetDivisibleByP, MalformedDecomposition, NotCoprime
from gaussforms.exactnum import QmodZ
from gaussforms.fingroup import FinAbGroup
from gaussforms.gauss import NOT_TAME, beta, beta_and_e
from gaussforms.generators import random_group, random_nonsingular, random_tame_quadratic
from gaussforms.lattice import brown_form, tensor
from gaussforms.modp import (Layer, OdqDecomposition, ReducedBlock, ReducedDecomposition,
                             beta_gtp, beta_gtp_packed, beta_lsmx, beta_multiplier, beta_u,
                             bullet_product, kirby_melvin, kron, phi_p, pseudo_hyperbolic_identity,
                             realize_odq, reduce_mod_pr, scaled_reduction, sigma_p, vp)

seeds = st.integers(0, 2**32)
Q = QmodZ
diag, hyp = ReducedBlock.diag, ReducedBlock.hyp


def congruent(M, B, C, mod):
    lhs = sympy.Matrix(M).T * sympy.Matrix(B) * sympy.Matrix(M)
    return all((lhs[i, j] - C[i][j]) % mod == 0 for i in range(len(C)) for j in range(len(C)))


# reduction ------------------------------------------------------------------


def test_reduction_examples():
    dec = reduce_mod_pr([[1, 0], [0, 2]], 2, 3)
    assert [(l.i, l.blocks) for l in dec.layers] == [(0, (diag(1),)), (1, (diag(1),))]
    dec = reduce_mod_pr([[0, 1], [1, 0]], 2, 3)
    assert [(l.i, l.blocks) for l in dec.layers] == [(0, (hyp(0, 0),))]
    dec = reduce_mod_pr([[2, 1], [1, 2]], 3, 2)
    (a,), (b,) = dec.layer(0), dec.layer(1)
    assert a.values[0] % 3 == 2 and dec.layers[1].i == 1
    assert (a.values[0] * b.values[0] * 3 - 3) % 9 == 0


@pytest.mark.parametrize("p", [2, 3, 5])
@given(seed=seeds)
def test_witness_is_an_independent_congruence(p, seed):
    rng = random.Random(seed)
    B = random_nonsingular(rng, 5, 9)
    r = rng.randint(1, 4)
    dec = reduce_mod_pr(B, p, r, rng=rng)
    v = vp(intmat.det(B), p)
    assert dec.r == max(r, v + 1, 3 if p == 2 else 1)
    assert sympy.Matrix(dec.witness).det() % p != 0
    assert congruent(dec.witness, B, dec.assembled(), p ** dec.r)
    for layer in dec.layers:
        assert intmat.det(layer.matrix()) % p != 0
        assert p == 2 or all(b.kind == "diag" for b in layer.blocks)
    # similarity keeps the square class of the unit part of the determinant
    if v == 0:
        assert phi_p(intmat.det(dec.assembled()), p) == phi_p(intmat.det(B), p)
    assert ReducedDecomposition.from_json(dec.to_json()) == dec


def test_decomposition_json_shape():
    dec = reduce_mod_pr([[1, 0, 0], [0, 0, 1], [0, 1, 0]], 2, 3)
    doc = dec.to_json()
    assert doc["p"] == 2 and doc["r"] == 3
    assert doc["layers"] == [{"i": 0, "blocks": [{"diag": 1}, {"hyp": [0, 0]}]}]


# local invariants -------------------------------------------------------------


def test_sigma_examples():
    assert sigma_p([[1, 0, 0], [0, 2, 0], [0, 0, 7]], 3) == 3
    assert sigma_p([[1, 0], [0, 3]], 2) == 4
    assert sigma_p([[2, 1], [1, 2]], 2) == 0
    assert sigma_p([diag(7), diag(5)], 2) == (-1 - 3) % 8
    with pytest.raises(DetDivisibleByP):
        sigma_p([[2]], 2)


@given(seeds)
def test_sigma2_is_the_phase_of_the_u4_tensor(seed):
    rng = random.Random(seed)
    B = random_nonsingular(rng, 4, 9, condition=lambda B, d: d % 2)
    values = {sigma_p(reduce_mod_pr(B, 2, 3, rng=rng).layer(0), 2) for _ in range(4)}
    assert len(values) == 1
    assert beta(tensor(B, uf(4))) == Q(values.pop(), 8)


@given(seeds)
def test_sigma2_vanishes_on_even_forms(seed):
    rng = random.Random(seed)
    B = random_nonsingular(rng, 4, 9, even=True, condition=lambda B, d: d % 2)
    assert sigma_p(B, 2) == 0


def test_phi_examples():
    assert phi_p(2, 3) == 1
    assert phi_p(7, 2) == 0 and phi_p(3, 2) == 1
    assert phi_p(4, 5) == 0
    with pytest.raises(NotCoprime):
        phi_p(6, 3)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_phi_is_the_legendre_symbol(p):
    for a in range(-40, 40):
        if a % p:
            assert phi_p(a, p) == (0 if sympy.legendre_symbol(a % p, p) == 1 else 1)


def test_phi2_by_square_classes():
    odd_squares_mod8 = {(x * x) % 8 for x in range(1, 8, 2)}
    for a in range(-31, 32, 2):
        assert phi_p(a, 2) == (0 if (a % 8) in odd_squares_mod8 or (-a % 8) in odd_squares_mod8 else 1)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
@given(seed=seeds)
def test_sigma_and_phi_are_multiplicative(p, seed):
    rng = random.Random(seed)
    cond = lambda B, d: d % p != 0
    C = random_nonsingular(rng, 3, 5, condition=cond)
    R = random_nonsingular(rng, 3, 5, condition=cond)
    CR = kron(C, R)
    assert sigma_p(CR, p) == (sigma_p(C, p) * sigma_p(R, p)) % 8
    lhs = phi_p(intmat.det(CR), p)
    rhs = (sigma_p(C, p) * phi_p(intmat.det(R), p) + phi_p(intmat.det(C), p) * sigma_p(R, p)) % 2
    assert lhs == rhs


def test_pseudo_hyperbolic_identity():
    for m1 in range(-3, 4):
        for m2 in range(-3, 4):
            M = pseudo_hyperbolic_identity(m1, m2)
            B = [[-1, 0, 0], [0, 2 * m1, 1], [0, 1, 2 * m2]]
            C = [[2 * m1 - 1, 0, 0], [0, 2 * m2 - 1, 0], [0, 0, 1 - 2 * m1 - 2 * m2]]
            assert congruent(M, B, C, 8) and sympy.Matrix(M).det() % 2


# closed forms against brute force ---------------------------------------------


def test_multiplier_examples():
    assert beta_multiplier(Q(1, 4), 1, 3, 4) == Q(1, 4)
    assert beta_multiplier(Q(1, 4), 1, 3, 2) == Q(3, 4) == beta(scalar_mul(2, uf(3)))
    assert beta_multiplier(Q(1, 8), 1, 2, 3) == Q(7, 8) == beta(scalar_mul(3, uf(2)))


@pytest.mark.parametrize("p", [2, 3, 5, 7])
@given(seed=seeds)
def test_multiplier_random(p, seed):
    rng = random.Random(seed)
    psi = random_tame_quadratic(rng, random_group(rng, 200, max_rank=2, prime=p))
    b, e = beta_and_e(psi, p)
    a = rng.choice([x for x in range(1, 60) if x % p])
    assert beta(scalar_mul(a, psi)) == beta_multiplier(b, e, p, a)


def test_tensor_phase_examples():
    assert beta_lsmx([[1]], Q(1, 4), 1, 3) == Q(1, 4)
    assert beta_lsmx([[0, 1], [1, 0]], Q(1, 8), 1, 2) == Q(0) == beta(tensor([[0, 1], [1, 0]], uf(2)))
    assert beta_lsmx([[3]], Q(1, 8), 1, 2) == Q(7, 8) == beta(tensor([[3]], uf(2)))


@pytest.mark.parametrize("p", [2, 3, 5])
@given(seed=seeds)
def test_tensor_phase_random(p, seed):
    rng = random.Random(seed)
    B = random_nonsingular(rng, 3, 9, condition=lambda B, d: d % p)
    T = random_group(rng, min(512, int(20000 ** (1 / len(B)))), prime=p)
    psi = random_tame_quadratic(rng, T)
    b, e = beta_and_e(psi, p)
    assert beta(tensor(B, psi)) == beta_lsmx(B, b, e, p)


def test_kirby_melvin_examples():
    assert kirby_melvin([[1]]) == Q(1, 8)
    assert kirby_melvin([[2]]) is NOT_TAME
    assert kirby_melvin([[2, 1], [1, 2]]) == Q(1, 2)
    assert kirby_melvin([[1, 0], [0, 3]]) == Q(0)


@given(seeds)
def test_kirby_melvin_random(seed):
    B = random_nonsingular(random.Random(seed), 5, 9)
    brute = beta(brown_form(B, 2))
    km = kirby_melvin(B)
    assert (km is NOT_TAME) == (brute is NOT_TAME)
    if brute is not NOT_TAME:
        assert km == brute


def test_beta_u_values():
    for p, s in [(2, 1), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1), (7, 2)]:
        assert beta(uf(p**s)) == beta_u(p, s)


def random_odq(rng, p, max_order):
    """A random layer decomposition whose realised group has order <= max_order."""
    layers, order = [], 1
    for i in range(1, 4):
        blocks = []
        for _ in range(rng.randint(0, 2)):
            two_dim = p == 2 and rng.random() < 0.3
            size = p ** (i * (2 if two_dim else 1))
            if order * size > max_order:
                break
            order *= size
            if two_dim:
                blocks.append(hyp(rng.randint(0, 3), rng.randint(0, 3)))
            else:
                blocks.append(diag(rng.choice([a for a in range(1, 4 * p) if a % p])))
        if blocks:
            layers.append(Layer(i, tuple(blocks)))
    if not layers:
        layers.append(Layer(1, (diag(1),)))
    return OdqDecomposition(p, tuple(layers))


@pytest.mark.parametrize("p", [2, 3, 5])
@given(seed=seeds)
def test_tensor_formula_against_brute_force(p, seed):
    rng = random.Random(seed)
    B = random_nonsingular(rng, 3, 6)
    R = random_odq(rng, p, int(40000 ** (1 / len(B))))
    psi = realize_odq(R)
    top = max(l.i for l in R.layers)
    C = reduce_mod_pr(B, p, top + 1)
    formula = beta_gtp(C, R)
    brute = beta(tensor(B, psi))
    assert (formula is NOT_TAME) == (brute is NOT_TAME)
    if brute is not NOT_TAME:
        assert formula == brute == beta_gtp_packed(C, R)


def test_tensor_formula_examples():
    for p in (2, 3, 5):
        C = reduce_mod_pr([[1]], p, 2)
        R = OdqDecomposition(p, (Layer(1, (diag(1),)),))
        assert beta_gtp(C, R) == beta(uf(p))
    C = reduce_mod_pr([[2]], 2, 2)
    assert beta_gtp(C, OdqDecomposition(2, (Layer(1, (diag(1),)),))) is NOT_TAME


def test_odq_validation():
    with pytest.raises(MalformedDecomposition):
        OdqDecomposition(3, (Layer(0, (diag(1),)),))
    with pytest.raises(MalformedDecomposition):
        OdqDecomposition(3, (Layer(1, (diag(3),)),))
    with pytest.raises(MalformedDecomposition):
        OdqDecomposition(3, (Layer(1, (hyp(0, 0),)),))
    R = OdqDecomposition(2, (Layer(1, (diag(1), hyp(1, 0))), Layer(3, (diag(5),))))
    assert OdqDecomposition.from_json(R.to_json()) == R


def test_scaled_reduction():
    R = OdqDecomposition(2, (Layer(3, (diag(1),)),))
    assert scaled_reduction(R, 0) == R
    assert scaled_reduction(R, 3) is NOT_TAME
    H = OdqDecomposition(2, (Layer(2, (hyp(1, 0),)),))
    trivial = scaled_reduction(H, 2)
    assert trivial.layers == ()
    # odd p is always tame; the shifted layers realise p^i psi reduced
    R3 = OdqDecomposition(3, (Layer(1, (diag(1),)), Layer(2, (diag(2),))))
    red = scaled_reduction(R3, 1)
    assert beta(realize_odq(red)) == beta(scalar_mul(3, realize_odq(R3)))


def test_bullet_products():
    assert bullet_product([[1]], [[1]], 2) == uf(2)
    assert beta(bullet_product([[1]], [[3]], 2)) == Q(7, 8)
    assert beta(bullet_product([[3]], [[3]], 2)) == Q(1, 8)
    with pytest.raises(DetDivisibleByP):
        bullet_product([[2]], [[1]], 2)


@given(seeds)
def test_bullet_product_multiplicative_at_two(seed):
    rng = random.Random(seed)
    cond = lambda B, d: d % 2
    R = random_nonsingular(rng, 2, 5, condition=cond)
    S = random_nonsingular(rng, 2, 5, condition=cond)
    alpha = lambda M: beta(tensor(M, uf(2))).at_denominator(8)
    assert beta(bullet_product(R, S, 2)) == Q(alpha(R) * alpha(S), 8)


def test_regression_isometric_sums_with_different_layers():
    a = orthogonal_sum(uf(4), uf(2))
    b = orthogonal_sum(scalar_mul(3, uf(4)), scalar_mul(3, uf(2)))
    assert beta(a) == beta(b)
    assert beta(uf(4)) == Q(1, 8) and beta(scalar_mul(3, uf(4))) == Q(3, 8)
