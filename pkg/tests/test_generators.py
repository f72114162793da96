import math
import random
from collections import Counter
from fractions import Fraction

import pytest

from gaussforms.enhance import is_quadratic, is_tame
from gaussforms.fingroup import FinAbGroup
from gaussforms.generators import (abelian_groups, quadratic_parameter_space, quadratic_tables,
                                   random_isotropic_subgroup, random_two_linear,
                                   random_unimodular)
from gaussforms.lattice import signature
from gaussforms import intmat


@pytest.mark.parametrize("n,count", [(1, 1), (8, 3), (16, 5), (32, 7), (36, 4), (72, 6)])
def test_abelian_group_counts(n, count):
    groups = abelian_groups(n)
    assert len(groups) == count and all(G.order == n for G in groups)


def test_quadratic_tables_enumerate_each_function_once():
    for T in (FinAbGroup([2]), FinAbGroup([2, 2]), FinAbGroup([4, 2]), FinAbGroup([3, 3])):
        seen = Counter()
        for den, tables in quadratic_tables(T, chunk=7):
            for row in tables:
                seen[tuple(Fraction(int(v), den) for v in row)] += 1
        assert all(c == 1 for c in seen.values())
        _, choices = quadratic_parameter_space(T)
        assert len(seen) == math.prod(len(c) for c in choices)
    assert sum(len(t) for _, t in quadratic_tables(FinAbGroup([2]))) == 4


def test_random_forms_are_valid():
    rng = random.Random(3)
    for _ in range(50):
        T = FinAbGroup([rng.randint(2, 9) for _ in range(rng.randint(1, 2))])
        psi = random_two_linear(rng, T, quadratic=True)
        assert is_quadratic(psi)
        K = random_isotropic_subgroup(rng, psi)
        if K is not None:
            assert not psi.table[K.indices].any()
    assert any(not is_tame(random_two_linear(rng, FinAbGroup([4]))) for _ in range(100))


def test_random_unimodular():
    rng = random.Random(5)
    for _ in range(40):
        B, sig = random_unimodular(rng)
        assert abs(intmat.det(B)) == 1 and signature(B) == sig
