"""Random and exhaustive generators of groups, forms and matrices for test suites."""

from __future__ import annotations

import itertools
import math
import random

import numpy as np

from . import intmat
from .enhance import TwoLinearForm, build, is_tame
from .exactnum import QmodZ, factorint, lcm
from .fingroup import FinAbGroup, SubgroupSpan


def partitions(n: int, largest: int | None = None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


def abelian_groups(order: int) -> list[FinAbGroup]:
    """One group per isomorphism class, as sums of cyclic prime-power groups."""
    per_prime = []
    for p, a in factorint(order):
        per_prime.append([tuple(p**e for e in part) for part in partitions(a)])
    out = []
    for combo in itertools.product(*per_prime):
        out.append(FinAbGroup(sorted(sum(combo, ()))))
    return out if order > 1 else [FinAbGroup([])]


def random_group(rng: random.Random, max_order: int, max_rank: int = 3,
                 prime: int | None = None) -> FinAbGroup:
    while True:
        rank = rng.randint(1, max_rank)
        orders = []
        for _ in range(rank):
            if prime is None:
                orders.append(rng.randint(2, max(2, int(max_order ** (1 / rank)) + 1)))
            else:
                top = max(1, int(math.log(max_order, prime) / rank + 1e-9))
                orders.append(prime ** rng.randint(1, max(1, top)))
        if math.prod(orders) <= max_order:
            return FinAbGroup(orders)


def _offdiag_choices(n1: int, n2: int) -> int:
    return math.gcd(n1, n2)


def random_genvals(rng: random.Random, n: int, quadratic: bool):
    """(psi(g), psi(-g)) for a generator of order n, satisfying the periodicity conditions."""
    if quadratic:
        c = rng.randrange(2 * n) if n % 2 == 0 else 2 * rng.randrange(n)
        u = QmodZ(c, 2 * n)
        return u, u
    i = rng.randrange(n)  # b(g, g) = i/n
    m = rng.randrange(n)
    u = QmodZ(2 * m - i * (n - 1), 2 * n)
    return u, QmodZ(i, n) - u


def random_two_linear(rng: random.Random, group: FinAbGroup, quadratic: bool | None = None,
                      degenerate: float = 0.3) -> TwoLinearForm:
    """A random 2-linear function; ``degenerate`` is the chance of a scaled (often singular) form."""
    k = group.rank
    if quadratic is None:
        quadratic = rng.random() < 0.5
    genvals = [random_genvals(rng, n, quadratic) for n in group.orders]
    gram = [[None] * k for _ in range(k)]
    for i in range(k):
        gram[i][i] = genvals[i][0] + genvals[i][1]
        for j in range(i + 1, k):
            g = _offdiag_choices(group.orders[i], group.orders[j])
            gram[i][j] = gram[j][i] = QmodZ(rng.randrange(g), g)
    if rng.random() < degenerate:
        a = rng.choice([2, 3, 4, 6])
        genvals = [(u * a, v * a) for u, v in genvals]
        gram = [[x * a for x in row] for row in gram]
    return build(group, genvals, gram)


def random_tame_quadratic(rng: random.Random, group: FinAbGroup, tries: int = 200) -> TwoLinearForm:
    for _ in range(tries):
        psi = random_two_linear(rng, group, quadratic=True, degenerate=0.2)
        if is_tame(psi):
            return psi
    raise RuntimeError(f"no tame quadratic form found on {group}")


def random_isotropic_subgroup(rng: random.Random, psi: TwoLinearForm, attempts: int = 60):
    """A nonzero subgroup K with psi = 0 on K (generated by up to two elements), or None."""
    T = psi.group
    zero_idx = np.flatnonzero(psi.table == 0)
    neg = T.neg_indices()
    cands = [int(i) for i in zero_idx if i and psi.table[neg[i]] == 0]
    if not cands:
        return None
    for _ in range(attempts):
        gens = [T.at(rng.choice(cands))]
        K = SubgroupSpan(T, gens)
        if psi.table[K.indices].any():
            continue
        extra = T.at(rng.choice(cands))
        K2 = SubgroupSpan(T, gens + [extra])
        if not psi.table[K2.indices].any():
            return K2
        return K
    return None


def random_symmetric(rng: random.Random, n: int, bound: int, even: bool = False) -> list[list[int]]:
    B = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            B[i][j] = B[j][i] = rng.randint(-bound, bound)
        if even:
            B[i][i] = 2 * rng.randint(-(bound // 2), bound // 2)
    return B


def random_nonsingular(rng: random.Random, max_rank: int = 6, bound: int = 9, even: bool = False,
                       max_det: int | None = None, condition=None) -> list[list[int]]:
    """Rejection-sample a symmetric matrix with nonzero det (and |det| <= max_det)."""
    while True:
        n = rng.randint(1, max_rank)
        # smaller entry ranges for larger ranks keep determinants in range
        b = rng.choice([1, 1, 2, 3, bound]) if n > 2 else rng.randint(1, bound)
        b = max(b, 2) if even else b
        B = random_symmetric(rng, n, b, even)
        d = intmat.det(B)
        if d == 0 or (max_det is not None and abs(d) > max_det):
            continue
        if condition is None or condition(B, d):
            return B


def random_unimodular(rng: random.Random, max_rank: int = 4, moves: int = 6):
    """<1>^a + <-1>^b + hyperbolic planes, conjugated by random elementary moves."""
    while True:
        a, b, h = rng.randint(0, 2), rng.randint(0, 2), rng.randint(0, 1)
        n = a + b + 2 * h
        if 1 <= n <= max_rank:
            break
    B = [[0] * n for _ in range(n)]
    for i in range(a):
        B[i][i] = 1
    for i in range(a, a + b):
        B[i][i] = -1
    for k in range(h):
        i = a + b + 2 * k
        B[i][i + 1] = B[i + 1][i] = 1
    for _ in range(moves):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        t = rng.choice([-1, 1])
        E = intmat.identity(n)
        E[i][j] = t
        cand = intmat.matmul(intmat.transpose(E), intmat.matmul(B, E))
        if max(abs(x) for row in cand for x in row) <= 9:
            B = cand
    return B, a - b


def quadratic_parameter_space(group: FinAbGroup):
    """Per-parameter choices enumerating every quadratic function on ``group``.

    Returns (den, choices): choices[i] lists numerators over den; the first
    rank entries are psi(g_i), the rest are b(g_i, g_j) for i < j.
    """
    n = group.orders
    k = len(n)
    den = lcm(2, *(2 * x for x in n)) if n else 1
    choices = []
    for x in n:
        step = den // (2 * x) if x % 2 == 0 else den // x
        choices.append([c * step for c in range(den // step)])
    for i in range(k):
        for j in range(i + 1, k):
            g = math.gcd(n[i], n[j])
            choices.append([c * (den // g) for c in range(g)])
    return den, choices


def quadratic_tables(group: FinAbGroup, chunk: int = 1 << 15):
    """Yield (den, tables) chunks covering every quadratic function on ``group``."""
    den, choices = quadratic_parameter_space(group)
    k = group.rank
    C = group.coords
    feats = [(C[:, i] * C[:, i]) % den for i in range(k)]
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    feats += [(C[:, i] * C[:, j]) % den for i, j in pairs]
    F = np.stack(feats, axis=1) if feats else np.zeros((group.order, 0), dtype=np.int64)
    sizes = [len(c) for c in choices]
    total = math.prod(sizes)
    arrays = [np.asarray(c, dtype=np.int64) for c in choices]
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        params = np.empty((len(idx), len(sizes)), dtype=np.int64)
        rem = idx
        for pos in range(len(sizes) - 1, -1, -1):
            params[:, pos] = arrays[pos][rem % sizes[pos]]
            rem = rem // sizes[pos]
        yield den, (params @ F.T) % den
