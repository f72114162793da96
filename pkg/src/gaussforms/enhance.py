"""2-linear functions (enhancements) on finite abelian groups.

A :class:`TwoLinearForm` is stored as its full value table: integer
numerators over a common denominator, indexed like the group's elements.
Everything downstream (Gauss sums, radicals, isometry checks) enumerates
the group anyway, so there is nothing to gain from lazy evaluation.
"""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np

from .errors import (NotHomomorphism, NotQuadratic, NotTame, NotTwoLinear,
                     NotWellDefined, PsiNonzeroOnK, TheoremViolated)
from .exactnum import QmodZ, lcm
from .fingroup import (FinAbGroup, SubgroupSpan, check_cap, orthogonal_complement,
                       quotient, subquotient_group, p_part_embedding)

_SAMPLED_TRIPLES = 200


def _common_den(values) -> int:
    return lcm(*(v.den for v in values)) if values else 1


class BilinearForm:
    """A symmetric bilinear form T x T -> Q/Z given by its values on generators."""

    def __init__(self, group: FinAbGroup, gram):
        n = group.rank
        gram = [[QmodZ.parse(v) for v in row] for row in gram]
        if len(gram) != n or any(len(row) != n for row in gram):
            raise NotWellDefined(f"gram must be {n}x{n}")
        for i in range(n):
            for j in range(n):
                if gram[i][j] != gram[j][i]:
                    raise NotWellDefined(f"gram is not symmetric at ({i},{j})")
                if gram[i][j] * group.orders[i] != 0:
                    raise NotWellDefined(
                        f"b(g{i},g{j}) = {gram[i][j]} is not killed by the order {group.orders[i]}")
        self.group = group
        self.gram = tuple(tuple(row) for row in gram)
        self.den = _common_den([v for row in gram for v in row])
        self.gram_numerators = np.array(
            [[v.at_denominator(self.den) for v in row] for row in gram], dtype=np.int64
        ).reshape(n, n)

    def value(self, x, y) -> QmodZ:
        x = np.asarray(self.group.element(x), dtype=np.int64)
        y = np.asarray(self.group.element(y), dtype=np.int64)
        return QmodZ(int(x @ self.gram_numerators @ y), self.den)

    __call__ = value

    def row(self, x) -> np.ndarray:
        """Numerators (over ``den``) of b(x, t) for every element t."""
        w = (np.asarray(self.group.element(x), dtype=np.int64) @ self.gram_numerators) % self.den
        return (self.group.coords @ w) % self.den

    def is_zero(self) -> bool:
        return not self.gram_numerators.any()

    def __eq__(self, other):
        return isinstance(other, BilinearForm) and self.group == other.group \
            and self.gram == other.gram

    def __repr__(self):
        return f"BilinearForm({self.group!r}, {[[str(v) for v in r] for r in self.gram]})"


class Hom:
    """A homomorphism T -> Q/Z given by its values on the generators."""

    def __init__(self, group: FinAbGroup, values):
        values = [QmodZ.parse(v) for v in values]
        if len(values) != group.rank:
            raise NotHomomorphism("need one value per generator")
        for v, n in zip(values, group.orders):
            if v * n != 0:
                raise NotHomomorphism(f"value {v} on a generator of order {n}")
        self.group = group
        self.values = tuple(values)
        self.den = _common_den(values)

    def table(self, den: int) -> np.ndarray:
        if den % self.den:
            raise ValueError("denominator too small for this homomorphism")
        w = np.array([v.at_denominator(den) for v in self.values], dtype=np.int64)
        return (self.group.coords @ w) % den if self.group.rank else np.zeros(1, dtype=np.int64)

    def __call__(self, x) -> QmodZ:
        x = self.group.element(x)
        return sum((v * c for v, c in zip(self.values, x)), QmodZ(0))

    def __neg__(self):
        return Hom(self.group, [-v for v in self.values])

    def is_zero(self) -> bool:
        return not any(self.values)

    def __eq__(self, other):
        return isinstance(other, Hom) and self.group == other.group and self.values == other.values

    def __repr__(self):
        return f"Hom({[str(v) for v in self.values]})"


class TwoLinearForm:
    """A 2-linear function psi: T -> Q/Z, held as a validated value table."""

    def __init__(self, group: FinAbGroup, table, den: int, *, validate: bool = True):
        table = np.asarray(table, dtype=np.int64) % den
        if table.shape != (group.order,):
            raise ValueError(f"table needs {group.order} entries")
        g = math.gcd(den, *map(int, np.unique(table)))
        self.group = group
        self.den = den // g
        self.table = table // g
        self.table.setflags(write=False)
        if validate:
            self._validate()

    # -- construction -----------------------------------------------------

    @classmethod
    def from_values(cls, group: FinAbGroup, values) -> "TwoLinearForm":
        """From a full table of Q/Z values listed in lexicographic element order."""
        values = [QmodZ.parse(v) for v in values]
        den = _common_den(values)
        return cls(group, [v.at_denominator(den) for v in values], den)

    def _validate(self) -> None:
        T = self.group
        if self.table[0] != 0:
            raise NotTwoLinear("psi(0) must be 0")
        if (2 * T.exponent) % self.den:
            raise NotTwoLinear(f"values with denominator {self.den} cannot come from a 2-linear "
                               f"function on a group of exponent {T.exponent}")
        self._check_third_differences()
        self._check_sampled_triples()

    def _shift_maps(self):
        return [self.group.translate_indices(self.group.generator(i)) for i in range(self.group.rank)]

    def _check_third_differences(self) -> None:
        # the three-term identity on all triples is equivalent to every third difference along
        # generator directions vanishing identically.
        f, D = self.table, self.den
        sh = self._shift_maps()
        n = len(sh)
        for i in range(n):
            d1 = (f[sh[i]] - f) % D
            for j in range(i, n):
                d2 = (d1[sh[j]] - d1) % D
                for k in range(j, n):
                    if ((d2[sh[k]] - d2) % D).any():
                        raise NotTwoLinear(f"third difference along generators {i},{j},{k} is nonzero")

    def _check_sampled_triples(self) -> None:
        T = self.group
        rng = np.random.default_rng(T.order)
        x = rng.integers(0, T.order, size=(_SAMPLED_TRIPLES, 3))
        c = T.coords
        f, D = self.table, self.den
        s12 = T.indices_of(c[x[:, 0]] + c[x[:, 1]])
        s13 = T.indices_of(c[x[:, 0]] + c[x[:, 2]])
        s23 = T.indices_of(c[x[:, 1]] + c[x[:, 2]])
        s123 = T.indices_of(c[x[:, 0]] + c[x[:, 1]] + c[x[:, 2]])
        lhs = f[s123]
        rhs = f[s12] + f[s13] + f[s23] - f[x[:, 0]] - f[x[:, 1]] - f[x[:, 2]]
        if ((lhs - rhs) % D).any():
            raise NotTwoLinear("three-term identity fails on a sampled triple")

    # -- access -------------------------------------------------------------

    def value(self, x) -> QmodZ:
        return QmodZ(int(self.table[self.group.index(x)]), self.den)

    __call__ = value

    def values(self) -> list[QmodZ]:
        return [QmodZ(int(v), self.den) for v in self.table]

    def table_at(self, den: int) -> np.ndarray:
        if den % self.den:
            raise ValueError(f"{den} is not a multiple of {self.den}")
        return self.table * (den // self.den)

    @cached_property
    def genvals(self) -> tuple:
        T = self.group
        return tuple((self.value(T.generator(i)), self.value(T.neg(T.generator(i))))
                     for i in range(T.rank))

    @cached_property
    def bilinear(self) -> BilinearForm:
        T = self.group
        gens = [T.generator(i) for i in range(T.rank)]
        gram = [[self.value(T.add(a, b)) - self.value(a) - self.value(b) for b in gens] for a in gens]
        return BilinearForm(T, gram)

    @property
    def gram(self):
        return self.bilinear.gram

    def b_row(self, x, den: int | None = None) -> np.ndarray:
        """Numerators over ``den`` (default ``self.den``) of b(x, t) for all t."""
        den = den or self.den
        b = self.bilinear
        return self_row_at(b, x, den)

    def __eq__(self, other):
        if not isinstance(other, TwoLinearForm) or self.group != other.group:
            return False
        return self.den == other.den and np.array_equal(self.table, other.table)

    __hash__ = None

    def __repr__(self):
        vals = ", ".join(f"({a}, {b})" for a, b in self.genvals)
        return f"TwoLinearForm({self.group!r}, genvals=[{vals}])"

    # -- serialisation --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "genvals": [[str(a), str(b)] for a, b in self.genvals],
            "gram": [[str(v) for v in row] for row in self.gram],
        }

    @classmethod
    def from_json(cls, doc) -> "TwoLinearForm":
        return build(FinAbGroup.from_json(doc["group"]), doc["genvals"], doc["gram"])


def self_row_at(b: BilinearForm, x, den: int) -> np.ndarray:
    row = b.row(x)
    if den % b.den:
        raise ValueError("denominator too small for the bilinear form")
    return row * (den // b.den)


# ---------------------------------------------------------------------------
# construction from generator data


def build(group: FinAbGroup, genvals, gram) -> TwoLinearForm:
    """The 2-linear function with psi(g_i), psi(-g_i) = genvals[i] and b(g_i, g_j) = gram[i][j].

    Values on multiples come from psi(a x) = (a^2+a)/2 psi(x) + (a^2-a)/2 psi(-x),
    and psi(sum a_i g_i) = sum psi(a_i g_i) + sum_{i<j} a_i a_j b(g_i, g_j).
    """
    n = group.rank
    pairs = [tuple(QmodZ.parse(v) for v in pair) for pair in genvals]
    if len(pairs) != n or any(len(p) != 2 for p in pairs):
        raise NotWellDefined(f"need a (psi(g), psi(-g)) pair for each of {n} generators")
    gram = [[QmodZ.parse(v) for v in row] for row in gram]
    if len(gram) != n or any(len(row) != n for row in gram):
        raise NotWellDefined(f"gram must be {n}x{n}")
    for i, (u, v) in enumerate(pairs):
        m = group.orders[i]
        if gram[i][i] != u + v:
            raise NotTwoLinear(f"b(g{i},g{i}) = {gram[i][i]} but psi(g)+psi(-g) = {u + v}")
        if (u + v) * m != 0 or u * ((m * m + m) // 2) + v * ((m * m - m) // 2) != 0:
            raise NotWellDefined(f"generator {i}: values ({u}, {v}) are not periodic mod {m}")
    for i in range(n):
        for j in range(n):
            if gram[i][j] != gram[j][i]:
                raise NotTwoLinear(f"gram is not symmetric at ({i},{j})")
            if i != j and gram[i][j] * group.orders[i] != 0:
                raise NotWellDefined(f"b(g{i},g{j}) = {gram[i][j]} is not killed by {group.orders[i]}")
    den = _common_den([x for p in pairs for x in p] + [x for row in gram for x in row])
    U = [p[0].at_denominator(den) for p in pairs]
    V = [p[1].at_denominator(den) for p in pairs]
    B = [[x.at_denominator(den) for x in row] for row in gram]
    C = group.coords
    table = np.zeros(group.order, dtype=np.int64)
    for i in range(n):
        a = C[:, i]
        up = ((a * a + a) // 2) % den
        dn = ((a * a - a) // 2) % den
        table = (table + up * U[i] + dn * V[i]) % den
        for j in range(i + 1, n):
            table = (table + ((a * C[:, j]) % den) * B[i][j]) % den
    return TwoLinearForm(group, table, den)


def uf(m: int) -> TwoLinearForm:
    """The standard form on Z/m: x^2/(2m) for even m, x^2/m for odd m."""
    if m < 1:
        raise ValueError("m must be positive")
    d = 2 * m if m % 2 == 0 else m
    a = np.arange(m, dtype=np.int64)
    return TwoLinearForm(FinAbGroup([m]), (a * a) % d, d)


def zero_form(group: FinAbGroup) -> TwoLinearForm:
    return TwoLinearForm(group, np.zeros(group.order, dtype=np.int64), 1, validate=False)


def hom_form(h: Hom) -> TwoLinearForm:
    """A homomorphism viewed as a (degenerate) 2-linear function."""
    return TwoLinearForm(h.group, h.table(h.den), h.den)


def pullback(psi: TwoLinearForm, group: FinAbGroup, images) -> TwoLinearForm:
    """psi composed with the homomorphism sending generator i of ``group`` to ``images[i]``."""
    T = psi.group
    images = [T.element(x) for x in images]
    for x, n in zip(images, group.orders):
        if T.scale(n, x) != T.zero():
            raise NotHomomorphism(f"image {x} is not killed by {n}")
    if not images:
        return zero_form(group)
    idx = T.indices_of(group.coords @ np.asarray(images, dtype=np.int64))
    return TwoLinearForm(group, psi.table[idx], psi.den)


# ---------------------------------------------------------------------------
# basic invariants


def associated_bilinear(psi: TwoLinearForm) -> BilinearForm:
    return psi.bilinear


def defect_hom(psi: TwoLinearForm) -> Hom:
    """x -> psi(x) - psi(-x)."""
    return Hom(psi.group, [u - v for u, v in psi.genvals])


def is_quadratic(psi: TwoLinearForm) -> bool:
    return defect_hom(psi).is_zero()


class Radical:
    """T-perp together with the restriction psi^s of psi to it."""

    def __init__(self, span: SubgroupSpan, values: np.ndarray, den: int):
        self.span = span
        self.values = values  # numerators over den, aligned with span.indices
        self.den = den

    @property
    def order(self) -> int:
        return self.span.order

    def is_zero(self) -> bool:
        return not self.values.any()

    def restriction(self) -> dict:
        return {self.span.group.at(i): QmodZ(int(v), self.den)
                for i, v in zip(self.span.indices, self.values)}


def radical(psi: TwoLinearForm) -> Radical:
    T = psi.group
    everything = SubgroupSpan(T, [T.generator(i) for i in range(T.rank)])
    perp = orthogonal_complement(T, psi.bilinear, everything)
    idx = perp.indices
    vals = psi.table[idx]
    # psi restricted to T-perp must be additive
    f, D = psi.table, psi.den
    for s in perp.generators:
        shifted = T.indices_of(T.coords[idx] + np.asarray(s, dtype=np.int64))
        if ((f[shifted] - vals - f[T.index(s)]) % D).any():
            raise TheoremViolated("psi restricted to T-perp is not a homomorphism")
    return Radical(perp, vals, D)


def is_tame(psi: TwoLinearForm) -> bool:
    return radical(psi).is_zero()


def is_nonsingular(psi: TwoLinearForm) -> bool:
    return radical(psi).order == 1


def reduce(psi: TwoLinearForm) -> TwoLinearForm:
    """The induced nonsingular form on T/T-perp (psi must be tame)."""
    rad = radical(psi)
    if not rad.is_zero():
        raise NotTame("psi is not tame")
    q = quotient(psi.group, rad.span)
    red = TwoLinearForm(q.group, psi.table[q.section], psi.den)
    # constant on cosets of T-perp
    if not np.array_equal(red.table_at(psi.den)[q.projection], psi.table):
        raise TheoremViolated("psi is not constant on cosets of T-perp")
    if radical(red).order != 1:
        raise TheoremViolated("reduced form is singular")
    return red


def reduce_with_quotient(psi: TwoLinearForm):
    rad = radical(psi)
    if not rad.is_zero():
        raise NotTame("psi is not tame")
    q = quotient(psi.group, rad.span)
    return TwoLinearForm(q.group, psi.table[q.section], psi.den), q


# ---------------------------------------------------------------------------
# shifts and algebraic operations


def shift(psi: TwoLinearForm, h: Hom) -> TwoLinearForm:
    """psi_h(t) = psi(t) + h(t)."""
    if h.group != psi.group:
        raise NotHomomorphism("homomorphism lives on a different group")
    den = lcm(psi.den, h.den)
    return TwoLinearForm(psi.group, psi.table_at(den) + h.table(den), den)


def bilinear_hom(psi: TwoLinearForm, x) -> Hom:
    """The homomorphism t -> b(x, t)."""
    T = psi.group
    x = T.element(x)
    return Hom(T, [psi.bilinear.value(x, T.generator(i)) for i in range(T.rank)])


def shift_by_element(psi: TwoLinearForm, x) -> TwoLinearForm:
    """psi_x(t) = psi(t) + b(x, t), checked against psi(t + x) - psi(x)."""
    T = psi.group
    x = T.element(x)
    out = shift(psi, bilinear_hom(psi, x))
    other = (psi.table[T.translate_indices(x)] - psi.table[T.index(x)]) % psi.den
    if not np.array_equal(out.table_at(lcm(out.den, psi.den)),
                          (other * (lcm(out.den, psi.den) // psi.den))):
        raise TheoremViolated("psi_x(t) != psi(t+x) - psi(x)")
    return out


def orthogonal_sum(psi1: TwoLinearForm, psi2: TwoLinearForm) -> TwoLinearForm:
    T = FinAbGroup(psi1.group.orders + psi2.group.orders)
    den = lcm(psi1.den, psi2.den)
    table = (psi1.table_at(den)[:, None] + psi2.table_at(den)[None, :]).reshape(-1)
    out = TwoLinearForm(T, table, den)
    if defect_hom(out).values != defect_hom(psi1).values + defect_hom(psi2).values:
        raise TheoremViolated("defect of an orthogonal sum is not the sum of defects")
    return out


def orthogonal_sum_all(forms) -> TwoLinearForm:
    forms = list(forms)
    out = forms[0]
    for f in forms[1:]:
        out = orthogonal_sum(out, f)
    return out


def scalar_mul(a: int, psi: TwoLinearForm) -> TwoLinearForm:
    out = TwoLinearForm(psi.group, psi.table * (a % psi.den), psi.den)
    if defect_hom(out).values != tuple(v * a for v in defect_hom(psi).values):
        raise TheoremViolated("defect does not scale")
    return out


def negate(psi: TwoLinearForm) -> TwoLinearForm:
    return scalar_mul(-1, psi)


def vanishes_on(psi: TwoLinearForm, K: SubgroupSpan) -> bool:
    return not psi.table[K.indices].any()


def subquotient(psi: TwoLinearForm, K: SubgroupSpan) -> TwoLinearForm:
    """The form induced by psi on K-perp / K (psi must vanish on K)."""
    return subquotient_with_map(psi, K)[0]


def subquotient_with_map(psi: TwoLinearForm, K: SubgroupSpan):
    if not vanishes_on(psi, K):
        raise PsiNonzeroOnK("psi does not vanish on K")
    T = psi.group
    perp = orthogonal_complement(T, psi.bilinear, K)
    if not np.all(perp.mask[K.indices]):
        raise TheoremViolated("K is not contained in K-perp")
    q = subquotient_group(T, perp, K)
    induced = TwoLinearForm(q.group, psi.table[q.section], psi.den)
    on_perp = psi.table[perp.indices]
    if not np.array_equal(induced.table_at(psi.den)[q.projection[perp.indices]], on_perp):
        raise TheoremViolated("psi is not constant on cosets of K inside K-perp")
    return induced, q, perp


def primary_part(psi: TwoLinearForm, p: int) -> TwoLinearForm:
    """psi restricted to the p-primary subgroup, in that subgroup's own cyclic coordinates."""
    group, images = p_part_embedding(psi.group, p)
    return pullback(psi, group, images)


def prime_divisors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# tame quadratic enhancements


def _half_hom_table(group: FinAbGroup, bits: int, even_axes, den: int) -> np.ndarray:
    vals = [QmodZ(0)] * group.rank
    for k, ax in enumerate(even_axes):
        if bits >> k & 1:
            vals[ax] = QmodZ(1, 2)
    return Hom(group, vals).table(den)


def tame_quadratic_enhancement(b: BilinearForm) -> TwoLinearForm:
    """The lexicographically least tame quadratic enhancement of ``b``.

    Start from a generator-wise quadratic enhancement psi0; the tame quadratic
    enhancements are exactly psi0 + h for homomorphisms h into {0, 1/2} that
    agree with psi0 on T-perp.  The least table is chosen greedily, element by
    element, over that affine space of h.
    """
    T = b.group
    genvals = []
    for i, m in enumerate(T.orders):
        c = b.gram[i][i]
        u = next(x for x in (QmodZ(c.num, 2 * c.den), QmodZ(c.num + c.den, 2 * c.den))
                 if x * (m * m) == 0)
        genvals.append((u, u))
    psi0 = build(T, genvals, b.gram)

    even_axes = [i for i, m in enumerate(T.orders) if m % 2 == 0]
    k = len(even_axes)
    rad = radical(psi0)
    den = lcm(psi0.den, 2)
    base = psi0.table_at(den)
    half = den // 2

    # constraints over F2 on the bits of h, as (mask, rhs) rows in reduced echelon form
    rows: dict[int, tuple[int, int]] = {}  # pivot bit -> (mask, rhs)

    def coeff_mask(x) -> int:
        return sum(1 << t for t, ax in enumerate(even_axes) if x[ax] % 2)

    def reduce_row(mask, rhs):
        for piv, (pm, pr) in rows.items():
            if mask >> piv & 1:
                mask ^= pm
                rhs ^= pr
        return mask, rhs

    def add_row(mask, rhs) -> bool:
        mask, rhs = reduce_row(mask, rhs)
        if mask == 0:
            return rhs == 0
        piv = mask.bit_length() - 1
        for q, (qm, qr) in list(rows.items()):
            if qm >> piv & 1:
                rows[q] = (qm ^ mask, qr ^ rhs)
        rows[piv] = (mask, rhs)
        return True

    for s in rad.span.generators:
        target = int(psi0.table_at(den)[T.index(s)]) // half  # psi0(s) is 0 or 1/2
        if not add_row(coeff_mask(s), target):
            raise TheoremViolated("no tame quadratic enhancement found")
    for idx in range(T.order):
        if len(rows) == k:
            break
        x = T.at(idx)
        mask = coeff_mask(x)
        if mask == 0:
            continue
        # prefer the smaller of psi0(x) and psi0(x) + 1/2
        want = 0 if base[idx] < half else 1
        if not add_row(mask, want):
            add_row(mask, want ^ 1)
    bits = 0
    for piv, (mask, rhs) in rows.items():
        if rhs:
            bits |= 1 << piv
    # free variables (none remain once rank == k) default to 0
    psi = TwoLinearForm(T, base + _half_hom_table(T, bits, even_axes, den), den)
    if not (is_quadratic(psi) and is_tame(psi) and psi.bilinear == b):
        raise TheoremViolated("constructed enhancement is not a tame quadratic enhancement of b")
    return psi


def all_quadratic_enhancements(b: BilinearForm) -> list[TwoLinearForm]:
    """Every quadratic enhancement of ``b`` (small groups only; used as an oracle)."""
    T = b.group
    genvals = []
    for i, m in enumerate(T.orders):
        c = b.gram[i][i]
        u = next(x for x in (QmodZ(c.num, 2 * c.den), QmodZ(c.num + c.den, 2 * c.den))
                 if x * (m * m) == 0)
        genvals.append((u, u))
    psi0 = build(T, genvals, b.gram)
    even_axes = [i for i, m in enumerate(T.orders) if m % 2 == 0]
    den = lcm(psi0.den, 2)
    return [TwoLinearForm(T, psi0.table_at(den) + _half_hom_table(T, bits, even_axes, den), den)
            for bits in range(2 ** len(even_axes))]


# ---------------------------------------------------------------------------
# isometries


def map_indices(src: FinAbGroup, dst: FinAbGroup, images) -> np.ndarray:
    images = [dst.element(x) for x in images]
    for x, n in zip(images, src.orders):
        if dst.scale(n, x) != dst.zero():
            raise NotHomomorphism(f"image {x} is not killed by {n}")
    if not images:
        return np.zeros(src.order, dtype=np.int64)
    return dst.indices_of(src.coords @ np.asarray(images, dtype=np.int64))


def verify_isometry(psi1: TwoLinearForm, psi2: TwoLinearForm, images) -> bool:
    """True iff generator images define an isomorphism with psi2(h(x)) = psi1(x) for all x."""
    idx = map_indices(psi1.group, psi2.group, images)
    if psi1.group.order != psi2.group.order or len(np.unique(idx)) != psi1.group.order:
        return False
    den = lcm(psi1.den, psi2.den)
    return bool(np.array_equal(psi2.table_at(den)[idx], psi1.table_at(den)))


def hensel_minus_one(p: int, ell: int) -> tuple[int, int, int, int]:
    """Integers with x1^2 + x2^2 + x3^2 + x4^2 = -1 mod p^ell.

    For odd p, x3 = x4 = 0, and x2 = 0 as well when p = 1 mod 4.  The base
    case is an exhaustive search mod p (mod 8 for p = 2); each lift adjusts
    x1 by a * p^l (a * 2^(l-1) for p = 2).
    """
    if ell < 1:
        raise ValueError("ell must be positive")
    if p == 2:
        x = [1, 1, 1, 2]
        level = 3
        while level < ell:
            step = 2 ** (level - 1)
            mod = 2 ** (level + 1)
            for a in (0, 1):
                cand = x[0] + a * step
                if (cand * cand + x[1] ** 2 + x[2] ** 2 + x[3] ** 2 + 1) % mod == 0:
                    x[0] = cand
                    break
            else:
                raise TheoremViolated("Hensel step failed for p = 2")
            level += 1
        return tuple(x)
    if p % 4 == 1:
        x1 = next(a for a in range(1, p) if (a * a + 1) % p == 0)
        x = [x1, 0, 0, 0]
    else:
        x = next([a, c, 0, 0] for a in range(p) for c in range(p) if (a * a + c * c + 1) % p == 0)
    level = 1
    while level < ell:
        step = p**level
        mod = step * p
        for a in range(p):
            cand = x[0] + a * step
            if (cand * cand + x[1] ** 2 + 1) % mod == 0:
                x[0] = cand
                break
        else:
            raise TheoremViolated(f"Hensel step failed for p = {p}")
        level += 1
    return tuple(x)


def connolly_matrix(x) -> list[list[int]]:
    x1, x2, x3, x4 = x
    return [[x1, x2, x3, x4],
            [-x2, x1, -x4, x3],
            [x3, -x4, -x1, x2],
            [x4, x3, -x2, -x1]]


def _p_exponent(group: FinAbGroup, p: int) -> int:
    k = 0
    for n in group.orders:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if n != 1:
            raise ValueError(f"{group} is not a {p}-group")
        k = max(k, e)
    return k


def connolly_isometry(psi: TwoLinearForm, p: int):
    """Matrix M and multiplicity m with M an isometry psi^{+m} -> (-psi)^{+m}.

    m is 1, 2 or 4 as p = 1 mod 4, p = 3 mod 4 or p = 2.  The isometry is
    verified on generators (which determines it for 2-linear functions) and
    also on every element when the product group is within the cap.
    """
    if not is_quadratic(psi):
        raise NotQuadratic("Connolly's isometry needs a quadratic psi")
    k = _p_exponent(psi.group, p)
    if p == 2:
        m, ell = 4, k + 2
    else:
        m, ell = (1 if p % 4 == 1 else 2), max(k, 1)
    x = hensel_minus_one(p, ell)
    M = [row[:m] for row in connolly_matrix(x)[:m]]
    mod = p**ell
    MtM = [[sum(M[r][i] * M[r][j] for r in range(m)) for j in range(m)] for i in range(m)]
    if any((MtM[i][j] + (i == j)) % mod for i in range(m) for j in range(m)):
        raise TheoremViolated("M^T M is not -I mod p^ell")
    if not _verify_connolly(psi, M):
        raise TheoremViolated("Connolly's matrix is not an isometry")
    return M, m


def _verify_connolly(psi: TwoLinearForm, M) -> bool:
    T = psi.group
    m = len(M)
    D = psi.den
    f = psi.table
    C = T.coords
    G = psi.bilinear
    # generator check: slot j, generator i maps to (M[s][j] * g_i)_s
    gens = [(j, i) for j in range(m) for i in range(T.rank)]

    def image(j, i, sign=1):
        g = np.asarray(T.generator(i), dtype=np.int64) * sign
        return [T.element(M[s][j] * g) for s in range(m)]

    def val_sum(vec):  # (-psi)^{+m} of a tuple
        return sum((-psi.value(v) for v in vec), QmodZ(0))

    def bil_sum(u, v):
        return sum((-G.value(a, c) for a, c in zip(u, v)), QmodZ(0))

    for j, i in gens:
        g = T.generator(i)
        if val_sum(image(j, i)) != psi.value(g) or val_sum(image(j, i, -1)) != psi.value(T.neg(g)):
            return False
    for (j1, i1) in gens:
        for (j2, i2) in gens:
            want = G.value(T.generator(i1), T.generator(i2)) if j1 == j2 else QmodZ(0)
            if bil_sum(image(j1, i1), image(j2, i2)) != want:
                return False
    # exhaustive check when the product group is small enough
    size = T.order**m
    try:
        check_cap(size)
    except Exception:
        return True
    grids = np.indices((T.order,) * m).reshape(m, -1).T  # tuples of element indices
    src = f[grids].sum(axis=1) % D
    Mi = np.asarray(M, dtype=np.int64)
    img = np.einsum("sj,njr->nsr", Mi, C[grids])  # (N, m, rank)
    dst = (-f[T.indices_of(img.reshape(-1, T.rank))].reshape(-1, m).sum(axis=1)) % D
    return bool(np.array_equal(src, dst))
