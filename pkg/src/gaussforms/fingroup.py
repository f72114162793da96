"""Finite abelian groups written as direct sums of cyclic groups.

Elements are coordinate tuples.  Internally every element also has an
integer index (mixed radix, first coordinate most significant), so index
order is lexicographic coordinate order and whole-group computations are
plain numpy array operations.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import intmat
from .errors import CapExceeded

DEFAULT_CAP = 100_000


def enum_cap() -> int:
    """Enumeration cap; the FORMS_ENUM_CAP environment variable overrides it."""
    raw = os.environ.get("FORMS_ENUM_CAP")
    return int(raw) if raw else DEFAULT_CAP


def check_cap(size: int, what: str = "group") -> None:
    cap = enum_cap()
    if size > cap:
        raise CapExceeded(f"{what} of order {size} exceeds enumeration cap {cap}")


class FinAbGroup:
    """The group Z/n_1 + ... + Z/n_r."""

    def __init__(self, orders=()):
        orders = tuple(int(n) for n in orders)
        if any(n < 1 for n in orders):
            raise ValueError(f"cyclic orders must be positive: {orders}")
        self.orders = orders
        self.order = math.prod(orders)
        check_cap(self.order)

    def __eq__(self, other):
        return isinstance(other, FinAbGroup) and self.orders == other.orders

    def __hash__(self):
        return hash(self.orders)

    def __repr__(self):
        return "FinAbGroup(" + " + ".join(f"Z/{n}" for n in self.orders) + ")" if self.orders \
            else "FinAbGroup(0)"

    @property
    def rank(self) -> int:
        return len(self.orders)

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*self.orders) if self.orders else 1

    @cached_property
    def strides(self) -> np.ndarray:
        s = np.ones(self.rank, dtype=np.int64)
        for i in range(self.rank - 2, -1, -1):
            s[i] = s[i + 1] * self.orders[i + 1]
        return s

    @cached_property
    def coords(self) -> np.ndarray:
        """All elements as an (order x rank) array, rows in lexicographic order."""
        if not self.orders:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.indices(self.orders, dtype=np.int64).reshape(self.rank, -1)
        c = grids.T.copy()
        c.setflags(write=False)
        return c

    def element(self, coords) -> tuple:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.rank:
            raise ValueError(f"element {coords} has wrong length for {self}")
        return tuple(c % n for c, n in zip(coords, self.orders))

    def zero(self) -> tuple:
        return (0,) * self.rank

    def generator(self, i: int) -> tuple:
        return tuple(int(i == j) for j in range(self.rank))

    def index(self, x) -> int:
        return int(np.dot(np.asarray(self.element(x), dtype=np.int64), self.strides))

    def indices_of(self, coords: np.ndarray) -> np.ndarray:
        """Indices of the rows of an integer coordinate array (reduced mod orders)."""
        if self.rank == 0:
            return np.zeros(np.shape(coords)[:-1], dtype=np.int64)
        c = np.mod(coords, np.asarray(self.orders, dtype=np.int64))
        return c @ self.strides

    def at(self, idx: int) -> tuple:
        return tuple(int(v) for v in self.coords[idx])

    def add(self, x, y) -> tuple:
        return self.element(a + b for a, b in zip(x, y))

    def neg(self, x) -> tuple:
        return self.element(-a for a in x)

    def scale(self, a: int, x) -> tuple:
        return self.element(a * c for c in x)

    def element_order(self, x) -> int:
        x = self.element(x)
        return math.lcm(*(n // math.gcd(n, c) for c, n in zip(x, self.orders))) if x else 1

    @cached_property
    def _neg_index(self) -> np.ndarray:
        return self.indices_of(-self.coords)

    def neg_indices(self) -> np.ndarray:
        return self._neg_index

    def translate_indices(self, x) -> np.ndarray:
        """Index of t + x for every element t."""
        return self.indices_of(self.coords + np.asarray(self.element(x), dtype=np.int64))

    def to_json(self) -> dict:
        return {"orders": list(self.orders)}

    @classmethod
    def from_json(cls, doc) -> "FinAbGroup":
        return cls(doc["orders"])


def enumerate_group(T: FinAbGroup) -> list[tuple]:
    """All elements in lexicographic coordinate order."""
    check_cap(T.order)
    return [tuple(int(v) for v in row) for row in T.coords]


class SubgroupSpan:
    """The subgroup of ``group`` generated by ``generators`` (realised by closure)."""

    def __init__(self, group: FinAbGroup, generators=()):
        self.group = group
        self.generators = tuple(group.element(g) for g in generators)

    @cached_property
    def indices(self) -> np.ndarray:
        """Sorted indices of all subgroup elements."""
        T = self.group
        members = np.zeros(1, dtype=np.int64)  # the zero element
        inside = np.zeros(T.order, dtype=bool)
        inside[0] = True
        for g in self.generators:
            # smallest k with k*g already in the span built so far
            g_arr = np.asarray(g, dtype=np.int64)
            k = 1
            while not inside[T.indices_of(k * g_arr[None, :])[0]]:
                k += 1
            if k == 1:
                continue
            mult = np.arange(k, dtype=np.int64)[:, None] * g_arr[None, :]
            sums = T.coords[members][:, None, :] + mult[None, :, :]
            members = np.unique(T.indices_of(sums.reshape(-1, T.rank)))
            inside[members] = True
        return members

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.group.order, dtype=bool)
        m[self.indices] = True
        return m

    @property
    def order(self) -> int:
        return len(self.indices)

    def elements(self) -> list[tuple]:
        return [self.group.at(i) for i in self.indices]

    def __contains__(self, x) -> bool:
        return bool(self.mask[self.group.index(x)])

    def __repr__(self):
        return f"SubgroupSpan({self.group!r}, {list(self.generators)})"


def element_orders(T: FinAbGroup, coords: np.ndarray) -> np.ndarray:
    if T.rank == 0:
        return np.ones(len(coords), dtype=np.int64)
    n = np.asarray(T.orders, dtype=np.int64)
    return np.lcm.reduce(n // np.gcd(n, np.asarray(coords, dtype=np.int64)), axis=1)


def span_from_mask(T: FinAbGroup, mask: np.ndarray) -> SubgroupSpan:
    """A generating set for the subgroup whose elements are flagged by ``mask``."""
    target = np.flatnonzero(mask)
    gens: list[tuple] = []
    current = SubgroupSpan(T, gens)
    covered = current.mask.copy()
    # high-order elements first keeps generating sets short
    order_of = element_orders(T, T.coords[target])
    for i in target[np.argsort(-order_of, kind="stable")]:
        if not covered[i]:
            gens.append(T.at(i))
            covered = SubgroupSpan(T, gens).mask
    span = SubgroupSpan(T, gens)
    if not np.array_equal(span.mask, mask):
        raise ValueError("mask is not a subgroup")
    return span


def bilinear_matrix_rows(T: FinAbGroup, b, rows: np.ndarray) -> np.ndarray:
    """Numerators of b(t, r) over ``b.den`` for every t in T and every row r."""
    G = b.gram_numerators  # rank x rank, over b.den
    w = (np.asarray(rows, dtype=np.int64) @ G) % b.den  # (k, rank)
    return (T.coords @ w.T) % b.den  # (|T|, k)


def orthogonal_complement(T: FinAbGroup, b, K: SubgroupSpan) -> SubgroupSpan:
    """Generators of {t : b(t, k) = 0 for all k in K}."""
    check_cap(T.order)
    if not K.generators:
        return SubgroupSpan(T, [T.generator(i) for i in range(T.rank)])
    vals = bilinear_matrix_rows(T, b, np.asarray(K.generators, dtype=np.int64))
    return span_from_mask(T, ~vals.any(axis=1))


@dataclass(frozen=True)
class Quotient:
    """A cyclic presentation of S/K for subgroups K <= S <= T.

    ``lifts[i]`` is an element of S mapping to the i-th generator of ``group``;
    ``projection[t]`` is the index in ``group`` of the class of t (-1 off S);
    ``section[y]`` is the lexicographically least preimage of y in T.
    """

    ambient: FinAbGroup
    group: FinAbGroup
    lifts: tuple
    projection: np.ndarray
    section: np.ndarray

    def project(self, t) -> tuple:
        y = int(self.projection[self.ambient.index(t)])
        if y < 0:
            raise ValueError(f"{t} is not in the subgroup")
        return self.group.at(y)

    def lift(self, y) -> tuple:
        return self.ambient.at(int(self.section[self.group.index(y)]))

    def lift_coords(self, coords: np.ndarray) -> np.ndarray:
        """Generator-wise lift sum_i y_i * lifts[i] for rows y (not the lexicographic section)."""
        if not self.lifts:
            return np.zeros((len(coords), self.ambient.rank), dtype=np.int64)
        return np.asarray(coords, dtype=np.int64) @ np.asarray(self.lifts, dtype=np.int64)


def subquotient_group(T: FinAbGroup, S: SubgroupSpan, K: SubgroupSpan) -> Quotient:
    """Present S/K as a direct sum of cyclic groups via Smith normal form."""
    if not np.all(S.mask[K.indices]):
        raise ValueError("K is not contained in S")
    sgens = list(S.generators)
    relations = [list(k) for k in K.generators]
    relations += [[n * int(i == j) for j in range(T.rank)] for i, n in enumerate(T.orders)]
    if sgens:
        kernel = intmat.lattice_kernel(sgens, relations)
        _, d, _, vinv = intmat.smith_normal_form(kernel)
        m = len(sgens)
        diag = [d[i][i] if i < len(d) else 0 for i in range(m)]
        if any(x == 0 for x in diag):
            raise AssertionError("kernel lattice is not of full rank")
        orders, lifts = [], []
        for i, di in enumerate(diag):
            if di == 1:
                continue
            orders.append(di)
            lift = [sum(vinv[i][j] * sgens[j][c] for j in range(m)) for c in range(T.rank)]
            lifts.append(T.element(lift))
    else:
        orders, lifts = [], []
    Q = FinAbGroup(orders)
    lift_rows = (Q.coords @ np.asarray(lifts, dtype=np.int64).reshape(len(lifts), T.rank)) \
        if lifts else np.zeros((Q.order, T.rank), dtype=np.int64)
    base = T.indices_of(lift_rows)  # one representative per class
    kcoords = T.coords[K.indices]
    classes = T.indices_of(T.coords[base][:, None, :] + kcoords[None, :, :])  # (|Q|, |K|)
    projection = np.full(T.order, -1, dtype=np.int64)
    flat = classes.reshape(-1)
    if np.any(projection[flat] >= 0) or len(np.unique(flat)) != flat.size:
        raise AssertionError("cosets overlap: presentation of S/K is wrong")
    projection[flat] = np.repeat(np.arange(Q.order), K.order)
    if not np.array_equal(projection >= 0, S.mask):
        raise AssertionError("cosets do not cover S")
    section = classes.min(axis=1)
    projection.setflags(write=False)
    section.setflags(write=False)
    return Quotient(T, Q, tuple(lifts), projection, section)


def quotient(T: FinAbGroup, K: SubgroupSpan) -> Quotient:
    """T/K with a cyclic presentation, projection and lexicographically least section."""
    return subquotient_group(T, SubgroupSpan(T, [T.generator(i) for i in range(T.rank)]), K)


def p_part_embedding(T: FinAbGroup, p: int):
    """The p-primary subgroup as a cyclic group together with generator images in T."""
    orders, images = [], []
    for i, n in enumerate(T.orders):
        q = 1
        while n % (q * p) == 0:
            q *= p
        if q > 1:
            orders.append(q)
            images.append(tuple((n // q) * int(i == j) for j in range(T.rank)))
    return FinAbGroup(orders), images
