"""Exact integer matrix routines on lists of Python ints.

Matrices here are tiny (rank a handful, entries modest), so plain lists with
unbounded integers are simpler and safer than fixed-width numpy arrays.
"""

from __future__ import annotations

from fractions import Fraction


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def as_int_matrix(rows) -> list[list[int]]:
    return [[int(x) for x in row] for row in rows]


def transpose(a):
    return [list(col) for col in zip(*a)]


def matmul(a, b):
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def det(a) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(map(int, row)) for row in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def inverse_fraction(a) -> list[list[Fraction]]:
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def smith_normal_form(a):
    """Return ``(U, D, V, Vinv)`` with ``U @ a @ V == D`` in Smith normal form.

    ``U`` and ``V`` are unimodular, ``Vinv`` is the inverse of ``V``, and the
    nonzero diagonal entries of ``D`` are positive with each dividing the next.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    d = as_int_matrix(a)
    u, v, vinv = identity(m), identity(n), identity(n)

    def row_add(i, k, q):  # row_i += q * row_k
        d[i] = [x + q * y for x, y in zip(d[i], d[k])]
        u[i] = [x + q * y for x, y in zip(u[i], u[k])]

    def col_add(j, k, q):  # col_j += q * col_k
        for row in d:
            row[j] += q * row[k]
        for row in v:
            row[j] += q * row[k]
        vinv[k] = [x - q * y for x, y in zip(vinv[k], vinv[j])]

    def row_swap(i, k):
        d[i], d[k] = d[k], d[i]
        u[i], u[k] = u[k], u[i]

    def col_swap(j, k):
        for row in d:
            row[j], row[k] = row[k], row[j]
        for row in v:
            row[j], row[k] = row[k], row[j]
        vinv[j], vinv[k] = vinv[k], vinv[j]

    for t in range(min(m, n)):
        while True:
            cands = [(abs(d[i][j]), i, j) for i in range(t, m) for j in range(t, n) if d[i][j]]
            if not cands:
                break
            _, i, j = min(cands)
            row_swap(t, i)
            col_swap(t, j)
            clean = True
            for i in range(t + 1, m):
                if d[i][t]:
                    row_add(i, t, -(d[i][t] // d[t][t]))
                    clean &= d[i][t] == 0
            for j in range(t + 1, n):
                if d[t][j]:
                    col_add(j, t, -(d[t][j] // d[t][t]))
                    clean &= d[t][j] == 0
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if d[i][j] % d[t][t]), None)
            if bad is None:
                break
            row_add(t, bad[0], 1)
        if t < m and t < n and d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
    return u, d, v, vinv


def lattice_kernel(images, relations) -> list[list[int]]:
    """Generators of ``{a in Z^m : sum_j a_j images[j] in rowspace(relations)}``.

    ``images`` is an m-row integer matrix, ``relations`` any rows of the same width.
    """
    m = len(images)
    width = len(images[0]) if m else len(relations[0]) if relations else 0
    rows = [list(images[j]) + [int(j == k) for k in range(m)] for j in range(m)]
    rows += [list(r) + [0] * m for r in relations]
    r = 0
    for c in range(width):
        while True:
            nz = [i for i in range(r, len(rows)) if rows[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(rows[i][c]))
            rows[r], rows[piv] = rows[piv], rows[r]
            done = True
            for i in range(r + 1, len(rows)):
                if rows[i][c]:
                    q = rows[i][c] // rows[r][c]
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
                    done &= rows[i][c] == 0
            if done:
                break
        if r < len(rows) and rows[r][c]:
            r += 1
    return [row[width:] for row in rows[r:] if any(row[width:])]
