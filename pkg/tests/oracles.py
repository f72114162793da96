"""Independent reference computations used by the tests."""

import cmath
import math

E8 = [
    [2, -1, 0, 0, 0, 0, 0, 0],
    [-1, 2, -1, 0, 0, 0, 0, 0],
    [0, -1, 2, -1, 0, 0, 0, -1],
    [0, 0, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, 0],
    [0, 0, -1, 0, 0, 0, 0, 2],
]


def numeric_sum(psi) -> complex:
    """Floating point Gauss sum straight from the value table."""
    return sum(cmath.exp(2j * math.pi * int(v) / psi.den) for v in psi.table)


def numeric_phase(z: complex, den: int) -> int:
    """Nearest k with z / |z| close to exp(2 pi i k / den)."""
    return round(cmath.phase(z) / (2 * math.pi) * den) % den


def enumerate_elements(orders):
    """All coordinate tuples of Z/n_1 + ... + Z/n_k, last coordinate fastest."""
    out = [()]
    for n in orders:
        out = [x + (a,) for x in out for a in range(n)]
    return out
