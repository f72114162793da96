"""Exact values in Q/Z and exact cyclotomic integers.

Cyclotomic integers are kept in the redundant power basis
``sum_k coeffs[k] * zeta_N**k``.  Equality is decided by reducing modulo the
relations among N-th roots of unity: for every prime p | N the p roots
``zeta**(r + i*N/p)`` (i = 0..p-1) sum to zero, and these relations generate
the whole kernel of ``Z^N -> Z[zeta_N]``.  Eliminating one term from every
such coset, prime by prime, gives a canonical form in O(N) steps; an element
is zero exactly when its canonical form is.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import AmbiguousSign, ParseError

SIGN_TOL = 1e-9

# int64 coefficients are used while magnitudes stay well inside this bound;
# past it everything switches to Python integers (object arrays).
_INT64_SAFE = 2**55


def factorint(n: int) -> list[tuple[int, int]]:
    """Prime factorisation of a positive integer as ``[(p, a), ...]``."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            a = 0
            while n % d == 0:
                n //= d
                a += 1
            out.append((d, a))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


class QmodZ:
    """An element of Q/Z, stored as a reduced fraction num/den with 0 <= num < den."""

    __slots__ = ("num", "den")

    def __init__(self, num=0, den: int = 1):
        if isinstance(num, QmodZ):
            num, den = num.num, num.den
        elif isinstance(num, Fraction):
            num, den = num.numerator * 1, num.denominator * den
        num, den = int(num), int(den)
        if den == 0:
            raise ZeroDivisionError("QmodZ with zero denominator")
        if den < 0:
            num, den = -num, -den
        g = math.gcd(num, den)
        num //= g
        den //= g
        object.__setattr__(self, "num", num % den)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("QmodZ is immutable")

    @classmethod
    def parse(cls, text) -> "QmodZ":
        if isinstance(text, QmodZ):
            return text
        if isinstance(text, int):
            return cls(text)
        s = str(text).strip()
        try:
            if "/" in s:
                a, b = s.split("/")
                return cls(int(a), int(b))
            return cls(int(s))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a Q/Z value: {text!r}") from exc

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def at_denominator(self, d: int) -> int:
        """Numerator of this value written over ``d`` (``den`` must divide ``d``)."""
        if d % self.den:
            raise ValueError(f"{self} cannot be written over {d}")
        return self.num * (d // self.den)

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return QmodZ(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return QmodZ(-self.num, self.den)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, a):
        if isinstance(a, (int, np.integer)) and not isinstance(a, bool):
            return QmodZ(self.num * int(a), self.den)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return False
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return self.num != 0

    def __str__(self):
        return f"{self.num}/{self.den}"

    def __repr__(self):
        return f"QmodZ({self.num}/{self.den})"


def _coerce(x):
    if isinstance(x, QmodZ):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return QmodZ(int(x))
    if isinstance(x, Fraction):
        return QmodZ(x)
    return NotImplemented


def qz_arith(a: QmodZ, b, op: str) -> QmodZ:
    """Apply ``op`` in {'add', 'sub', 'neg', 'scale'}; for 'scale' ``b`` is an integer."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "neg":
        return -a
    if op == "scale":
        return a * int(b)
    raise ValueError(f"unknown op {op!r}")


def lcm(*values: int) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


# ---------------------------------------------------------------------------
# cyclotomic integers


@lru_cache(maxsize=512)
def _layout(level: int):
    """Index map from exponents mod ``level`` into a tensor with two axes per prime.

    For q = p^a || level the residue j mod q is split as i*(q/p) + r; the axis
    holding ``i`` has length p and its last slice is the one eliminated.
    """
    j = np.arange(level)
    shape, digits, axes = [], [], []
    for p, a in factorint(level):
        q = p**a
        s = q // p
        axes.append((len(shape), p))
        shape += [p, s]
        digits += [(j % q) // s, j % s]
    if not shape:
        return (1,), np.zeros(1, dtype=np.intp), ()
    return tuple(shape), np.ravel_multi_index(digits, shape), tuple(axes)


def canonical_form(coeffs) -> np.ndarray:
    """Canonical representative of power-basis coefficient vectors (last axis = level)."""
    c = np.asarray(coeffs)
    level = c.shape[-1]
    shape, pos, axes = _layout(level)
    lead = c.shape[:-1]
    t = np.zeros(lead + (level,), dtype=c.dtype)
    t[..., pos] = c
    t = t.reshape(lead + shape)
    for ax, p in axes:
        ax += len(lead)
        t = t - np.take(t, [p - 1], axis=ax)
    return t.reshape(lead + (level,))


@lru_cache(maxsize=256)
def _roots(level: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(level) / level)


def _coeff_array(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype == object or arr.size == 0:
        pyvals = [int(v) for v in np.ravel(arr)]
        big = max((abs(v) for v in pyvals), default=0)
        if big < _INT64_SAFE:
            return np.array(pyvals, dtype=np.int64).reshape(arr.shape)
        return np.array(pyvals, dtype=object).reshape(arr.shape)
    if not np.issubdtype(arr.dtype, np.integer):
        raise TypeError("cyclotomic coefficients must be integers")
    arr = arr.astype(np.int64)
    if arr.size and int(np.abs(arr).max()) >= _INT64_SAFE:
        return arr.astype(object)
    return arr


def _maxabs(arr) -> int:
    return int(max((abs(int(v)) for v in np.ravel(arr)), default=0)) if arr.dtype == object \
        else int(np.abs(arr).max(initial=0))


class CycSum:
    """An element of Z[zeta_N] written as ``sum_k coeffs[k] * zeta_N**k``."""

    __slots__ = ("level", "coeffs")

    def __init__(self, level: int, coeffs):
        level = int(level)
        if level < 1:
            raise ValueError("level must be positive")
        arr = _coeff_array(coeffs)
        if arr.shape != (level,):
            raise ValueError(f"need {level} coefficients, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("CycSum is immutable")

    @classmethod
    def constant(cls, c: int, level: int = 1) -> "CycSum":
        coeffs = [0] * level
        coeffs[0] = c
        return cls(level, coeffs)

    @classmethod
    def root(cls, k: int, level: int) -> "CycSum":
        coeffs = [0] * level
        coeffs[k % level] = 1
        return cls(level, coeffs)

    def at_level(self, m: int) -> "CycSum":
        if m % self.level:
            raise ValueError(f"level {m} is not a multiple of {self.level}")
        if m == self.level:
            return self
        out = np.zeros(m, dtype=self.coeffs.dtype)
        out[:: m // self.level] = self.coeffs
        return CycSum(m, out)

    def _aligned(self, other: "CycSum"):
        m = lcm(self.level, other.level)
        return self.at_level(m), other.at_level(m)

    def __add__(self, other):
        if isinstance(other, int):
            other = CycSum.constant(other)
        a, b = self._aligned(other)
        ca, cb = a.coeffs, b.coeffs
        if ca.dtype == object or cb.dtype == object:
            ca, cb = ca.astype(object), cb.astype(object)
        return CycSum(a.level, ca + cb)

    __radd__ = __add__

    def __neg__(self):
        return CycSum(self.level, -self.coeffs)

    def __sub__(self, other):
        if isinstance(other, int):
            other = CycSum.constant(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            k = int(other)
            if _maxabs(self.coeffs) * abs(k) >= _INT64_SAFE:
                return CycSum(self.level, self.coeffs.astype(object) * k)
            return CycSum(self.level, self.coeffs * k)
        if not isinstance(other, CycSum):
            return NotImplemented
        a, b = self._aligned(other)
        n = a.level
        ca, cb = a.coeffs, b.coeffs
        if _maxabs(ca) * _maxabs(cb) * n >= _INT64_SAFE:
            ca, cb = ca.astype(object), cb.astype(object)
        full = np.convolve(ca, cb)
        folded = full[:n].copy()
        folded[: len(full) - n] += full[n:]
        return CycSum(n, folded)

    __rmul__ = __mul__

    def rotate(self, k: int) -> "CycSum":
        """Multiply by ``zeta_N**k``."""
        return CycSum(self.level, np.roll(self.coeffs, k % self.level))

    def conjugate(self) -> "CycSum":
        idx = (-np.arange(self.level)) % self.level
        return CycSum(self.level, self.coeffs[idx])

    def canonical(self) -> np.ndarray:
        return canonical_form(self.coeffs)

    def is_zero(self) -> bool:
        return not self.canonical().any()

    def __eq__(self, other):
        if isinstance(other, int):
            other = CycSum.constant(other)
        if not isinstance(other, CycSum):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def is_real(self) -> bool:
        return self == self.conjugate()

    def integer_value(self):
        """The rational integer this element equals, or None if it is not one."""
        c = self.canonical()
        if self.level > 1 and c[1:].any():
            return None
        # index 0 maps to the all-zero multi-index, which is never eliminated
        return int(c[0])

    def numeric(self) -> complex:
        c = self.coeffs.astype(float) if self.coeffs.dtype == object else self.coeffs
        return complex(np.dot(c, _roots(self.level)))

    def to_json(self) -> dict:
        return {"level": self.level, "coeffs": [int(v) for v in self.coeffs]}

    @classmethod
    def from_json(cls, doc) -> "CycSum":
        return cls(doc["level"], doc["coeffs"])

    def __repr__(self):
        terms = [f"{int(c)}*z^{k}" for k, c in enumerate(self.coeffs) if c]
        return f"CycSum[{self.level}](" + (" + ".join(terms) or "0") + ")"


def cyc_conjugate(g: CycSum) -> CycSum:
    return g.conjugate()


def cyc_is_real_positive(g: CycSum, tol: float = SIGN_TOL) -> bool:
    """Exact realness test, then a numeric sign test guarded by ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not g.is_real():
        return False
    re = g.numeric().real
    if abs(re) <= tol:
        raise AmbiguousSign(f"real part {re!r} within {tol} of zero")
    return re > 0


def phase_of(z: complex) -> float:
    """Argument of ``z`` as a fraction of a full turn, in [0, 1)."""
    return (cmath.phase(z) / (2 * math.pi)) % 1.0
