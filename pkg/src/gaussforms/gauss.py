"""Exact Gauss sums G(psi) = sum_t exp(2 pi i psi(t)) and the phase beta.

G(psi) is built as a histogram of the value table at level N = den(psi).
The phase is found exactly: beta = k/L (L = lcm(8, N)) is the unique k for
which G * zeta_L^-k is conjugation invariant and positive.  Only the sign
test touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousSign, NoPhaseFound, NotTame, TheoremViolated
from .exactnum import SIGN_TOL, CycSum, QmodZ, canonical_form, cyc_is_real_positive, lcm, _roots
from .enhance import (TwoLinearForm, radical, reduce_with_quotient, shift_by_element,
                      subquotient)
from .fingroup import SubgroupSpan, check_cap

# beyond this many phase candidates the numeric argument proposes k first
SCAN_LIMIT = 512
# elements per numpy batch in the vectorised checks
_BATCH_CELLS = 1 << 22


class _NotTame:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NOT_TAME"

    def __str__(self):
        return "NOT TAME"

    def __bool__(self):
        return False


NOT_TAME = _NotTame()


def gauss_sum(psi: TwoLinearForm) -> CycSum:
    check_cap(psi.group.order)
    return CycSum(psi.den, np.bincount(psi.table, minlength=psi.den))


@dataclass(frozen=True)
class Magnitude:
    """|G|^2, either zero or a positive integer."""

    square: int

    @property
    def is_zero(self) -> bool:
        return self.square == 0

    def __str__(self):
        return "Zero" if self.is_zero else f"SqrtOf({self.square})"


def _cyclic_autocorrelation(counts: np.ndarray) -> np.ndarray:
    """c[k] = sum_j counts[j] * counts[j - k mod N], exactly."""
    n = len(counts)
    if n <= 1 << 14:
        full = np.convolve(counts, counts[::-1])
        out = full[n - 1:].copy()
        out[1:] += full[: n - 1]
        return out
    # split into 8-bit limbs so every float FFT product stays far below 2^53
    limbs = [(counts >> (8 * s)) & 0xFF for s in range(3)]
    if int(counts.max()) >= 1 << 24:
        raise OverflowError("counts too large for the limb split")
    spectra = [np.fft.rfft(l.astype(float)) for l in limbs]
    out = np.zeros(n, dtype=object)
    for s, fs in enumerate(spectra):
        for t, ft in enumerate(spectra):
            part = np.rint(np.fft.irfft(fs * np.conj(ft), n)).astype(np.int64)
            out = out + part.astype(object) * (1 << (8 * (s + t)))
    return np.array([int(v) for v in out], dtype=np.int64)


def gauss_norm(g: CycSum) -> CycSum:
    """G * conj(G) as a cyclotomic integer."""
    counts = np.asarray(g.coeffs, dtype=np.int64)
    if np.any(counts < 0):
        return g * g.conjugate()
    return CycSum(g.level, _cyclic_autocorrelation(counts))


def magnitude_check(psi: TwoLinearForm) -> Magnitude:
    """|G(psi)|^2, cross-checked against |T-perp| * |T| (tame) or 0 (not tame)."""
    g = gauss_sum(psi)
    sq = gauss_norm(g).integer_value()
    if sq is None:
        raise TheoremViolated("G * conj(G) is not a rational integer")
    rad = radical(psi)
    expected = rad.order * psi.group.order if rad.is_zero() else 0
    if sq != expected:
        raise TheoremViolated(f"|G|^2 = {sq}, expected {expected}")
    return Magnitude(sq)


def _real_mask(coeffs: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    """For each k in ``shifts``: is G * zeta^-k conjugation invariant?

    G zeta^-k is real iff G == conj(G) * zeta^(2k).
    """
    L = coeffs.shape[-1]
    conj = coeffs[(-np.arange(L)) % L]
    out = np.empty(len(shifts), dtype=bool)
    step = max(1, _BATCH_CELLS // L)
    for s in range(0, len(shifts), step):
        idx = (np.arange(L)[None, :] - 2 * shifts[s:s + step, None]) % L
        out[s:s + step] = ~canonical_form(coeffs[None, :] - conj[idx]).any(axis=1)
    return out


def phase_from_sum(g: CycSum, scan: bool | None = None, tol: float = SIGN_TOL) -> QmodZ:
    """The phase of a nonzero Gauss sum whose phase has denominator dividing lcm(8, level)."""
    L = lcm(8, g.level)
    G = g.at_level(L)
    c = np.asarray(G.coeffs)
    if c.dtype == object:
        c = c.astype(np.int64)
    if scan is None:
        scan = L <= SCAN_LIMIT
    if not scan:
        z = G.numeric()
        if abs(z) > tol:
            k0 = int(round(np.angle(z) / (2 * np.pi) * L)) % L
            if _real_mask(c, np.array([k0]))[0] and cyc_is_real_positive(G.rotate(-k0), tol):
                # the only other real rotation is k0 + L/2, which is the negative
                return QmodZ(k0, L)
    real = np.flatnonzero(_real_mask(c, np.arange(L)))
    positive = [int(k) for k in real if cyc_is_real_positive(G.rotate(-int(k)), tol)]
    if len(positive) != 1:
        raise NoPhaseFound(f"{len(positive)} phases at denominator {L}")
    if len(real) != 2:
        raise TheoremViolated(f"{len(real)} real rotations of a nonzero sum")
    return QmodZ(positive[0], L)


def beta(psi: TwoLinearForm, scan: bool | None = None):
    """beta(psi) as a QmodZ, or NOT_TAME when the Gauss sum vanishes."""
    if magnitude_check(psi).is_zero:
        return NOT_TAME
    return phase_from_sum(gauss_sum(psi), scan=scan)


def beta_and_e(psi: TwoLinearForm, p: int):
    """(beta, e) for a tame psi on a p-group, where |T / T-perp| = p^e."""
    b = beta(psi)
    if b is NOT_TAME:
        return b, None
    q = psi.group.order // radical(psi).order
    e = 0
    while q > 1:
        if q % p:
            raise ValueError("not a p-group")
        q //= p
        e += 1
    return b, e


# ---------------------------------------------------------------------------
# structural identities


def verify_subquotient(psi: TwoLinearForm, K: SubgroupSpan) -> bool:
    """G(psi) == |K| * G(psi on K-perp / K), exactly."""
    induced = subquotient(psi, K)
    return gauss_sum(psi) == gauss_sum(induced) * K.order


def verify_shift(psi: TwoLinearForm, x) -> bool:
    """beta(psi_x) == beta(psi) - psi(x) for one element x (psi tame)."""
    b = beta(psi)
    if b is NOT_TAME:
        raise NotTame("shift identity needs a tame form")
    bx = beta(shift_by_element(psi, x))
    return bx is not NOT_TAME and bx == b - psi.value(x)


def verify_phase_batch(tables: np.ndarray, den: int, expected) -> np.ndarray:
    """For each row of value numerators (over ``den``), is its Gauss sum's phase ``expected[row]``?

    A row passes iff G * exp(-2 pi i expected) is exactly real and numerically
    positive.  Since only the two rotations k and k + L/2 of a nonzero sum can
    be real, that pins the phase down exactly; vanishing sums fail.
    """
    tables = np.asarray(tables, dtype=np.int64)
    rows = tables.shape[0]
    exp_list = [QmodZ.parse(e) for e in expected]
    L = lcm(8, den, *(e.den for e in exp_list))
    scale = L // den
    ks = np.array([e.at_denominator(L) for e in exp_list], dtype=np.int64)
    out = np.zeros(rows, dtype=bool)
    roots = _roots(L)
    step = max(1, _BATCH_CELLS // max(L, tables.shape[1]))
    for s in range(0, rows, step):
        t = tables[s:s + step]
        k = ks[s:s + step]
        n = len(t)
        # histogram of (scaled value - k) mod L: coefficients of G * zeta^-k
        vals = (t * scale - k[:, None]) % L
        flat = (vals + np.arange(n)[:, None] * L).reshape(-1)
        counts = np.bincount(flat, minlength=n * L).reshape(n, L)
        conj = counts[:, (-np.arange(L)) % L]
        real = ~canonical_form(counts - conj).any(axis=1)
        re = counts @ roots.real
        ambiguous = real & (np.abs(re) <= SIGN_TOL)
        if ambiguous.any():
            # exact zero sums are simply "not this phase"; anything else is a sign problem
            zero = ~canonical_form(counts[ambiguous]).any(axis=1)
            if not zero.all():
                raise AmbiguousSign("real part within tolerance of zero")
        out[s:s + step] = real & (re > SIGN_TOL)
    return out


def verify_delta_beta(psi: TwoLinearForm) -> bool:
    """x -> beta(psi) - beta(psi_x) equals the reduced form on T/T-perp, for every class.

    Each psi_x table is built from the definition psi(t) + b(x, t); the phase
    of every one is verified exactly in a single batch.
    """
    b = beta(psi)
    if b is NOT_TAME:
        raise NotTame("Delta_beta needs a tame form")
    red, q = reduce_with_quotient(psi)
    T = psi.group
    bil = psi.bilinear
    den = lcm(psi.den, bil.den)
    base = psi.table_at(den)
    reps = q.section
    G = bil.gram_numerators * (den // bil.den)
    w = (T.coords[reps] @ G) % den  # (|Q|, rank)
    expected, ok = [], True
    red_vals = red.values()
    for y, x in enumerate(reps):
        # beta(psi) - beta(psi_x) = psi(x) should be the reduced form at the class of x
        if red_vals[y] != psi.value(T.at(int(x))):
            ok = False
        expected.append(b - red_vals[y])
    if not ok:
        return False
    result = np.zeros(len(reps), dtype=bool)
    step = max(1, _BATCH_CELLS // T.order)
    for s in range(0, len(reps), step):
        rows = (base[None, :] + (T.coords @ w[s:s + step].T).T) % den
        result[s:s + step] = verify_phase_batch(rows, den, expected[s:s + step])
    return bool(result.all())


def eighth_phases_batch(tables: np.ndarray, den: int):
    """For each row of value numerators: (is the Gauss sum zero, k with beta = k/8 or -1).

    Every k in 0..7 is tested exactly; a nonzero sum whose phase is not a
    multiple of 1/8 gets -1.
    """
    tables = np.asarray(tables, dtype=np.int64)
    rows = tables.shape[0]
    L = lcm(8, den)
    scale = L // den
    zero = np.zeros(rows, dtype=bool)
    phase = np.full(rows, -1, dtype=np.int64)
    roots = _roots(L)
    step = max(1, _BATCH_CELLS // (8 * max(L, tables.shape[1])))
    for s in range(0, rows, step):
        t = tables[s:s + step]
        n = len(t)
        flat = ((t * scale) % L + np.arange(n)[:, None] * L).reshape(-1)
        counts = np.bincount(flat, minlength=n * L).reshape(n, L)
        zero[s:s + step] = ~canonical_form(counts).any(axis=1)
        for k in range(8):
            rot = np.roll(counts, -k * (L // 8), axis=1)  # G * zeta_8^-k
            conj = rot[:, (-np.arange(L)) % L]
            real = ~canonical_form(rot - conj).any(axis=1)
            re = rot @ roots.real
            hit = real & (re > SIGN_TOL) & ~zero[s:s + step]
            if np.any(real & ~zero[s:s + step] & (np.abs(re) <= SIGN_TOL)):
                raise AmbiguousSign("real part within tolerance of zero")
            phase[s:s + step][hit] = k
    return zero, phase
