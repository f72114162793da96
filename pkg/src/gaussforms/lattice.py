"""Integral symmetric matrices as lattices: signatures, discriminant forms, and the
phase formulas that relate the two."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import intmat
from .enhance import BilinearForm, TwoLinearForm, build, is_quadratic
from .errors import (EvenAlexander, NotCharacteristic, NotEven, NotQuadratic, OddModulus,
                     SingularMatrix, TheoremViolated)
from .exactnum import QmodZ
from .fingroup import FinAbGroup
from .gauss import NOT_TAME, beta


def as_symmetric(B) -> list[list[int]]:
    B = intmat.as_int_matrix(B)
    n = len(B)
    if any(len(row) != n for row in B):
        raise ValueError("matrix must be square")
    for i in range(n):
        for j in range(i):
            if B[i][j] != B[j][i]:
                raise ValueError(f"matrix is not symmetric at ({i},{j})")
    return B


def _require_nonsingular(B) -> int:
    d = intmat.det(B)
    if d == 0:
        raise SingularMatrix("det B = 0")
    return d


def signature(B) -> int:
    """Exact signature by symmetric elimination over Q."""
    B = as_symmetric(B)
    _require_nonsingular(B)
    A = [[Fraction(x) for x in row] for row in B]
    sig = 0
    while A:
        n = len(A)
        piv = next((i for i in range(n) if A[i][i] != 0), None)
        if piv is not None:
            a = A[piv][piv]
            sig += 1 if a > 0 else -1
            rest = [i for i in range(n) if i != piv]
            A = [[A[i][j] - A[i][piv] * A[piv][j] / a for j in rest] for i in rest]
            continue
        pair = next(((i, j) for i in range(n) for j in range(i + 1, n) if A[i][j] != 0), None)
        if pair is None:
            raise SingularMatrix("zero block in a nonsingular matrix")
        # [[0, c], [c, 0]] has signature 0; eliminate it as a 2x2 pivot
        i, j = pair
        c = A[i][j]
        rest = [k for k in range(n) if k not in pair]
        # inverse of [[0, c], [c, 0]] is [[0, 1/c], [1/c, 0]]
        A = [[A[k][l] - (A[k][i] * A[j][l] + A[k][j] * A[i][l]) / c for l in rest] for k in rest]
    return sig


@dataclass(frozen=True)
class DiscriminantForm:
    """L#/L for L = Z^n with Gram matrix B.

    ``vectors[i]`` is a rational representative of the i-th cyclic generator.
    """

    matrix: tuple
    group: FinAbGroup
    vectors: tuple
    bilinear: BilinearForm
    enhancement: TwoLinearForm | None = None

    def pairing(self, u, v) -> Fraction:
        return sum(u[i] * self.matrix[i][j] * v[j]
                   for i in range(len(u)) for j in range(len(v)))


def discriminant_group(B) -> DiscriminantForm:
    """L#/L with generators V[:, i] / d_i from the Smith form U B V = D."""
    B = as_symmetric(B)
    _require_nonsingular(B)
    n = len(B)
    _, D, V, _ = intmat.smith_normal_form(B)
    orders, vectors = [], []
    for i in range(n):
        d = D[i][i]
        if d != 1:
            orders.append(d)
            vectors.append(tuple(Fraction(V[r][i], d) for r in range(n)))
    T = FinAbGroup(orders)
    M = tuple(tuple(row) for row in B)

    def pair(u, v):
        return sum(u[i] * B[i][j] * v[j] for i in range(n) for j in range(n))

    gram = [[QmodZ(pair(u, v)) for v in vectors] for u in vectors]
    b = BilinearForm(T, gram)
    return DiscriminantForm(M, T, tuple(vectors), b)


def _with_enhancement(disc: DiscriminantForm, genvals) -> DiscriminantForm:
    psi = build(disc.group, genvals, disc.bilinear.gram)
    if psi.bilinear != disc.bilinear:
        raise TheoremViolated("enhancement does not enhance b_L")
    if not is_quadratic(psi):
        raise TheoremViolated("discriminant enhancement is not quadratic")
    return DiscriminantForm(disc.matrix, disc.group, disc.vectors, disc.bilinear, psi)


def milgram_enhancement(B) -> DiscriminantForm:
    """psi_L(x) = B(x, x)/2 on L#/L for even B."""
    B = as_symmetric(B)
    if any(B[i][i] % 2 for i in range(len(B))):
        raise NotEven("diagonal entries must be even")
    disc = discriminant_group(B)
    genvals = []
    for v in disc.vectors:
        q = QmodZ(disc.pairing(v, v) / 2)
        genvals.append((q, q))
    return _with_enhancement(disc, genvals)


def milgram_check(B) -> tuple[int, QmodZ]:
    """(sigma, beta) with beta(psi_L) == sigma/8 asserted exactly."""
    sig = signature(B)
    b = beta(milgram_enhancement(B).enhancement)
    if b is NOT_TAME or b != QmodZ(sig, 8):
        raise TheoremViolated(f"beta(psi_L) = {b} but sigma/8 = {QmodZ(sig, 8)}")
    return sig, b


def is_characteristic(B, nu) -> bool:
    B = as_symmetric(B)
    return all((sum(B[i][j] * nu[j] for j in range(len(B))) - B[i][i]) % 2 == 0
               for i in range(len(B)))


def characteristic_vector(B) -> tuple[int, ...]:
    """The lexicographically least 0/1 vector nu with B nu = diag(B) mod 2."""
    B = as_symmetric(B)
    _require_nonsingular(B)
    n = len(B)
    # rows as bitmasks (bit j = column j), rhs bit
    rows: dict[int, tuple[int, int]] = {}

    def add(mask, rhs) -> bool:
        for piv, (pm, pr) in rows.items():
            if mask >> piv & 1:
                mask ^= pm
                rhs ^= pr
        if mask == 0:
            return rhs == 0
        piv = mask.bit_length() - 1
        for q, (qm, qr) in list(rows.items()):
            if qm >> piv & 1:
                rows[q] = (qm ^ mask, qr ^ rhs)
        rows[piv] = (mask, rhs)
        return True

    for i in range(n):
        mask = sum(1 << j for j in range(n) if B[i][j] % 2)
        if not add(mask, B[i][i] % 2):
            raise TheoremViolated("no characteristic vector mod 2")
    # greedily set coordinates to 0 in order; bit j is coordinate j
    # a failed add leaves the system untouched
    for j in range(n):
        if not add(1 << j, 0):
            add(1 << j, 1)
    nu = [0] * n
    for piv, (mask, rhs) in rows.items():
        if mask != 1 << piv:
            raise TheoremViolated("characteristic system not fully determined")
        nu[piv] = rhs
    if not is_characteristic(B, nu):
        raise TheoremViolated("computed vector is not characteristic")
    return tuple(nu)


def psi_nu(B, nu) -> DiscriminantForm:
    """The quadratic enhancement (B(x, x) - B(nu, x))/2 on L#/L."""
    B = as_symmetric(B)
    nu = [int(v) for v in nu]
    if len(nu) != len(B) or not is_characteristic(B, nu):
        raise NotCharacteristic(f"{nu} is not characteristic for B")
    disc = discriminant_group(B)
    genvals = []
    for v in disc.vectors:
        bvv = disc.pairing(v, v)
        bnv = disc.pairing(nu, v)
        genvals.append((QmodZ((bvv - bnv) / 2), QmodZ((bvv + bnv) / 2)))
    return _with_enhancement(disc, genvals)


def bmf_value(B, nu) -> QmodZ:
    B = as_symmetric(B)
    nbn = sum(nu[i] * B[i][j] * nu[j] for i in range(len(B)) for j in range(len(B)))
    return QmodZ(signature(B) - nbn, 8)


def bmf_check(B, nu) -> bool:
    """beta(psi_nu) == (sigma(B) - B(nu, nu))/8."""
    b = beta(psi_nu(B, nu).enhancement)
    if b is NOT_TAME:
        raise TheoremViolated("psi_nu is not tame")
    return b == bmf_value(B, nu)


def tensor(B, psi: TwoLinearForm) -> TwoLinearForm:
    """(B (x) psi)(t_1..t_n) = sum_i B_ii psi(t_i) + sum_{i<j} B_ij b(t_i, t_j)."""
    B = as_symmetric(B)
    if not is_quadratic(psi):
        raise NotQuadratic("B (x) psi needs a quadratic psi")
    n = len(B)
    T = psi.group
    k = T.rank
    group = FinAbGroup(T.orders * n)
    gram_t = psi.gram
    genvals, gram = [], [[None] * (n * k) for _ in range(n * k)]
    for i in range(n):
        for a in range(k):
            u, v = psi.genvals[a]
            genvals.append((u * B[i][i], v * B[i][i]))
            for j in range(n):
                for c in range(k):
                    gram[i * k + a][j * k + c] = gram_t[a][c] * B[i][j]
    return build(group, genvals, gram)


def brown_form(B, m: int) -> TwoLinearForm:
    """psi_{B,m}(x) = B(x, x)/(2m) on (Z/m)^n."""
    B = as_symmetric(B)
    if m < 2 or m % 2:
        raise OddModulus(f"m = {m} must be even")
    n = len(B)
    genvals = [(QmodZ(B[i][i], 2 * m),) * 2 for i in range(n)]
    gram = [[QmodZ(B[i][j], m) for j in range(n)] for i in range(n)]
    return build(FinAbGroup([m] * n), genvals, gram)


def _phi2(a: int) -> int:
    return 0 if a % 8 in (1, 7) else 1


def arf_from_seifert(S) -> QmodZ:
    """Arf invariant phi_2(det(S + S^T))/2, checked against beta of x^T S x / 2 on (Z/2)^n."""
    S = intmat.as_int_matrix(S)
    n = len(S)
    B = [[S[i][j] + S[j][i] for j in range(n)] for i in range(n)]
    d = intmat.det(B)
    if d % 2 == 0:
        raise EvenAlexander(f"det(S + S^T) = {d} is even")
    value = QmodZ(_phi2(d), 2)
    genvals = [(QmodZ(S[i][i], 2),) * 2 for i in range(n)]
    gram = [[QmodZ(B[i][j], 2) for j in range(n)] for i in range(n)]
    psi = build(FinAbGroup([2] * n), genvals, gram)
    b = beta(psi)
    if b is NOT_TAME or b != value:
        raise TheoremViolated(f"Arf formula gives {value}, Gauss sum gives {b}")
    return value
