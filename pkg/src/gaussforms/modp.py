"""Reduction of integral symmetric matrices modulo p^r and the local invariants
sigma_p, phi_p that drive the closed-form phase formulas.

A reduced decomposition is C = C_0 + p C_1 + ... + p^w C_w (orthogonal sum),
each C_i an orthogonal sum of 1x1 blocks <a> and, for p = 2, pseudo-hyperbolic
blocks [[2 m1, 1], [1, 2 m2]], with det C_i prime to p.  The witness M has
det M prime to p and M^T B M = C mod p^r.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import intmat
from .enhance import TwoLinearForm, orthogonal_sum_all, uf, zero_form
from .errors import (DetDivisibleByP, MalformedDecomposition, NotCoprime, SingularMatrix,
                     TheoremViolated)
from .exactnum import QmodZ
from .fingroup import FinAbGroup
from .gauss import NOT_TAME
from .lattice import as_symmetric, tensor


def vp(n: int, p: int) -> int:
    n = abs(n)
    if n == 0:
        raise ValueError("v_p(0) is infinite")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


@dataclass(frozen=True)
class ReducedBlock:
    kind: str  # "diag" or "hyp"
    values: tuple

    @classmethod
    def diag(cls, a: int) -> "ReducedBlock":
        return cls("diag", (int(a),))

    @classmethod
    def hyp(cls, m1: int, m2: int) -> "ReducedBlock":
        return cls("hyp", (int(m1), int(m2)))

    @property
    def size(self) -> int:
        return 1 if self.kind == "diag" else 2

    def matrix(self) -> list[list[int]]:
        if self.kind == "diag":
            return [[self.values[0]]]
        m1, m2 = self.values
        return [[2 * m1, 1], [1, 2 * m2]]

    def det(self) -> int:
        if self.kind == "diag":
            return self.values[0]
        m1, m2 = self.values
        return 4 * m1 * m2 - 1

    def to_json(self) -> dict:
        return {"diag": self.values[0]} if self.kind == "diag" else {"hyp": list(self.values)}

    @classmethod
    def from_json(cls, doc) -> "ReducedBlock":
        if not isinstance(doc, dict) or len(doc) != 1:
            raise MalformedDecomposition(f"bad block {doc!r}")
        if "diag" in doc:
            return cls.diag(doc["diag"])
        if "hyp" in doc and len(doc["hyp"]) == 2:
            return cls.hyp(*doc["hyp"])
        raise MalformedDecomposition(f"bad block {doc!r}")


def block_sum(blocks) -> list[list[int]]:
    n = sum(b.size for b in blocks)
    out = [[0] * n for _ in range(n)]
    k = 0
    for b in blocks:
        m = b.matrix()
        for i in range(b.size):
            for j in range(b.size):
                out[k + i][k + j] = m[i][j]
        k += b.size
    return out


def blocks_det(blocks) -> int:
    d = 1
    for b in blocks:
        d *= b.det()
    return d


@dataclass(frozen=True)
class Layer:
    i: int
    blocks: tuple

    def matrix(self) -> list[list[int]]:
        return block_sum(self.blocks)

    def to_json(self) -> dict:
        return {"i": self.i, "blocks": [b.to_json() for b in self.blocks]}

    @classmethod
    def from_json(cls, doc) -> "Layer":
        try:
            return cls(int(doc["i"]), tuple(ReducedBlock.from_json(b) for b in doc["blocks"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedDecomposition(f"bad layer {doc!r}") from exc


def _layers_by_index(layers) -> dict:
    out = {}
    for layer in layers:
        if layer.i in out:
            raise MalformedDecomposition(f"layer {layer.i} appears twice")
        out[layer.i] = layer.blocks
    return out


@dataclass(frozen=True)
class ReducedDecomposition:
    p: int
    r: int
    layers: tuple
    witness: tuple = field(default=())

    def layer(self, i: int) -> tuple:
        return _layers_by_index(self.layers).get(i, ())

    def assembled(self) -> list[list[int]]:
        """C = sum_i p^i C_i in the witness's column order."""
        blocks = [(layer.i, b) for layer in self.layers for b in layer.blocks]
        n = sum(b.size for _, b in blocks)
        out = [[0] * n for _ in range(n)]
        k = 0
        for i, b in blocks:
            m = b.matrix()
            for a in range(b.size):
                for c in range(b.size):
                    out[k + a][k + c] = self.p**i * m[a][c]
            k += b.size
        return out

    def check_witness(self, B) -> bool:
        M = [list(row) for row in self.witness]
        if intmat.det(M) % self.p == 0:
            return False
        lhs = intmat.matmul(intmat.transpose(M), intmat.matmul(B, M))
        C = self.assembled()
        mod = self.p**self.r
        return all((lhs[i][j] - C[i][j]) % mod == 0 for i in range(len(C)) for j in range(len(C)))

    def to_json(self) -> dict:
        return {"p": self.p, "r": self.r, "layers": [l.to_json() for l in self.layers],
                "witness": [list(row) for row in self.witness]}

    @classmethod
    def from_json(cls, doc) -> "ReducedDecomposition":
        try:
            layers = tuple(Layer.from_json(l) for l in doc["layers"])
            witness = tuple(tuple(int(x) for x in row) for row in doc.get("witness", []))
            return cls(int(doc["p"]), int(doc["r"]), layers, witness)
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedDecomposition(str(exc)) from exc


def reduce_mod_pr(B, p: int, r: int, rng: random.Random | None = None) -> ReducedDecomposition:
    """A reduced matrix p^r-similar to B, with its witness.

    r is raised to max(r, v_p(det B) + 1, 3 if p = 2).  Work is done modulo
    p^(r + v + 3), so dividing a layer by p never exhausts the precision
    needed for the final congruence.  ``rng`` randomises pivot choices.
    """
    B = as_symmetric(B)
    n = len(B)
    d = intmat.det(B)
    if d == 0:
        raise SingularMatrix("det B = 0")
    v = vp(d, p)
    r_eff = max(r, v + 1, 3 if p == 2 else 1)
    R = r_eff + v + 3
    PR = p**R
    out_mod = p**r_eff

    def pick(cands):
        return rng.choice(cands) if rng is not None else cands[0]

    basis = [[int(i == j) for i in range(n)] for j in range(n)]  # columns
    A = [[x % PR for x in row] for row in B]
    layers, current, cols = [], [], []
    i = 0
    while basis:
        P = p ** (R - i)
        k = len(basis)
        unit_diag = [j for j in range(k) if A[j][j] % p]
        if unit_diag:
            j = pick(unit_diag)
            alpha = A[j][j]
            inv = pow(alpha, -1, P)
            rest = [l for l in range(k) if l != j]
            coef = {l: A[j][l] * inv % P for l in rest}
            x = basis[j]
            A = [[(A[l][m] - A[l][j] * coef[m]) % P for m in rest] for l in rest]
            basis = [[(bl - coef[l] * xc) % PR for bl, xc in zip(basis[l], x)] for l in rest]
            current.append(ReducedBlock.diag(alpha % out_mod))
            cols.append(x)
            continue
        unit_off = [(j, l) for j in range(k) for l in range(j + 1, k) if A[j][l] % p]
        if unit_off:
            j, l = pick(unit_off)
            if p != 2:
                # (x, y) -> (x + y, x - y) makes a unit diagonal entry
                bj, bl = basis[j], basis[l]
                basis[j] = [(a + b) % PR for a, b in zip(bj, bl)]
                basis[l] = [(a - b) % PR for a, b in zip(bj, bl)]
                rj, rl = A[j], A[l]
                A[j] = [(a + b) % P for a, b in zip(rj, rl)]
                A[l] = [(a - b) % P for a, b in zip(rj, rl)]
                for row in A:
                    a, b = row[j], row[l]
                    row[j], row[l] = (a + b) % P, (a - b) % P
                continue
            # p = 2: scale y so that b(x, y) = 1, then split off the 2x2 block
            c = pow(A[j][l], -1, P)
            basis[l] = [(c * a) % PR for a in basis[l]]
            A[l] = [(c * a) % P for a in A[l]]
            for row in A:
                row[l] = (c * row[l]) % P
            a, dd = A[j][j], A[l][l]
            det_h = (a * dd - 1) % P
            hinv = pow(det_h, -1, P)
            H_inv = [[dd * hinv % P, -hinv % P], [-hinv % P, a * hinv % P]]
            rest = [m for m in range(k) if m not in (j, l)]
            # coefficients of each remaining vector along x and y
            coef = {}
            for m in rest:
                s = (H_inv[0][0] * A[j][m] + H_inv[0][1] * A[l][m]) % P
                t = (H_inv[1][0] * A[j][m] + H_inv[1][1] * A[l][m]) % P
                coef[m] = (s, t)
            x, y = basis[j], basis[l]
            A = [[(A[m][q] - A[m][j] * coef[q][0] - A[m][l] * coef[q][1]) % P for q in rest]
                 for m in rest]
            basis = [[(bm - coef[m][0] * xc - coef[m][1] * yc) % PR
                      for bm, xc, yc in zip(basis[m], x, y)] for m in rest]
            half = out_mod // 2
            current.append(ReducedBlock.hyp((a // 2) % half, (dd // 2) % half))
            cols += [x, y]
            continue
        # everything divisible by p: next layer
        if current:
            layers.append(Layer(i, tuple(current)))
            current = []
        A = [[a // p for a in row] for row in A]
        i += 1
        if i > v:
            raise TheoremViolated("reduction ran past v_p(det B) layers")
    if current:
        layers.append(Layer(i, tuple(current)))
    witness = tuple(tuple(cols[c][row] % out_mod for c in range(n)) for row in range(n))
    dec = ReducedDecomposition(p, r_eff, tuple(layers), witness)
    if not dec.check_witness(B):
        raise TheoremViolated("reduction witness fails M^T B M = C")
    for layer in dec.layers:
        if blocks_det(layer.blocks) % p == 0:
            raise TheoremViolated(f"layer {layer.i} is not reduced")
    return dec


# ---------------------------------------------------------------------------
# local invariants


_SIGMA2 = {1: 1, 7: -1, 3: 3, 5: -3}


def _is_blocks(A) -> bool:
    return len(A) > 0 and all(isinstance(b, ReducedBlock) for b in A)


def sigma_p(A, p: int) -> int:
    """sigma_p of a matrix or of a list of reduced blocks, as a residue mod 8."""
    if _is_blocks(A):
        blocks = list(A)
        if blocks_det(blocks) % p == 0:
            raise DetDivisibleByP(f"det divisible by {p}")
        if p != 2:
            return sum(b.size for b in blocks) % 8
        return sum(_SIGMA2[b.values[0] % 8] for b in blocks if b.kind == "diag") % 8
    A = as_symmetric(A)
    if not A:
        return 0
    if intmat.det(A) % p == 0:
        raise DetDivisibleByP(f"det divisible by {p}")
    if p != 2:
        return len(A) % 8
    dec = reduce_mod_pr(A, 2, 3)
    return sigma_p(dec.layer(0), 2) if dec.layer(0) else 0


def phi_p(a: int, p: int) -> int:
    """0 if a is a square unit mod p (for p = 2: a = +-1 mod 8), else 1."""
    if a % p == 0:
        raise NotCoprime(f"{a} is not prime to {p}")
    if p == 2:
        return 0 if a % 8 in (1, 7) else 1
    return 0 if pow(a % p, (p - 1) // 2, p) == 1 else 1


def beta_multiplier(beta_psi, e: int, p: int, a: int) -> QmodZ:
    """beta(a psi) from beta(psi) for tame quadratic psi on a p-group, |T/T-perp| = p^e."""
    b = QmodZ.parse(beta_psi)
    f = phi_p(a, p)
    if p == 2:
        return b * a + QmodZ(f * e, 2)
    return b + QmodZ(f * e, 2)


def beta_lsmx(B, beta_psi, e: int, p: int) -> QmodZ:
    """beta(B (x) psi) = sigma_p(B) beta(psi) + phi_p(det B) e / 2."""
    B = as_symmetric(B)
    d = intmat.det(B)
    if d % p == 0:
        raise DetDivisibleByP(f"det B = {d} is divisible by {p}")
    return QmodZ.parse(beta_psi) * sigma_p(B, p) + QmodZ(phi_p(d, p) * e, 2)


def pseudo_hyperbolic_identity(m1: int, m2: int) -> list[list[int]]:
    """Witness M for <-1> + H_{m1,m2} ~_8 <2m1-1> + <2m2-1> + <1-2m1-2m2>."""
    B = [[-1, 0, 0], [0, 2 * m1, 1], [0, 1, 2 * m2]]
    u3 = (4 * m1 * m2 - 1, 2 * m2 - 1, 2 * m1 - 1)
    M = [[1, 1, u3[0]], [1, 0, u3[1]], [0, 1, u3[2]]]
    C = [[2 * m1 - 1, 0, 0], [0, 2 * m2 - 1, 0], [0, 0, 1 - 2 * m1 - 2 * m2]]
    lhs = intmat.matmul(intmat.transpose(M), intmat.matmul(B, M))
    if intmat.det(M) % 2 == 0 or any((lhs[i][j] - C[i][j]) % 8 for i in range(3) for j in range(3)):
        raise TheoremViolated("pseudo-hyperbolic identity fails")
    return M


def kirby_melvin(B):
    """beta(psi_{B,2}) from a mod-4 reduction of B, or NOT_TAME."""
    dec = reduce_mod_pr(B, 2, 2)
    if any(b.kind == "diag" for b in dec.layer(1)):
        return NOT_TAME
    n1 = n3 = eps = 0
    for b in dec.layer(0):
        if b.kind == "diag":
            n1 += b.values[0] % 4 == 1
            n3 += b.values[0] % 4 == 3
        else:
            eps += b.values[0] % 2 == 1 and b.values[1] % 2 == 1
    return QmodZ(n1 - n3 + 4 * eps, 8)


# ---------------------------------------------------------------------------
# decompositions psi_p = R_1 (x) u_p + ... + R_k (x) u_{p^k}


@dataclass(frozen=True)
class OdqDecomposition:
    """Layers R_j (j >= 1) describing the form sum_j R_j (x) u_{p^j}."""

    p: int
    layers: tuple

    def __post_init__(self):
        seen = set()
        for layer in self.layers:
            if layer.i < 1 or layer.i in seen:
                raise MalformedDecomposition(f"bad layer index {layer.i}")
            seen.add(layer.i)
            if layer.blocks and blocks_det(layer.blocks) % self.p == 0:
                raise MalformedDecomposition(f"det R_{layer.i} is divisible by {self.p}")
            if self.p != 2 and any(b.kind == "hyp" for b in layer.blocks):
                raise MalformedDecomposition("pseudo-hyperbolic blocks only occur for p = 2")

    def layer(self, j: int) -> tuple:
        return _layers_by_index(self.layers).get(j, ())

    def to_json(self) -> dict:
        return {"p": self.p, "layers": [l.to_json() for l in self.layers]}

    @classmethod
    def from_json(cls, doc) -> "OdqDecomposition":
        try:
            return cls(int(doc["p"]), tuple(Layer.from_json(l) for l in doc["layers"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedDecomposition(str(exc)) from exc


def realize_odq(R: OdqDecomposition) -> TwoLinearForm:
    parts = [tensor(block_sum(l.blocks), uf(R.p**l.i)) for l in R.layers if l.blocks]
    return orthogonal_sum_all(parts) if parts else zero_form(FinAbGroup([]))


def beta_u(p: int, s: int) -> QmodZ:
    """beta(u_{p^s})."""
    if p == 2:
        return QmodZ(1, 8)
    return QmodZ(0) if p**s % 4 == 1 else QmodZ(1, 4)


def _local(blocks, p):
    return sigma_p(blocks, p), phi_p(blocks_det(blocks), p)


def layered_tensor_tame(C: ReducedDecomposition, R: OdqDecomposition) -> bool:
    if C.p != R.p:
        raise MalformedDecomposition("decompositions at different primes")
    if C.p != 2:
        return True
    return not any(any(b.kind == "diag" for b in C.layer(l.i))
                   and any(b.kind == "diag" for b in l.blocks) for l in R.layers)


def beta_gtp(C: ReducedDecomposition, R: OdqDecomposition):
    """beta((B (x) psi)_p) from a reduction C of B and a decomposition R of psi_p.

    Sum over i < j of beta((C_i (x) R_j) (x) u_{p^(j-i)}); each term comes from
    beta_lsmx with multiplicative sigma_p and additive phi_p.
    """
    if not layered_tensor_tame(C, R):
        return NOT_TAME
    p = C.p
    total = QmodZ(0)
    for cl in C.layers:
        if not cl.blocks:
            continue
        sc, fc = _local(cl.blocks, p)
        for rl in R.layers:
            s = rl.i - cl.i
            if s <= 0 or not rl.blocks:
                continue
            sr, fr = _local(rl.blocks, p)
            total += beta_u(p, s) * (sc * sr) + QmodZ((sc * fr + fc * sr) * s, 2)
    packed = beta_gtp_packed(C, R)
    if packed != total:
        raise TheoremViolated(f"packaged tensor formula {packed} != {total}")
    return total


def beta_gtp_packed(C: ReducedDecomposition, R: OdqDecomposition):
    """The same sum with sigma' = sigma + 4 phi on the pairs where j - i is odd.

    Only meaningful for p = 2, where beta(u_{2^s}) = 1/8 for all s; for odd p
    it falls back to the unpacked sum.
    """
    if not layered_tensor_tame(C, R):
        return NOT_TAME
    p = C.p
    total = QmodZ(0)
    for cl in C.layers:
        for rl in R.layers:
            s = rl.i - cl.i
            if s <= 0 or not cl.blocks or not rl.blocks:
                continue
            sc, fc = _local(cl.blocks, p)
            sr, fr = _local(rl.blocks, p)
            if p != 2:
                total += beta_u(p, s) * (sc * sr) + QmodZ((sc * fr + fc * sr) * s, 2)
            elif s % 2:
                total += QmodZ((sc + 4 * fc) * (sr + 4 * fr), 8)
            else:
                total += QmodZ(sc * sr, 8)
    return total


def scaled_reduction(R: OdqDecomposition, i: int):
    """The reduced form of p^i psi_p as a decomposition, or NOT_TAME."""
    if i < 0:
        raise MalformedDecomposition("i must be non-negative")
    if R.p == 2 and any(b.kind == "diag" for b in R.layer(i)):
        return NOT_TAME
    return OdqDecomposition(R.p, tuple(Layer(l.i - i, l.blocks) for l in R.layers if l.i > i))


def kron(R, S) -> list[list[int]]:
    return [[a * b for a in ra for b in sb] for ra in R for sb in S]


def bullet_product(R, S, p: int) -> TwoLinearForm:
    """(R (x) S) (x) u_p for det R, det S prime to p."""
    R, S = as_symmetric(R), as_symmetric(S)
    for M in (R, S):
        if intmat.det(M) % p == 0:
            raise DetDivisibleByP(f"det divisible by {p}")
    return tensor(kron(R, S), uf(p))
