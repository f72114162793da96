"""Oracle-versus-formula suites: every closed-form phase evaluation is compared
against brute-force Gauss sums on random or exhaustive inputs.

Each suite returns a :class:`SuiteResult`; ``run_all`` runs them in order.
``Scale`` shrinks case counts and group orders for quick runs.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

import numpy as np

from . import intmat
from .enhance import (TwoLinearForm, build, connolly_isometry, orthogonal_sum, radical,
                      scalar_mul, shift_by_element, uf)
from .errors import FormsError
from .exactnum import CycSum, QmodZ, cyc_is_real_positive, factorint, lcm
from .fingroup import FinAbGroup
from .gauss import (NOT_TAME, beta, beta_and_e, eighth_phases_batch, gauss_sum, magnitude_check,
                    verify_delta_beta, verify_phase_batch, verify_subquotient)
from .generators import (abelian_groups, quadratic_tables, random_group, random_isotropic_subgroup,
                         random_nonsingular, random_tame_quadratic, random_two_linear,
                         random_unimodular)
from .lattice import (arf_from_seifert, bmf_value, brown_form, characteristic_vector, milgram_enhancement, psi_nu,
                      signature, tensor)
from .modp import beta_lsmx, beta_multiplier, kirby_melvin, phi_p, reduce_mod_pr, sigma_p


@dataclass
class Scale:
    seed: int = 0
    max_order: int | None = None  # None: full acceptance scale

    @property
    def full(self) -> bool:
        return self.max_order is None

    def count(self, n: int) -> int:
        return n if self.full else max(3, n // 20)

    def order(self, n: int) -> int:
        return n if self.full else min(n, self.max_order)

    def rng(self, salt: int) -> random.Random:
        return random.Random(self.seed * 1000 + salt)


@dataclass
class SuiteResult:
    number: int
    name: str
    passed: bool
    cases: int
    seconds: float
    failures: list = field(default_factory=list)
    note: str = ""

    def line(self, timing: bool = True) -> str:
        status = "PASS" if self.passed else "FAIL"
        secs = f", {self.seconds:.1f}s" if timing else ""
        extra = f"; {self.note}" if self.note else ""
        fails = f"; first failure: {self.failures[0]}" if self.failures else ""
        return f"[{status}] {self.number:2d}. {self.name} ({self.cases} cases{secs}{extra}{fails})"


class _Run:
    def __init__(self, number, name):
        self.number, self.name = number, name
        self.cases, self.failures = 0, []
        self.start = time.perf_counter()

    def check(self, ok: bool, what) -> None:
        self.cases += 1
        if not ok:
            self.failures.append(what)

    def guard(self, fn, what):
        """Run fn(); a library error counts as a failed case."""
        try:
            return fn()
        except FormsError as exc:
            self.check(False, f"{what}: {type(exc).__name__}: {exc}")
            return None

    def result(self, limit: float | None = None, note: str = "") -> SuiteResult:
        secs = time.perf_counter() - self.start
        ok = not self.failures
        if limit is not None and secs > limit:
            ok = False
            note = (note + "; " if note else "") + f"runtime over {limit:.0f}s"
        return SuiteResult(self.number, self.name, ok, self.cases, secs, self.failures, note)


# 1 ---------------------------------------------------------------------------


def dirichlet_table(scale: Scale) -> SuiteResult:
    run = _Run(1, "Dirichlet quadratic Gauss sums, m = 1..64")
    top = 64 if scale.full else min(64, max(8, scale.max_order))
    for m in range(1, top + 1):
        s = np.arange(m)
        g = CycSum(m, np.bincount((s * s) % m, minlength=m))
        if m % 4 == 2:
            run.check(g.is_zero(), f"m={m}: sum should vanish")
            continue
        # closed form: (1 + i)(1 + i^-m)/2 * sqrt(m)
        k8 = {0: 1, 1: 0, 3: 2}[m % 4]
        sq = 2 * m if m % 4 == 0 else m
        L = lcm(8, m)
        x = g.at_level(L).rotate(-k8 * (L // 8))
        ok = x.is_real() and (x * x).integer_value() == sq and cyc_is_real_positive(x)
        run.check(ok, f"m={m}")
    return run.result(limit=5.0)


# 2, 3 -----------------------------------------------------------------------


def milgram_suite(scale: Scale) -> SuiteResult:
    run = _Run(2, "Milgram: beta(psi_L) = sigma(B)/8 for even B")
    rng = scale.rng(2)
    max_det = scale.order(4000)
    for _ in range(scale.count(200)):
        B = random_nonsingular(rng, 6, 9, even=True, max_det=max_det)
        b = run.guard(lambda: beta(milgram_enhancement(B).enhancement), B)
        if b is not None:
            run.check(b == QmodZ(signature(B), 8), B)
    return run.result(limit=60.0)


def bmf_suite(scale: Scale) -> SuiteResult:
    run = _Run(3, "characteristic vectors: beta(psi_nu) = (sigma - B(nu,nu))/8")
    rng = scale.rng(3)
    max_det = scale.order(4000)
    for _ in range(scale.count(200)):
        B = random_nonsingular(rng, 6, 9, max_det=max_det)
        nu = characteristic_vector(B)
        b = run.guard(lambda: beta(psi_nu(B, nu).enhancement), (B, nu))
        if b is None:
            continue
        run.check(b == bmf_value(B, nu), (B, nu))
        if intmat.det(B) % 2:
            for _ in range(5):
                x = [rng.randint(-3, 3) for _ in B]
                nu2 = [a + 2 * c for a, c in zip(nu, x)]
                b2 = run.guard(lambda: beta(psi_nu(B, nu2).enhancement), (B, nu2))
                if b2 is not None:
                    run.check(b2 == b and bmf_value(B, nu2) == b, (B, nu2))
    return run.result()


# 4 ---------------------------------------------------------------------------


def structure_suite(scale: Scale) -> SuiteResult:
    run = _Run(4, "magnitude, subquotient and shift theorems")
    rng = scale.rng(4)
    max_order = scale.order(2000)
    forms = scale.count(500)
    want_sub = scale.count(100)
    done_sub = tame_count = 0
    for idx in range(forms):
        T = random_group(rng, max_order)
        psi = random_two_linear(rng, T)
        mag = run.guard(lambda: magnitude_check(psi), ("magnitude", psi))
        if mag is None:
            continue
        run.check(True, None)
        # subquotients: spread the requested count over the run
        if done_sub < want_sub and rng.random() < 2 * want_sub / forms:
            K = random_isotropic_subgroup(rng, psi)
            if K is not None:
                done_sub += 1
                ok = run.guard(lambda: verify_subquotient(psi, K), ("subquotient", psi, K))
                run.check(bool(ok), ("subquotient", psi, K.generators))
        if mag.is_zero:
            continue
        tame_count += 1
        b = beta(psi)
        for _ in range(3):
            x = T.at(rng.randrange(T.order))
            bx = run.guard(lambda: beta(shift_by_element(psi, x)), ("shift", psi, x))
            if bx is not None:
                run.check(bx == b - psi.value(x), ("shift", psi, x))
        ok = run.guard(lambda: verify_delta_beta(psi), ("delta beta", psi))
        run.check(bool(ok), ("delta beta", psi))
    # top up subquotient cases if the random spread fell short
    while done_sub < want_sub:
        T = random_group(rng, max_order)
        psi = random_two_linear(rng, T)
        K = random_isotropic_subgroup(rng, psi)
        if K is None:
            continue
        done_sub += 1
        ok = run.guard(lambda: verify_subquotient(psi, K), ("subquotient", psi, K))
        run.check(bool(ok), ("subquotient", psi, K.generators))
    return run.result(note=f"{forms} forms, {tame_count} tame, {done_sub} subquotients")


# 5 ---------------------------------------------------------------------------


def multiplier_suite(scale: Scale) -> SuiteResult:
    run = _Run(5, "multiplier law beta(a psi) on Z/p^k")
    rng = scale.rng(5)
    for p in (2, 3, 5, 7, 11, 13):
        for k in (1, 2, 3):
            n = p**k
            if n > scale.order(10**6):
                continue
            den = 2 * n if p == 2 else n
            cands = [psi for psi in (_cyclic_form(n, c, den) for c in range(den))
                     if radical(psi).is_zero()]
            top = 16 if p == 2 else p**3
            residues = [a for a in range(1, top + 1) if a % p]
            for _ in range(scale.count(20)):
                psi = rng.choice(cands)
                b, e = beta_and_e(psi, p)
                run.check(b * 8 == 0, ("8 beta", p, k, psi.table[1]))
                if p % 4 == 3 and e % 2:
                    run.check(b in (QmodZ(1, 4), QmodZ(3, 4)), ("range", p, k, e, b))
                formula = {a: beta_multiplier(b, e, p, a) for a in residues}
                # a psi only depends on a mod den: one brute-force sum per class
                classes = {}
                for a in residues:
                    classes.setdefault(a % den, []).append(a)
                reps = sorted(classes)
                tables = (np.asarray(reps, dtype=np.int64)[:, None] * psi.table_at(den)[None, :]) % den
                ok = verify_phase_batch(tables, den, [formula[classes[r][0]] for r in reps])
                for r, good in zip(reps, ok):
                    vals = {formula[a] for a in classes[r]}
                    run.check(bool(good) and len(vals) == 1, ("multiplier", p, k, r, vals))
    return run.result()


def _cyclic_form(n: int, c: int, den: int) -> TwoLinearForm:
    x = np.arange(n, dtype=np.int64)
    return TwoLinearForm(FinAbGroup([n]), (c * x * x) % den, den)


# 6 ---------------------------------------------------------------------------


def connolly_suite(scale: Scale) -> SuiteResult:
    run = _Run(6, "Connolly isometry and 8 beta = 0 for quadratic forms")
    rng = scale.rng(6)
    for p in (2, 3, 5):
        for _ in range(scale.count(20)):
            T = random_group(rng, scale.order(81), prime=p)
            psi = random_two_linear(rng, T, quadratic=True, degenerate=0.2)
            res = run.guard(lambda: connolly_isometry(psi, p), ("connolly", p, psi))
            if res is not None:
                M, m = res
                run.check(m == {2: 4, 1: 1, 3: 2}[p if p == 2 else p % 4], ("m", p, m))
                run.check(table_isometry(psi, M), ("isometry", p, psi, M))
    total = 0
    for order in range(1, scale.order(32) + 1):
        for T in abelian_groups(order):
            for den, tables in quadratic_tables(T):
                zero, phase = eighth_phases_batch(tables, den)
                total += len(tables)
                if np.any(~zero & (phase < 0)):
                    run.failures.append(("8 beta != 0", T.orders))
    run.cases += total
    return run.result(note=f"{total} quadratic functions enumerated")


def table_isometry(psi, M, chunk: int = 1 << 20) -> bool:
    """Check (-psi)^{+m}(M x) == psi^{+m}(x) on every tuple x, and that M is invertible."""
    T = psi.group
    m = len(M)
    p = factorint(T.exponent)[0][0] if T.order > 1 else 2
    if math.gcd(intmat.det(M), p) != 1:
        return False
    n, D, f, C = T.order, psi.den, psi.table, T.coords
    Mx = np.asarray(M, dtype=np.int64)
    for start in range(0, n**m, chunk):
        flat = np.arange(start, min(n**m, start + chunk))
        digits = [(flat // n**j) % n for j in range(m)]
        src = sum(f[d] for d in digits)
        tgt = np.zeros_like(src)
        for s in range(m):
            img = sum(Mx[s, j] * C[digits[j]] for j in range(m))
            tgt -= f[T.indices_of(img)]
        if np.any((src - tgt) % D):
            return False
    return True


# 7 ---------------------------------------------------------------------------


def tensor_suite(scale: Scale) -> SuiteResult:
    run = _Run(7, "beta(B x psi) = sigma_p(B) beta(psi) + phi_p(det B) e/2")
    rng = scale.rng(7)
    for p in (2, 3, 5):
        for _ in range(scale.count(100)):
            B = random_nonsingular(rng, 5, 9, condition=lambda B, d: d % p != 0)
            T = random_group(rng, _tensor_order(scale, len(B)), prime=p)
            psi = random_tame_quadratic(rng, T)
            b, e = beta_and_e(psi, p)
            formula = beta_lsmx(B, b, e, p)
            brute = run.guard(lambda: beta(tensor(B, psi)), ("tensor", B, psi))
            if brute is not None:
                run.check(brute == formula, ("tensor", p, B, psi.genvals, brute, formula))
    for _ in range(scale.count(50)):
        B, sig = random_unimodular(rng)
        p = rng.choice((2, 3, 5))
        T = random_group(rng, _tensor_order(scale, len(B)), prime=p)
        psi = random_tame_quadratic(rng, T)
        b = beta(psi)
        run.check(signature(B) == sig and abs(intmat.det(B)) == 1, ("unimodular", B))
        brute = run.guard(lambda: beta(tensor(B, psi)), ("unimodular", B, psi))
        if brute is not None:
            run.check(brute == b * sig, ("unimodular", B, psi.genvals, brute))
    return run.result(note=f"|T| <= min(512, {TENSOR_BUDGET}^(1/rank B))")


# |T|^rank(B) elements are enumerated per tensor product
TENSOR_BUDGET = 1 << 16


def _tensor_order(scale: Scale, rank: int) -> int:
    return max(2, min(scale.order(512), int(TENSOR_BUDGET ** (1 / rank) + 1e-9)))


# 8, 9 -----------------------------------------------------------------------


def kirby_melvin_suite(scale: Scale) -> SuiteResult:
    run = _Run(8, "Kirby-Melvin formula vs beta(psi_{B,2})")
    rng = scale.rng(8)
    nt = 0
    for _ in range(scale.count(200)):
        B = random_nonsingular(rng, 5, 9)
        km = kirby_melvin(B)
        brute = beta(brown_form(B, 2))
        if brute is NOT_TAME:
            nt += 1
            run.check(km is NOT_TAME, (B, km))
        else:
            run.check(km is not NOT_TAME and km == brute, (B, km, brute))
    return run.result(note=f"{nt} not tame")


def sigma2_suite(scale: Scale) -> SuiteResult:
    run = _Run(9, "sigma_2 independent of the reduction")
    rng = scale.rng(9)
    for _ in range(scale.count(100)):
        B = random_nonsingular(rng, 5, 9, condition=lambda B, d: d % 2 == 1)
        values = {sigma_p(reduce_mod_pr(B, 2, 3, rng=rng).layer(0), 2) for _ in range(5)}
        values.add(sigma_p(B, 2))
        run.check(len(values) == 1, (B, values))
        # the invariant also shows up as the phase of B x u_4
        run.check(beta(tensor(B, uf(4))) == QmodZ(values.pop(), 8), ("u4", B))
    for _ in range(scale.count(50)):
        B = _even_odd_det(rng)
        run.check(sigma_p(B, 2) == 0, ("even diagonal", B))
    return run.result()


def _even_odd_det(rng: random.Random):
    while True:
        n = rng.choice((2, 4))
        B = [[0] * n for _ in range(n)]
        for i in range(n):
            B[i][i] = 2 * rng.randint(-4, 4)
            for j in range(i + 1, n):
                B[i][j] = B[j][i] = rng.randint(-9, 9)
        if intmat.det(B) % 2:
            return B


# 10, 11 ---------------------------------------------------------------------


def arf_suite(scale: Scale) -> SuiteResult:
    run = _Run(10, "Levine: Arf = phi_2(det(S + S^T))/2")
    rng = scale.rng(10)
    for S in ([[-1, 1], [0, -1]], [[1, 1], [0, -1]]):
        run.check(run.guard(lambda: arf_from_seifert(S), S) == QmodZ(1, 2), S)
    done = 0
    while done < scale.count(50):
        n = rng.choice((2, 4, 6))
        S = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
        B = [[S[i][j] + S[j][i] for j in range(n)] for i in range(n)]
        d = intmat.det(B)
        if d % 2 == 0:
            continue
        done += 1
        # x^T S x / 2 on (Z/2)^n
        psi = build(FinAbGroup([2] * n), [(QmodZ(S[i][i], 2),) * 2 for i in range(n)],
                    [[QmodZ(B[i][j], 2) for j in range(n)] for i in range(n)])
        want = QmodZ(phi_p(d, 2), 2)
        run.check(beta(psi) == want, ("brute", S))
        run.check(run.guard(lambda: arf_from_seifert(S), S) == want, ("arf", S))
    return run.result()


def regression_suite(scale: Scale) -> SuiteResult:
    run = _Run(11, "u4 + u2 and 3u4 + 3u2: equal sums, unequal layer phases")
    a = orthogonal_sum(uf(4), uf(2))
    b = orthogonal_sum(scalar_mul(3, uf(4)), scalar_mul(3, uf(2)))
    run.check(gauss_sum(a) == gauss_sum(b), "Gauss sums differ")
    run.check(beta(a) == beta(b), "phases differ")
    run.check(beta(uf(4)) == QmodZ(1, 8) and beta(scalar_mul(3, uf(4))) == QmodZ(3, 8),
              "layer phases")
    run.check(beta(uf(4)) != beta(scalar_mul(3, uf(4))), "layer phases coincide")
    return run.result()


SUITES = (dirichlet_table, milgram_suite, bmf_suite, structure_suite, multiplier_suite,
          connolly_suite, tensor_suite, kirby_melvin_suite, sigma2_suite, arf_suite,
          regression_suite)


def run_all(scale: Scale | None = None, only=None, report=None) -> list[SuiteResult]:
    scale = scale or Scale()
    out = []
    for i, suite in enumerate(SUITES, start=1):
        if only and i not in only:
            continue
        res = suite(scale)
        out.append(res)
        if report:
            report(res)
    return out
