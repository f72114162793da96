"""Command-line front end.

Exit status: 0 on success, 2 when the requested phase is NOT TAME, 1 on any
input or library error (message on stderr).  All numbers print exactly.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import intmat
from .docs import load_decomposition, load_form, load_matrix
from .enhance import is_quadratic, primary_part
from .errors import FormsError, ParseError, TheoremViolated
from .exactnum import factorint
from .gauss import NOT_TAME, beta, beta_and_e, magnitude_check
from .lattice import (arf_from_seifert, bmf_value, characteristic_vector, milgram_enhancement,
                      psi_nu, signature, tensor)
from .modp import (OdqDecomposition, beta_gtp, beta_lsmx, kirby_melvin, phi_p, realize_odq,
                   reduce_mod_pr, sigma_p)
from .suites import Scale, run_all

EXIT_OK, EXIT_ERROR, EXIT_NOT_TAME = 0, 1, 2


def _fmt_vector(v) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


def cmd_beta(args) -> int:
    psi = load_form(args.form)
    mag = magnitude_check(psi)
    print(f"order = {psi.group.order}")
    print(f"magnitude^2 = {mag.square}")
    if mag.is_zero:
        print("NOT TAME")
        return EXIT_NOT_TAME
    print(f"beta = {beta(psi)}")
    return EXIT_OK


def _parse_nu(text: str, n: int):
    try:
        nu = [int(x) for x in text.replace("(", "").replace(")", "").split(",")]
    except ValueError as exc:
        raise ParseError(f"bad --nu vector {text!r}") from exc
    if len(nu) != n:
        raise ParseError(f"--nu has {len(nu)} entries, matrix has rank {n}")
    return nu


def cmd_milgram(args) -> int:
    B = load_matrix(args.matrix)
    sig = signature(B)
    even = all(B[i][i] % 2 == 0 for i in range(len(B)))
    parts = [f"sigma = {sig}"]
    if even and args.nu is None:
        b = beta(milgram_enhancement(B).enhancement)
        formula = bmf_value(B, [0] * len(B))
    else:
        nu = characteristic_vector(B) if args.nu in (None, "auto") else _parse_nu(args.nu, len(B))
        parts.append(f"nu = {_fmt_vector(nu)}")
        b = beta(psi_nu(B, nu).enhancement)
        formula = bmf_value(B, nu)
    parts += [f"beta = {b}", f"formula = {formula}"]
    print(", ".join(parts))
    if b is NOT_TAME or b != formula:
        raise TheoremViolated(f"Gauss sum phase {b} differs from the formula {formula}")
    return EXIT_OK


def cmd_reduce(args) -> int:
    B = load_matrix(args.matrix)
    p, r = args.prime, args.power
    dec = reduce_mod_pr(B, p, r)
    print(json.dumps(dec.to_json()))
    print(f"effective r = {dec.r}")
    for layer in dec.layers:
        if layer.blocks:
            s, f = sigma_p(layer.blocks, p), phi_p(intmat.det(layer.matrix()), p)
            print(f"layer {layer.i}: sigma_{p} = {s}, phi_{p} = {f}")
    d = intmat.det(B)
    if d % p:
        print(f"sigma_{p}(B) = {sigma_p(B, p)}")
        print(f"phi_{p}(det B) = {phi_p(d, p)}")
    if p == 2:
        km = kirby_melvin(B)
        print(f"kirby-melvin beta = {km}")
        if km is NOT_TAME:
            return EXIT_NOT_TAME
    return EXIT_OK


def _single_prime(order: int):
    f = factorint(order)
    return f[0][0] if len(f) == 1 else None


def cmd_tensor_beta(args) -> int:
    B = load_matrix(args.matrix)
    if args.odq is not None:
        R = load_decomposition(args.odq)
        if not isinstance(R, OdqDecomposition):
            raise ParseError("--odq expects a layer decomposition without an \"r\" field")
        top = max((l.i for l in R.layers), default=0)
        C = reduce_mod_pr(B, R.p, top + 1)
        formula = beta_gtp(C, R)
        brute = beta(tensor(B, realize_odq(R)))
    else:
        psi = load_form(args.form)
        p = args.prime or _single_prime(psi.group.order)
        if p is None:
            raise ParseError("the form is not on a p-group; pass --prime")
        psi = primary_part(psi, p)
        if not is_quadratic(psi):
            raise ParseError("the form (p-part) is not quadratic")
        b, e = beta_and_e(psi, p)
        brute = beta(tensor(B, psi))
        formula = NOT_TAME if b is NOT_TAME else beta_lsmx(B, b, e, p)
    print(f"formula = {formula}")
    print(f"brute force = {brute}")
    if (formula is NOT_TAME) != (brute is NOT_TAME) or (brute is not NOT_TAME and formula != brute):
        raise TheoremViolated("formula and brute force disagree")
    return EXIT_NOT_TAME if brute is NOT_TAME else EXIT_OK


def cmd_arf(args) -> int:
    S = load_matrix(args.seifert, symmetric=False)
    print(f"arf = {arf_from_seifert(S)}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    scale = Scale(seed=args.seed, max_order=args.max_order)
    results = run_all(scale, report=lambda r: print(r.line(timing=args.timing), flush=True))
    return EXIT_OK if all(r.passed for r in results) else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaussforms",
                                     description="Exact Gauss sums and phase invariants of finite forms.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("beta", help="magnitude and phase of the Gauss sum of a form document")
    p.add_argument("form")
    p.set_defaults(func=cmd_beta)

    p = sub.add_parser("milgram", help="discriminant form phase versus the signature formula")
    p.add_argument("matrix")
    p.add_argument("--nu", help="characteristic vector as v1,v2,... or 'auto'")
    p.set_defaults(func=cmd_milgram)

    p = sub.add_parser("reduce", help="reduce a symmetric matrix modulo p^r")
    p.add_argument("matrix")
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--power", type=int, required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("tensor-beta", help="phase of B tensor psi: closed form versus brute force")
    p.add_argument("matrix")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--form", help="form document for psi")
    src.add_argument("--odq", help="layer decomposition of psi_p")
    p.add_argument("--prime", type=int)
    p.set_defaults(func=cmd_tensor_beta)

    p = sub.add_parser("arf", help="Arf invariant from a Seifert matrix")
    p.add_argument("seifert")
    p.set_defaults(func=cmd_arf)

    p = sub.add_parser("selftest", help="run the formula-versus-brute-force suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-order", type=int, default=None,
                   help="shrink case counts and group orders for a quick run")
    p.add_argument("--timing", action="store_true", help="include wall-clock times")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
