"""Command-line entry point.

Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 invalid input
or I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import List, Optional

from polyneck import annulus_basis, decay_lemma, jet_pohozaev, operator_poly
from polyneck import sphere_fields, three_circle, weak_orthogonality
from polyneck.errors import PolyneckError
from polyneck.report import csv_rows, dumps, fraction_str, plain

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class UsageError(Exception):
    pass


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _kv_csv(payload: dict) -> str:
    scalars = {k: v for k, v in plain(payload).items() if not isinstance(v, (dict, list))}
    return csv_rows([{"key": k, "value": v} for k, v in scalars.items()], ["key", "value"])


# -- subcommands -----------------------------------------------------------
# each returns (payload, csv_text or None, passed)


def cmd_poly(args):
    P = operator_poly.build_operator_polynomial(args.m, max_m=args.max_m)
    rep = operator_poly.verify_structure(P)
    payload = {
        "m": P.m,
        "coeffs": [{"p": p, "q": q, "a": str(a)} for (p, q), a in sorted(P.coeffs.items())],
        "checks": {"no_odd_p": rep.no_odd_p, "signs": rep.signs, "factorization": rep.factorization},
    }
    if rep.offending is not None:
        payload["offending"] = list(rep.offending)
    table = csv_rows(payload["coeffs"], ["p", "q", "a"])
    return payload, table, rep.ok


def cmd_sphere(args):
    rep = sphere_fields.sphere_check(args.m, args.trials, args.seed)
    return plain(rep), None, rep.passed


def cmd_modes(args):
    spectrum = annulus_basis.mode_spectrum(args.m, args.n)
    ann = annulus_basis.verify_mode_annihilation(args.m, args.n)
    payload = {"spectrum": plain(spectrum), "annihilation": plain(ann)}
    passed = ann.passed
    if args.field:
        with open(args.field) as fh:
            u = annulus_basis.field_from_json(json.load(fh), m=args.m)
        energies = {str(i): annulus_basis.annulus_energy(u, i, args.L) for i in args.i}
        payload["field"] = {"L": args.L, "zero_average": u.zero_average, "energies": energies}
    return payload, None, passed


def cmd_three_circle(args):
    m, n_max = args.m, args.n_max
    if args.L is not None:
        certs = [three_circle.three_circle_certificate(m, n, args.L) for n in range(1, n_max + 1)]
        L_star = args.L
        payload = {"m": m, "n_max": n_max, "L": args.L, "certificates": [plain(c) for c in certs]}
        rows = [{"m": m, "n": c.n, "min_L": "", "margin_at_Lstar": c.margin} for c in certs]
        passed = all(c.certified for c in certs)
    else:
        rep = three_circle.uniform_L_report(m, n_max, tol=args.tol)
        L_star = rep.L_star
        payload = plain(rep)
        rows = list(rep.rows())
        passed = rep.all_certified and rep.translation_agrees
    if args.trials:
        fc = three_circle.random_field_check(m, L_star, args.trials, args.seed)
        payload["random_fields"] = plain(fc)
        passed = passed and fc.passed
    table = csv_rows(rows, ["m", "n", "min_L", "margin_at_Lstar"])
    return payload, table, passed


def cmd_gram(args):
    sweep = weak_orthogonality.gram_sweep(args.m, args.n_max, args.L)
    rows = [
        {
            "m": c.m, "n": c.n, "L": c.L, "lambda1": c.lambda1, "lambda1bar": c.lambda1bar,
            "lambdaE_bound": c.lambdaE_bound, "det_exact": fraction_str(c.cauchy_det),
            "delta": c.delta,
        }
        for c in sweep.certificates
    ]
    payload = {
        "m": sweep.m,
        "L": sweep.L,
        "empirical_C_tilde": sweep.empirical_C_tilde,
        "certificates": [plain(c) for c in sweep.certificates],
        "all_valid": sweep.all_valid,
    }
    cols = ["m", "n", "L", "lambda1", "lambda1bar", "lambdaE_bound", "det_exact", "delta"]
    return payload, csv_rows(rows, cols), sweep.all_valid


def cmd_jets(args):
    one = {str(n): jet_pohozaev.verify_identity_one(n) for n in range(1, args.n_max + 1)}
    two = {
        f"{n},{k}": jet_pohozaev.verify_identity_two(n, k)
        for n in range(2, args.n_max + 1)
        for k in range(1, n)
    }
    radial = {str(m): jet_pohozaev.verify_radial_pohozaev(m) for m in range(1, args.m_max + 1)}
    passed = all(one.values()) and all(two.values()) and all(radial.values())
    payload = {"identity_one": one, "identity_two": two, "radial_pohozaev": radial, "passed": passed}
    return payload, None, passed


def cmd_decay_check(args):
    with open(args.file) as fh:
        p = decay_lemma.DecayProblem.from_json(json.load(fh))
    hyp = decay_lemma.check_hypotheses(p)
    payload = {"hypotheses": {"passed": hyp.passed,
                              "failures": [{"kind": k, "index": i} for k, i in hyp.failures]}}
    if not hyp.passed:
        return payload, None, False
    cert = decay_lemma.certify_decay(p)
    payload["certificate"] = {
        "sigma_prime": cert.sigma_prime,
        "sigma_tilde": cert.sigma_tilde,
        "C_prime": cert.C_prime,
        "C_prime_branch": cert.C_prime_branch,
        "tightness": cert.tightness,
        "verified": cert.verified,
    }
    return payload, None, cert.verified


def cmd_decay_fuzz(args):
    rep = decay_lemma.fuzz(args.trials, args.seed, args.c1, args.c2, args.sigma, args.n0)
    payload = plain(rep)
    payload["passed"] = rep.passed
    return payload, None, rep.passed


# -- parser ----------------------------------------------------------------


def _common(p):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyneck", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("poly", help="operator polynomial P_m and its structure checks")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--max-m", type=_positive_int, default=operator_poly.DEFAULT_MAX_M)
    _common(p)
    p.set_defaults(func=cmd_poly)

    p = sub.add_parser("sphere", help="Killing-field decomposition checks")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--seed", type=_u64, default=0)
    _common(p)
    p.set_defaults(func=cmd_sphere)

    p = sub.add_parser("modes", help="mode spectrum, indicial roots, annulus energies")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--n", type=_nonneg_int, required=True)
    p.add_argument("--field", help="JSON field description")
    p.add_argument("--L", type=_positive_float, default=1.0)
    p.add_argument("--i", type=_nonneg_int, nargs="+", default=[0, 1, 2])
    _common(p)
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("three-circle", help="three-circle certificates and uniform L search")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--n-max", type=_positive_int, required=True)
    p.add_argument("--L", type=_positive_float)
    p.add_argument("--tol", type=_positive_float, default=1e-3)
    p.add_argument("--trials", type=_nonneg_int, default=0)
    p.add_argument("--seed", type=_u64, default=0)
    _common(p)
    p.set_defaults(func=cmd_three_circle)

    p = sub.add_parser("gram", help="weak-orthogonality Gram certificates")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--n-max", type=_positive_int, required=True)
    p.add_argument("--L", type=float, required=True)
    _common(p)
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("jets", help="exact jet-algebra identities")
    p.add_argument("--n-max", type=_positive_int, default=10)
    p.add_argument("--m-max", type=_positive_int, default=8)
    _common(p)
    p.set_defaults(func=cmd_jets)

    p = sub.add_parser("decay", help="discrete decay lemma")
    dsub = p.add_subparsers(dest="decay_cmd", required=True)
    q = dsub.add_parser("check", help="check and certify one instance")
    q.add_argument("--file", required=True)
    _common(q)
    q.set_defaults(func=cmd_decay_check)
    q = dsub.add_parser("fuzz", help="certify generated admissible instances")
    q.add_argument("--trials", type=_positive_int, default=100)
    q.add_argument("--seed", type=_u64, default=0)
    q.add_argument("--c1", type=_positive_float, default=1.0)
    q.add_argument("--c2", type=_positive_float, default=1.0)
    q.add_argument("--sigma", type=_positive_float, default=0.5)
    q.add_argument("--n0", type=_positive_int, default=64)
    _common(q)
    q.set_defaults(func=cmd_decay_fuzz)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        payload, table, passed = args.func(args)
    except (PolyneckError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    if args.format == "csv":
        text = table if table is not None else _kv_csv(payload)
    else:
        text = dumps(payload)
    try:
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK if passed else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
