"""Command line front end.

``run`` and ``verify`` process scenario files; the remaining subcommands
are thin wrappers around single module operations.  Exit status is 0 on
success, 1 when an audit fails and 2 on parse or precondition errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from .complexes import ComplexError, FieldComplex, homology, integral_homology, parse_complex, \
    universal_coefficients
from .hull import HullError, e1_page_dims, hull_bound, hull_test, parse_table
from .linalg import CoeffField, LinalgError, parse_matrix, parse_ring, rank, smith_normal_form
from .mapping_torus import (
    CIRCLE,
    MappingTorusError,
    PrimeSet,
    WeightedPolynomialSpec,
    brieskorn_spec,
    check_weighted_homogeneous,
    countability_classifier,
    e1_page_sh,
    frobenius_count,
    parse_algebra,
    parse_families,
)
from .recombination import RecombinationError, UMinusSpec, moore_chain_oracle, \
    twist_floer_dims, u_minus_cohomology
from .scenario import ScenarioError, load_scenario, run_scenario
from .tensor_dga import DGAError, filtered_acyclicity_check, parse_dga

EXIT_OK, EXIT_AUDIT, EXIT_ERROR = 0, 1, 2
ERRORS = (ScenarioError, RecombinationError, ComplexError, LinalgError, HullError, DGAError,
          MappingTorusError, OSError, ValueError)


def _chars(text: str | None) -> list[int] | None:
    if text is None:
        return None
    out = [int(c) for c in text.replace(",", " ").split()]
    for c in out:
        CoeffField(c)  # validates
    return out


def _one(job):
    """Worker: returns (rendered report, ok, error message)."""
    path, mode, chars, audit, P, N = job
    try:
        sc = load_scenario(path)
        if P is not None:
            sc.P = P
        if N is not None:
            sc.N = N
        if mode == "verify":
            rep = run_scenario(sc, None, audit=True, verdicts=False)
        else:
            rep = run_scenario(sc, chars, audit=audit, verdicts=True)
        return rep.render(), rep.ok, None, sc.output
    except ERRORS as exc:
        return None, False, f"{path}: {exc}", None


def _batch(args, mode: str) -> int:
    chars = _chars(getattr(args, "chars", None))
    audit = not getattr(args, "no_audit", False)
    jobs = [(p, mode, chars, audit, args.P, args.N) for p in args.scenarios]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_one, jobs))  # map keeps input order
    else:
        results = [_one(j) for j in jobs]
    status = EXIT_OK
    chunks = []
    for text, ok, err, own_output in results:
        if err:
            print(f"error: {err}", file=sys.stderr)
            status = EXIT_ERROR
            continue
        if not ok and status == EXIT_OK:
            status = EXIT_AUDIT
        if own_output and not args.output and len(results) == 1:
            with open(own_output, "w") as fh:
                fh.write(text)
        chunks.append(text)
    merged = "\n".join(chunks)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(merged)
    else:
        sys.stdout.write(merged)
    return status


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True, default=str))


def cmd_homology(args) -> int:
    cx = parse_complex(_read(args.file))
    if isinstance(cx, FieldComplex):
        _print_json({"field": str(cx.field), "dims": str(homology(cx))})
        return EXIT_OK
    out = {"integral": str(integral_homology(cx))}
    for c in _chars(args.chars) or []:
        out[f"char {c}"] = str(universal_coefficients(cx, CoeffField(c)))
    _print_json(out)
    return EXIT_OK


def cmd_snf(args) -> int:
    dec = smith_normal_form(parse_matrix(_read(args.file)).over(parse_ring("Z")))
    _print_json({"invariant_factors": list(dec.divisors), "rank": dec.rank})
    return EXIT_OK


def cmd_rank(args) -> int:
    a = parse_matrix(_read(args.file))
    print(rank(a.over(parse_ring(args.ring)) if args.ring else a))
    return EXIT_OK


def cmd_hull(args) -> int:
    t = parse_table(_read(args.file))
    v = hull_test(t)
    out = {"m": t.m, "lhs": v.lhs, "bound": hull_bound(t) if t.m > 1 else 0,
           "verdict": v.label}
    if args.n is not None:
        out["e1_page"] = str(e1_page_dims(t, n=args.n))
    _print_json(out)
    return EXIT_OK


def cmd_dga(args) -> int:
    g = parse_dga(_read(args.file))
    if args.P is not None or args.N is not None:
        g = g.with_truncation(args.P, args.N)
    wit = g.square_zero_witness()
    if wit is not None:
        print(f"audit dga-d-squared FAIL: d^2 != 0 on {g.word_str(wit)}")
        return EXIT_AUDIT
    rep = filtered_acyclicity_check(g)
    _print_json(rep.as_dict())
    return EXIT_OK if rep.implication_holds and rep.graded_pieces_ok else EXIT_AUDIT


def cmd_moore(args) -> int:
    u = UMinusSpec("moore", args.n, args.q)
    out = {}
    for c in _chars(args.chars) or [0, 2, 3, 5]:
        k = CoeffField(c)
        h = u_minus_cohomology(u, k)
        out[str(c)] = {"h_tilde": str(h), "oracle_agrees": h == moore_chain_oracle(args.q, k),
                       "twist_dims": str(twist_floer_dims(u, k, args.rho))}
    _print_json(out)
    return EXIT_OK


def cmd_frobenius(args) -> int:
    a = parse_algebra(_read(args.file))
    print(frobenius_count(a))
    return EXIT_OK


def cmd_families(args) -> int:
    page = e1_page_sh(parse_families(_read(args.file)), CIRCLE)
    _print_json({"finiteness": page.finiteness, "certified": page.certified,
                 "totals": {str(k): v for k, v in sorted(page.totals.items())
                            if page.is_certified(k)},
                 "notes": page.notes})
    return EXIT_OK


def cmd_weights(args) -> int:
    if args.brieskorn:
        spec = brieskorn_spec(args.brieskorn)
    else:
        mons = [tuple(int(x) for x in m.split(",")) for m in args.monomial]
        spec = WeightedPolynomialSpec(tuple(args.weights), args.w, tuple(mons))
    rep = check_weighted_homogeneous(spec, strict=False)
    _print_json(rep.__dict__)
    return EXIT_OK if rep.homogeneous else EXIT_AUDIT


def cmd_countable(args) -> int:
    primes = [int(p) for p in args.primes.replace(",", " ").split()] if args.primes else []
    P = PrimeSet.cofinite(primes) if args.cofinite else PrimeSet.finite(primes)
    res = countability_classifier(P, args.char)
    _print_json(res.__dict__)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="homrecomb", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    for name, helptext in (("run", "run scenarios and report verdicts with audits"),
                           ("verify", "run only the invariant audits of scenarios")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("scenarios", nargs="+", help="scenario file(s)")
        p.add_argument("-o", "--output", help="write the merged report here")
        p.add_argument("--P", type=int, help="override the filtration truncation")
        p.add_argument("--N", type=int, help="override the word-length truncation")
        p.add_argument("-j", "--jobs", type=int, default=1, help="scenarios to run in parallel")
        if name == "run":
            p.add_argument("--chars", help="characteristics to query, e.g. '0,2,3'")
            p.add_argument("--no-audit", action="store_true", help="skip cross-module audits")
        p.set_defaults(func=lambda a, mode=name: _batch(a, mode))

    p = sub.add_parser("homology", help="homology of a complex file")
    p.add_argument("file")
    p.add_argument("--chars", help="characteristics for universal coefficients")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("snf", help="Smith normal form of an integer matrix file")
    p.add_argument("file")
    p.set_defaults(func=cmd_snf)

    p = sub.add_parser("rank", help="rank of a matrix file")
    p.add_argument("file")
    p.add_argument("--ring", help="override the ring: Q, Z or Fp")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("hull", help="hull test on a Floer dimension table")
    p.add_argument("file")
    p.add_argument("--n", type=int, help="sphere dimension; also print the E1 page")
    p.set_defaults(func=cmd_hull)

    p = sub.add_parser("dga", help="filtered acyclicity check of a DGA file")
    p.add_argument("file")
    p.add_argument("--P", type=int)
    p.add_argument("--N", type=int)
    p.set_defaults(func=cmd_dga)

    p = sub.add_parser("moore", help="U_- cohomology for the Moore space variant")
    p.add_argument("q", type=int)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--rho", type=int, default=2)
    p.add_argument("--chars")
    p.set_defaults(func=cmd_moore)

    p = sub.add_parser("frobenius", help="Frobenius fixed points of an algebra file")
    p.add_argument("file")
    p.set_defaults(func=cmd_frobenius)

    p = sub.add_parser("families", help="E1 page from a Reeb family file")
    p.add_argument("file")
    p.set_defaults(func=cmd_families)

    p = sub.add_parser("weights", help="weighted homogeneity check")
    p.add_argument("--brieskorn", type=int, nargs="+", metavar="A")
    p.add_argument("--weights", type=int, nargs="+")
    p.add_argument("--w", type=int)
    p.add_argument("--monomial", action="append", default=[], help="exponents, e.g. 2,0,0")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("countable", help="countability of SH for a prime set")
    p.add_argument("--primes", default="")
    p.add_argument("--cofinite", action="store_true")
    p.add_argument("--char", type=int, required=True)
    p.set_defaults(func=cmd_countable)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
