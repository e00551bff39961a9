"""Command-line front end.

Exit status: 0 on success, 1 on a domain error (bad vector, unknown class,
non-Hurwitz input), 2 when a search or enumeration budget is exceeded.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from .classification import NotHurwitzSystem, ShapeMismatch, canonical_invariant, equivalent, normal_form
from .hurwitz import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    HurwitzVector,
    NuType,
    enumerate_hs,
    evaluate,
    is_hurwitz_system,
    nu_type,
)
from .invariants import InvariantError, h2_sigma_order, rotation_epsilon_bit, schur_lift_product
from .mcg_moves import CACHE_ENV, DEFAULT_CAP, OrbitCache, orbit, orbit_summary
from .moduli_catalog import catalog_dict, components, write_catalog

EXIT_OK, EXIT_DOMAIN, EXIT_BUDGET = 0, 1, 2


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _invariant_report(v: HurwitzVector) -> dict:
    check = is_hurwitz_system(v)
    out: dict = {"vector": str(v), "hurwitz_system": bool(check), "reason": check.reason}
    try:
        nu = nu_type(v)
    except ValueError as exc:
        out["nu"] = None
        out["error"] = str(exc)
        return out
    sigma = sorted(nu.support())
    out["nu"] = nu.to_labels()
    out["sigma"] = [c.label() for c in sigma]
    out["evaluation"] = str(evaluate(v))
    if v.n >= 3:
        out["h2_sigma_order"] = h2_sigma_order(v.n, sigma).order
    if v.n % 2 == 0 and evaluate(v).is_identity:
        out["schur_bit"] = schur_lift_product(v).bit
        try:
            out["rotation_epsilon_bit"] = rotation_epsilon_bit(v)
        except InvariantError:
            pass
    return out


def cmd_invariant(args) -> int:
    print(_dump(_invariant_report(HurwitzVector.parse(args.vector))))
    return EXIT_OK


def cmd_classify(args) -> int:
    v = HurwitzVector.parse(args.vector)
    form = normal_form(v, cap=args.cap) if args.normal_form else canonical_invariant(v, cap=args.cap)
    print(form.to_json())
    return EXIT_OK


def cmd_orbit(args) -> int:
    v = HurwitzVector.parse(args.vector)
    report = orbit(v, mod_aut=args.mod_aut, cap=args.cap)
    print(_dump(report.to_json()))
    return EXIT_OK if report.complete else EXIT_BUDGET


def cmd_equivalent(args) -> int:
    v1, v2 = HurwitzVector.parse(args.v1), HurwitzVector.parse(args.v2)
    print("true" if equivalent(v1, v2, cap=args.cap) else "false")
    return EXIT_OK


def cmd_catalog(args) -> int:
    records = components(args.n, args.g, oracle=args.oracle, budget=args.budget)
    if args.output:
        write_catalog(args.output, args.n, args.g, records)
        print(_dump({"written": args.output, "components": len(records)}))
    else:
        print(json.dumps(catalog_dict(args.n, args.g, records), indent=2))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    nu = NuType.parse(args.nu, args.n) if args.nu else None
    count = 0
    for v in enumerate_hs(args.n, args.gp, args.d, nu, budget=args.budget, jobs=args.jobs):
        print(v)
        count += 1
        if args.limit and count >= args.limit:
            break
    return EXIT_OK


def cmd_orbits(args) -> int:
    cache = OrbitCache(args.cache_dir) if args.cache_dir else OrbitCache.from_env()
    summary = orbit_summary(args.n, args.gp, args.d, mod_aut=args.mod_aut, cache=cache, budget=args.budget)
    for canon, size in summary:
        v = HurwitzVector.from_codes(args.n, args.gp, args.d, list(canon))
        print(_dump({"canonical": str(v), "size": size}))
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verification import format_table, run_all

    results = run_all(grid=args.grid)
    print(format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_DOMAIN


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dihedral-covers", description="Dihedral Hurwitz systems: invariants, orbits, catalogs.")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for enumeration (output does not depend on it)")
    p.add_argument("--cache-dir", default=None, help=f"orbit cache directory (default: ${CACHE_ENV} if set)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("invariant", help="class function, Sigma and Schur data of a vector")
    s.add_argument("-v", "--vector", required=True)
    s.set_defaults(func=cmd_invariant)

    s = sub.add_parser("classify", help="canonical form of a vector as JSON")
    s.add_argument("-v", "--vector", required=True)
    s.add_argument("--normal-form", action="store_true", help="print the normal form without the Aut sweep")
    s.add_argument("--cap", type=int, default=DEFAULT_CAP)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("orbit", help="breadth-first orbit of a vector")
    s.add_argument("-v", "--vector", required=True)
    s.add_argument("--mod-aut", action="store_true")
    s.add_argument("--cap", type=int, default=DEFAULT_CAP)
    s.set_defaults(func=cmd_orbit)

    s = sub.add_parser("equivalent", help="are two vectors equivalent under moves and Aut(D_n)?")
    s.add_argument("-v1", required=True)
    s.add_argument("-v2", required=True)
    s.add_argument("--cap", type=int, default=DEFAULT_CAP)
    s.set_defaults(func=cmd_equivalent)

    s = sub.add_parser("catalog", help="components of M_g(D_n) as JSON")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("-g", type=int, required=True)
    s.add_argument("--oracle", action="store_true", help="recount every enumerable type by orbit search")
    s.add_argument("--budget", type=int, default=10**7)
    s.add_argument("-o", "--output", default=None, help="write the catalog to this file")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("verify-paper", help="run the acceptance checks and print a table")
    s.add_argument("--grid", choices=("small", "full"), default="small")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("enumerate", help="stream HS(D_n; g', d)")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("-gp", type=int, required=True)
    s.add_argument("-d", type=int, required=True)
    s.add_argument("--nu", default=None, help="class function, e.g. 'Rotation(1):2,ReflAll:2'")
    s.add_argument("--limit", type=int, default=0)
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("orbits", help="orbit summary of a whole cell (uses the orbit cache)")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("-gp", type=int, required=True)
    s.add_argument("-d", type=int, required=True)
    s.add_argument("--mod-aut", action="store_true")
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.set_defaults(func=cmd_orbits)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    if args.cache_dir:
        os.environ[CACHE_ENV] = args.cache_dir
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, NotHurwitzSystem, ShapeMismatch, InvariantError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
