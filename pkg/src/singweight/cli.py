"""Command line front end.

    singweight catalog [--format table|json|csv]
    singweight coeffs ID [--cap Q] [--orbits] [--format ...] [--cache PATH]
    singweight bound ID
    singweight classify (ID | --all) [--check]
    singweight theta-verify (CASE | all) [--seed S]
    singweight selftest [--level N]

Exit codes: 0 ok, 1 computation error, 2 check mismatch, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

EXIT_OK, EXIT_ERROR, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    ids: list[str]
    cap: Fraction | None
    fmt: str
    cache: str | None
    seed: int
    check: bool
    orbits: bool = False


def _fraction(s: str) -> Fraction:
    try:
        x = Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}")
    if x <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="singweight", description="Singular-weight Borcherds products for simple lattices.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def fmt(sp, choices=("table", "json", "csv")):
        sp.add_argument("--format", choices=choices, default="table")

    sp = sub.add_parser("catalog", help="list the simple lattices")
    fmt(sp)

    sp = sub.add_parser("coeffs", help="Eisenstein coefficients of one lattice")
    sp.add_argument("id")
    sp.add_argument("--cap", type=_fraction, default=None, help="largest n (default: search cap)")
    sp.add_argument("--orbits", action="store_true", help="group elements with equal expansions")
    sp.add_argument("--cache", default=None, help="JSON-lines coefficient cache")
    fmt(sp)

    sp = sub.add_parser("bound", help="bound constant and search cap")
    sp.add_argument("id")
    fmt(sp, ("table", "json"))

    sp = sub.add_parser("classify", help="singular-weight principal parts")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("id", nargs="?")
    g.add_argument("--all", action="store_true")
    sp.add_argument("--check", action="store_true", help="compare with the expected admitting genera")
    sp.add_argument("--cache", default=None)
    fmt(sp, ("table", "json"))

    sp = sub.add_parser("theta-verify", help="check the theta constant identifications")
    sp.add_argument("case", help="5.1 .. 5.5 or 'all'")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--spot", type=int, default=5, help="random order-4 elements to identify in 5.5")
    fmt(sp, ("table", "json"))

    sp = sub.add_parser("selftest", help="calibration checks")
    sp.add_argument("--level", type=int, default=0, choices=(0, 1, 2))
    return p


def _resolve(ids):
    from .lattice import catalog_by_id

    cat = catalog_by_id()
    bad = [i for i in ids if i not in cat]
    if bad:
        raise UsageError(f"unknown lattice id(s): {', '.join(bad)}; see 'singweight catalog'")
    return [cat[i] for i in ids]


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_catalog(cfg, out):
    from .lattice import build_catalog

    cat = build_catalog()
    if cfg.fmt == "json":
        out.write(json.dumps([L.to_json() for L in cat], indent=1) + "\n")
    elif cfg.fmt == "csv":
        out.write(_csv([(L.id, L.n, L.genus_symbol, L.description, L.expected_d, L.split_N) for L in cat],
                       ["id", "n", "genus", "lattice", "d", "split_N"]))
    else:
        for L in cat:
            out.write(f"{L.id:16s} n={L.n:<3d} {L.genus_symbol:18s} |L'/L|={L.expected_d:<5d} {L.description}\n")
    return EXIT_OK


def _cache(cfg):
    from .eisenstein import CoefficientCache

    return CoefficientCache(cfg.cache)


def cmd_coeffs(cfg, out):
    from .bounds import search_cap
    from .eisenstein import expansion_table, frac_str

    (L,) = _resolve(cfg.ids)
    cap = cfg.cap if cfg.cap is not None else max(search_cap(L, L.n - 2), Fraction(1))
    table = expansion_table(L, cap, cache=_cache(cfg))
    if cfg.fmt == "json":
        out.write(table.to_json(orbits=cfg.orbits) + "\n")
    elif cfg.fmt == "csv":
        if cfg.orbits:
            out.write(_csv([(" ".join(map(str, g.representative.coords)), g.size, g.representative.order,
                             g.format_expansion()) for g in table.groups],
                           ["representative", "size", "order", "expansion"]))
        else:
            out.write(table.to_csv())
    else:
        if cfg.orbits:
            out.write(f"{L.id}: {len(table.groups)} groups, cap {frac_str(cap)}\n")
            for g in table.groups:
                out.write(f"{str(g.representative.coords):20s} {g.size:5d}  {g.format_expansion()}\n")
        else:
            for c, n, v in table.rows():
                out.write(f"{str(c):20s} {frac_str(n):>8s} {frac_str(v):>12s}\n")
    return EXIT_OK


def cmd_bound(cfg, out):
    from .bounds import bound_for, search_cap

    (L,) = _resolve(cfg.ids)
    b = bound_for(L)
    cap = search_cap(L, L.n - 2)
    rec = {"lattice": L.id, **b.to_json(), "threshold": str(L.n - 2), "cap": str(cap)}
    if cfg.fmt == "json":
        out.write(json.dumps(rec, indent=1) + "\n")
    else:
        out.write(f"{L.id}: k={b.k} d={b.d} N={b.N}\n"
                  f"  C (formula) = {b.value_formula:.12g}\n"
                  f"  C (used)    = {b.value_used:.12g}\n"
                  f"  cap for -a_E <= {L.n - 2}: n < {cap}\n")
    return EXIT_OK


def cmd_classify(cfg, out):
    from .classifier import EXPECTED_ADMITTING, admitting_set, classify_catalog, reports_json

    ids = None if cfg.ids == ["--all"] else [L.id for L in _resolve(cfg.ids)]
    reports = classify_catalog(cache=_cache(cfg), ids=ids)
    if cfg.fmt == "json":
        out.write(reports_json(reports) + "\n")
    else:
        for r in reports:
            out.write(r.summary() + "\n")
        adm = [r for r in reports if r.admits]
        out.write(f"\nadmitting genera: {len(adm)}\n")
        for r in adm:
            out.write(f"  {r.lattice_id:16s} w={r.weight}  families={len(r.families)}  solutions={len(r.solutions)}\n")
            for f in r.families:
                out.write(f"      {f.count:3d} x  {f.representative}\n")
    if cfg.check:
        got = admitting_set(reports)
        want = EXPECTED_ADMITTING if ids is None else EXPECTED_ADMITTING & set(ids)
        if got != want:
            sys.stderr.write(f"check failed: missing {sorted(want - got)}, unexpected {sorted(got - want)}\n")
            return EXIT_MISMATCH
        sys.stderr.write("check passed\n")
    return EXIT_OK


def cmd_theta(cfg, out, case, spot):
    from .theta import CASES, reports_json, verify_case

    cases = sorted(CASES) if case == "all" else [case]
    if any(c not in CASES for c in cases):
        raise UsageError(f"unknown case {case!r}; expected one of {sorted(CASES)} or 'all'")
    reports = [verify_case(c, cfg.seed, spot=spot if c == "5.5" else 0) for c in cases]
    if cfg.fmt == "json":
        out.write(reports_json(reports) + "\n")
    else:
        for r in reports:
            out.write(f"{r.case} {r.realization}: {'ok' if r.passed else 'FAILED'} "
                      f"({r.good_count} good elements, seed {r.seed})\n")
            for p in r.pairs:
                g = ", ".join(str(x) for x in p.gamma_v)
                out.write(f"   {p.claim:38s} gamma=({g})  max|on|={p.max_on_divisor:.3e}"
                          f"  min|off|={p.min_off_divisor:.3e}  {'ok' if p.passed else 'FAILED'}\n")
            for note in r.notes:
                out.write(f"   note: {note}\n")
            for c in r.unmatched_claims:
                out.write(f"   unmatched claim: {c}\n")
            for s in r.spot_checks:
                ident = s["identified"]
                desc = f"{ident['theta']} after {ident['transform']}" if ident else "not identified"
                out.write(f"   spot ({', '.join(s['gamma'])}): {desc}\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_MISMATCH


def cmd_selftest(level: int, out) -> int:
    from .bounds import constant_C, search_cap
    from .eisenstein import coefficient, expansion_table
    from .lattice import catalog_by_id, discriminant_group
    import math

    cat = catalog_by_id()
    checks = []

    def check(name, ok):
        checks.append(ok)
        out.write(f"{'ok  ' if ok else 'FAIL'} {name}\n")

    for lid, want in (("n10_1p1", -504), ("n18_1p1", -264), ("n26_1p1", -24)):
        L = cat[lid]
        check(f"a_E(0,1) = {want} for {lid}", coefficient(L, discriminant_group(L.gram).zero(), 1) == want)
    b = constant_C(Fraction(5, 2), 512, 4)
    check("C(5/2, 512, 4) = 2/15 - pi^2/90", abs(b.value_used - (2 / 15 - math.pi**2 / 90)) < 1e-9)
    check("search cap 13", search_cap(cat["n3_2_7p1_4p4"], 1) == 13)
    if level >= 1:
        t = expansion_table(cat["n3_2_7p1_4p4"], 12)
        check("8 expansion groups", sorted(g.size for g in t.groups) == [1, 6, 10, 15, 120, 120, 120, 120])
        check("a_E(0,1) = -10", t.get((0,) * 5, 1) == -10)
    if level >= 2:
        from .classifier import EXPECTED_ADMITTING, admitting_set, classify_catalog
        from .theta import verify_all

        check("admitting genera", admitting_set(classify_catalog()) == EXPECTED_ADMITTING)
        check("theta identifications", all(r.passed for r in verify_all()))
    return EXIT_OK if all(checks) else EXIT_MISMATCH


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        ids = []
        if getattr(args, "all", False):
            ids = ["--all"]
        elif getattr(args, "id", None):
            ids = [args.id]
            _resolve(ids)
        cfg = RunConfig(args.command, ids, getattr(args, "cap", None), getattr(args, "format", "table"),
                        getattr(args, "cache", None), getattr(args, "seed", 0), getattr(args, "check", False),
                        getattr(args, "orbits", False))
        t0 = time.perf_counter()
        if args.command == "catalog":
            code = cmd_catalog(cfg, out)
        elif args.command == "coeffs":
            code = cmd_coeffs(cfg, out)
        elif args.command == "bound":
            code = cmd_bound(cfg, out)
        elif args.command == "classify":
            code = cmd_classify(cfg, out)
        elif args.command == "theta-verify":
            code = cmd_theta(cfg, out, args.case, args.spot)
        else:
            code = cmd_selftest(args.level, out)
        sys.stderr.write(f"[{args.command}] {time.perf_counter() - t0:.1f}s\n")
        return code
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - reported, mapped to exit 1
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
