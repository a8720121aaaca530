"""Command-line interface: ``tripleconst <subcommand>``.

Exit codes: 0 success, 1 usage or input error, 2 numerical mismatch or failed suite.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .characters import (
    MultiplicativeCharacter,
    epsilon_factor,
    kronecker_component,
    quadratic_character,
    random_character,
)
from .global_assembly import GlobalInput, InvalidInput, assemble_from_locals, global_constant, local_kinds
from .kirillov_supercuspidal import random_epsilon_data
from .local_triple import (
    LocalTripleSpec,
    RangeError,
    SupercuspidalData,
    closed_I_prime_exact,
    record,
)
from .verification import SUITES, run_suite

SCHEMA_VERSION = 1
KIND_ALIASES = {"steinberg": "steinberg", "spherical": "spherical", "sc": "supercuspidal"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, sort_keys=True, indent=2))
        return
    rows = _flatten(payload)
    width = max(len(k) for k, _ in rows) if rows else 0
    for k, v in rows:
        print(f"{k.ljust(width)}  {v}")


def _flatten(d, prefix: str = "") -> list[tuple[str, str]]:
    out = []
    for k in sorted(d):
        v = d[k]
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.extend(_flatten(v, key + "."))
        elif isinstance(v, list):
            out.append((key, json.dumps(v)))
        else:
            out.append((key, str(v)))
    return out


def _tolerance(value: Optional[float]) -> Optional[float]:
    if value is not None and not value > 0:
        raise UsageError("--tolerance must be positive")
    return value


# local-constant ------------------------------------------------------------------------


def build_local_spec(args) -> LocalTripleSpec:
    kind = KIND_ALIASES[args.kind]
    p, m = args.p, args.m
    rng = np.random.default_rng(args.seed)
    if p == 2 and m == 1:
        raise UsageError("no character of conductor 1 exists for p = 2")
    om1 = random_character(p, m, rng, z=complex(np.exp(2j * np.pi * rng.random())))
    om2 = MultiplicativeCharacter.unramified(p, complex(np.exp(2j * np.pi * rng.random())))
    common = dict(l1=args.l1, l2=args.l2, extended=args.extended)
    if kind == "supercuspidal":
        c = args.c
        eps = random_epsilon_data(p, c, rng, level_bound=max(m, 2) + 1 + max(args.l1, args.l2), C1=args.c1_sign)
        return LocalTripleSpec(p, m, om1, om2, kind, sc=SupercuspidalData(c, eps, args.unramified), **common)
    om3 = MultiplicativeCharacter.unramified(p, args.z3)
    return LocalTripleSpec(p, m, om1, om2, kind, omega3=om3, **common)


def cmd_local_constant(args) -> int:
    tol = _tolerance(args.tolerance) or 1e-9
    spec = build_local_spec(args)
    rec = record(spec)
    if not args.timing:
        rec["wall_time_ms"] = None
    flag = spec.sc.unramified_flag if spec.sc else False
    rec["I_prime_closed_exact"] = frac_str(closed_I_prime_exact(spec.p, spec.m, spec.pi3_kind, flag))
    if spec.sc:
        rec["c"] = spec.sc.c
        rec["unramified"] = flag
    rec["schema_version"] = SCHEMA_VERSION
    rec["tolerance"] = tol
    rec["ok"] = rec["abs_err"] <= tol
    _emit(rec, args.format)
    if not rec["ok"]:
        print(f"mismatch: |bruteforce - closed| = {rec['abs_err']:.3e} > {tol:g}", file=sys.stderr)
        return 2
    return 0


# verify ---------------------------------------------------------------------------------


def _run_one(job):
    name, seed, tol = job
    return run_suite(name, seed, tol)


def cmd_verify(args) -> int:
    tol = _tolerance(args.tolerance)
    names = list(SUITES)
    if args.only:
        wanted = [n.strip() for item in args.only for n in item.split(",") if n.strip()]
        unknown = [n for n in wanted if n not in SUITES]
        if unknown:
            raise UsageError(f"unknown suite(s): {', '.join(unknown)}; choose from {', '.join(SUITES)}")
        names = [n for n in names if n in wanted]
    jobs = [(n, args.seed, tol) for n in names]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    results.sort(key=lambda r: r.criterion)
    for r in results:
        print(r.line(), file=sys.stderr)
    ok = all(r.passed for r in results)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "seed": args.seed,
        "tolerance": tol,
        "passed": ok,
        "failing": [r.name for r in results if not r.passed],
        "suites": [r.as_dict(timing=args.timing) for r in results],
    }
    _emit(payload, args.format)
    return 0 if ok else 2


# global-constant -----------------------------------------------------------------------------


def cmd_global_constant(args) -> int:
    try:
        g = GlobalInput(args.D, args.q1, args.unramified2, allow_positive=args.allow_positive)
    except InvalidInput as exc:
        raise UsageError(str(exc)) from exc
    closed = global_constant(g)
    loc = assemble_from_locals(g)
    locals_out = {}
    for p, (kind, m) in sorted(local_kinds(g).items()):
        flag = g.unramified2 if p == 2 else False
        locals_out[str(p)] = {"kind": kind, "m": m, "I_prime": frac_str(closed_I_prime_exact(p, m, kind, flag))}
    payload = {
        "schema_version": SCHEMA_VERSION,
        "D": g.D,
        "q": g.q,
        "q1": g.q1,
        "q2": g.q2,
        "unramified2": g.unramified2,
        "global_constant": frac_str(closed),
        "from_locals": frac_str(loc),
        "consistent": closed == loc,
        "locals": locals_out,
    }
    _emit(payload, args.format)
    if closed != loc:
        print(f"note: closed coefficient / product of locals = {frac_str(closed / loc)}", file=sys.stderr)
    return 0


# epsilon ------------------------------------------------------------------------------------------


def _clean(x: float) -> float:
    # hide float dust so exact values print exactly
    if abs(x) < 1e-14:
        return 0.0
    return float(f"{x:.15g}")


def _epsilon_character(args) -> MultiplicativeCharacter:
    p, c = args.p, args.conductor
    if args.char == "quadratic":
        if p == 2:
            table = {2: -4, 3: 8}
            if c not in table:
                raise UsageError("quadratic characters at p = 2 have conductor 2 or 3")
            return kronecker_component(table[c], 2)
        if c != 1:
            raise UsageError("the quadratic character of an odd prime has conductor 1")
        return quadratic_character(p)
    if c < 1 or (p == 2 and c == 1):
        raise UsageError("no character of that conductor")
    return random_character(p, c, np.random.default_rng(args.seed))


def cmd_epsilon(args) -> int:
    omega = _epsilon_character(args)
    e = epsilon_factor(args.s, omega)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "re": _clean(e.real),
        "im": _clean(e.imag),
        "modulus": _clean(abs(e)),
        "conductor": omega.c,
    }
    _emit(payload, args.format)
    return 0


# parser ---------------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tripleconst", description="Local and global constants of triple-product periods.")
    parser.add_argument("--precision", type=int, default=None, help="minimum relative p-adic precision (sets PRECISION_FLOOR)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--format", choices=("json", "table"), default="json")
        sp.add_argument("--seed", type=int, default=0)

    lc = sub.add_parser("local-constant", help="I' by brute force and closed form")
    common(lc)
    lc.add_argument("--p", type=int, required=True)
    lc.add_argument("--m", type=int, required=True)
    lc.add_argument("--kind", choices=tuple(KIND_ALIASES), required=True)
    lc.add_argument("--c", type=int, default=2, help="conductor of the supercuspidal")
    lc.add_argument("--unramified", action="store_true", help="supercuspidal is unramified dihedral")
    lc.add_argument("--c1-sign", type=int, choices=(1, -1), default=None, dest="c1_sign")
    lc.add_argument("--z3", type=complex, default=1.0, help="omega3(p) for steinberg/spherical")
    lc.add_argument("--l1", type=int, default=0)
    lc.add_argument("--l2", type=int, default=0)
    lc.add_argument("--tolerance", type=float, default=None)
    lc.add_argument("--extended", action="store_true", help="allow translates beyond the proven range")
    lc.add_argument("--timing", action="store_true", help="report wall time (output no longer byte-stable)")
    lc.set_defaults(func=cmd_local_constant)

    vf = sub.add_parser("verify", help="run the acceptance suites")
    common(vf)
    vf.add_argument("--only", action="append", default=None, help=f"suite names among: {', '.join(SUITES)}")
    vf.add_argument("--jobs", type=int, default=1)
    vf.add_argument("--tolerance", type=float, default=None, help="override every float tolerance")
    vf.add_argument("--timing", action="store_true")
    vf.set_defaults(func=cmd_verify)

    gc = sub.add_parser("global-constant", help="global constant for a fundamental discriminant")
    common(gc)
    gc.add_argument("--D", type=int, required=True)
    gc.add_argument("--q1", type=int, required=True)
    gc.add_argument("--unramified2", action="store_true")
    gc.add_argument("--allow-positive", action="store_true", dest="allow_positive")
    gc.set_defaults(func=cmd_global_constant)

    ep = sub.add_parser("epsilon", help="epsilon factor of a character")
    common(ep)
    ep.add_argument("--p", type=int, required=True)
    ep.add_argument("--conductor", type=int, required=True)
    ep.add_argument("--s", type=float, default=0.5)
    ep.add_argument("--char", choices=("quadratic", "random"), default="quadratic")
    ep.set_defaults(func=cmd_epsilon)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.precision is not None:
        os.environ["PRECISION_FLOOR"] = str(args.precision)
    try:
        return args.func(args)
    except (UsageError, RangeError, ValueError) as exc:
        print(f"tripleconst: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
