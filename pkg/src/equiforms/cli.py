"""Command line: thom, chern, verify, rr.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from .coeff import DomainError
from .serialize import dumps, render_text

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(obj, fmt: str, meta: dict) -> str:
    return dumps(obj, meta) if fmt == "json" else render_text(obj)


def cmd_thom(args) -> int:
    from .thom import build_thom

    if not 1 <= args.dim <= 6:
        raise UsageError("--dim must be in 1..6")
    fam = build_thom(args.dim, args.flavor)
    print(_emit(fam.payload, args.format, {"flavor": args.flavor, "dim": args.dim}))
    return EXIT_OK


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _parse_at(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--at expects key=value, got {item!r}")
        key = {"λ": "lam", "θ": "theta"}.get(key, key)
        try:
            vals = [float(v) for v in val.split(",")]
        except ValueError as exc:
            raise UsageError(f"--at {key}: {exc}") from exc
        out[key] = vals if key in ("lam", "x") else vals[0]
    return out


def cmd_chern(args) -> int:
    from .chern import ch_numeric, ch_triple, symbol_catalogue
    from .exterior import subs_t

    try:
        s = symbol_catalogue(args.symbol)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    params = _parse_at(args.at)
    meta = {"symbol": args.symbol, "rep": args.rep}
    if s.theta_weights is not None and not s.spin_n:
        tr = ch_triple(s)
        if args.t is not None:
            obj = subs_t(tr.ch_t, args.t)
            meta["t"] = str(args.t)
        else:
            obj = {"rel": tr.ch_rel, "sup": tr.ch_sup, "q": tr.ch_q}[args.rep]
        print(_emit(obj, args.format, meta))
        return EXIT_OK
    # spin symbols: numeric values at the requested point
    if args.rep == "sup":
        raise UsageError("the supported representative is only available for exact symbols")
    n = s.spin_n
    params.setdefault("lam", [0.0] * n)
    if len(params["lam"]) != n:
        raise UsageError(f"--at lam needs {n} values")
    x = np.asarray(params.get("x", [0.0] * s.dim), dtype=float)
    if x.shape != (s.dim,):
        raise UsageError(f"--at x needs {s.dim} values")
    t = 1.0 if args.t is None else float(args.t)
    ch, eta = ch_numeric(s, t, params, x.reshape(1, -1))
    comps = {format(I, "b").zfill(s.dim)[::-1]: [float(ch[0, I].real), float(ch[0, I].imag)] for I in range(1 << s.dim) if abs(ch[0, I]) > 1e-15}
    out = {"symbol": args.symbol, "rep": "q" if args.rep == "q" else "rel", "t": t, "params": params, "components": comps}
    if args.rep == "rel":
        comps_eta = {format(I, "b").zfill(s.dim)[::-1]: [float(eta[0, I].real), float(eta[0, I].imag)] for I in range(1 << s.dim) if abs(eta[0, I]) > 1e-15}
        out["eta"] = comps_eta
    print(json.dumps(out, sort_keys=True, indent=1))
    return EXIT_OK


def _print_report(records, stream) -> None:
    for r in records:
        stream.write(json.dumps(r.to_json(), sort_keys=True, default=str) + "\n")


def cmd_verify(args) -> int:
    from .verify import run_suite

    records = run_suite(args.suite, seed=args.seed, tol=args.tol, criteria=args.criterion)
    _print_report(records, sys.stdout)
    failed = [r for r in records if not r.passed]
    sys.stderr.write(f"{len(records) - len(failed)}/{len(records)} checks passed\n")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_rr(args) -> int:
    from .chern import riemann_roch_check
    from .verify import env_tolerance

    if not 1 <= args.n <= 2:
        raise UsageError("--n must be 1 or 2")
    rep = riemann_roch_check(args.case, args.n, samples=args.samples, seed=args.seed)
    tol = args.tol if args.tol is not None else (env_tolerance() or 1e-9)
    rep["tolerance"] = tol
    rep["pass"] = rep["max_deviation"] <= tol
    print(json.dumps(rep, sort_keys=True, indent=1))
    return EXIT_OK if rep["pass"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="equiforms", description="Equivariant Thom forms and relative Chern characters on R^d.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("thom", help="emit a Thom form")
    t.add_argument("--dim", type=int, required=True)
    t.add_argument("--flavor", choices=("rel", "c", "mq"), default="mq")
    t.add_argument("--format", choices=("json", "text"), default="text")
    t.set_defaults(func=cmd_thom)

    c = sub.add_parser("chern", help="emit a Chern character representative")
    c.add_argument("--symbol", required=True, help="bott, complex:1, complex:2, spin:n, spinc:n")
    c.add_argument("--t", type=_rational, default=None, help="emit Str e^{F(t)} at this t instead (exact, e.g. 1/2)")
    c.add_argument("--rep", choices=("rel", "sup", "q"), default="q")
    c.add_argument("--format", choices=("json", "text"), default="text")
    c.add_argument("--at", nargs="*", help="numeric parameters, e.g. lam=0.5,1 x=1,0")
    c.set_defaults(func=cmd_chern)

    v = sub.add_parser("verify", help="run the verification suite")
    v.add_argument("--suite", choices=("symbolic", "numeric", "all"), default="all")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=None, help="override numeric tolerances")
    v.add_argument("--criterion", type=int, nargs="*", default=None, help="restrict to these criteria")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("rr", help="Riemann-Roch comparison at random samples")
    r.add_argument("--case", choices=("spin", "spinc", "complex"), required=True)
    r.add_argument("--n", type=int, default=1)
    r.add_argument("--samples", type=int, default=10)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--tol", type=float, default=None)
    r.set_defaults(func=cmd_rr)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
