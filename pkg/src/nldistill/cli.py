"""Command-line front end: ``nldistill {box,wire,sweep,detect,reproduce}``.

Exit codes: 0 success, 1 invalid box, 2 argument or I/O error,
3 ``--assert-postquantum`` with no positive detector, 4 reproduction mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import distill, nsbox, pqdetect, reproduce, wiring
from .exceptions import (
    GridError,
    InvalidBehavior,
    NLDistillError,
    NotInSimplex,
    SchemaError,
    UnknownName,
)

EXIT_OK, EXIT_INVALID, EXIT_ARGS, EXIT_ASSERT, EXIT_REPRO = 0, 1, 2, 3, 4


class _Fmt:
    def __init__(self, full: bool):
        self.pattern = ".17g" if full else ".6g"

    def __call__(self, v) -> str:
        if v is None:
            return "-"
        if isinstance(v, (bool, np.bool_)):
            return str(bool(v)).lower()
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        return format(float(v), self.pattern)

    def table(self, p) -> str:
        rows = []
        for i, row in enumerate(np.asarray(p)):
            rows.append(f"xy={i >> 1}{i & 1}  " + "  ".join(self(v) for v in row))
        return "        ab=00 ab=01 ab=10 ab=11\n" + "\n".join(rows)

    def rounded(self, obj):
        """Round floats inside a JSON-ready structure to the output precision."""
        if isinstance(obj, float):
            return float(self(obj))
        if isinstance(obj, dict):
            return {k: self.rounded(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [self.rounded(v) for v in obj]
        return obj


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _load_raw(name=None, path=None) -> np.ndarray:
    """Unvalidated table from a catalog name or a JSON file."""
    if name is not None:
        return nsbox._table(nsbox.named_box(name))
    return nsbox.load_table(path)


def _load(name=None, path=None) -> nsbox.Behavior:
    return nsbox.Behavior(_load_raw(name, path))


def _report_invalid(e: InvalidBehavior) -> int:
    for v in e.violations:
        _err(f"{v.invariant} at {v.location} (magnitude {v.magnitude:.3g})")
    return EXIT_INVALID


# box ------------------------------------------------------------------------

def cmd_box(args, fmt: _Fmt) -> int:
    table = _load_raw(args.name, args.input)
    problems = nsbox.validate(table)
    if args.action == "validate":
        if problems:
            return _report_invalid(InvalidBehavior(problems))
        print("valid")
        return EXIT_OK
    if problems:
        return _report_invalid(InvalidBehavior(problems))
    b = nsbox.Behavior(table)
    if args.action == "show":
        print(fmt.table(b.p))
        print(f"chsh {fmt(nsbox.chsh(b))}")
        cert = nsbox.hardy_test(b)
        print(f"hardy {fmt(cert.success)} (hardy form: {fmt(cert.is_hardy)})")
    elif args.action == "decompose":
        dec = nsbox.decompose_simplex(b)
        for name, c in zip(nsbox.SIMPLEX_NAMES, dec.c):
            print(f"{name:5s} {fmt(c)}")
        print(f"residual {fmt(dec.residual)}")
    elif args.action == "canonicalize":
        canon, r, value = nsbox.canonicalize(b)
        print(f"relabeling {r}")
        print(f"chsh {fmt(value)}")
        print(fmt.table(canon.p))
    return EXIT_OK


# wire -----------------------------------------------------------------------

def cmd_wire(args, fmt: _Fmt) -> int:
    parents = [_load(name=v) if kind == "name" else _load(path=v) for kind, v in args.parents]
    if not parents:
        _err("give at least one --name or --input")
        return EXIT_ARGS
    if args.copies < 1 or args.rounds < 1:
        _err("--copies and --rounds must be >= 1")
        return EXIT_ARGS
    res = wiring.wire(parents, copies=args.copies, method=args.method, rounds=args.rounds, seed=args.seed)
    child = res.child
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(nsbox.behavior_to_json(child), fh, indent=2)
            fh.write("\n")
    else:
        print(json.dumps(fmt.rounded(nsbox.behavior_to_json(child))))
    print(f"parents {res.parents_count} method {res.method}")
    print(f"chsh {fmt(nsbox.chsh(child))}")
    cert = nsbox.hardy_test(child)
    print(f"hardy {fmt(cert.success)} (hardy form: {fmt(cert.is_hardy)})")
    if args.method == "mc":
        # reference: exact wiring of the same parents
        exact = wiring.wire(parents, copies=args.copies, method="chain").child
        est = wiring.MonteCarloEstimate(child.p, np.sqrt(child.p * (1 - child.p) / args.rounds), args.rounds)
        print(f"max z-score vs exact {fmt(float(np.max(est.zscores(exact))))}")
    return EXIT_OK


# sweep ----------------------------------------------------------------------

def _axis(text):
    if text is None:
        return None
    if ":" in text:
        return distill.Axis.parse(text)
    try:
        return float(text)
    except ValueError:
        raise GridError(f"bad grid value {text!r}") from None


def cmd_sweep(args, fmt: _Fmt) -> int:
    lam = _axis(args.lam)
    n = _axis(args.n)
    if args.n_around_peak:
        if not isinstance(lam, float):
            raise GridError("--n-around-peak needs a single --lambda value")
        n = distill.n_axis_around_peak(lam)
    records = distill.sweep(args.quantity, r=_axis(args.r), s=_axis(args.s), lam=lam, n=n, workers=args.workers)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            distill.write_csv(records, fh)
    else:
        sys.stdout.write(distill.write_csv(records))
    key = "gap" if args.quantity == "gap" else "distilled_value"
    vals = [getattr(rec, key) for rec in records]
    for label, idx in (("argmax", int(np.argmax(vals))), ("argmin", int(np.argmin(vals)))):
        rec = records[idx]
        print(f"{label} {key}={fmt(vals[idx])} r={fmt(rec.r)} s={fmt(rec.s)} "
              f"lambda={fmt(rec.lam)} n_opt={fmt(rec.n_opt)}")
    return EXIT_OK


# detect ---------------------------------------------------------------------

def cmd_detect(args, fmt: _Fmt) -> int:
    b = _load(args.name, args.input)
    verdicts = pqdetect.detect_all(b, args.max_copies)
    print(json.dumps([fmt.rounded(v.to_json()) for v in verdicts], indent=2))
    if args.assert_postquantum and not any(v.positive for v in verdicts):
        _err("no detector certified the box as post-quantum")
        return EXIT_ASSERT
    return EXIT_OK


# reproduce ------------------------------------------------------------------

def cmd_reproduce(args, fmt: _Fmt) -> int:
    checks = reproduce.run(args.key)
    width = max(len(c.label) for c in checks)
    print(f"{'key':17s} {'check':{width}s} {'observed':>12s} {'expected':>12s} {'tol':>8s} status")
    for c in checks:
        print(f"{c.key:17s} {c.label:{width}s} {fmt(c.observed):>12s} {fmt(c.expected):>12s} "
              f"{format(c.tol, '.0e'):>8s} {'PASS' if c.passed else 'FAIL'}")
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} passed")
    return EXIT_REPRO if failed else EXIT_OK


# parser ---------------------------------------------------------------------

class _Parent(argparse.Action):
    """Collect --name/--input in command-line order."""

    def __call__(self, parser, ns, value, option_string=None):
        items = list(getattr(ns, "parents", None) or [])
        items.append(("name" if option_string == "--name" else "input", value))
        ns.parents = items


def _source(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--name", help="catalog box name")
    g.add_argument("--input", help="behavior JSON file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nldistill", description="No-signaling boxes and OR-AND distillation.")
    ap.add_argument("--full-precision", action="store_true", help="print floats with 17 significant digits")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("box", help="inspect a single box")
    p.add_argument("action", choices=("show", "validate", "decompose", "canonicalize"))
    _source(p)
    p.set_defaults(func=cmd_box)

    p = sub.add_parser("wire", help="wire boxes with OR-AND")
    p.add_argument("--name", action=_Parent, dest="parents", default=[], help="catalog parent (repeatable)")
    p.add_argument("--input", action=_Parent, dest="parents", help="JSON parent (repeatable)")
    p.add_argument("--copies", type=int, default=1)
    p.add_argument("--method", choices=("closed", "chain", "mc"), default="closed")
    p.add_argument("--rounds", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the child behavior JSON here")
    p.set_defaults(func=cmd_wire)

    p = sub.add_parser("sweep", help="grid sweeps written as CSV")
    p.add_argument("--quantity", choices=distill.QUANTITIES, required=True)
    p.add_argument("--r", help="min:max:count or a single value")
    p.add_argument("--s", help="min:max:count or a single value")
    p.add_argument("--lambda", dest="lam", help="min:max:count or a single value")
    p.add_argument("--n", help="min:max:count or a single copy count")
    p.add_argument("--n-around-peak", action="store_true", help="copy counts spanning the CHSH peak")
    p.add_argument("--out", help="CSV path (stdout when omitted)")
    p.add_argument("--workers", type=int, default=None, help="process count (default NLDISTILL_WORKERS or 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("detect", help="post-quantum detector battery")
    _source(p)
    p.add_argument("--max-copies", type=int, default=8)
    p.add_argument("--assert-postquantum", action="store_true")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("reproduce", help="recompute reference values")
    p.add_argument("key", choices=tuple(reproduce.TARGETS) + ("all",))
    p.set_defaults(func=cmd_reproduce)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fmt = _Fmt(args.full_precision)
    try:
        return args.func(args, fmt)
    except InvalidBehavior as e:
        return _report_invalid(e)
    except NotInSimplex as e:
        _err(f"NotInSimplex: {e}")
        return EXIT_INVALID
    except (OSError, SchemaError, UnknownName, GridError, json.JSONDecodeError) as e:
        _err(f"{type(e).__name__}: {e}")
        return EXIT_ARGS
    except (NLDistillError, ValueError) as e:
        _err(f"{type(e).__name__}: {e}")
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
