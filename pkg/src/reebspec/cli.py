"""Command-line front end.

Exit status: 0 on success or PASS, 1 when a verifier reports FAIL, 2 on
usage errors (bad flags, unparsable axes), 3 on I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from decimal import Decimal, InvalidOperation
from typing import Optional, Sequence

from .complexes import kunneth_trials
from .criterion import (closing_evidence, default_family, dirichlet_near_collisions,
                        exact_json, normalized_gap, u_gap, weyl_check)
from .exact import ExactParseError, FieldMismatchError, as_exact, parse_exact
from .fvect import field_by_name
from .selectors import AXIOMS, CH_LATTICE, ECH_LATTICE, SelectorFamily, run_axiom_trials
from .spectrum import EllipsoidParams, spec_plus, window_to_csv, window_to_json

__all__ = ["parse_axes", "AxesError", "main", "run"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class AxesError(ValueError):
    pass


def parse_axes(text: str) -> EllipsoidParams:
    """``"1,2"`` or ``"1,0/1+1/1*sqrt(2)"`` to validated, sorted ellipsoid axes."""
    values = []
    offset = 0
    for token in text.split(","):
        if not token.strip():
            raise AxesError(f"empty axis at position {offset}: {text!r}")
        values.append(parse_exact(token, offset))
        offset += len(token) + 1
    try:
        return EllipsoidParams(tuple(values))
    except FieldMismatchError as exc:
        raise AxesError(f"mixed quadratic fields in {text!r}: {exc}") from None
    except ValueError as exc:
        raise AxesError(f"invalid axes {text!r}: {exc}") from None


def _positive_int(text: str) -> int:
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value != value.to_integral_value() or value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def _nonneg_int(text: str) -> int:
    if text.strip() == "0":
        return 0
    return _positive_int(text)


def _checkpoints(text: str) -> list:
    return [_positive_int(t) for t in text.split(",")]


def _axes_arg(text: str) -> EllipsoidParams:
    try:
        return parse_axes(text)
    except (AxesError, ExactParseError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _exact_arg(text: str):
    try:
        return as_exact(text)
    except (ExactParseError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reebspec",
        description="Exact Reeb action spectra, lattice capacities and closing-gap diagnostics "
                    "for ellipsoid boundaries.")
    sub = parser.add_subparsers(dest="command", required=True)

    def out_flag(p):
        p.add_argument("--out", help="write output to this file instead of stdout")

    p = sub.add_parser("spectrum", help="spec_+ of an ellipsoid boundary up to a cutoff")
    p.add_argument("--axes", type=_axes_arg, required=True,
                   help="comma list of p/q or p/q+r/s*sqrt(d)")
    p.add_argument("--cutoff", type=_exact_arg, required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    out_flag(p)

    p = sub.add_parser("capacities", help="lattice capacities c_0 .. c_K")
    p.add_argument("--axes", type=_axes_arg, required=True)
    p.add_argument("--count", type=_nonneg_int, required=True, help="largest index K")
    p.add_argument("--selector", choices=(ECH_LATTICE, CH_LATTICE), default=None,
                   help="default: ech for two axes, ch otherwise")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    out_flag(p)

    p = sub.add_parser("verify", help="check a selector axiom on seeded random ellipsoids")
    p.add_argument("--axiom", choices=AXIOMS, required=True)
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--count", type=_positive_int, default=50, help="capacity horizon K")
    p.add_argument("--selector", choices=(ECH_LATTICE, CH_LATTICE), default=CH_LATTICE)
    out_flag(p)

    p = sub.add_parser("kunneth-check", help="filtered Kunneth check on random complexes")
    p.add_argument("--random", type=_positive_int, required=True, metavar="N")
    p.add_argument("--max-dim", type=_positive_int, default=6)
    p.add_argument("--field", choices=("Q", "F2"), default="Q")
    p.add_argument("--seed", type=_nonneg_int, default=0)
    out_flag(p)

    p = sub.add_parser("gap", help="u-gap and normalized gap up to a horizon")
    p.add_argument("--axes", type=_axes_arg, required=True)
    p.add_argument("--horizon", type=_positive_int, required=True)
    p.add_argument("--selector", choices=(ECH_LATTICE, CH_LATTICE), default=None)
    out_flag(p)

    p = sub.add_parser("weyl", help="deviation of c_k^2/k from 2 a_1 a_2")
    p.add_argument("--axes", type=_axes_arg, required=True)
    p.add_argument("--checkpoints", type=_checkpoints, default=[1000, 10000, 100000])
    out_flag(p)

    p = sub.add_parser("dirichlet", help="continued-fraction near-collisions q a_2 ~ p a_1")
    p.add_argument("--axes", type=_axes_arg, required=True)
    p.add_argument("--max-q", type=_positive_int, required=True)
    out_flag(p)

    p = sub.add_parser("evidence", help="gap trend, Dirichlet witnesses and Weyl data in one report")
    p.add_argument("--axes", type=_axes_arg, required=True)
    p.add_argument("--horizon", type=_positive_int, required=True)
    p.add_argument("--max-q", type=_positive_int, required=True)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    out_flag(p)
    return parser


def _family(args, a: EllipsoidParams) -> SelectorFamily:
    if getattr(args, "selector", None):
        return SelectorFamily(args.selector)
    return default_family(a)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def run(args: argparse.Namespace) -> tuple[int, str]:
    """Execute a parsed command; return the exit code and the output text."""
    cmd = args.command
    if cmd == "spectrum":
        w = spec_plus(args.axes, args.cutoff)
        text = window_to_csv(w) if args.format == "csv" else _dump(window_to_json(args.axes, w))
        return EXIT_OK, text

    if cmd == "capacities":
        f = _family(args, args.axes)
        table = f.capacities(args.axes, args.count)
        if args.format == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["k", "capacity"])
            for k, c in enumerate(table.values):
                writer.writerow([k, c.decimal(12)])
            return EXIT_OK, buf.getvalue()
        return EXIT_OK, _dump({"axes": args.axes.to_json(), "selector": f.kind,
                               "capacities": [c.to_json() for c in table.values]})

    if cmd == "verify":
        v = run_axiom_trials(args.axiom, args.trials, args.seed, args.count, args.selector)
        doc = {"axiom": v.axiom, "trials": args.trials, "seed": args.seed,
               "passed": v.passed, "failures": v.failures}
        return (EXIT_OK if v.passed else EXIT_FAIL), _dump(doc)

    if cmd == "kunneth-check":
        doc = kunneth_trials(args.random, args.max_dim, field_by_name(args.field), args.seed)
        return (EXIT_OK if doc["passed"] else EXIT_FAIL), _dump(doc)

    if cmd == "gap":
        f = _family(args, args.axes)
        ug = u_gap(f, args.axes, args.horizon)
        report = normalized_gap(f, args.axes, args.horizon)
        doc = {"axes": [str(x) for x in args.axes.axes], "selector": f.kind,
               "u_gap": {"value": exact_json(ug.value), "witnesses": list(ug.witnesses)},
               "normalized_gap": report.to_json()}
        return EXIT_OK, _dump(doc)

    if cmd == "weyl":
        f = SelectorFamily(ECH_LATTICE)
        doc = weyl_check(f, args.axes, args.checkpoints).to_json()
        return EXIT_OK, _dump(doc)

    if cmd == "dirichlet":
        wit = dirichlet_near_collisions(args.axes, args.max_q)
        doc = {"ratio": str(args.axes.axes[1] / args.axes.axes[0]), "max_q": args.max_q,
               "witnesses": [w.to_json() for w in wit],
               "guarantee_met": any(w.within_q_bound for w in wit)}
        return EXIT_OK, _dump(doc)

    if cmd == "evidence":
        doc = closing_evidence(args.axes, args.horizon, args.max_q, seed=args.seed)
        return EXIT_OK, _dump(doc)

    raise AssertionError(f"unhandled command {cmd}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code, text = run(args)
    except ValueError as exc:
        print(f"reebspec {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"reebspec: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
