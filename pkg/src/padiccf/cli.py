"""Command-line front end.

Exit codes: 0 success, 1 bad input, 2 expansion hit ``--max-steps``,
3 root precision cap exceeded, 4 a verification check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .cf_engine import DEFAULT_MAX_STEPS, AlgorithmKind, Status, expand
from .padic_core import check_prime
from .quad_field import DEFAULT_PRECISION_CAP, NoSquareRoot, PrecisionError, QuadInt
from .theory import conjecture_scan, family_instances, verify_family
from .verify import run_suite

EXIT_OK, EXIT_INPUT, EXIT_CAPPED, EXIT_PRECISION, EXIT_CHECK = 0, 1, 2, 3, 4


class InputError(ValueError):
    pass


def _prime(text: str) -> int:
    try:
        return check_prime(int(text))
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"-p: {exc}") from None


def _algorithm(text: str) -> AlgorithmKind:
    try:
        return AlgorithmKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--algorithm: {exc}") from None


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"--config: {exc}") from None
    if not isinstance(data, dict):
        raise InputError("--config: expected a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser, argv) -> None:
    """Fill options from ``--config`` unless they were given on the command line."""
    if not getattr(args, "config", None):
        return
    conf = _load_config(args.config)
    given = {a.split("=")[0] for a in argv if a.startswith("-")}
    sub = parser._subparsers._group_actions[0].choices[args.command]
    for action in sub._actions:
        key = action.dest
        if key not in conf or any(opt in given for opt in action.option_strings):
            continue
        val = conf[key]
        if action.type is not None and val is not None:
            try:
                val = action.type(str(val))
            except argparse.ArgumentTypeError as exc:
                raise InputError(f"--config: {exc}") from None
        setattr(args, key, val)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="padiccf", description="p-adic continued fractions (Browkin I, II, II*)")
    subs = ap.add_subparsers(dest="command", required=True)

    ex = subs.add_parser("expand", help="expand one rational or quadratic irrational")
    ex.add_argument("input", nargs="?", help="'a/c' or '(a+b*sqrt(D))/c'")
    ex.add_argument("-p", "--prime", type=_prime)
    ex.add_argument("-a", "--algorithm", type=_algorithm, default=AlgorithmKind.BROWKIN_II)
    ex.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    ex.add_argument("--precision-cap", type=int, default=DEFAULT_PRECISION_CAP)
    ex.add_argument("--branch", choices=("plus", "minus"), default="plus",
                    help="which p-adic root sqrt(D) denotes")
    ex.add_argument("--format", choices=("json", "csv", "text"), default="json")
    ex.add_argument("--config", help="JSON file whose keys mirror the flags")

    fa = subs.add_parser("family", help="check the period-4 square-root family")
    fa.add_argument("-p", "--prime", type=_prime)
    fa.add_argument("--t-max", type=int, default=12)
    fa.add_argument("--branch", choices=("plus", "minus", "both"), default="both")
    fa.add_argument("--format", choices=("json", "csv", "text"), default="text")
    fa.add_argument("--config")

    sc = subs.add_parser("scan", help="expand sqrt(D) over a range of D")
    sc.add_argument("-p", "--prime", type=_prime)
    sc.add_argument("--d-min", type=int, default=2)
    sc.add_argument("--d-max", type=int, default=500)
    sc.add_argument("-a", "--algorithm", type=_algorithm, default=AlgorithmKind.BROWKIN_II)
    sc.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    sc.add_argument("--jobs", type=int, default=1)
    sc.add_argument("--format", choices=("csv", "json"), default="csv",
                    help="csv prints rows on stdout and the summary on stderr")
    sc.add_argument("-o", "--output", help="write rows here instead of stdout")
    sc.add_argument("--config")

    ve = subs.add_parser("verify", help="run a named check suite")
    ve.add_argument("suite", choices=("lemmas", "galois", "parity", "family", "oracle", "all"))
    return ap


def _expansion_csv(e) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    d = e.to_dict()
    w.writerow(["p", "algorithm", "input", "status", "h", "k", "steps_used",
                "preperiod", "period", "sign_branch_indices"])
    w.writerow([d["p"], d["algorithm"], str(e.input), d["status"],
                "" if d["h"] is None else d["h"], "" if d["k"] is None else d["k"], d["steps_used"],
                " ".join(d["preperiod"]), " ".join(d["period"]),
                " ".join(map(str, d["sign_branch_indices"]))])
    return buf.getvalue()


def cmd_expand(args, out, err) -> int:
    if args.input is None:
        raise InputError("input: missing value to expand")
    if args.prime is None:
        raise InputError("-p/--prime: required")
    if args.max_steps < 1:
        raise InputError("--max-steps: must be at least 1")
    branch = 1 if args.branch == "plus" else -1
    try:
        x = QuadInt.parse(args.input, branch=branch)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"input: {exc}") from None
    try:
        e = expand(x, args.algorithm, args.prime, max_steps=args.max_steps, cap=args.precision_cap)
    except NoSquareRoot as exc:
        raise InputError(f"input: {exc}") from None
    except PrecisionError as exc:
        print(f"precision: {exc}", file=err)
        return EXIT_PRECISION
    except ValueError as exc:
        raise InputError(f"input: {exc}") from None
    if args.format == "json":
        print(e.to_json(indent=2), file=out)
    elif args.format == "csv":
        out.write(_expansion_csv(e))
    else:
        print(e.to_text(), file=out)
    return EXIT_CAPPED if e.status is Status.CAPPED else EXIT_OK


def cmd_family(args, out, err) -> int:
    if args.prime is None:
        raise InputError("-p/--prime: required")
    branches = {"plus": (1,), "minus": (-1,), "both": (1, -1)}[args.branch]
    rows = []
    for inst in family_instances(args.prime, args.t_max, branches):
        v = verify_family(inst)
        rows.append({
            "p": inst.p, "t": inst.t, "D": inst.D, "branch": "plus" if inst.branch > 0 else "minus",
            "expected": [str(q) for q in inst.expected],
            "verified": v.ok, "h": v.expansion.h, "k": v.expansion.k,
            "diff": list(v.diff),
        })
    if args.format == "json":
        print(json.dumps(rows, indent=2), file=out)
    elif args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["p", "t", "D", "branch", "verified", "h", "k"])
        for r in rows:
            w.writerow([r["p"], r["t"], r["D"], r["branch"], r["verified"],
                        "" if r["h"] is None else r["h"], "" if r["k"] is None else r["k"]])
    else:
        if not rows:
            print(f"no integral instances for p={args.prime}, t<={args.t_max}", file=out)
        for r in rows:
            tag = "ok" if r["verified"] else "MISMATCH " + "; ".join(r["diff"][:2])
            print(f"p={r['p']} t={r['t']} D={r['D']} {r['branch']}: {tag}", file=out)
    return EXIT_OK if all(r["verified"] for r in rows) else EXIT_CHECK


def cmd_scan(args, out, err) -> int:
    if args.prime is None:
        raise InputError("-p/--prime: required")
    if args.d_min > args.d_max:
        raise InputError("--d-min: must not exceed --d-max")
    if args.jobs < 1:
        raise InputError("--jobs: must be at least 1")
    try:
        res = conjecture_scan(args.prime, args.d_min, args.d_max, args.algorithm,
                              max_steps=args.max_steps, jobs=args.jobs)
    except ValueError as exc:
        raise InputError(f"--algorithm: {exc}") from None
    if args.format == "csv":
        body = res.to_csv()
        summary_to = err
    else:
        body = json.dumps({"summary": res.summary(), "rows": [r.as_dict() for r in res.rows]}, indent=2) + "\n"
        summary_to = None
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(body)
    else:
        out.write(body)
    if summary_to is not None:
        print(res.summary_json(), file=summary_to)
    return EXIT_OK


def cmd_verify(args, out, err) -> int:
    results = run_suite(args.suite)
    for r in results:
        print(r.line(), file=out)
        for f in r.failures[1:6]:
            print(f"    {f}", file=out)
    return EXIT_OK if all(r.ok for r in results) else EXIT_CHECK


COMMANDS = {"expand": cmd_expand, "family": cmd_family, "scan": cmd_scan, "verify": cmd_verify}


def main(argv=None, out=None, err=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        _apply_config(args, parser, argv)
        return COMMANDS[args.command](args, out, err)
    except InputError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
