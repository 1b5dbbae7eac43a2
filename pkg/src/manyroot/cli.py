"""``manyroot`` command line.

Exit codes: 0 success, 1 a checked property or protocol step failed,
2 usage or validation error, 3 scale guard exceeded.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .analysis import check_properties, sweep, sweep_params
from .errors import ManyRootError, ParamsRejected, ScaleGuardError, ScenarioError
from .protocol import Scenario, simulate, transcript_lines
from .tagcodec import TaggedCipher, tag_encode, verify_tagged
from .transform import (
    cipher_map_csv,
    encrypt,
    make_params,
    root_classes_csv,
    roots_bruteforce,
    roots_crt,
    table_cipher_map,
    table_root_classes,
    tables_json,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SCALE = 0, 1, 2, 3
SWEEP_PRIME_GUARD = 50


class UsageError(Exception):
    pass


def _emit(obj):
    print(json.dumps(obj, separators=(",", ":")))


def _write(path, text):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, newline="\n")


def _params(args):
    return make_params(args.p, args.q, args.x)


def cmd_paramgen(args) -> int:
    if args.p is not None or args.q is not None or args.x is not None:
        if None in (args.p, args.q, args.x):
            raise UsageError("give all of --p, --q, --x or none of them")
        _emit(_params(args).to_dict())
        return EXIT_OK
    pool = [ps for ps in sweep_params(args.max_prime) if ps.paper_regime]
    if not pool:
        raise UsageError(f"no regime parameters with primes <= {args.max_prime}")
    _emit(random.Random(args.seed).choice(pool).to_dict())
    return EXIT_OK


def cmd_encrypt(args) -> int:
    params = _params(args)
    _emit({"m": args.m, "c": encrypt(args.m, params), "n": params.n, "x": params.x})
    return EXIT_OK


def cmd_roots(args) -> int:
    params = _params(args)
    find = roots_bruteforce if args.method == "bruteforce" else roots_crt
    rc = find(args.c, params)
    _emit({"c": rc.cipher, "roots": list(rc.roots), "count": len(rc.roots),
           "unity_factors": list(rc.unity_factors)})
    return EXIT_OK


def cmd_tag(args) -> int:
    params = _params(args)
    c = encrypt(args.m, params) if args.c is None else args.c
    print(tag_encode(args.m, c, params.p).to_json())
    return EXIT_OK


def cmd_untag(args) -> int:
    params = _params(args)
    verdict = verify_tagged(TaggedCipher(args.c, args.t), params)
    _emit({"c": args.c, "t": args.t, "accepted": verdict.accepted, "m": verdict.root,
           "reason": verdict.reason})
    return EXIT_OK if verdict.accepted else EXIT_FAIL


def cmd_check(args) -> int:
    params = _params(args)
    try:
        props = sorted({int(k) for k in args.properties.split(",")})
    except ValueError:
        raise UsageError(f"bad --properties {args.properties!r}") from None
    if not props or not set(props) <= {1, 2, 3}:
        raise UsageError("--properties must be a subset of 1,2,3")
    report = check_properties(params, props, include_sub=args.include_sub)
    _write(args.report, json.dumps(report, indent=1) + "\n")
    return EXIT_OK if report["holds"] else EXIT_FAIL


def cmd_tables(args) -> int:
    params = _params(args)
    rows = table_cipher_map(params)
    classes = table_root_classes(params)
    if args.format == "json":
        text = {"tables.json": json.dumps(tables_json(rows, classes), separators=(",", ":")) + "\n"}
    else:
        text = {"cipher_map.csv": cipher_map_csv(rows), "root_classes.csv": root_classes_csv(classes)}
    if args.out is None:
        sys.stdout.write("\n".join(text.values()))
    else:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, body in text.items():
            (out / name).write_text(body, newline="\n")
    if args.figure:
        from .plots import plot_tables

        plot_tables(params, rows, classes, args.figure)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.max_prime > SWEEP_PRIME_GUARD and not args.force:
        raise ScaleGuardError(f"--max-prime {args.max_prime} > {SWEEP_PRIME_GUARD}; pass --force")
    report = sweep(args.max_prime, args.max_x or None)
    _write(args.report, json.dumps(report, indent=1) + "\n")
    if args.figure:
        from .plots import plot_sweep

        plot_sweep(report, args.figure)
    print(json.dumps(report["summary"]), file=sys.stderr)
    return EXIT_OK if report["laws_hold"] else EXIT_FAIL


def cmd_simulate(args) -> int:
    try:
        scenario = Scenario.from_json(Path(args.scenario).read_text())
    except OSError as exc:
        raise UsageError(str(exc)) from None
    events, failures = simulate(scenario)
    _write(args.out, transcript_lines(events))
    if args.figure:
        from .plots import plot_transcript

        plot_transcript(events, args.figure)
    if failures:
        print(f"unexpected failures at steps {failures}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _add_params(sp, required=True):
    sp.add_argument("--p", type=int, required=required)
    sp.add_argument("--q", type=int, required=required)
    sp.add_argument("--x", type=int, required=required)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="manyroot", description="Many-to-one power map toolkit and protocol simulator."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("paramgen", help="validate (p, q, x) or pick a regime set (x prime, x | q-1, x = 1 mod p-1)")
    _add_params(sp, required=False)
    sp.add_argument("--max-prime", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_paramgen)

    sp = sub.add_parser("encrypt", help="c = m^x mod n")
    _add_params(sp)
    sp.add_argument("--m", type=int, required=True)
    sp.set_defaults(func=cmd_encrypt)

    sp = sub.add_parser("roots", help="all roots of a cipher")
    _add_params(sp)
    sp.add_argument("--c", type=int, required=True)
    sp.add_argument("--method", choices=("crt", "bruteforce"), default="crt")
    sp.set_defaults(func=cmd_roots)

    sp = sub.add_parser("tag", help="tag a root for transmission")
    _add_params(sp)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--c", type=int, help="cipher (default: encrypt(m))")
    sp.set_defaults(func=cmd_tag)

    sp = sub.add_parser("untag", help="decode and verify a tagged cipher")
    _add_params(sp)
    sp.add_argument("--c", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.set_defaults(func=cmd_untag)

    sp = sub.add_parser("check", help="check root-class properties 1-3")
    _add_params(sp)
    sp.add_argument("--properties", default="1,2,3")
    sp.add_argument("--include-sub", action="store_true",
                    help="also check properties 2 and 3 on unit classes without exactly x roots")
    sp.add_argument("--report", help="write the JSON report here instead of stdout")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("tables", help="cipher map and root-class tables")
    _add_params(sp)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", help="directory to write table files into (default stdout)")
    sp.add_argument("--figure", help="also render a PNG figure to this path")
    sp.set_defaults(func=cmd_tables)

    sp = sub.add_parser("sweep", help="check all laws over small parameter sets")
    sp.add_argument("--max-prime", type=int, default=11)
    sp.add_argument("--max-x", type=int, default=25, help="0 for no limit")
    sp.add_argument("--force", action="store_true", help=f"allow --max-prime > {SWEEP_PRIME_GUARD}")
    sp.add_argument("--report", help="write the JSON report here instead of stdout")
    sp.add_argument("--figure", help="also render a PNG figure to this path")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("simulate", help="run a protocol scenario")
    sp.add_argument("scenario")
    sp.add_argument("--out", help="transcript path (JSON lines, default stdout)")
    sp.add_argument("--figure", help="also render a swimlane PNG to this path")
    sp.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ScaleGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCALE
    except (UsageError, ParamsRejected, ScenarioError, ManyRootError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
