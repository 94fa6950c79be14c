"""ratkon command line: verify identities, expand elements, integrate, hair, contract."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import codec
from .diagrams import hair
from .errors import RatkonError
from .gaussian import complete_contraction, hair_nu, integrate
from .localization import as_loc, magnus_expand
from .series import format_series
from .verify import CHECKS, run_verify

NU_MARKER = "nu: placeholder nu = 1 (not computed)"


def _verify(args) -> int:
    flags = {"g": args.g, "degree": args.degree, "seed": args.seed, "cases": args.cases, "site": args.site}
    if args.matrix is not None:
        flags["matrix"] = codec.matrix_from_json(args.matrix, args.g)
    report = run_verify(args.identity, **flags)
    print(report.line())
    return 0 if report.passed else 1


def _expand(args) -> int:
    e = codec.parse_element(args.expr, args.g)
    print(format_series(magnus_expand(as_loc(e, e.g), args.degree)))
    return 0


def _emit(s, as_text: bool) -> None:
    if as_text:
        print(s.describe())
    else:
        print(codec.dump(codec.sum_to_json(s)))


def _integrate(args) -> int:
    I = codec.integrand_from_json(codec.load(args.file))
    _emit(integrate(I), args.text)
    return 0


def _hair(args) -> int:
    s = codec.sum_from_json(codec.load(args.file), args.g)
    if args.matrix is None:
        _emit(hair(s, args.degree), args.text)
        return 0
    M = codec.matrix_from_json(args.matrix, args.g)
    out = hair_nu(M, s, None, args.degree, args.g)
    if args.text:
        print(NU_MARKER)
        print(out.describe())
    else:
        doc = codec.sum_to_json(out)
        doc["meta"] = {"nu": "placeholder", "note": NU_MARKER}
        print(codec.dump(doc))
    return 0


def _contract(args) -> int:
    spec = codec.clasper_from_json(codec.load(args.file))
    _emit(complete_contraction(spec), args.text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ratkon", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run one identity check")
    v.add_argument("identity", choices=sorted(CHECKS))
    v.add_argument("--g", type=int)
    v.add_argument("--degree", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--cases", type=int)
    v.add_argument("--site", type=int)
    v.add_argument("--matrix", help='matrix such as "[t1]" or "[[2 - t1, 0], [0, 1]]" (wheels only)')
    v.set_defaults(run=_verify)

    e = sub.add_parser("expand", help="Magnus expansion of a ring or localized expression")
    e.add_argument("expr")
    e.add_argument("--degree", type=int, default=4)
    e.add_argument("--g", type=int)
    e.set_defaults(run=_expand)

    for name, fn, helptext in (
        ("integrate", _integrate, "integrate an integrand file"),
        ("hair", _hair, "hair expansion of a diagram-sum file"),
        ("contract", _contract, "complete contraction of a clasper spec file"),
    ):
        c = sub.add_parser(name, help=helptext)
        c.add_argument("file")
        c.add_argument("--text", action="store_true", help="print a readable listing instead of JSON")
        if name == "hair":
            c.add_argument("--degree", type=int, default=3)
            c.add_argument("--g", type=int)
            c.add_argument("--matrix", help="also apply the wheels factor of this matrix (nu = 1)")
        c.set_defaults(run=fn)
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as stop:
        # argparse exits 2 on usage errors; the tool promises 0 or 1
        return 0 if stop.code in (0, None) else 1
    try:
        return args.run(args)
    except (RatkonError, KeyError, OSError, json.JSONDecodeError) as err:
        print(f"ratkon: error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
