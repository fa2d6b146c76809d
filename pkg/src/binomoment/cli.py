"""Command-line front end.

Subcommands expose the library: moment tables, generating-series dumps,
density tables, positive-definiteness classification, Mellin
factorization and sampling, the convolution identity suite, moment
certification, negativity witnesses, and figure-data emission.

Exit codes: 0 success, 1 domain or region errors (including usage), 2
verification failure, 3 inconclusive witness search.  Exact values print
as integers or fractions, floats with 17 significant digits, so output
is byte-identical across platforms for a fixed argument vector.
"""
from __future__ import annotations

import argparse
import csv
import importlib.resources
import json
import re
import sys
from typing import Callable, Optional, Sequence, Tuple

from .closedform import closed_form_for, eval_closed
from .core import (
    DomainError,
    Params,
    RegionError,
    classify_binomial,
    classify_raney,
    gen_binomial,
    is_exact,
    parse_scalar,
    raney_number,
    support_endpoint,
)
from .freeconv import identity_suite
from .mellin import factorize, sample
from .series import binomial_series
from .slater import build_slater_expansion, eval_density
from .verify import InconclusiveWitnessError, certify_measure, find_negativity_witness

__all__ = ["main"]

_NEG_TOL = 1e-9


def _fmt(x) -> str:
    if is_exact(x):
        return str(x)
    return f"{float(x):.17g}"


def _fmt_float(x: float) -> str:
    return f"{float(x):.17g}"


# -- evaluation helpers --------------------------------------------------------


def _density_evaluator(params: Params) -> Tuple[Callable[[float], float], float]:
    """Evaluator for the density function at (p, r) plus its support endpoint.

    Uses the elementary form when one covers the pair and the
    hypergeometric expansion otherwise.  Works for any r at rational
    p > 1; outside the positive-definite region the function takes
    negative values but is still well defined.
    """
    cid = closed_form_for(params)
    if cid is not None:
        return (lambda x: eval_closed(cid, x)), float(support_endpoint(params.p))
    expansion = build_slater_expansion(params)
    return (lambda x: eval_density(expansion, x)), expansion.domain_upper


def _curve_has_negative(evaluate: Callable[[float], float], upper: float,
                        values: Sequence[float]) -> bool:
    # grid minimum plus a log sweep toward zero, where out-of-region
    # negativity tends to hide
    if min(values) < -_NEG_TOL:
        return True
    for j in range(1, 13):
        if evaluate(upper * 10.0 ** (-j)) < -_NEG_TOL:
            return True
    return False


# -- subcommand handlers -------------------------------------------------------


def _cmd_moments(args) -> int:
    if args.n < 0:
        raise DomainError("need --n >= 0")
    number = raney_number if args.raney else gen_binomial
    values = [number(args.p, args.r, n) for n in range(args.n + 1)]
    print(" ".join(_fmt(v) for v in values))
    return 0


def _cmd_series(args) -> int:
    if args.order < 0:
        raise DomainError("need --order >= 0")
    ts = binomial_series(args.p, args.r, args.order)
    if args.json:
        print(json.dumps(ts.to_json_dict()))
    else:
        print(" ".join(_fmt(c) for c in ts.coeffs))
    return 0


def _cmd_density(args) -> int:
    evaluate, upper = _density_evaluator(Params(args.p, args.r))
    if args.x is not None:
        print(_fmt_float(evaluate(float(args.x))))
        return 0
    a, b, count = args.grid
    if not 0.0 < a <= b < upper:
        raise DomainError(f"grid must lie inside (0, {upper})")
    for i in range(count):
        x = a + (b - a) * i / (count - 1) if count > 1 else a
        print(f"{_fmt_float(x)} {_fmt_float(evaluate(x))}")
    return 0


def _cmd_classify(args) -> int:
    classify = classify_binomial if args.family == "binomial" else classify_raney
    verdict = classify(args.p, args.r)
    status = "positive definite" if verdict.positive_definite else "NOT positive definite"
    print(f"{status} ({verdict.branch.value})")
    return 0


def _cmd_factorize(args) -> int:
    fact = factorize(Params(args.p, args.r))
    for factor in fact.factors:
        print(f"factor {_fmt_float(factor.u)} {_fmt_float(factor.v)} {factor.l}")
    print(f"dilation {_fmt_float(float(fact.dilation))}")
    return 0


def _cmd_sample(args) -> int:
    if args.count < 1:
        raise DomainError("need --count >= 1")
    fact = factorize(Params(args.p, args.r))
    draws = sample(fact, args.count, args.seed)
    if args.binary:
        sys.stdout.buffer.write(draws.astype("<f8").tobytes())
        sys.stdout.buffer.flush()
    else:
        sys.stdout.write("\n".join(_fmt_float(v) for v in draws) + "\n")
    return 0


def _cmd_conv_verify(args) -> int:
    checks = identity_suite()
    if args.id is not None:
        chosen = [c for c in checks if c.name == args.id]
        if not chosen:
            known = ", ".join(c.name for c in checks)
            raise DomainError(f"unknown identity id {args.id!r}; known ids: {known}")
        checks = chosen
    all_pass = True
    for check in checks:
        passed = check.run()
        all_pass &= passed
        print(f"{check.name} {'PASS' if passed else 'FAIL'}")
    return 0 if all_pass else 2


def _cmd_certify(args) -> int:
    report = certify_measure(Params(args.p, args.r), args.nmax)
    print(json.dumps(report, indent=2))
    return 0 if report["passed"] else 2


def _cmd_witness(args) -> int:
    w = find_negativity_witness(Params(args.p, args.r))
    loc = str(w.location) if isinstance(w.location, int) else _fmt_float(w.location)
    print(f"{w.kind} location={loc} value={_fmt_float(w.value)}")
    return 0


def _load_figure_config(path: Optional[str]) -> dict:
    if path is not None:
        with open(path) as fh:
            return json.load(fh)
    text = importlib.resources.files("binomoment").joinpath("figures.json").read_text()
    return json.loads(text)


def _emit_raster(cfg: dict, writer) -> None:
    p_min, p_max = parse_scalar(cfg["p_min"]), parse_scalar(cfg["p_max"])
    r_min, r_max = parse_scalar(cfg["r_min"]), parse_scalar(cfg["r_max"])
    step = parse_scalar(cfg["step"])
    if not step > 0:
        raise DomainError("raster step must be positive")
    writer.writerow(["p", "r", "verdict"])
    p_count = int((p_max - p_min) / step) + 1
    r_count = int((r_max - r_min) / step) + 1
    for i in range(p_count):
        p = p_min + i * step
        for j in range(r_count):
            r = r_min + j * step
            verdict = classify_binomial(p, r)
            writer.writerow([f"{float(p):g}", f"{float(r):g}", verdict.branch.value])


def _emit_curves(cfg: dict, writer) -> None:
    points = int(cfg.get("points", 200))
    if points < 2:
        raise DomainError("curve grids need at least 2 points")
    writer.writerow(["p", "r", "x", "V", "has_negative"])
    for p_text, r_text in cfg["pairs"]:
        params = Params(parse_scalar(p_text), parse_scalar(r_text))
        evaluate, upper = _density_evaluator(params)
        xs = [upper * i / (points + 1) for i in range(1, points + 1)]
        values = [evaluate(x) for x in xs]
        flag = 1 if _curve_has_negative(evaluate, upper, values) else 0
        for x, v in zip(xs, values):
            writer.writerow([p_text, r_text, _fmt_float(x), _fmt_float(v), flag])


def _cmd_figure(args) -> int:
    config = _load_figure_config(args.params)
    key = str(args.id)
    if key not in config:
        raise DomainError(f"no figure with id {args.id}; known ids: {sorted(config)}")
    cfg = config[key]
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if cfg.get("kind") == "raster":
            _emit_raster(cfg, writer)
        else:
            _emit_curves(cfg, writer)
    return 0


# -- parser --------------------------------------------------------------------


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; route usage problems to
    # exit code 1 instead, keeping 2 for verification failures
    def __init__(self, *a, **kw):
        super().__init__(*a, **kw)
        # let values like -1/2 pass as arguments, not unknown options
        self._negative_number_matcher = re.compile(
            r"^-(\d+(/\d+)?|\d*\.\d+([eE][+-]?\d+)?|\d+[eE][+-]?\d+)$"
        )

    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


_SCALAR_HELP = (
    "integers, fractions like 7/2, and decimals; decimals with at most "
    "6 fractional digits parse as exact rationals, longer ones as floats"
)


def _grid_spec(text: str) -> Tuple[float, float, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError("grid must be a,b,count")
    a, b = float(parse_scalar(parts[0])), float(parse_scalar(parts[1]))
    count = int(parts[2])
    if count < 1:
        raise ValueError("grid count must be >= 1")
    return a, b, count


def _add_pr(sub, r_required: bool = True):
    sub.add_argument("--p", type=parse_scalar, required=True,
                     help=f"first parameter; accepts {_SCALAR_HELP}")
    sub.add_argument("--r", type=parse_scalar, required=r_required,
                     help="second parameter; same syntax as --p")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="binomoment",
        description="Measures with generalized binomial and Raney moments.",
        epilog=f"Scalar flags accept {_SCALAR_HELP}.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("moments", help="print the moment sequence up to n")
    _add_pr(sp)
    sp.add_argument("--n", type=int, required=True, help="largest moment index")
    sp.add_argument("--raney", action="store_true",
                    help="Raney sequence instead of the binomial one")
    sp.set_defaults(handler=_cmd_moments)

    sp = sub.add_parser("series", help="dump generating-series coefficients")
    _add_pr(sp)
    sp.add_argument("--order", type=int, required=True, help="truncation order")
    sp.add_argument("--json", action="store_true", help="emit the JSON schema")
    sp.set_defaults(handler=_cmd_series)

    sp = sub.add_parser("density", help="evaluate the density function")
    _add_pr(sp)
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--x", type=parse_scalar, help="single abscissa")
    group.add_argument("--grid", type=_grid_spec, metavar="A,B,COUNT",
                       help="evenly spaced abscissae from A to B")
    sp.set_defaults(handler=_cmd_density)

    sp = sub.add_parser("classify", help="positive-definiteness verdict")
    _add_pr(sp)
    sp.add_argument("--family", choices=("binomial", "raney"), required=True)
    sp.set_defaults(handler=_cmd_classify)

    sp = sub.add_parser("factorize", help="Mellin beta factorization")
    _add_pr(sp)
    sp.set_defaults(handler=_cmd_factorize)

    sp = sub.add_parser("sample", help="draw samples of the measure")
    _add_pr(sp)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--binary", action="store_true",
                    help="raw little-endian float64 to stdout")
    sp.set_defaults(handler=_cmd_sample)

    sp = sub.add_parser("conv-verify", help="run the convolution identity suite")
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--all", action="store_true",
                       help="run every identity (the default)")
    group.add_argument("--id", help="run a single identity by name")
    sp.set_defaults(handler=_cmd_conv_verify)

    sp = sub.add_parser("certify", help="certify moments against the density")
    _add_pr(sp)
    sp.add_argument("--nmax", type=int, required=True)
    sp.set_defaults(handler=_cmd_certify)

    sp = sub.add_parser("witness", help="search for a negativity certificate")
    _add_pr(sp)
    sp.set_defaults(handler=_cmd_witness)

    sp = sub.add_parser("figure", help="emit figure data as CSV")
    sp.add_argument("--id", type=int, required=True, help="figure number")
    sp.add_argument("--out", required=True, help="output CSV path")
    sp.add_argument("--params", help="JSON config overriding the bundled one")
    sp.set_defaults(handler=_cmd_figure)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, RegionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InconclusiveWitnessError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
