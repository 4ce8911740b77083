"""Command-line front end: exact values, Monte Carlo verification, tables.

Exit codes: 0 success (or a consistent verification), 1 inconsistent
verification, 2 invalid parameters, 3 inconclusive verification.
Data goes to stdout (or ``--out``); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from decimal import Decimal, InvalidOperation
from fractions import Fraction

from . import closed_forms as cf
from . import discrepancies as disc
from .domains import DomainSpec
from .exact import ExactValue, NotRepresentable, PoleError, as_rational
from .montecarlo import (
    DimensionTooLarge,
    mc_integral,
    mc_volume,
    verify,
    volume_family,
)
from .oracles import (
    anti_hermitian_n1_oracle,
    column_product_oracle,
    rIV_reduced_oracle,
    spectral_oracle,
)

EXIT_OK, EXIT_INCONSISTENT, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3
VERDICT_EXIT = {"consistent": EXIT_OK, "inconsistent": EXIT_INCONSISTENT, "inconclusive": EXIT_INCONCLUSIVE}

DOMAINS = ("RI", "RII", "RIII", "SYM", "RIV")
FAMILIES = {
    "J": "J_rect",
    "K": "K_rect",
    "H": "H_herm",
    "I": "I_herm",
    "JSYM": "J_sym",
    "KANTI": "K_anti",
    "L": "L_four",
}
TAG_NAME = {v: k for k, v in FAMILIES.items()}
CSV_HEADER = ["family", "m", "n", "params", "exact", "decimal", "variant", "oracle_status"]
TABLE_MAX_M = 4
TABLE_MAX_N = 4
ORACLE_RTOL = 1e-6


class UsageError(Exception):
    pass


def parse_samples(s: str) -> int:
    try:
        d = Decimal(s)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}")
    if d != d.to_integral_value() or d < 0:
        raise argparse.ArgumentTypeError(f"sample count must be a non-negative integer, got {s!r}")
    return int(d)


def parse_rational(s: str) -> Fraction:
    try:
        return as_rational(s)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _default_seed() -> int:
    env = os.environ.get("QUATDOM_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"QUATDOM_SEED must be an integer, got {env!r}")


def _positive_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default: $QUATDOM_SEED or 0)")
    common.add_argument("--samples", type=parse_samples, default=10**6, help="Monte Carlo samples, e.g. 1e7 (0 skips sampling where optional)")
    common.add_argument("--workers", type=_positive_int, default=1)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--out", default=None, help="write output to this path instead of stdout")
    common.add_argument("--precision", type=_positive_int, default=12, help="significant digits")

    shape = argparse.ArgumentParser(add_help=False)
    shape.add_argument("--m", type=_positive_int, default=None)
    shape.add_argument("--n", type=_positive_int, default=None)

    exps = argparse.ArgumentParser(add_help=False)
    exps.add_argument("--lambda", dest="lam", type=parse_rational, default=None)
    exps.add_argument("--alpha", type=parse_rational, default=None)
    exps.add_argument("--beta", type=parse_rational, default=None)

    p = argparse.ArgumentParser(prog="quatdom", description="Integrals over quaternionic classical domains.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("volume", parents=[common, shape], help="exact volume of a domain")
    v.add_argument("--domain", choices=DOMAINS, required=True)
    v.add_argument("--exact", action="store_true", help="print only the exact value")

    i = sub.add_parser("integral", parents=[common, shape, exps], help="exact closed-form integral")
    i.add_argument("--family", choices=tuple(FAMILIES), required=True)
    i.add_argument("--exact", action="store_true", help="print only the exact value(s)")

    ver = sub.add_parser("verify", parents=[common, shape, exps], help="Monte Carlo check of a closed form")
    g = ver.add_mutually_exclusive_group(required=True)
    g.add_argument("--family", choices=tuple(FAMILIES))
    g.add_argument("--domain", choices=DOMAINS)

    t = sub.add_parser("table", parents=[common], help="table of closed forms for small shapes")
    t.add_argument("--max-m", type=_positive_int, default=2)
    t.add_argument("--max-n", type=_positive_int, default=2)

    sub.add_parser("discrepancies", parents=[common], help="oracle verdicts on the printed formulas")
    return p


# helpers ------------------------------------------------------------------------


def _domain(args) -> DomainSpec:
    if args.n is None:
        raise UsageError("--n is required")
    if args.domain == "RI":
        if args.m is None:
            raise UsageError("RI needs --m and --n")
        return DomainSpec("RI", n=args.n, m=args.m)
    if args.m not in (None, 1):
        raise UsageError(f"{args.domain} takes only --n")
    return DomainSpec(args.domain, n=args.n)


def _family(args) -> cf.FormulaFamily:
    tag = FAMILIES[args.family]
    if args.n is None:
        raise UsageError("--n is required")
    m = args.m if args.m is not None else 1
    if tag not in ("J_rect", "K_rect") and args.m not in (None, 1):
        raise UsageError(f"{args.family} takes only --n")
    uses = {
        "J_rect": ("lam",),
        "K_rect": ("alpha",),
        "H_herm": ("alpha",),
        "I_herm": ("lam",),
        "J_sym": ("lam",),
        "K_anti": ("lam",),
        "L_four": ("alpha", "beta"),
    }[tag]
    flag = {"lam": "--lambda", "alpha": "--alpha", "beta": "--beta"}
    kw = {}
    for name in ("lam", "alpha", "beta"):
        val = getattr(args, name)
        if name in uses:
            if val is None and tag in ("K_rect", "H_herm"):
                raise UsageError(f"{args.family} needs {flag[name]}")
            kw[name] = val if val is not None else Fraction(0)
        elif val is not None:
            raise UsageError(f"{args.family} does not take {flag[name]}")
    return cf.FormulaFamily(tag, n=args.n, m=m, **kw)


def _num(v: ExactValue, precision: int) -> float:
    return float(v.decimal(precision))


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r[k] for k in CSV_HEADER])
    return buf.getvalue()


def _params_str(params: dict) -> str:
    names = {"lam": "lambda", "alpha": "alpha", "beta": "beta"}
    return ";".join(f"{names[k]}={v}" for k, v in params.items() if k in names)


# oracle status for table rows ------------------------------------------------------


def oracle_status(f: cf.FormulaFamily, value: ExactValue) -> str:
    """Compare ``value`` with the cheapest independent oracle for ``f``."""
    try:
        exact = spectral_oracle(f)
        if exact is not None:
            return "agrees(spectral)" if exact == value else "differs(spectral)"
        ref = None
        if f.tag == "J_rect":
            ref, how = column_product_oracle(f.m, f.n, f.lam).value, "quadrature"
        elif f.tag == "K_anti" and f.n == 1:
            ref, how = anti_hermitian_n1_oracle(f.lam).value, "quadrature"
        elif f.tag == "L_four" and f.n >= 2:
            ref, how = rIV_reduced_oracle(f.n, f.alpha, f.beta).value, "quadrature"
        if ref is None:
            return "unchecked"
        ok = abs(value.to_float() / ref - 1) < ORACLE_RTOL
        return f"{'agrees' if ok else 'differs'}({how})"
    except (NotRepresentable, PoleError, ArithmeticError):
        return "unchecked"


def _variant_rows(f: cf.FormulaFamily, family_name: str, precision: int) -> list[dict]:
    variants = f.variants()
    ref = cf.evaluate(f)
    distinct = len({v.value for v in variants}) > 1
    chosen = variants if distinct else [ref]
    rows = []
    for v in chosen:
        rows.append(
            {
                "family": family_name,
                "m": f.m,
                "n": f.n,
                "params": _params_str(f.params()),
                "exact": str(v.value),
                "decimal": v.value.decimal(precision),
                "variant": v.source,
                "oracle_status": oracle_status(f, v.value),
            }
        )
    return rows


def table_rows(max_m: int, max_n: int, precision: int = 12) -> list[dict]:
    if max_m > TABLE_MAX_M or max_n > TABLE_MAX_N:
        raise UsageError(f"table shapes are limited to m <= {TABLE_MAX_M}, n <= {TABLE_MAX_N}")
    rows: list[dict] = []
    for kind in DOMAINS:
        ms = range(1, max_m + 1) if kind == "RI" else [1]
        for m in ms:
            for n in range(1, max_n + 1):
                spec = DomainSpec(kind, n=n, m=m)
                rows += _variant_rows(volume_family(spec), kind, precision)
    for n in range(1, max_n + 1):
        for m in range(1, max_m + 1):
            rows += _variant_rows(cf.J_rect(m, n, 1), "J", precision)
            rows += _variant_rows(cf.K_rect(m, n, 2 * m + 2 * n - 1), "K", precision)
        rows += _variant_rows(cf.H_herm(n, 2 * n), "H", precision)
        rows += _variant_rows(cf.H_herm(n, 2 * n + 2), "H", precision)
        rows += _variant_rows(cf.I_herm(n, 1), "I", precision)
        rows += _variant_rows(cf.J_sym(n, 1), "JSYM", precision)
        rows += _variant_rows(cf.K_anti(n, 1), "KANTI", precision)
        rows += _variant_rows(cf.L_four(n, 1, 0), "L", precision)
    return rows


# subcommands -----------------------------------------------------------------------


def cmd_volume(args) -> int:
    spec = _domain(args)
    f = volume_family(spec)
    val = cf.evaluate(f).value
    if args.format == "json":
        obj = {"domain": spec.kind, "m": spec.m, "n": spec.n, "exact": str(val),
               "decimal": _num(val, args.precision)}
        _emit(_dump_json(obj), args.out)
    elif args.format == "csv":
        row = {"family": spec.kind, "m": spec.m, "n": spec.n, "params": _params_str(f.params()),
               "exact": str(val), "decimal": val.decimal(args.precision),
               "variant": cf.evaluate(f).source, "oracle_status": oracle_status(f, val)}
        _emit(_csv([row]), args.out)
    elif args.exact:
        _emit(f"{val}\n", args.out)
    else:
        _emit(f"{val}\t{val.decimal(args.precision)}\n", args.out)
    return EXIT_OK


def cmd_integral(args) -> int:
    f = _family(args)
    ref = cf.evaluate(f)
    variants = f.variants()
    if args.format == "json":
        obj = {
            "family": args.family,
            "params": f.params(),
            "exact": str(ref.value),
            "decimal": _num(ref.value, args.precision),
            "reference_variant": ref.source,
            "variants": [
                {"source": v.source, "exact": str(v.value), "decimal": _num(v.value, args.precision),
                 "differs": v.value != ref.value}
                for v in variants
            ],
        }
        _emit(_dump_json(obj), args.out)
        return EXIT_OK
    if args.format == "csv":
        _emit(_csv(_variant_rows(f, args.family, args.precision)), args.out)
        return EXIT_OK
    lines = []
    if len({v.value for v in variants}) == 1:
        v = ref.value
        lines.append(str(v) if args.exact else f"{v}\t{v.decimal(args.precision)}")
    else:
        for v in variants:
            mark = "\tDIFFER" if v.value != ref.value else ""
            body = str(v.value) if args.exact else f"{v.value}\t{v.value.decimal(args.precision)}"
            lines.append(f"{v.source}\t{body}{mark}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.domain is not None:
        if any(getattr(args, k) is not None for k in ("lam", "alpha", "beta")):
            raise UsageError("--domain verification takes no exponents; use --family")
        target = _domain(args)
    else:
        target = _family(args)
    report = verify(target, args.samples, seed, args.workers)
    _emit(report.to_json() + "\n", args.out)
    print(
        f"{report.family} {report.params}: estimate {report.estimate.mean:.6g} "
        f"+- {report.estimate.std_error:.2g}, closed form {report.closed_form_value:.6g}, "
        f"z={report.z_score:.3g}, verdict {report.verdict}",
        file=sys.stderr,
    )
    return VERDICT_EXIT[report.verdict]


def cmd_table(args) -> int:
    rows = table_rows(args.max_m, args.max_n, args.precision)
    if args.format == "json":
        _emit(_dump_json(rows), args.out)
    elif args.format == "csv":
        _emit(_csv(rows), args.out)
    else:
        widths = {k: max(len(k), *(len(str(r[k])) for r in rows)) for k in CSV_HEADER}
        lines = ["  ".join(k.ljust(widths[k]) for k in CSV_HEADER)]
        for r in rows:
            lines.append("  ".join(str(r[k]).ljust(widths[k]) for k in CSV_HEADER).rstrip())
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def discrepancy_estimates(samples: int, seed: int, workers: int) -> dict:
    """Monte Carlo evidence attached to the discrepancy records."""
    from .domains import RIII
    from .montecarlo import mc_integral_unbounded

    return {
        "H_herm.normalization.n2": mc_integral_unbounded(cf.H_herm(2, 6), samples, seed, workers),
        "K_anti.volume.n2": mc_volume(RIII(2), samples, seed, workers),
        "L_four.volume.n2": mc_integral(cf.L_four(2, 0, 0), samples, seed, workers),
        "L_four.volume.n3": mc_integral(cf.L_four(3, 0, 0), samples, seed, workers),
    }


def cmd_discrepancies(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    mc = discrepancy_estimates(args.samples, seed, args.workers) if args.samples > 0 else None
    records = disc.build_records(mc)
    _emit(disc.to_json(records) + "\n", args.out)
    return EXIT_OK


COMMANDS = {
    "volume": cmd_volume,
    "integral": cmd_integral,
    "verify": cmd_verify,
    "table": cmd_table,
    "discrepancies": cmd_discrepancies,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, cf.ParameterError, DimensionTooLarge, PoleError, NotRepresentable) as exc:
        print(f"quatdom {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"quatdom {args.command}: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
