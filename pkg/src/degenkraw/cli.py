"""Command-line interface.

Subcommands:
  polys    emit one family (chosen route) as exact coefficient rows
  moments  canonical exact moments, literal values, and the sum oracle
  sample   seeded Monte Carlo histogram against the exact pmf
  audit    run every canonical identity and literal comparison
  verify   run a single named property check

Outputs are deterministic: the same config produces byte-identical text.
Rationals print as "num/den" in lowest terms; floating columns carry a
fixed digit count.  Invalid configuration exits with code 2; a failing
canonical audit entry exits with code 1.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import mpmath
from mpmath import mp

from .audit import run_audit
from .config import Config, ConfigError, load_config
from .measure import MeasureModel, to_mpf
from .polys import K_ROUTES, P_ROUTES, family
from .sampling import histogram, sample, tv_distance
from .verify import PROPERTIES, verify_property

_ALL_ROUTES = K_ROUTES + P_ROUTES + ("classical",)


def _add_common(sp: argparse.ArgumentParser):
    sp.add_argument("--params", metavar="FILE", default=None, help="JSON config file")
    sp.add_argument("--n-max", type=int, default=None, dest="n_max")
    sp.add_argument("--order", type=int, default=None, help="series truncation order")
    sp.add_argument("--digits", type=int, default=None, help="working decimal digits")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--format", choices=("csv", "json"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="degenkraw",
        description="Exact computations and formula audits for the degenerate "
        "Pascal measure and its Krawtchouk-Appell polynomial families.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("polys", help="emit polynomial family coefficients")
    _add_common(sp)
    sp.add_argument("--route", choices=_ALL_ROUTES, default="series")

    sp = sub.add_parser("moments", help="emit canonical/literal/oracle moment table")
    _add_common(sp)
    sp.add_argument("--m-max", type=int, default=8, dest="m_max")

    sp = sub.add_parser("sample", help="seeded Monte Carlo histogram")
    _add_common(sp)
    sp.add_argument("--count", type=int, default=1_000_000)

    sp = sub.add_parser("audit", help="run the full formula audit")
    _add_common(sp)

    sp = sub.add_parser("verify", help="run one property check")
    _add_common(sp)
    sp.add_argument("--property", choices=PROPERTIES, required=True, dest="prop")
    sp.add_argument("--variant", choices=("corrected", "literal"), default="corrected")

    return parser


def _config_from_args(args) -> Config:
    overrides = {}
    if args.n_max is not None:
        overrides["n_max"] = args.n_max
    if args.order is not None:
        overrides["series_order"] = args.order
    if args.digits is not None:
        overrides["precision_digits"] = args.digits
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.format is not None:
        overrides["output_format"] = args.format
    return load_config(args.params, overrides)


# ---------------------------------------------------------------------------
# table rendering
# ---------------------------------------------------------------------------

def _render(config: Config, command: str, rows: list[dict], summary: dict | None = None) -> str:
    if config.output_format == "json":
        doc = {"command": command, "config": config.as_dict(), "rows": rows}
        if summary is not None:
            doc["summary"] = summary
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            flat = {
                k: (" ".join(v) if isinstance(v, list) else v) for k, v in row.items()
            }
            writer.writerow(flat)
    if summary is not None:
        for key, value in summary.items():
            buf.write(f"# {key}={value}\n")
    return buf.getvalue()


def _real_str(x, digits: int = 25) -> str:
    return mpmath.nstr(mpmath.mpf(x), digits, strip_zeros=False)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_polys(config: Config, route: str) -> str:
    fam = family(config.params, config.n_max, route, config.series_order)
    rows = [
        {
            "route": fam.route,
            "n": n,
            "degree": fam[n].degree,
            "coefficients": [str(c) for c in fam[n].coeffs] or ["0"],
        }
        for n in range(config.n_max + 1)
    ]
    return _render(config, "polys", rows)


def cmd_moments(config: Config, m_max: int) -> str:
    if m_max < 0:
        raise ConfigError("m_max must be nonnegative")
    model = MeasureModel(config.params, config.precision_digits)
    with mp.workdps(config.precision_digits + 10):
        sums, cutoff = model.truncated_moment_sums(m_max)
        rows = []
        for m in range(m_max + 1):
            canonical = model.moment_exact(m)
            oracle = sums[m]
            gap = abs(to_mpf(canonical) - oracle)
            rows.append(
                {
                    "m": m,
                    "canonical": str(canonical),
                    "literal": _real_str(model.literal_moment(m)) if m >= 1 else "",
                    "oracle": _real_str(oracle),
                    "abs_gap": _real_str(gap, 8),
                }
            )
    return _render(config, "moments", rows, {"support_cutoff": cutoff})


def cmd_sample(config: Config, count: int) -> str:
    if count < 1:
        raise ConfigError("count must be positive")
    model = MeasureModel(config.params, config.precision_digits)
    draws = sample(count, config.seed, model)
    counts = histogram(draws)
    rows = []
    for n in range(max(counts) + 1):
        pn = float(model.pmf(n))
        c = counts.get(n, 0)
        # a drawn value always has positive mass; the guard only protects
        # against float underflow at absurd support points
        spread = math.sqrt(count * pn * (1 - pn)) or float("inf")
        rows.append(
            {
                "n": n,
                "count": c,
                "empirical_freq": f"{c / count:.8f}",
                "pmf": f"{pn:.12f}",
                "std_residual": f"{(c - count * pn) / spread:.4f}",
            }
        )
    mean_exact = model.moment_exact(1)
    var_exact = model.moment_exact(2) - mean_exact**2
    se = math.sqrt(float(var_exact) / count)
    emp_mean = float(draws.mean())
    summary = {
        "count": count,
        "seed": config.seed,
        "tv_distance": f"{tv_distance(draws, model):.8f}",
        "empirical_mean": f"{emp_mean:.8f}",
        "exact_mean": str(mean_exact),
        "mean_se": f"{se:.8f}",
        "mean_offset_in_se": f"{abs(emp_mean - float(mean_exact)) / se:.4f}",
    }
    return _render(config, "sample", rows, summary)


def cmd_audit(config: Config) -> tuple[str, int]:
    report = run_audit(config)
    rows = report.to_rows()
    summary = {
        "entries": len(rows),
        "required_failures": sum(
            1 for e in report.entries if e.required and not e.passed
        ),
        "result": "ok" if report.required_ok else "canonical-invariant-failure",
    }
    return _render(config, "audit", rows, summary), report.exit_code


def cmd_verify(config: Config, prop: str, variant: str) -> tuple[str, int]:
    passed, detail = verify_property(config, prop, variant)
    return f"{prop}: {'PASS' if passed else 'FAIL'} ({detail})\n", 0 if passed else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        if args.command == "polys":
            sys.stdout.write(cmd_polys(config, args.route))
            return 0
        if args.command == "moments":
            sys.stdout.write(cmd_moments(config, args.m_max))
            return 0
        if args.command == "sample":
            sys.stdout.write(cmd_sample(config, args.count))
            return 0
        if args.command == "audit":
            text, code = cmd_audit(config)
            sys.stdout.write(text)
            return code
        if args.command == "verify":
            text, code = cmd_verify(config, args.prop, args.variant)
            sys.stdout.write(text)
            return code
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
