"""Command-line front end.

Subcommands:

* ``run``    -- execute one experiment config and write its reports.
* ``verify`` -- run the built-in check battery and print PASS/FAIL lines.
* ``bound``  -- closed-form tail bound in log2 space at any scale.

Exit codes: 0 all checks satisfied, 1 check failure, 2 usage/parse
error, 3 desk-scale resource guard exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import mpmath
import yaml

from . import bias_metrics
from .backends import backend_name
from .battery import exact_suite, montecarlo_suite
from .errors import InvalidArgumentError, PrecisionError, ResourceLimitError
from .experiment import ExperimentConfig, run_experiment, write_outputs

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_GUARD = 3


def _load_config(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read config {path}: {exc}") from exc
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise InvalidArgumentError(f"config parse error{where}: {exc}") from exc


def cmd_run(args) -> int:
    config_path = Path(args.config)
    raw = _load_config(config_path)
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.samples is not None:
        raw["samples"] = args.samples
    config = ExperimentConfig.from_dict(raw)

    out_dir = Path(args.out) if args.out else Path(config.out_dir or "results")
    record = run_experiment(config, config_path.parent, backend=args.backend)
    write_outputs(record, out_dir)

    failed = [c for c in record.checks if not c.satisfied]
    print(f"config digest: {record.config_digest}")
    print(f"wrote q_table.csv, bias_report.json, checks.jsonl to {out_dir}")
    print(f"checks: {len(record.checks) - len(failed)}/{len(record.checks)} satisfied")
    for check in failed:
        print(f"FAIL {check.name}: empirical={check.empirical:.6g} "
              f"bound={check.bound:.6g} ({check.instance_summary})")
    return EXIT_OK if not failed else EXIT_CHECK_FAILED


def _print_results(pairs) -> int:
    failures = 0
    for instance, check in pairs:
        status = "PASS" if check.satisfied else "FAIL"
        failures += not check.satisfied
        print(f"{status} {instance:<34} {check.name:<42} "
              f"empirical={check.empirical:.6g} bound={check.bound:.6g} "
              f"margin={check.margin():.4g} stderr={check.mc_stderr:.3g}")
    return failures


def cmd_verify(args) -> int:
    pairs = []
    if args.suite in ("exact", "all"):
        pairs.extend(exact_suite(args.seed))
    if args.suite in ("montecarlo", "all"):
        pairs.extend(
            montecarlo_suite(args.seed, samples=args.samples, backend=args.backend)
        )
    failures = _print_results(pairs)
    total = len(pairs)
    print(f"{total - failures}/{total} checks satisfied "
          f"(suite={args.suite}, seed={args.seed}, backend={backend_name(args.backend)})")
    return EXIT_OK if failures == 0 else EXIT_CHECK_FAILED


def _format_pow2(log2_value: float) -> str:
    rounded = round(log2_value)
    if abs(log2_value - rounded) < 1e-9:
        return f"2^{int(rounded)}"
    return f"2^{log2_value:.4f}"


def cmd_bound(args) -> int:
    value = bias_metrics.log2_bound(args.log2_n, args.log2_k, args.q_min, args.bias)
    exponent10 = mpmath.floor(mpmath.mpf(value) * mpmath.log(2) / mpmath.log(10))
    mantissa = mpmath.power(10, mpmath.mpf(value) * mpmath.log(2) / mpmath.log(10)
                            - exponent10)
    decimal = f"{float(mantissa):.3f}e{int(exponent10):+d}"
    note = "  (vacuous: exceeds 1)" if value > 0 else ""
    print(f"Pr(q >= q_min) <= {_format_pow2(value)} = {decimal}{note}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="searchbias",
        description="Search-bias measurement and bound verification",
    )
    parser.add_argument("--backend", choices=("numba", "numpy"), default=None,
                        help="simulation kernel backend (default: env/auto)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("--config", required=True, help="YAML/JSON config path")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override master seed")
    p_run.add_argument("--samples", type=int, default=None,
                       help="override simplex Monte Carlo sample count")
    p_run.set_defaults(func=cmd_run)

    p_verify = sub.add_parser("verify", help="run the built-in check battery")
    p_verify.add_argument("--suite", choices=("exact", "montecarlo", "all"),
                          default="all")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--samples", type=int, default=20000)
    p_verify.set_defaults(func=cmd_verify)

    p_bound = sub.add_parser("bound", help="closed-form tail bound in log2 space")
    p_bound.add_argument("log2_n", type=float)
    p_bound.add_argument("log2_k", type=float)
    p_bound.add_argument("q_min", type=float)
    p_bound.add_argument("bias", type=float, nargs="?", default=0.0)
    p_bound.set_defaults(func=cmd_bound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (InvalidArgumentError, PrecisionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
