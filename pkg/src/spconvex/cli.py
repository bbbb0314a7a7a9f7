"""Batch command-line front end.

Subcommands: ``verify`` (randomized suites), ``sweep`` (one check over a
parameter grid), ``second-deriv`` (curvature of the squared norm with
finite-difference cross-checks), ``tightness`` (constant-optimality scan)
and ``extremal`` (hill-climbing gap minimizer).

Exit codes: 0 all checks passed, 1 at least one inequality violation,
2 usage/configuration error, 3 numerical error (convergence failure or
errored trials).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from .channels import QuantumChannel
from .config import DEFAULT
from .errors import (
    ConvergenceError,
    DimensionError,
    DomainError,
    NumericalError,
    ParameterError,
    PreconditionError,
)
from .matcore import as_selfadjoint
from .opint import norm_sq_second_derivative, trace_first_derivative, trace_second_derivative
from .divdiff import power_abs
from .search import extremal_search
from .serialize import channel_to_json, dump_json, matrix_from_json, matrix_to_json, records_to_csv
from .verify import (
    CHECK_TAGS,
    GapRecord,
    SuiteReport,
    TrialConfig,
    fd_oracle,
    run_suite,
    sample_matrix,
    tightness_scan,
)

_USAGE_ERRORS = (ParameterError, PreconditionError, DomainError, DimensionError)


def _parse_float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ParameterError(f"malformed float list {text!r}") from exc


def _parse_grid(text: str) -> tuple[float, ...]:
    """'a:b:step' inclusive grid, or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ParameterError(f"grid must be start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(tok) for tok in parts)
        except ValueError as exc:
            raise ParameterError(f"malformed grid {text!r}") from exc
        if step <= 0 or stop < start:
            raise ParameterError(f"grid requires step > 0 and stop >= start, got {text!r}")
        values = []
        k = 0
        while True:
            v = start + k * step
            if v > stop + 1e-12:
                break
            values.append(round(v, 12))
            k += 1
        return tuple(values)
    return _parse_float_list(text)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=42, help="master seed (default 42)")
    parser.add_argument("--tol", type=float, default=DEFAULT.gap_tolerance,
                        help="violation tolerance on normalized gaps (default 1e-9)")
    parser.add_argument("--out", type=Path, default=None,
                        help="output path; format inferred from .json/.csv extension")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spconvex",
        description="Randomized verification of Schatten-norm convexity inequalities.",
    )
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON file of defaults; explicit flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run randomized verification suites")
    p_verify.add_argument("--suite", default="all",
                          help="comma list from {all,%s}" % ",".join(CHECK_TAGS))
    p_verify.add_argument("--dim", type=int, default=4)
    p_verify.add_argument("--trials", type=int, default=1000)
    grid = p_verify.add_mutually_exclusive_group()
    grid.add_argument("--p", dest="p_values", type=_parse_float_list, default=None,
                      help="comma list of p values")
    grid.add_argument("--p-grid", dest="p_grid", type=_parse_grid, default=None,
                      help="p grid start:stop:step")
    p_verify.add_argument("--alpha-grid", dest="alpha_values", type=_parse_grid, default=None,
                          help="alpha grid (comma list or start:stop:step)")
    p_verify.add_argument("--threads", type=int, default=1,
                          help="worker processes over trials (0 = auto)")
    _add_common(p_verify)
    p_verify.set_defaults(func=_cmd_verify)

    p_sweep = sub.add_parser("sweep", help="one check over a fine parameter grid")
    p_sweep.add_argument("--check", required=True, choices=CHECK_TAGS)
    p_sweep.add_argument("--dim", type=int, default=4)
    p_sweep.add_argument("--trials", type=int, default=100)
    p_sweep.add_argument("--p-grid", dest="p_grid", type=_parse_grid, default=None)
    p_sweep.add_argument("--alpha-grid", dest="alpha_values", type=_parse_grid, default=None)
    p_sweep.add_argument("--threads", type=int, default=1)
    _add_common(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_sd = sub.add_parser("second-deriv",
                          help="trace/norm curvature of t -> A + tB with FD cross-checks")
    p_sd.add_argument("--a", type=Path, default=None, help="matrix JSON for A")
    p_sd.add_argument("--b", type=Path, default=None, help="matrix JSON for B")
    p_sd.add_argument("--p", type=float, default=1.5)
    p_sd.add_argument("--dim", type=int, default=4, help="dimension for random inputs")
    p_sd.add_argument("--step", type=float, default=DEFAULT.fd_step)
    _add_common(p_sd)
    p_sd.set_defaults(func=_cmd_second_deriv)

    p_tight = sub.add_parser("tightness", help="optimality scan of the (p-1) constant")
    p_tight.add_argument("--p", dest="p_values", type=_parse_float_list, default=(1.5,))
    p_tight.add_argument("--eps", type=_parse_float_list, default=(1e-2, 1e-3, 1e-4))
    _add_common(p_tight)
    p_tight.set_defaults(func=_cmd_tightness)

    p_ext = sub.add_parser("extremal", help="hill-climbing minimizer of the normalized gap")
    p_ext.add_argument("--p", type=float, default=1.5)
    p_ext.add_argument("--dim", type=int, default=3)
    p_ext.add_argument("--iters", type=int, default=10000)
    p_ext.add_argument("--restarts", type=int, default=8)
    _add_common(p_ext)
    p_ext.set_defaults(func=_cmd_extremal)

    parser.subcommands = {
        "verify": p_verify, "sweep": p_sweep, "second-deriv": p_sd,
        "tightness": p_tight, "extremal": p_ext,
    }
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list) -> list:
    """Load --config JSON as parser defaults; flags still override.

    Defaults are installed on every subparser: argparse subcommands parse
    into a fresh namespace, so defaults set only on the parent would be
    overwritten by the subparser's own defaults.
    """
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise ParameterError("--config requires a path")
    path = Path(argv[idx + 1])
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ParameterError(f"config file {path} must hold a JSON object")
    mapped = {}
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest in ("p", "p_values"):
            mapped["p_values"] = tuple(value) if isinstance(value, list) else _parse_float_list(str(value))
        elif dest == "p_grid":
            mapped["p_grid"] = _parse_grid(str(value))
        elif dest in ("alpha_grid", "alpha_values"):
            mapped["alpha_values"] = tuple(value) if isinstance(value, list) else _parse_grid(str(value))
        elif dest == "eps":
            mapped["eps"] = tuple(value) if isinstance(value, list) else _parse_float_list(str(value))
        elif dest == "out":
            mapped["out"] = Path(value)
        else:
            mapped[dest] = value
    for sp in parser.subcommands.values():
        known = {a.dest for a in sp._actions}
        sp.set_defaults(**{k: v for k, v in mapped.items() if k in known})
    return argv


def _resolve_out(args, default_name: str) -> Path:
    return args.out if args.out is not None else Path(default_name)


def _echo_summary(report: SuiteReport) -> None:
    print(f"backend={report.backend} wall_clock={report.wall_clock:.2f}s "
          f"violations={report.violation_count} failures={report.failure_count}")
    header = f"{'check':<10} {'count':>7} {'viol':>5} {'min gap':>12} {'mean gap':>12}"
    print(header)
    for name, s in report.summaries.items():
        mn = f"{s.min_normalized_gap:.3e}" if s.min_normalized_gap is not None else "-"
        mean = f"{s.mean_normalized_gap:.3e}" if s.mean_normalized_gap is not None else "-"
        print(f"{name:<10} {s.count:>7} {s.violations:>5} {mn:>12} {mean:>12}")


def _dump_violations(report: SuiteReport, out: Path) -> None:
    stem = out.with_suffix("")
    for k, rec in enumerate(report.violations):
        payload = rec.to_json()
        inputs = {}
        for name, value in (rec.inputs or {}).items():
            if isinstance(value, QuantumChannel):
                inputs[name] = channel_to_json(value)
            else:
                inputs[name] = matrix_to_json(value)
        payload["inputs"] = inputs
        path = Path(f"{stem}.violation.{k}.json")
        with open(path, "w", encoding="utf-8") as fh:
            dump_json(payload, fh)
        print(f"violation dumped: {path}", file=sys.stderr)


def _write_report(report: SuiteReport, out: Path) -> None:
    out.parent.mkdir(parents=True, exist_ok=True)
    if out.suffix == ".csv":
        with open(out, "w", newline="", encoding="utf-8") as fh:
            records_to_csv(report.records, fh)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            dump_json(report.to_json(), fh)
    print(f"report written: {out}")


def _suite_exit_code(report: SuiteReport) -> int:
    if report.violation_count > 0:
        return 1
    if report.failure_count > 0:
        return 3
    return 0


def _build_trial_config(args) -> TrialConfig:
    p_values = args.p_grid if getattr(args, "p_grid", None) else getattr(args, "p_values", None)
    kwargs = {}
    if p_values:
        kwargs["p_values"] = tuple(p_values)
    if getattr(args, "alpha_values", None):
        kwargs["alpha_values"] = tuple(args.alpha_values)
    config = TrialConfig(
        dim=args.dim,
        trials=args.trials,
        master_seed=args.seed,
        tolerance=args.tol,
        **kwargs,
    )
    config.validate()
    return config


def _cmd_verify(args) -> int:
    suites = tuple(tok.strip() for tok in args.suite.split(",") if tok.strip())
    if "all" in suites:
        checks = CHECK_TAGS
    else:
        unknown = [s for s in suites if s not in CHECK_TAGS]
        if unknown:
            raise ParameterError(f"unknown suite(s): {unknown}; choose from {CHECK_TAGS}")
        checks = suites
    config = _build_trial_config(args)
    report = run_suite(config, checks=checks, threads=args.threads)
    out = _resolve_out(args, "report.json")
    _write_report(report, out)
    _dump_violations(report, out)
    _echo_summary(report)
    return _suite_exit_code(report)


def _cmd_sweep(args) -> int:
    config = _build_trial_config(args)
    report = run_suite(config, checks=(args.check,), threads=args.threads)
    rows = {}
    for rec in report.records:
        row = rows.setdefault(rec.param, {"count": 0, "violations": 0, "min": math.inf,
                                          "max": -math.inf, "total": 0.0})
        row["count"] += 1
        row["min"] = min(row["min"], rec.worst())
        row["max"] = max(row["max"], rec.normalized_gap)
        row["total"] += rec.normalized_gap
        if rec.worst() < -report.summaries[args.check].tolerance and not rec.info.get("negative_control"):
            row["violations"] += 1
    out = _resolve_out(args, f"sweep_{args.check}.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    if out.suffix == ".json":
        payload = {
            "check": args.check,
            "config": config.to_json(),
            "rows": [
                {"param": param, "count": row["count"], "violations": row["violations"],
                 "min_normalized_gap": row["min"], "max_normalized_gap": row["max"],
                 "mean_normalized_gap": row["total"] / row["count"]}
                for param, row in rows.items()
            ],
        }
        with open(out, "w", encoding="utf-8") as fh:
            dump_json(payload, fh)
    else:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["check", "param", "count", "violations",
                             "min_normalized_gap", "mean_normalized_gap", "max_normalized_gap"])
            for param, row in rows.items():
                writer.writerow([args.check, param, row["count"], row["violations"],
                                 repr(row["min"]), repr(row["total"] / row["count"]),
                                 repr(row["max"])])
    print(f"sweep written: {out}")
    _echo_summary(report)
    return _suite_exit_code(report)


def _cmd_second_deriv(args) -> int:
    if (args.a is None) != (args.b is None):
        raise ParameterError("provide both --a and --b, or neither (random inputs)")
    if not 1.0 < args.p <= 2.0:
        raise ParameterError(f"--p must lie in (1, 2], got {args.p}")
    if args.a is not None:
        with open(args.a, encoding="utf-8") as fh:
            A = as_selfadjoint(matrix_from_json(json.load(fh)))
        with open(args.b, encoding="utf-8") as fh:
            B = as_selfadjoint(matrix_from_json(json.load(fh)))
    else:
        A = sample_matrix("indefinite-invertible", args.dim, args.seed)
        B = sample_matrix("self-adjoint", args.dim, args.seed + 1)
    f = power_abs(args.p)
    curvature = norm_sq_second_derivative(args.p, A, B)
    tsd = curvature.psi2
    fd1 = fd_oracle(f, A, B, order=1, step=args.step)
    fd2 = fd_oracle(f, A, B, order=2, step=args.step)
    payload = {
        "p": args.p,
        "psi0": curvature.psi0,
        "trace_first_derivative": curvature.psi1,
        "trace_second_derivative": tsd,
        "norm_sq_second_derivative": curvature.value,
        "chain_lower_bound": curvature.chain_lower_bound,
        "fd_first": fd1,
        "fd_second": fd2,
        "fd_first_rel_err": abs(fd1 - curvature.psi1) / max(1.0, abs(curvature.psi1)),
        "fd_second_rel_err": abs(fd2 - tsd) / max(1.0, abs(tsd)),
        "step": args.step,
        "inputs": {"A": matrix_to_json(A), "B": matrix_to_json(B)},
    }
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", encoding="utf-8") as fh:
            dump_json(payload, fh)
        print(f"report written: {args.out}")
    else:
        dump_json(payload, sys.stdout)
    return 0


def _cmd_tightness(args) -> int:
    all_records: list[tuple[float, GapRecord]] = []
    for p in args.p_values:
        for rec in tightness_scan(p, args.eps):
            all_records.append((p, rec))
    out = _resolve_out(args, "tightness.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    if out.suffix == ".json":
        payload = {
            "rows": [
                {"p": p, "eps": rec.param, "rho": rec.info["rho"], "rho_minus_pm1": rec.gap}
                for p, rec in all_records
            ]
        }
        with open(out, "w", encoding="utf-8") as fh:
            dump_json(payload, fh)
    else:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["p", "eps", "rho", "rho_minus_pm1"])
            for p, rec in all_records:
                writer.writerow([p, rec.param, repr(rec.info["rho"]), repr(rec.gap)])
    print(f"scan written: {out}")
    worst = min(rec.gap for _, rec in all_records)
    print(f"min rho - (p-1) over scan: {worst:.3e}")
    return 0 if worst >= -args.tol else 1


def _cmd_extremal(args) -> int:
    result = extremal_search(args.p, args.dim, args.iters, args.restarts, args.seed)
    best = result.best
    payload = {
        "p": args.p,
        "dim": args.dim,
        "iters": args.iters,
        "restarts": args.restarts,
        "seed": args.seed,
        "best_normalized_gap": best.normalized_gap,
        "restart_history": result.history,
        "record": best.to_json(),
        "argmin": {"A": matrix_to_json(result.A), "B": matrix_to_json(result.B)},
    }
    out = _resolve_out(args, "extremal.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        dump_json(payload, fh)
    print(f"search written: {out}")
    print(f"best normalized gap: {best.normalized_gap:.6e}")
    return 0 if best.normalized_gap >= -args.tol else 1


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, argv)
    except (OSError, json.JSONDecodeError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, NumericalError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
