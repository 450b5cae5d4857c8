"""Command-line interface: screen, simulate, benchmark, calibrate, diagnose.

Outputs are plain CSV/JSON files with no timestamps, so reruns with identical
flags and seed are byte-identical. Nonzero exits print a single diagnostic
line ``error category=<io|validation|fit|config>: <message>`` on stderr.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

from . import baselines, benchmark, diagnostics, metrics, screening, simulate
from .cox import FitControl
from .data import ColumnSchema, ConditioningSet, read_csv, write_csv
from .errors import (
    CalibrationError,
    ConfigError,
    CoxScreenError,
    CSVParseError,
    NonIdentifiableError,
    SeparationError,
    ValidationError,
)


def _default_seed():
    env = os.environ.get("COXSCREEN_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"COXSCREEN_SEED must be an integer, got '{env}'") from None
    return 0


def _parse_conditioning(text):
    if text is None or text == "none":
        return None
    if text == "auto":
        return "auto"
    try:
        indices = tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ConfigError(f"--conditioning must be 'auto', 'none' or a comma list, got '{text}'") from None
    if not indices:
        raise ConfigError("--conditioning index list is empty")
    return ConditioningSet(indices)


def _parse_stats(text):
    stats = tuple(tok.strip() for tok in text.split(",") if tok.strip())
    for s in stats:
        if s not in screening.STATISTICS:
            raise ConfigError(f"unknown statistic '{s}'; choose from {screening.STATISTICS}")
    if not stats:
        raise ConfigError("--stats list is empty")
    return stats


def _sim_config(args):
    if getattr(args, "config", None):
        base = simulate.config_from_kv(args.config)
        overrides = {}
        if args.n is not None:
            overrides["n"] = args.n
        if args.p is not None:
            overrides["p"] = args.p
        if args.censoring is not None:
            overrides["censor_target"] = args.censoring
        if args.seed is not None:
            overrides["seed"] = args.seed
        if overrides:
            from dataclasses import replace

            base = replace(base, **overrides)
        return base
    if args.example is None:
        raise ConfigError("either --example or --config is required")
    return simulate.example_config(
        args.example,
        n=args.n if args.n is not None else 100,
        p=args.p if args.p is not None else 1000,
        censor_target=args.censoring if args.censoring is not None else 0.2,
        seed=args.seed if args.seed is not None else _default_seed(),
    )


def _write_selected(path, indices, names):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "name"])
        for j in indices:
            writer.writerow([j, names[j - 1]])


def cmd_screen(args):
    if args.gamma is not None and args.top_k is not None:
        raise ConfigError("choose exactly one of --gamma and --top-k")
    dataset = read_csv(args.input, ColumnSchema(args.time_col, args.status_col))
    stats = _parse_stats(args.stats)
    cond_spec = _parse_conditioning(args.conditioning)
    if cond_spec == "auto":
        cond = screening.default_conditioning(dataset, workers=args.workers)
        print(f"conditioning=auto selected C={list(cond.indices)}", file=sys.stderr)
    elif cond_spec is None:
        cond = ConditioningSet()
    else:
        cond = cond_spec
    result = screening.screen(dataset, cond, FitControl(), statistics=stats, workers=args.workers)

    failures = sum(1 for r in result.records if r.fit_status != screening.CONVERGED)
    print(
        f"null fit: loglik={result.null_fit.loglik:.6f} iterations={result.null_fit.iterations}; "
        f"records={len(result.records)} failures={failures}",
        file=sys.stderr,
    )
    if args.format == "json":
        screening.result_to_json(result, args.out)
    else:
        screening.result_to_csv(result, args.out)

    stat = stats[0]
    base, _ = os.path.splitext(args.out)
    if args.gamma is not None:
        selected = screening.select_by_threshold(result, stat, args.gamma)
        _write_selected(base + "_selected.csv", selected, result.covariate_names)
    else:
        k = args.top_k if args.top_k is not None else screening.default_top_k(dataset.n)
        k = min(k, len(result.records))
        selected = screening.select_top_k(result, stat, k)
        _write_selected(base + "_selected.csv", selected, result.covariate_names)
    return 0


def cmd_simulate(args):
    config = _sim_config(args)
    base, ext = os.path.splitext(args.out)
    ext = ext or ".csv"
    for rid in range(args.replicates):
        rep = simulate.gen_replicate(config, rid)
        path = args.out if args.replicates == 1 else f"{base}_r{rid}{ext}"
        write_csv(rep.dataset, path)
        print(
            f"replicate {rid}: n={config.n} p={config.p} "
            f"censoring={rep.realized_censoring:.3f} -> {path}",
            file=sys.stderr,
        )
    return 0


def cmd_benchmark(args):
    config = _sim_config(args)
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    cond_spec = _parse_conditioning(args.conditioning)
    scores, summaries = benchmark.run_benchmark(
        config,
        replicates=args.replicates,
        methods=methods,
        conditioning=cond_spec,
        workers=args.workers,
    )
    config_id = f"example{args.example}" if args.example else os.path.basename(args.config)
    base, _ = os.path.splitext(args.out)
    metrics.summaries_to_csv(summaries, base + "_summary.csv", config_id=config_id)
    metrics.scores_to_csv(scores, base + "_scores.csv")
    for s in summaries:
        print(
            f"{s.method}: median MMS={s.median_mms:g} (IQR {s.iqr_mms:g}), "
            f"median TPR={s.median_tpr:g} (IQR {s.iqr_tpr:g}), sure rate={s.sure_rate:g}",
            file=sys.stderr,
        )
    return 0


def cmd_calibrate(args):
    if args.target is not None and not 0.0 < args.target < 1.0:
        raise ConfigError(f"calibration target must be in (0, 1), got {args.target}")
    config = _sim_config(args)
    target = args.target if args.target is not None else config.censor_target
    if not 0.0 < target < 1.0:
        raise ConfigError(f"calibration target must be in (0, 1), got {target}")
    c, achieved = simulate.calibrate_censoring(config, target)
    print(f"c={c!r} achieved={achieved!r} target={target!r}")
    return 0


def cmd_diagnose(args):
    dataset = read_csv(args.input, ColumnSchema(args.time_col, args.status_col))
    cond_spec = _parse_conditioning(args.conditioning)
    if cond_spec == "auto":
        cond = screening.default_conditioning(dataset, workers=args.workers)
    elif cond_spec is None:
        cond = ConditioningSet()
    else:
        cond = cond_spec
    candidates = diagnostics.signal_strengths_to_csv(dataset, cond, args.out)
    if not candidates:
        print("warning: conditioning set covers all covariates; nothing to diagnose", file=sys.stderr)
    return 0


def _add_sim_flags(parser):
    parser.add_argument("--example", type=int, choices=(1, 2, 3))
    parser.add_argument("--config", help="SimConfig key=value file; flags override its fields")
    parser.add_argument("--n", type=int)
    parser.add_argument("--p", type=int)
    parser.add_argument("--censoring", type=float, help="target censoring proportion")
    parser.add_argument("--seed", type=int)


def build_parser():
    parser = argparse.ArgumentParser(prog="coxscreen", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_screen = sub.add_parser("screen", help="conditional screening of a CSV dataset")
    p_screen.add_argument("--input", required=True)
    p_screen.add_argument("--time-col", default="time")
    p_screen.add_argument("--status-col", default="status")
    p_screen.add_argument("--conditioning", default="none")
    p_screen.add_argument("--stats", default="mple")
    p_screen.add_argument("--gamma", type=float)
    p_screen.add_argument("--top-k", type=int, dest="top_k")
    p_screen.add_argument("--workers", type=int, default=1)
    p_screen.add_argument("--out", required=True)
    p_screen.add_argument("--format", choices=("csv", "json"), default="csv")
    p_screen.set_defaults(func=cmd_screen)

    p_sim = sub.add_parser("simulate", help="generate seeded benchmark datasets")
    _add_sim_flags(p_sim)
    p_sim.add_argument("--replicates", type=int, default=1)
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(func=cmd_simulate)

    p_bench = sub.add_parser("benchmark", help="paired Monte-Carlo method comparison")
    _add_sim_flags(p_bench)
    p_bench.add_argument("--replicates", type=int, default=100)
    p_bench.add_argument(
        "--methods",
        default=",".join(benchmark.ALL_METHODS),
        help=f"comma list from {benchmark.ALL_METHODS}",
    )
    p_bench.add_argument("--conditioning", default="1")
    p_bench.add_argument("--workers", type=int, default=1)
    p_bench.add_argument("--out", required=True)
    p_bench.set_defaults(func=cmd_benchmark)

    p_cal = sub.add_parser("calibrate", help="find the censoring upper bound for a target rate")
    _add_sim_flags(p_cal)
    p_cal.add_argument("--target", type=float)
    p_cal.set_defaults(func=cmd_calibrate)

    p_diag = sub.add_parser("diagnose", help="conditional signal-strength diagnostic")
    p_diag.add_argument("--input", required=True)
    p_diag.add_argument("--time-col", default="time")
    p_diag.add_argument("--status-col", default="status")
    p_diag.add_argument("--conditioning", default="none")
    p_diag.add_argument("--workers", type=int, default=1)
    p_diag.add_argument("--out", required=True)
    p_diag.set_defaults(func=cmd_diagnose)
    return parser


_CATEGORIES = (
    (ConfigError, "config"),
    (CSVParseError, "io"),
    ((NonIdentifiableError, SeparationError, CalibrationError), "fit"),
    (ValidationError, "validation"),
    ((OSError,), "io"),
    (CoxScreenError, "validation"),
)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - single funnel for exit categories
        for types, category in _CATEGORIES:
            if isinstance(exc, types):
                print(f"error category={category}: {exc}", file=sys.stderr)
                return 1
        raise


if __name__ == "__main__":
    sys.exit(main())
