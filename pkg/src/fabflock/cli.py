"""Command-line experiment harness.

Runs N seeded replications per algorithm over one scenario, writes per-run,
aggregate, histogram, and comparison CSVs, and prints a comparison table.
Exit codes: 0 success, 1 usage error, 2 scenario error, 3 simulation abort.
"""

from __future__ import annotations

import argparse
import csv
import statistics
import sys
from pathlib import Path

from .baseline import BaselinePolicy
from .engine import Policy, SimulationAbort, init_run, run_to_completion
from .flocking import DEFAULT_FLSQ_LEN, FlockingPolicy
from .metrics import RunResult, histogram_from_times, summarize
from .model import ConfigError
from .scenario import Scenario, build_small_fab, parse_scenario

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SCENARIO = 2
EXIT_SIM = 3

ALGORITHM_NAMES = ("baseline", "flocking")
METRIC_KEYS = ("makespan_ticks", "flow_factor", "tardiness_ticks", "utilization")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2; the CLI contract wants 1
        raise UsageError(message)


def make_policy(name: str, flsq_len: int = DEFAULT_FLSQ_LEN) -> Policy:
    if name == "baseline":
        return BaselinePolicy()
    if name == "flocking":
        return FlockingPolicy(flsq_len=flsq_len)
    raise UsageError(f"unknown algorithm {name!r}; valid names: {', '.join(ALGORITHM_NAMES)}")


def load_scenario(source: str) -> Scenario:
    """Builtin name or path to a scenario file."""
    if source == "smallfab":
        return build_small_fab()
    return parse_scenario(Path(source).read_text(encoding="utf-8"))


def percent_change(reference: float, value: float) -> float:
    """Percentage change vs the reference, positive when the value dropped.

    The comparison table applies this orientation to every metric column
    alike, so a positive makespan/flow factor/tardiness change means an
    improvement over the reference algorithm.
    """
    if reference == 0:
        return 0.0
    return 100.0 * (reference - value) / reference


def emit_csv(rows, path, header) -> None:
    """RFC-4180-style CSV with a header row and LF line endings."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(value: float) -> str:
    return f"{value:.10f}"


def _metric_series(results: list[RunResult]) -> dict[str, list[float]]:
    summaries = [summarize(r) for r in results]
    return {
        "makespan_ticks": [float(s.makespan) for s in summaries],
        "flow_factor": [s.flow_factor for s in summaries],
        "tardiness_ticks": [s.tardiness for s in summaries],
        "utilization": [s.utilization for s in summaries],
    }


def aggregate_means(results: dict[str, list[RunResult]]) -> dict[str, dict[str, float]]:
    """Per-algorithm mean of each metric over its replications."""
    return {name: {key: statistics.mean(series)
                   for key, series in _metric_series(runs).items()}
            for name, runs in results.items()}


def run_experiment(scenario: Scenario, algorithms: list[str], runs: int,
                   base_seed: int, out_dir, flsq_len: int = DEFAULT_FLSQ_LEN,
                   hist_bin: int = 10, horizon_factor: int = 100,
                   ) -> dict[str, list[RunResult]]:
    """Run ``runs`` seeded replications per algorithm and write result CSVs.

    Replication r uses seed base_seed + r for every algorithm, pairing runs
    across algorithms and making any single run re-executable in isolation.
    Returns {algorithm: [RunResult, ...]} in replication order.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    results: dict[str, list[RunResult]] = {}
    for name in algorithms:
        policy = make_policy(name, flsq_len)
        results[name] = [
            run_to_completion(init_run(scenario, policy, base_seed + r),
                              horizon_factor=horizon_factor)
            for r in range(runs)
        ]

    run_rows = []
    for name in algorithms:
        for result in results[name]:
            s = summarize(result)
            run_rows.append([name, result.seed, s.makespan, _fmt(s.flow_factor),
                             _fmt(s.tardiness), _fmt(s.utilization)])
    emit_csv(run_rows, out / "runs.csv",
             ["algorithm", "seed", "makespan_ticks", "flow_factor",
              "tardiness_ticks", "utilization"])

    agg_rows = []
    means: dict[str, dict[str, float]] = {}
    for name in algorithms:
        series = _metric_series(results[name])
        means[name] = {key: statistics.mean(v) for key, v in series.items()}
        row = [name, len(results[name])]
        for key in METRIC_KEYS:
            row.append(_fmt(means[name][key]))
            row.append(_fmt(statistics.pstdev(series[key])))
        agg_rows.append(row)
    agg_header = ["algorithm", "runs"]
    for key in METRIC_KEYS:
        agg_header += [f"{key}_mean", f"{key}_std"]
    emit_csv(agg_rows, out / "aggregate.csv", agg_header)

    for name in algorithms:
        pooled = [rec.finish_time for result in results[name] for rec in result.lots]
        hist = histogram_from_times(pooled, hist_bin)
        emit_csv(hist, out / f"histogram_{name}.csv", ["bin_start", "count"])

    first = algorithms[0]
    comp_header = ["metric"] + list(algorithms) + \
        [f"change_{name}_pct" for name in algorithms[1:]]
    comp_rows = []
    for key in METRIC_KEYS:
        row = [key] + [_fmt(means[name][key]) for name in algorithms]
        row += [_fmt(percent_change(means[first][key], means[name][key]))
                for name in algorithms[1:]]
        comp_rows.append(row)
    emit_csv(comp_rows, out / "comparison.csv", comp_header)

    return results


def _print_table(algorithms: list[str], means: dict[str, dict[str, float]]) -> None:
    first = algorithms[0]
    header = f"{'metric':<16}" + "".join(f"{name:>14}" for name in algorithms)
    header += "".join(f"{'chg ' + name + ' %':>16}" for name in algorithms[1:])
    print(header)
    for key in METRIC_KEYS:
        line = f"{key:<16}" + "".join(f"{means[name][key]:>14.4f}" for name in algorithms)
        line += "".join(
            f"{percent_change(means[first][key], means[name][key]):>+16.2f}"
            for name in algorithms[1:])
        print(line)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fabflock",
                     description="Job-shop plant simulator and scheduler benchmark.")
    parser.add_argument("--scenario", default="smallfab",
                        help="scenario file path or the builtin 'smallfab' (default)")
    parser.add_argument("--algorithm", action="append", choices=ALGORITHM_NAMES,
                        metavar="{baseline,flocking}",
                        help="scheduler to run; repeatable (default: both)")
    parser.add_argument("--runs", type=int, default=50,
                        help="replications per algorithm (default 50)")
    parser.add_argument("--seed", type=int, default=1,
                        help="base seed; replication r uses seed+r (default 1)")
    parser.add_argument("--flsq-len", type=int, default=DEFAULT_FLSQ_LEN,
                        help="flocking reshuffle window length (default 5)")
    parser.add_argument("--hist-bin", type=int, default=10,
                        help="histogram bin width in ticks (default 10)")
    parser.add_argument("--out", default="./results",
                        help="output directory (default ./results)")
    parser.add_argument("--horizon-factor", type=int, default=100,
                        help="livelock guard: abort after this many times the total "
                             "work content passes without a finish (default 100)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.runs < 1:
            raise UsageError("--runs must be >= 1")
        if args.flsq_len < 1:
            raise UsageError("--flsq-len must be >= 1")
        if args.hist_bin < 1:
            raise UsageError("--hist-bin must be >= 1")
        if args.horizon_factor < 1:
            raise UsageError("--horizon-factor must be >= 1")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    algorithms = args.algorithm or list(ALGORITHM_NAMES)
    try:
        scenario = load_scenario(args.scenario)
    except (ConfigError, OSError) as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO

    try:
        results = run_experiment(scenario, algorithms, args.runs, args.seed,
                                 args.out, flsq_len=args.flsq_len,
                                 hist_bin=args.hist_bin,
                                 horizon_factor=args.horizon_factor)
    except SimulationAbort as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return EXIT_SIM
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    _print_table(algorithms, aggregate_means(results))
    print(f"results written to {Path(args.out).resolve()}")
    return EXIT_OK


def entrypoint() -> None:
    sys.exit(main())
