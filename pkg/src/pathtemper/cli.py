"""Command-line entry point.

Subcommands: run (one tempering run), tune (the full adaptation loop),
benchmark (tuned spline vs linear-path baselines), snr (objective-gradient
signal-to-noise table) and oracle (closed-form Gaussian quantities). Each
experiment is driven by a TOML configuration; every output file is written
atomically (temp file plus rename) so an interrupted run never leaves a
parseable truncated artifact. ``--seeds A..B`` fans independent runs out
across processes, one output subdirectory per seed.

Output schemas are versioned by the leading comment line of each CSV; see
the README for column descriptions.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import functools
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .config import ConfigError, build_model, build_path, emit_config, load_config
from .diagnostics import (BarrierReport, fisher_length_gaussian,
                          lambda_linear_gaussian, snr_experiment)
from .engine import make_ensemble, run_nrpt
from .models.gaussian import GaussianPair
from .rng import ReplicaStreams
from .schedule import Schedule
from .tuner import COMPARATORS, TuningConfig, path_opt_nrpt, run_benchmark


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: Path, schema: str, header: list, rows) -> None:
    buf = io.StringIO()
    buf.write(f"# pathtemper {schema}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(cell if isinstance(cell, str) else _fmt(cell) for cell in row))
        buf.write("\n")
    _atomic_write(path, buf.getvalue())


def _write_json(path: Path, payload) -> None:
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _csv_quote(text: str) -> str:
    return '"' + text.replace('"', '""') + '"'


def _load(args) -> dict:
    cfg_path = Path(args.config)
    if not cfg_path.exists():
        raise ConfigError(f"config file not found: {cfg_path}")
    cfg = load_config(cfg_path)
    out = getattr(args, "out", None)
    if out is not None:
        cfg["output"]["directory"] = str(out)
    return cfg


def _parse_seeds(spec: str) -> list:
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(s) for s in spec.split(",") if s]


def _fan_out(runner, cfg: dict, seeds, config_dir: Path) -> int:
    base = Path(cfg["output"]["directory"])
    if seeds is None:
        return runner(cfg, base, config_dir)
    jobs = []
    for seed in seeds:
        sub_cfg = json.loads(json.dumps(cfg))
        sub_cfg["tuning"]["seed"] = seed
        jobs.append((sub_cfg, base / f"seed_{seed}"))
    with concurrent.futures.ProcessPoolExecutor() as pool:
        futures = [pool.submit(runner, c, d, config_dir) for c, d in jobs]
        codes = [f.result() for f in futures]
    return max(codes)


def _run_trace_rows(result):
    rejection_running = np.cumsum(1.0 - result.alpha_trace, axis=0)
    rejection_running /= np.arange(1, rejection_running.shape[0] + 1)[:, None]
    cumulative = result.round_trips.per_scan
    for m in range(rejection_running.shape[0]):
        yield [m + 1, int(cumulative[m]), *rejection_running[m]]


def _cmd_run(cfg: dict, outdir: Path, config_dir: Path) -> int:
    model = build_model(cfg, config_dir)
    path = build_path(cfg)
    tuning = cfg["tuning"]
    n = tuning["n"]
    schedule = Schedule.uniform(n)
    streams = ReplicaStreams(tuning["seed"], n + 1)
    ensemble = make_ensemble(model, n + 1, streams)
    result = run_nrpt(ensemble, path, schedule, tuning["sweeps"], model,
                      streams=streams, record_chain_trace=False)

    formats = cfg["output"]["formats"]
    _atomic_write(outdir / "effective_config.toml", emit_config(cfg))
    if "csv" in formats:
        header = ["scan", "cumulative_round_trips"] + [
            f"rejection_estimate_{i}" for i in range(n)
        ]
        _write_csv(outdir / "run_trace.csv", "run-trace v1", header,
                   _run_trace_rows(result))
    if "json" in formats:
        _write_json(outdir / "barrier_report.json",
                    BarrierReport.from_run(result).to_jsonable())
        _write_json(outdir / "schedule.json", schedule.to_jsonable())
    return 0


def _tuning_config(cfg: dict, model) -> TuningConfig:
    t = cfg["tuning"]
    return TuningConfig(
        model=model,
        n_intervals=t["n"],
        segments=cfg["path"]["segments"],
        rounds=t["rounds"],
        sweeps_per_round=t["sweeps_per_round"],
        learning_rate=t["learning_rate"],
        seed=t["seed"],
        path_kind=cfg["path"]["kind"],
    )


def _tune_rows(trace):
    for rec in trace.rounds:
        knots_json = "" if rec.knots is None else json.dumps(rec.knots.to_jsonable())
        yield [rec.index, rec.skl_estimate, rec.rejection_odds_sum,
               rec.rejection_sum, rec.gradient_norm, rec.round_trip_rate,
               rec.round_trips, rec.step_skipped, _csv_quote(knots_json)]


def _write_benchmark(outdir: Path, bench, formats) -> None:
    if "csv" in formats:
        rows = []
        for name, curve in sorted(bench.curves.items()):
            for scan, value in enumerate(curve, start=1):
                rows.append([name, scan, int(value)])
        _write_csv(outdir / "benchmark_curves.csv", "benchmark-curves v1",
                   ["method", "scan", "cumulative_round_trips"], rows)
    if "json" in formats:
        _write_json(outdir / "benchmark_summary.json", {
            "total_round_trips": bench.totals(),
            "linear_path_rate_bound": bench.bound_rate,
            "total_sweeps": bench.total_sweeps,
        })


def _cmd_tune(cfg: dict, outdir: Path, config_dir: Path, comparators=None) -> int:
    model = build_model(cfg, config_dir)
    tcfg = _tuning_config(cfg, model)
    trace = path_opt_nrpt(tcfg)

    formats = cfg["output"]["formats"]
    _atomic_write(outdir / "effective_config.toml", emit_config(cfg))
    if "csv" in formats:
        _write_csv(outdir / "tune_trace.csv", "tune-trace v1",
                   ["round", "skl_estimate", "rejection_odds_sum", "rejection_sum",
                    "gradient_norm", "round_trip_rate", "cumulative_round_trips",
                    "step_skipped", "knots_json"],
                   _tune_rows(trace))
    if "json" in formats:
        snapshots = [
            {
                "round": rec.index,
                "schedule": [float(t) for t in rec.schedule],
                "knots": None if rec.knots is None else rec.knots.to_jsonable(),
            }
            for rec in trace.rounds
        ]
        _write_json(outdir / "snapshots.json", snapshots)
        final_knots = getattr(trace.final_path, "knots", None)
        _write_json(outdir / "final.json", {
            "schedule": trace.final_schedule.to_jsonable(),
            "knots": None if final_knots is None else final_knots.to_jsonable(),
            "cumulative_round_trips": int(trace.rounds[-1].round_trips),
            "exploration_steps": trace.exploration_steps,
        })

    if comparators:
        bench = run_benchmark(tcfg, comparators=tuple(comparators))
        _write_benchmark(outdir, bench, formats)
    return 0


def _cmd_benchmark(cfg: dict, outdir: Path, config_dir: Path) -> int:
    model = build_model(cfg, config_dir)
    tcfg = _tuning_config(cfg, model)
    bench = run_benchmark(tcfg)
    _atomic_write(outdir / "effective_config.toml", emit_config(cfg))
    _write_benchmark(outdir, bench, cfg["output"]["formats"])
    return 0


def _cmd_snr(cfg: dict, outdir: Path, config_dir: Path) -> int:
    s = cfg["snr"]
    rows = snr_experiment(s["grid"], s["samples"], s["replicates"], s["seed"])
    _atomic_write(outdir / "effective_config.toml", emit_config(cfg))
    _write_csv(outdir / "snr.csv", "snr v1",
               ["phi", "objective", "snr", "grad_mean", "grad_sd", "mean_rejection"],
               ([r["phi"], r["objective"], r["snr"], r["grad_mean"], r["grad_sd"],
                 r["mean_rejection"]] for r in rows))
    return 0


def _cmd_oracle(cfg: dict) -> int:
    model = build_model(cfg, Path("."))
    if not isinstance(model, GaussianPair):
        raise ConfigError("the oracle subcommand needs the gaussian model")
    z = model.z
    barrier = lambda_linear_gaussian(z)
    fisher = fisher_length_gaussian(z)
    print(json.dumps({
        "z": z,
        "lambda_linear": barrier,
        "linear_barrier": barrier,
        "fisher_length": fisher,
        "predicted_rate": 1.0 / (2.0 + 2.0 * barrier),
        "geodesic_rate_bound": 1.0 / (2.0 + math.sqrt(2.0) * fisher),
    }, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathtemper",
        description="Non-reversible parallel tempering on tunable annealing paths",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "single tempering run with a fixed path and schedule"),
        ("tune", "adapt the schedule and spline knots"),
        ("benchmark", "tuned spline vs linear-path baselines"),
        ("snr", "objective-gradient signal-to-noise table"),
        ("oracle", "closed-form Gaussian diagnostics (JSON to stdout)"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-c", "--config", required=True, help="TOML configuration file")
        if name != "oracle":
            p.add_argument("-o", "--out", help="output directory (overrides [output])")
        if name in ("run", "tune", "benchmark"):
            p.add_argument("--seeds", help="fan out over seeds, e.g. 1..10 or 1,5,9")
        if name == "tune":
            p.add_argument("--comparators", nargs="?", const=",".join(COMPARATORS),
                           help="add baseline curves (default: %s)" % ",".join(COMPARATORS))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        config_dir = Path(args.config).resolve().parent
        seeds = _parse_seeds(args.seeds) if getattr(args, "seeds", None) else None
        if args.command == "run":
            return _fan_out(_cmd_run, cfg, seeds, config_dir)
        if args.command == "tune":
            comparators = (_split_comparators(args.comparators)
                           if args.comparators else None)
            runner = functools.partial(_cmd_tune, comparators=comparators)
            return _fan_out(runner, cfg, seeds, config_dir)
        if args.command == "benchmark":
            return _fan_out(_cmd_benchmark, cfg, seeds, config_dir)
        if args.command == "snr":
            return _cmd_snr(cfg, Path(cfg["output"]["directory"]), config_dir)
        if args.command == "oracle":
            return _cmd_oracle(cfg)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _split_comparators(spec: str):
    names = tuple(s.strip() for s in spec.split(",") if s.strip())
    unknown = set(names) - set(COMPARATORS)
    if unknown:
        raise ConfigError(f"unknown comparators: {sorted(unknown)}")
    return names


if __name__ == "__main__":
    raise SystemExit(main())
