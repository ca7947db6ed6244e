"""Command-line front end.

Subcommands: ``run`` (one instance, any corruption grid), ``sweep`` (adds arm
count grids), ``verify`` (analysis property suite), ``bench`` (wall-clock
table). All outputs are deterministic functions of the config and master
seed: floats are serialized with 17 significant digits independent of
locale, rows in fixed cell/replication order, and the manifest records a
hash of the canonicalized config so re-runs can be matched to their inputs.

Exit codes: 0 success, 1 verification found a failing bound, 2 config
error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from . import __version__
from .adversary import SCHEMES, STRATEGIES, BudgetExceedsHorizonCapacity
from .baselines import ALGORITHMS
from .core import BanditLabError, make_instance
from .engine import (
    GENERATOR_NAME,
    AggregateStats,
    AlgorithmSpec,
    BenchRow,
    ExperimentConfig,
    InstanceSpec,
    PlanSpec,
    bench_runtime,
    resolve_threads,
    run_batch,
)
from .samba import samba_update
from .verify import SuiteSizes, run_verification_suite, tampered_update

RESULTS_COLUMNS = "algorithm,scheme,corruption_level,K,mean_regret,sd_regret,replications,seed"
CURVES_COLUMNS = "algorithm,scheme,corruption_level,t,mean_regret,sd_regret"
BENCH_COLUMNS = "algorithm,mean_s,sd_s,step_ratio"


class ConfigError(Exception):
    """Anything wrong with the config file or flags (exit code 2)."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    version = data.get("schema_version")
    if version != 1:
        raise ConfigError(f"unsupported schema_version {version!r}, expected 1")
    return data


def _as_list(value) -> list:
    return value if isinstance(value, list) else [value]


def _parse_instances(cfg: dict, *, allow_grid: bool) -> tuple[InstanceSpec, ...]:
    raw = cfg.get("instance")
    if not isinstance(raw, dict):
        raise ConfigError("config needs an 'instance' object")
    if "means" in raw and raw["means"] != "uniform":
        means = raw["means"]
        if not isinstance(means, list) or len(means) < 2:
            raise ConfigError("'instance.means' must be a list of at least two numbers")
        try:
            make_instance(means)
        except BanditLabError as exc:
            raise ConfigError(f"bad instance means: {exc}")
        return (InstanceSpec(means=tuple(float(m) for m in means)),)
    if raw.get("means") == "uniform":
        ks = _as_list(raw.get("k"))
        if not ks:
            raise ConfigError("'instance.k' must list at least one arm count")
        if len(ks) > 1 and not allow_grid:
            raise ConfigError("an arm-count grid needs the sweep command")
        specs = []
        for k in ks:
            if not isinstance(k, int) or k < 2:
                raise ConfigError(f"arm count must be an integer >= 2, got {k!r}")
            specs.append(InstanceSpec(k=k))
        return tuple(specs)
    raise ConfigError("'instance' must give explicit 'means' or k with means='uniform'")


def _parse_plans(cfg: dict) -> tuple[PlanSpec, ...]:
    raw = cfg.get("corruption")
    if raw is None:
        return (PlanSpec(),)
    if not isinstance(raw, dict):
        raise ConfigError("'corruption' must be an object")
    strategy = raw.get("strategy", "suppress_optimal")
    if strategy not in STRATEGIES:
        raise ConfigError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")
    per_step = raw.get("per_step_cost")
    if per_step is not None and (not isinstance(per_step, (int, float)) or per_step <= 0):
        raise ConfigError("'per_step_cost' must be a positive number or omitted")
    schemes = _as_list(raw.get("schemes", raw.get("scheme", "none")))
    budgets = _as_list(raw.get("budgets", raw.get("budget", 0.0)))
    if not schemes or not budgets:
        raise ConfigError("corruption grid is empty")
    plans = []
    for scheme in schemes:
        if scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {scheme!r}, expected one of {SCHEMES}")
        for budget in budgets:
            if not isinstance(budget, (int, float)) or budget < 0:
                raise ConfigError(f"budget must be a number >= 0, got {budget!r}")
            plans.append(
                PlanSpec(
                    scheme=scheme,
                    budget=float(budget),
                    strategy=strategy,
                    per_step_cost=None if per_step is None else float(per_step),
                )
            )
    return tuple(plans)


def _parse_algorithms(cfg: dict) -> tuple[AlgorithmSpec, ...]:
    raw = cfg.get("algorithms")
    if not isinstance(raw, list) or not raw:
        raise ConfigError("config needs a non-empty 'algorithms' list")
    specs = []
    for entry in raw:
        if not isinstance(entry, dict) or "algorithm" not in entry:
            raise ConfigError("each algorithms entry needs an 'algorithm' key")
        name = entry["algorithm"]
        if name not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {name!r}, expected one of {ALGORITHMS}")
        params = entry.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("'params' must be an object")
        specs.append(AlgorithmSpec.of(name, params, entry.get("label")))
    return tuple(specs)


def _parse_experiment(cfg: dict, args, *, allow_grid: bool) -> ExperimentConfig:
    horizon = cfg.get("horizon")
    if not isinstance(horizon, int) or horizon < 1:
        raise ConfigError("'horizon' must be a positive integer")
    reps = cfg.get("replications", 1)
    if not isinstance(reps, int) or reps < 1:
        raise ConfigError("'replications' must be a positive integer")
    seed = args.seed if args.seed is not None else cfg.get("master_seed", 0)
    if not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError("'master_seed' must be an unsigned 64-bit integer")
    per_decade = cfg.get("checkpoints_per_decade", 20)
    if not isinstance(per_decade, int) or per_decade < 1:
        raise ConfigError("'checkpoints_per_decade' must be a positive integer")
    return ExperimentConfig(
        instances=_parse_instances(cfg, allow_grid=allow_grid),
        plans=_parse_plans(cfg),
        algorithms=_parse_algorithms(cfg),
        horizon=horizon,
        replications=reps,
        master_seed=seed,
        checkpoints_per_decade=per_decade,
    )


def _config_hash(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _write_manifest(out_dir: str, cfg: dict, seed: int, threads: int, outputs: list[str]) -> None:
    manifest = {
        "build": f"banditlab {__version__}",
        "config_hash": _config_hash(cfg),
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "generator": GENERATOR_NAME,
        "master_seed": seed,
        "outputs": sorted(outputs),
        "threads": threads,
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_results_csv(path: str, stats: AggregateStats) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(RESULTS_COLUMNS + "\n")
        for cell in stats.cells:
            fh.write(
                f"{cell.algorithm},{cell.scheme},{_fmt(cell.budget)},{cell.k},"
                f"{_fmt(cell.mean_regret)},{_fmt(cell.sd_regret)},"
                f"{cell.replications},{cell.base_seed}\n"
            )


def write_curves_csv(path: str, stats: AggregateStats) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CURVES_COLUMNS + "\n")
        for cell in stats.cells:
            for t, mean, sd in cell.curve:
                fh.write(
                    f"{cell.algorithm},{cell.scheme},{_fmt(cell.budget)},{t},"
                    f"{_fmt(mean)},{_fmt(sd)}\n"
                )


def write_bench_csv(path: str, rows: list[BenchRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(BENCH_COLUMNS + "\n")
        for row in rows:
            fh.write(
                f"{row.algorithm},{_fmt(row.mean_s)},{_fmt(row.sd_s)},{_fmt(row.step_ratio)}\n"
            )


def _cmd_run(args, *, allow_grid: bool) -> int:
    cfg = _load_json(args.config)
    experiment = _parse_experiment(cfg, args, allow_grid=allow_grid)
    threads = resolve_threads(args.threads)
    stats = run_batch(experiment, threads=threads)
    out = args.out
    os.makedirs(out, exist_ok=True)
    write_results_csv(os.path.join(out, "results.csv"), stats)
    write_curves_csv(os.path.join(out, "curves.csv"), stats)
    _write_manifest(
        out, cfg, experiment.master_seed, threads, ["results.csv", "curves.csv"]
    )
    print(f"wrote {len(stats.cells)} cells x {experiment.replications} replications to {out}")
    return 0


def _cmd_bench(args) -> int:
    cfg = _load_json(args.config) if args.config else {"schema_version": 1}
    horizon = cfg.get("horizon", 100_000)
    if not isinstance(horizon, int) or horizon < 1:
        raise ConfigError("'horizon' must be a positive integer")
    reps = cfg.get("replications", 5)
    if not isinstance(reps, int) or reps < 1:
        raise ConfigError("'replications' must be a positive integer")
    seed = args.seed if args.seed is not None else cfg.get("master_seed", 0)
    if "algorithms" in cfg:
        algorithms = _parse_algorithms(cfg)
    else:
        algorithms = tuple(
            AlgorithmSpec.of(name, {"alpha": 0.05} if name == "samba" else {})
            for name in ALGORITHMS
        )
    if "instance" in cfg:
        instance = _parse_instances(cfg, allow_grid=False)[0]
    else:
        instance = InstanceSpec(means=tuple(i / 10 for i in range(1, 10)))
    rows = bench_runtime(algorithms, instance, horizon, reps=reps, master_seed=seed)
    out = args.out
    os.makedirs(out, exist_ok=True)
    write_bench_csv(os.path.join(out, "bench.csv"), rows)
    _write_manifest(out, cfg, seed, resolve_threads(args.threads), ["bench.csv"])
    for row in rows:
        print(f"{row.algorithm:12s} {row.mean_s:8.4f}s +/- {row.sd_s:.4f} ratio {row.step_ratio:.2f}")
    return 0


def _cmd_verify(args) -> int:
    cfg = _load_json(args.config) if args.config else {"schema_version": 1}
    raw_instance = cfg.get("instance")
    if raw_instance is not None:
        means = raw_instance.get("means")
        if not isinstance(means, list):
            raise ConfigError("verify instance must give explicit means")
        try:
            instance = make_instance(means)
        except BanditLabError as exc:
            raise ConfigError(f"bad instance means: {exc}")
    else:
        instance = make_instance(tuple(i / 10 for i in range(1, 10)))
    alpha = cfg.get("alpha", 0.05)
    if not isinstance(alpha, (int, float)) or not 0 < alpha < 1:
        raise ConfigError("'alpha' must lie in (0, 1)")
    seed = args.seed if args.seed is not None else cfg.get("master_seed", 2024)
    sizes = SuiteSizes.fast() if args.fast else SuiteSizes()
    update_fn = tampered_update if args.tamper_update else samba_update

    fit_config = ExperimentConfig(
        instances=(InstanceSpec(means=instance.means),),
        plans=(PlanSpec(),),
        algorithms=(AlgorithmSpec.of("samba", {"alpha": float(alpha)}),),
        horizon=sizes.fit_horizon,
        replications=sizes.fit_reps,
        master_seed=seed,
    )
    stats = run_batch(fit_config, threads=resolve_threads(args.threads))
    log_curve = [(t, m) for t, m, _ in stats.cells[0].curve]

    outcomes = run_verification_suite(
        instance,
        float(alpha),
        sizes=sizes,
        seed=seed,
        update_fn=update_fn,
        log_curve=log_curve,
    )
    failures = [o for o in outcomes if not o.passed]
    for o in outcomes:
        mark = "PASS" if o.passed else "FAIL"
        print(f"{o.name:28s} {mark}  {o.detail}")
    if failures:
        print(f"{len(failures)} of {len(outcomes)} checks failed")
        return 1
    print(f"all {len(outcomes)} checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banditlab",
        description="Bandit simulations under budgeted reward corruption",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config file")
    common.add_argument("--out", metavar="DIR", default="out", help="output directory")
    common.add_argument("--seed", type=int, metavar="U64", help="override master seed")
    common.add_argument(
        "--threads",
        type=int,
        metavar="N",
        help="worker processes (default: BANDITLAB_THREADS or all cores)",
    )
    common.add_argument("--fast", action="store_true", help="reduced sample counts")

    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", parents=[common], help="run one experiment config")
    run_p.set_defaults(func=lambda a: _cmd_run(a, allow_grid=False))
    sweep_p = sub.add_parser("sweep", parents=[common], help="run a grid over K/C/scheme")
    sweep_p.set_defaults(func=lambda a: _cmd_run(a, allow_grid=True))
    verify_p = sub.add_parser("verify", parents=[common], help="run the analysis checks")
    verify_p.add_argument("--tamper-update", action="store_true", help=argparse.SUPPRESS)
    verify_p.set_defaults(func=_cmd_verify)
    bench_p = sub.add_parser("bench", parents=[common], help="wall-clock benchmarks")
    bench_p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("run", "sweep") and not args.config:
        print("error: --config is required for run/sweep", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceedsHorizonCapacity as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BanditLabError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
