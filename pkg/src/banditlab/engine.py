"""Deterministic simulation engine.

Reproducibility contract: every random draw flows from a 64-bit master seed
through ``split_seed`` (a SplitMix64-style avalanche finalizer over
``master XOR golden_ratio * index``) into keyed Philox counter streams —
generator id ``philox4x64-splitmix64``, stamped into run manifests. Episode
``i`` of cell ``c`` always uses seed ``split_seed(master, c * R + i)``, so
results are bit-identical for a fixed config regardless of scheduling, and
parallel workers reduce in replication order.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .adversary import CorruptionPlan, apply_corruption, make_ledger
from .baselines import make_policy
from .core import BanditInstance, Trace, checkpoint_grid, make_instance
from .samba import SambaPolicy

GENERATOR_NAME = "philox4x64-splitmix64"

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def split_seed(master: int, index: int) -> int:
    """Derive a child seed; distinct indexes give distinct seeds.

    SplitMix64 finalizer applied to ``master XOR golden * index``; both the
    odd-constant multiply and the xor-shift finalizer are bijections mod
    2^64, so no two indexes collide under the same master.
    """
    x = (master ^ ((_GOLDEN * index) & _MASK)) & _MASK
    z = (x + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def make_stream(seed: int) -> np.random.Generator:
    """Keyed counter-mode stream for one consumer."""
    return np.random.Generator(np.random.Philox(key=seed))


# Stream sub-indexes within an episode.
_ENV, _POLICY, _ADVERSARY, _INSTANCE = 0, 1, 2, 3


@dataclass(frozen=True)
class InstanceSpec:
    """Fixed means, or K arms with uniform-random means drawn per replication."""

    means: tuple[float, ...] | None = None
    k: int | None = None

    def __post_init__(self):
        if (self.means is None) == (self.k is None):
            raise ValueError("specify exactly one of means= or k=")

    @property
    def arms(self) -> int:
        return len(self.means) if self.means is not None else int(self.k)

    def resolve(self, seed: int) -> BanditInstance:
        if self.means is not None:
            return make_instance(self.means)
        rng = make_stream(split_seed(seed, _INSTANCE))
        while True:
            draw = rng.random(self.k)
            if len(np.unique(draw)) == self.k:
                return make_instance(draw.tolist())


@dataclass(frozen=True)
class PlanSpec:
    """Corruption plan minus the horizon (bound at run time)."""

    scheme: str = "none"
    budget: float = 0.0
    strategy: str = "suppress_optimal"
    per_step_cost: float | None = None

    def bind(self, horizon: int) -> CorruptionPlan:
        return CorruptionPlan(
            scheme=self.scheme, budget=self.budget, strategy=self.strategy, horizon=horizon
        )


@dataclass(frozen=True)
class AlgorithmSpec:
    algorithm: str
    params: tuple = ()
    label: str | None = None

    @staticmethod
    def of(algorithm: str, params: dict | None = None, label: str | None = None):
        items = tuple(sorted((params or {}).items()))
        return AlgorithmSpec(algorithm=algorithm, params=items, label=label)

    @property
    def name(self) -> str:
        return self.label or self.algorithm

    def param_dict(self) -> dict:
        return dict(self.params)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment grid: cells = instances x plans x algorithms."""

    instances: tuple[InstanceSpec, ...]
    plans: tuple[PlanSpec, ...]
    algorithms: tuple[AlgorithmSpec, ...]
    horizon: int
    replications: int
    master_seed: int
    checkpoints_per_decade: int = 20

    def cells(self) -> list[tuple[int, InstanceSpec, PlanSpec, AlgorithmSpec]]:
        out = []
        idx = 0
        for inst in self.instances:
            for plan in self.plans:
                for algo in self.algorithms:
                    out.append((idx, inst, plan, algo))
                    idx += 1
        return out


def run_episode(
    policy,
    instance: BanditInstance,
    plan: CorruptionPlan,
    horizon: int,
    seed: int,
    *,
    checkpoints: list[int] | None = None,
    per_step_cost: float | None = None,
) -> Trace:
    """Simulate one episode and return its full trace.

    Round protocol: corrupt the means, let the policy pick an arm, draw the
    reward from the *corrupted* mean, feed it back, record. Pseudo-regret
    checkpoints accumulate true-mean gaps only.
    """
    env_rng = make_stream(split_seed(seed, _ENV))
    policy_rng = make_stream(split_seed(seed, _POLICY))
    adv_rng = make_stream(split_seed(seed, _ADVERSARY))
    ledger = make_ledger(instance, plan, per_step_cost, adv_rng)

    if checkpoints is None:
        checkpoints = checkpoint_grid(horizon)
    arms = np.zeros(horizon, dtype=np.int32)
    rewards = np.zeros(horizon, dtype=np.int8)
    costs = np.zeros(horizon, dtype=np.float64)
    uniforms = env_rng.random(horizon)
    gaps = instance.gaps

    cum_regret = 0.0
    curve: list[tuple[int, float]] = []
    cp_iter = iter(checkpoints)
    next_cp = next(cp_iter, None)

    select = policy.select
    update = policy.update
    for t in range(horizon):
        means, cost = apply_corruption(instance, ledger, t)
        arm = select(policy_rng)
        reward = 1 if uniforms[t] < means[arm] else 0
        update(arm, reward)
        arms[t] = arm
        rewards[t] = reward
        if cost:
            costs[t] = cost
        cum_regret += gaps[arm]
        if t + 1 == next_cp:
            curve.append((t + 1, cum_regret))
            next_cp = next(cp_iter, None)

    return Trace(
        instance=instance,
        algorithm=getattr(policy, "name", type(policy).__name__),
        seed=seed,
        arms=arms,
        rewards=rewards,
        costs=costs,
        checkpoints=curve,
    )


@dataclass
class CellResult:
    algorithm: str
    scheme: str
    budget: float
    k: int
    mean_regret: float
    sd_regret: float
    replications: int
    base_seed: int
    curve: list[tuple[int, float, float]] = field(default_factory=list)
    mean_spent: float = 0.0
    max_spent: float = 0.0
    clamp_events: int = 0


@dataclass
class AggregateStats:
    master_seed: int
    horizon: int
    cells: list[CellResult] = field(default_factory=list)


def _episode_task(args):
    (inst_spec, plan_spec, algo_spec, horizon, seed, checkpoints) = args
    instance = inst_spec.resolve(seed)
    plan = plan_spec.bind(horizon)
    policy = make_policy(
        algo_spec.algorithm,
        instance.k,
        algo_spec.param_dict(),
        c_known=plan.budget,
        horizon=horizon,
    )
    trace = run_episode(
        policy,
        instance,
        plan,
        horizon,
        seed,
        checkpoints=checkpoints,
        per_step_cost=plan_spec.per_step_cost,
    )
    final_regret = trace.checkpoints[-1][1]
    curve = tuple(r for _, r in trace.checkpoints)
    clamp = policy.state.clamp_events if isinstance(policy, SambaPolicy) else 0
    return final_regret, curve, trace.spent(), clamp


def resolve_threads(threads: int | None = None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("BANDITLAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_batch(config: ExperimentConfig, *, threads: int | None = None) -> AggregateStats:
    """Run every cell of the grid; deterministic for a fixed config and seed.

    Replications may execute in parallel worker processes; reduction is by
    replication index, so thread count never changes the numbers.
    """
    n_threads = resolve_threads(threads)
    reps = config.replications
    checkpoints = checkpoint_grid(config.horizon, per_decade=config.checkpoints_per_decade)
    tasks = []
    for cell_idx, inst, plan, algo in config.cells():
        for i in range(reps):
            seed = split_seed(config.master_seed, cell_idx * reps + i)
            tasks.append((inst, plan, algo, config.horizon, seed, checkpoints))

    if n_threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=n_threads) as pool:
            results = list(pool.map(_episode_task, tasks, chunksize=4))
    else:
        results = [_episode_task(t) for t in tasks]

    stats = AggregateStats(master_seed=config.master_seed, horizon=config.horizon)
    pos = 0
    for cell_idx, inst, plan, algo in config.cells():
        rows = results[pos : pos + reps]
        pos += reps
        finals = np.array([r[0] for r in rows])
        curves = np.array([r[1] for r in rows])
        spents = np.array([r[2] for r in rows])
        clamps = sum(r[3] for r in rows)
        sd = float(finals.std(ddof=1)) if reps > 1 else 0.0
        curve_sd = curves.std(axis=0, ddof=1) if reps > 1 else np.zeros(curves.shape[1])
        curve = [
            (t, float(m), float(s))
            for t, m, s in zip(checkpoints, curves.mean(axis=0), curve_sd)
        ]
        stats.cells.append(
            CellResult(
                algorithm=algo.name,
                scheme=plan.scheme,
                budget=plan.budget,
                k=inst.arms,
                mean_regret=float(finals.mean()),
                sd_regret=sd,
                replications=reps,
                base_seed=split_seed(config.master_seed, cell_idx * reps),
                curve=curve,
                mean_spent=float(spents.mean()),
                max_spent=float(spents.max()),
                clamp_events=clamps,
            )
        )
    return stats


@dataclass
class BenchRow:
    algorithm: str
    mean_s: float
    sd_s: float
    step_ratio: float


def _timed_window_ratio(
    algo_spec: AlgorithmSpec, instance: BanditInstance, plan_spec: PlanSpec, horizon: int, seed: int
) -> float:
    """Per-step wall time late in an episode divided by early.

    Early window is the first 1000 rounds, late window the last 10000 (or
    proportional for short horizons); the episode body matches run_episode's
    per-round work.
    """
    early_n = min(1000, max(1, horizon // 10))
    late_n = min(10_000, max(1, horizon // 10))
    late_start = horizon - late_n

    env_rng = make_stream(split_seed(seed, _ENV))
    policy_rng = make_stream(split_seed(seed, _POLICY))
    adv_rng = make_stream(split_seed(seed, _ADVERSARY))
    plan = plan_spec.bind(horizon)
    ledger = make_ledger(instance, plan, plan_spec.per_step_cost, adv_rng)
    policy = make_policy(
        algo_spec.algorithm,
        instance.k,
        algo_spec.param_dict(),
        c_known=plan.budget,
        horizon=horizon,
    )
    uniforms = env_rng.random(horizon)
    early = late = 0.0
    for t in range(horizon):
        timed = t < early_n or t >= late_start
        if timed:
            t0 = time.perf_counter()
        means, _ = apply_corruption(instance, ledger, t)
        arm = policy.select(policy_rng)
        reward = 1 if uniforms[t] < means[arm] else 0
        policy.update(arm, reward)
        if timed:
            dt = time.perf_counter() - t0
            if t < early_n:
                early += dt
            else:
                late += dt
    return (late / late_n) / (early / early_n)


def bench_runtime(
    algorithms: tuple[AlgorithmSpec, ...],
    instance_spec: InstanceSpec,
    horizon: int,
    *,
    plan_spec: PlanSpec = PlanSpec(),
    reps: int = 5,
    master_seed: int = 0,
) -> list[BenchRow]:
    """Wall-clock seconds per episode (warm-up excluded) plus early/late step ratio."""
    rows = []
    for a_idx, algo in enumerate(algorithms):
        times = []
        for i in range(reps + 1):
            seed = split_seed(master_seed, a_idx * (reps + 2) + i)
            instance = instance_spec.resolve(seed)
            plan = plan_spec.bind(horizon)
            policy = make_policy(
                algo.algorithm,
                instance.k,
                algo.param_dict(),
                c_known=plan.budget,
                horizon=horizon,
            )
            t0 = time.perf_counter()
            run_episode(
                policy,
                instance,
                plan,
                horizon,
                seed,
                per_step_cost=plan_spec.per_step_cost,
            )
            dt = time.perf_counter() - t0
            if i > 0:  # first episode is warm-up
                times.append(dt)
        ratio_seed = split_seed(master_seed, a_idx * (reps + 2) + reps + 1)
        ratio = _timed_window_ratio(
            algo, instance_spec.resolve(ratio_seed), plan_spec, horizon, ratio_seed
        )
        arr = np.array(times)
        rows.append(
            BenchRow(
                algorithm=algo.name,
                mean_s=float(arr.mean()),
                sd_s=float(arr.std(ddof=1)) if len(times) > 1 else 0.0,
                step_ratio=ratio,
            )
        )
    return rows
