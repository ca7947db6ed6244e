"""End-to-end acceptance gate.

Ten criteria, one test and one printed PASS/FAIL line each: simplex safety
under fuzzing, adversary budget accounting, Monte-Carlo vs exact-enumeration
agreement, the four drift bounds, recovery time, q-hat decay, logarithmic
regret growth, comparative ordering against the baselines, per-step cost
flatness, and byte-level reproducibility. Tolerances are stated inline next
to each check.
"""

import json
import time

import numpy as np

from banditlab.adversary import CorruptionPlan, default_per_step_cost
from banditlab.baselines import ALGORITHMS, make_policy
from banditlab.cli import main
from banditlab.core import make_instance
from banditlab.engine import (
    AlgorithmSpec,
    ExperimentConfig,
    InstanceSpec,
    PlanSpec,
    bench_runtime,
    run_batch,
    run_episode,
    split_seed,
)
from banditlab.samba import samba_init, samba_select, samba_update
from banditlab.verify import (
    check_drift_leader,
    check_drift_nonleader,
    check_qhat_decay,
    check_recovery_time,
    compare_log_vs_logsq,
    exact_regret_oracle,
    fit_log_regret,
    mc_regret,
)

LADDER = tuple(i / 10 for i in range(1, 10))
ALPHA = 0.05


def _philox(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def _report(criterion: str, passed: bool, detail: str) -> None:
    print(f"criterion {criterion}: {'PASS' if passed else 'FAIL'} — {detail}")
    assert passed, f"criterion {criterion}: {detail}"


def test_criterion_01_simplex_fuzz():
    # 1e6 update steps over random (K, alpha, means); |sum p - 1| <= 1e-9,
    # min p > 0, zero clamp events, wall time < 10 s
    rng = np.random.default_rng(11)
    total_steps = 1_000_000
    per_case = 2_000
    worst_gap = 0.0
    min_prob = 1.0
    clamps = 0
    start = time.perf_counter()
    for _ in range(total_steps // per_case):
        k = int(rng.integers(2, 65))
        alpha = float(rng.uniform(0.005, 0.995))
        means = rng.uniform(0.0, 1.0, size=k)
        state = samba_init(k, alpha)
        u = rng.random(per_case)
        for i in range(per_case):
            arm = samba_select(state, rng)
            samba_update(state, arm, 1 if u[i] < means[arm] else 0)
        worst_gap = max(worst_gap, abs(sum(state.p) - 1.0))
        min_prob = min(min_prob, min(state.p))
        clamps += state.clamp_events
    elapsed = time.perf_counter() - start
    passed = worst_gap <= 1e-9 and min_prob > 0.0 and clamps == 0 and elapsed < 10.0
    _report(
        "01 simplex-fuzz",
        passed,
        f"worst |sum p - 1| = {worst_gap:.2e} (tol 1e-9), min p = {min_prob:.2e} (> 0), "
        f"clamp events = {clamps} (must be 0), {total_steps} steps in {elapsed:.1f}s (< 10s)",
    )


def test_criterion_02_budget_safety():
    # every trace over schemes x budgets spends <= C + 1e-9 and, for C >= 1,
    # >= C - per_step_cost
    instance = make_instance(LADDER)
    horizon = 100_000
    per_step = default_per_step_cost(instance, "suppress_optimal")  # 0.9
    schemes = ("consecutive", "even_steps", "delayed_block", "random_early")
    budgets = (0.0, 1000.0, 2000.0, 3000.0, 4000.0, 5000.0)
    reps = 2
    worst_over = -np.inf  # max of spent - C (must stay <= 1e-9)
    worst_under = np.inf  # min of spent - (C - per_step) for C >= 1 (must stay >= 0)
    episode = 0
    start = time.perf_counter()
    for scheme in schemes:
        for budget in budgets:
            plan = CorruptionPlan(
                scheme=scheme, budget=budget, strategy="suppress_optimal", horizon=horizon
            )
            for _ in range(reps):
                policy = make_policy("samba", instance.k, {"alpha": ALPHA})
                trace = run_episode(
                    policy, instance, plan, horizon, split_seed(20_250_812, episode)
                )
                episode += 1
                spent = trace.spent()
                worst_over = max(worst_over, spent - budget)
                if budget >= 1.0:
                    worst_under = min(worst_under, spent - (budget - per_step))
    elapsed = time.perf_counter() - start
    passed = worst_over <= 1e-9 and worst_under >= 0.0
    _report(
        "02 budget-safety",
        passed,
        f"{episode} traces over {len(schemes)} schemes x {len(budgets)} budgets: "
        f"max overspend = {worst_over:.2e} (tol 1e-9), "
        f"min slack above C - per_step = {worst_under:.3f} (>= 0), {elapsed:.0f}s",
    )


def test_criterion_03_oracle_equivalence():
    # Monte-Carlo mean pseudo-regret (1e6 episodes) within its 3-sigma CI of
    # the exact enumeration value; wall time < 1 min
    instance = make_instance((0.9, 0.5))
    start = time.perf_counter()
    exact = exact_regret_oracle(instance, 0.1, 8)
    mc_mean, ci3 = mc_regret(instance, 0.1, 8, 1_000_000, rng=_philox(303))
    elapsed = time.perf_counter() - start
    passed = abs(mc_mean - exact) <= ci3 and elapsed < 60.0
    _report(
        "03 oracle-equivalence",
        passed,
        f"mc = {mc_mean:.5f} vs exact = {exact:.5f}, |diff| = {abs(mc_mean - exact):.5f} "
        f"<= 3-sigma CI {ci3:.5f}, {elapsed:.0f}s (< 60s)",
    )


def test_criterion_04_drift_suite():
    # all four conditional drift bounds at 1e6 samples each, clean and at
    # cost gap/8; wall time < 5 min
    instance = make_instance(LADDER)
    cost = instance.min_gap / 8  # 0.0125
    start = time.perf_counter()
    reports = [
        ("nonleader clean", check_drift_nonleader(
            instance, ALPHA, cost=0.0, samples=1_000_000, rng=_philox(2024))),
        ("nonleader corrupted", check_drift_nonleader(
            instance, ALPHA, cost=cost, samples=1_000_000, rng=_philox(2025))),
        ("leader clean", check_drift_leader(
            instance, ALPHA, cost=0.0, samples=1_000_000, rng=_philox(2026))),
        ("leader corrupted", check_drift_leader(
            instance, ALPHA, cost=cost, samples=1_000_000, rng=_philox(2027))),
    ]
    elapsed = time.perf_counter() - start
    passed = all(r.passed for _, r in reports) and elapsed < 300.0
    margins = ", ".join(
        f"{label}: drift+CI {r.mean_drift + r.ci_half_width:.2e} <= bound {r.bound:.2e}"
        for label, r in reports
    )
    _report("04 drift-suite", passed, f"{margins}; {elapsed:.0f}s (< 5 min)")


def test_criterion_05_recovery_bound():
    # single injected corruption of 0.9: mean recovery length <= 4*0.9/0.1
    # = 36 rounds + 3-sigma CI over 1e4 replications; wall time < 5 min
    instance = make_instance(LADDER)
    start = time.perf_counter()
    report = check_recovery_time(
        instance, ALPHA, 0.9, reps=10_000, t0=20_000, rng=_philox(2035)
    )
    elapsed = time.perf_counter() - start
    passed = report.passed and abs(report.bound - 36.0) < 1e-9 and elapsed < 300.0
    _report(
        "05 recovery-bound",
        passed,
        f"mean = {report.mean_steps:.2f} rounds <= {report.bound:.0f} + CI "
        f"{report.ci_half_width:.2f} over {report.reps_used} reps "
        f"({report.burnin_failures} burn-in failures), {elapsed:.0f}s (< 5 min)",
    )


def test_criterion_06_decay_bound():
    # E[q-hat(s)] <= 2K/(4K + alpha*gap*s) + 3-sigma CI at s in {1e2,1e3,1e4}
    # over 200 replications; wall time < 5 min
    instance = make_instance(LADDER)
    start = time.perf_counter()
    report = check_qhat_decay(
        instance, ALPHA, horizon=50_000, reps=200, s_grid=(100, 1_000, 10_000),
        rng=_philox(2036),
    )
    elapsed = time.perf_counter() - start
    passed = report.passed and elapsed < 300.0
    points = ", ".join(
        f"s={s}: {m:.4f} <= {b:.4f}+{c:.4f}"
        for s, m, b, c in zip(
            report.s_grid, report.means, report.bounds, report.ci_half_widths
        )
    )
    _report(
        "06 decay-bound",
        passed,
        f"{points} over {report.rows_used} chains, {elapsed:.0f}s (< 5 min)",
    )


def test_criterion_07_logarithmic_regret():
    # clean 9-arm runs, 100 replications: ln-fit slope in (0, K/(alpha*gap)]
    # = (0, 1800] on checkpoints t in [1e3, 1e5], and the ln fit beats the
    # (ln t)^2 fit on residuals
    config = ExperimentConfig(
        instances=(InstanceSpec(means=LADDER),),
        plans=(PlanSpec(),),
        algorithms=(AlgorithmSpec.of("samba", {"alpha": ALPHA}),),
        horizon=100_000,
        replications=100,
        master_seed=404,
    )
    stats = run_batch(config)
    curve = [(t, m) for t, m, _ in stats.cells[0].curve if t >= 1_000]
    fit = fit_log_regret(curve)
    rss_ln, rss_lnsq = compare_log_vs_logsq(curve)
    passed = 0.0 < fit.slope <= 1800.0 and rss_ln < rss_lnsq
    _report(
        "07 logarithmic-regret",
        passed,
        f"slope = {fit.slope:.1f} in (0, 1800], rss ln = {rss_ln:.2f} < "
        f"rss ln^2 = {rss_lnsq:.2f} over {len(curve)} checkpoints",
    )


def test_criterion_08_comparative_ordering():
    # uniform-random means, C=3000 injected mid-run, K in {6,10,20}, 100
    # replications, all five algorithms: lowest mean regret in >= 2 of 3
    # K-values, and the K=6 mean within a factor of 3 of the 629.9 reference
    config = ExperimentConfig(
        instances=(InstanceSpec(k=6), InstanceSpec(k=10), InstanceSpec(k=20)),
        plans=(PlanSpec(scheme="delayed_block", budget=3000.0),),
        algorithms=tuple(
            AlgorithmSpec.of(name, {"alpha": ALPHA} if name == "samba" else {})
            for name in ALGORITHMS
        ),
        horizon=100_000,
        replications=100,
        master_seed=777,
    )
    start = time.perf_counter()
    stats = run_batch(config)
    elapsed = time.perf_counter() - start
    table: dict[int, dict[str, float]] = {}
    for cell in stats.cells:
        table.setdefault(cell.k, {})[cell.algorithm] = cell.mean_regret
    wins = sum(
        1 for k, row in table.items() if min(row, key=row.get) == "samba"
    )
    k6 = table[6]["samba"]
    band_ok = 629.9 / 3 <= k6 <= 629.9 * 3
    passed = wins >= 2 and band_ok
    rows = "; ".join(
        f"K={k}: " + ", ".join(f"{a}={v:.0f}" for a, v in sorted(row.items()))
        for k, row in sorted(table.items())
    )
    _report(
        "08 comparative-ordering",
        passed,
        f"lowest mean regret in {wins}/3 K-values (need >= 2); K=6 samba mean "
        f"{k6:.1f} within [{629.9 / 3:.0f}, {629.9 * 3:.0f}]; {rows}; {elapsed:.0f}s",
    )


def test_criterion_09_per_step_cost():
    # per-step wall time on rounds [0,1e3) vs [9e4,1e5) within 2x, and a
    # full T=1e5, K=9 run below 5 s
    rows = bench_runtime(
        (AlgorithmSpec.of("samba", {"alpha": ALPHA}),),
        InstanceSpec(means=LADDER),
        100_000,
        reps=3,
        master_seed=55,
    )
    row = rows[0]
    passed = row.mean_s < 5.0 and 0.5 <= row.step_ratio <= 2.0
    _report(
        "09 per-step-cost",
        passed,
        f"full run {row.mean_s:.2f}s (< 5s), late/early step ratio "
        f"{row.step_ratio:.2f} in [0.5, 2]",
    )


def test_criterion_10_reproducibility(tmp_path):
    # identical config + master seed give byte-identical results.csv across
    # reruns and across --threads values
    config = {
        "schema_version": 1,
        "horizon": 5_000,
        "replications": 3,
        "master_seed": 99,
        "instance": {"means": list(LADDER)},
        "algorithms": [
            {"algorithm": "samba", "params": {"alpha": ALPHA}},
            {"algorithm": "barbar"},
        ],
        "corruption": {"schemes": ["consecutive", "random_early"], "budgets": [0, 200]},
    }
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps(config))
    outs = [tmp_path / name for name in ("a", "b", "c")]
    for out, threads in zip(outs, ("1", "2", "1")):
        code = main(["run", "--config", str(cfg), "--out", str(out), "--threads", threads])
        assert code == 0
    results = [(out / "results.csv").read_bytes() for out in outs]
    curves = [(out / "curves.csv").read_bytes() for out in outs]
    passed = all(r == results[0] for r in results) and all(c == curves[0] for c in curves)
    _report(
        "10 reproducibility",
        passed,
        f"results.csv identical across rerun and --threads 1 vs 2 "
        f"({len(results[0])} bytes), curves.csv identical ({len(curves[0])} bytes)",
    )
