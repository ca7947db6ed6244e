"""Bandit laboratory for reward corruption experiments.

Simplex policy-gradient learner plus elimination/phase/OMD baselines, a
budgeted mean-shifting adversary, a deterministic seeded simulation engine,
and an empirical verification harness for the drift, recovery, and decay
properties the learner's regret argument rests on.
"""

from .adversary import (
    SCHEMES,
    STRATEGIES,
    BudgetExceedsHorizonCapacity,
    CorruptionLedger,
    CorruptionPlan,
    apply_corruption,
    build_schedule,
    default_per_step_cost,
    make_ledger,
)
from .baselines import (
    ALGORITHMS,
    BarbarPolicy,
    CBarbarPolicy,
    FastSlowEliminationPolicy,
    TsallisInfPolicy,
    make_policy,
    tsallis_solve_normalization,
)
from .core import (
    BanditInstance,
    BanditLabError,
    Trace,
    checkpoint_grid,
    draw_reward,
    make_instance,
    pseudo_regret,
)
from .engine import (
    GENERATOR_NAME,
    AlgorithmSpec,
    ExperimentConfig,
    InstanceSpec,
    PlanSpec,
    bench_runtime,
    make_stream,
    run_batch,
    run_episode,
    split_seed,
)
from .samba import (
    SambaPolicy,
    SambaState,
    samba_init,
    samba_leader,
    samba_select,
    samba_update,
)
from .verify import (
    AnalysisConstants,
    SuiteSizes,
    analysis_constants,
    check_drift_leader,
    check_drift_nonleader,
    check_qhat_decay,
    check_recovery_time,
    compare_log_vs_logsq,
    exact_regret_oracle,
    fit_log_regret,
    mc_regret,
    quadratic_decay_envelope,
    run_verification_suite,
    samba_batch_step,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "AlgorithmSpec",
    "AnalysisConstants",
    "BanditInstance",
    "BanditLabError",
    "BarbarPolicy",
    "BudgetExceedsHorizonCapacity",
    "CBarbarPolicy",
    "CorruptionLedger",
    "CorruptionPlan",
    "ExperimentConfig",
    "FastSlowEliminationPolicy",
    "GENERATOR_NAME",
    "InstanceSpec",
    "PlanSpec",
    "SCHEMES",
    "STRATEGIES",
    "SambaPolicy",
    "SambaState",
    "SuiteSizes",
    "Trace",
    "TsallisInfPolicy",
    "analysis_constants",
    "apply_corruption",
    "bench_runtime",
    "build_schedule",
    "check_drift_leader",
    "check_drift_nonleader",
    "check_qhat_decay",
    "check_recovery_time",
    "checkpoint_grid",
    "compare_log_vs_logsq",
    "default_per_step_cost",
    "draw_reward",
    "exact_regret_oracle",
    "fit_log_regret",
    "make_instance",
    "make_ledger",
    "make_policy",
    "make_stream",
    "mc_regret",
    "pseudo_regret",
    "quadratic_decay_envelope",
    "run_batch",
    "run_episode",
    "run_verification_suite",
    "samba_batch_step",
    "samba_init",
    "samba_leader",
    "samba_select",
    "samba_update",
    "split_seed",
    "tsallis_solve_normalization",
    "__version__",
]
