"""Empirical verification of the simplex algorithm's analysis quantities.

Every check here measures the real update rule by Monte Carlo and compares
against an independently computed quantity: a closed-form branch enumeration
for one-step drifts, an exhaustive outcome-tree expectation for small
instances, optional-stopping recovery bounds, and the embedded-chain decay
envelope. The Monte-Carlo side always runs the actual ``samba_update`` (or
a caller-supplied substitute, which is how tampering fixtures force red).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import BanditInstance, BanditLabError, InstanceTooLarge
from .samba import SambaState, samba_init, samba_leader, samba_select, samba_update


class PrepFailure(BanditLabError, RuntimeError):
    """A state-preparation routine could not produce a qualifying state."""


class BurnInFailure(BanditLabError, RuntimeError):
    """Too few replications reached the required state before injection."""


class DegenerateFit(BanditLabError, ValueError):
    """Curve unsuitable for a log fit (too few points or too narrow a span)."""


def _default_rng(seed: int = 0x5EED) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


# ---------------------------------------------------------------------------
# Analysis constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalysisConstants:
    """Derived quantities controlling the drift analysis.

    ``theory_valid`` flags whether the step size is small enough for the
    negative-drift regime (alpha < gap / (r_best - gap)); it is a flag, never
    an error. ``epsilon`` splits the remaining slack in half; ``xi`` is the
    per-round expected decrease of 1/p_opt while the best arm is not the
    leader; ``zeta`` converts corruption cost into drift excursion;
    ``large_corruption_threshold`` (gap/4) separates small from large
    per-round corruption in the recovery bookkeeping.
    """

    alpha: float
    r_best: float
    gap: float
    alpha_bound: float
    theory_valid: bool
    epsilon: float
    xi: float
    zeta: float
    large_corruption_threshold: float


def analysis_constants(instance: BanditInstance, alpha: float) -> AnalysisConstants:
    if instance.min_gap <= 0.0:
        raise ValueError("analysis constants need an instance with a unique optimum")
    r_best = instance.optimal_mean
    gap = instance.min_gap
    r_second = r_best - gap
    alpha_bound = gap / r_second if r_second > 0 else math.inf
    theory_valid = alpha < alpha_bound
    if r_second > 0:
        epsilon = 0.5 * (r_best / (r_second * (1.0 + alpha)) - 1.0)
    else:
        epsilon = math.inf
    # Algebraically alpha*r_best/(1+alpha) - alpha*r_second*(1+epsilon) with the
    # half-slack epsilon above; this form stays finite when r_second == 0.
    xi = 0.5 * alpha * (r_best / (1.0 + alpha) - r_second)
    if math.isfinite(epsilon):
        zeta = xi / (alpha * (1.0 + epsilon + 1.0 / (1.0 + alpha)))
    else:
        zeta = 0.0
    return AnalysisConstants(
        alpha=alpha,
        r_best=r_best,
        gap=gap,
        alpha_bound=alpha_bound,
        theory_valid=theory_valid,
        epsilon=epsilon,
        xi=xi,
        zeta=zeta,
        large_corruption_threshold=gap / 4.0,
    )


# ---------------------------------------------------------------------------
# State preparation
# ---------------------------------------------------------------------------


def prep_nonleader(
    instance: BanditInstance,
    alpha: float,
    rng: np.random.Generator,
    *,
    target_p_opt: float = 0.08,
    min_lead_ratio: float = 10.0,
    max_rounds: int = 500_000,
) -> SambaState:
    """A state where the best arm is suppressed below the leader.

    Runs the algorithm while the best arm's rewards are zeroed out (the
    regime the non-leader drift bound is about), until its probability has
    decayed to ``target_p_opt`` and the leader holds at least
    ``min_lead_ratio`` times that mass. The negative-drift inequality needs
    the leader's mass to clearly dominate the suppressed arm's — as the
    ratio approaches alpha*(1+epsilon)/epsilon from above, the true margin
    over the bound shrinks below what a Monte-Carlo run of any reasonable
    size can resolve — so the prep insists on enough headroom to measure.
    """
    a_star = instance.optimal_arm
    means = list(instance.means)
    means[a_star] = 0.0
    state = samba_init(instance.k, alpha)
    for _ in range(max_rounds):
        p_star = state.p[a_star]
        if (
            p_star <= target_p_opt
            and state.leader != a_star
            and state.p[state.leader] >= min_lead_ratio * p_star
        ):
            return state
        arm = samba_select(state, rng)
        reward = 1 if rng.random() < means[arm] else 0
        samba_update(state, arm, reward)
    raise PrepFailure(
        f"no state with p_opt<={target_p_opt} and lead ratio>={min_lead_ratio} "
        f"within {max_rounds} suppressed rounds"
    )


def prep_leader(
    instance: BanditInstance,
    alpha: float,
    rng: np.random.Generator,
    *,
    target_p_opt: float = 0.6,
    max_rounds: int = 500_000,
) -> SambaState:
    """A state where the best arm leads with probability >= target."""
    a_star = instance.optimal_arm
    means = instance.means
    state = samba_init(instance.k, alpha)
    for _ in range(max_rounds):
        if state.p[a_star] >= target_p_opt:
            return state
        arm = samba_select(state, rng)
        reward = 1 if rng.random() < means[arm] else 0
        samba_update(state, arm, reward)
    raise PrepFailure(
        f"best arm did not reach p={target_p_opt} within {max_rounds} clean rounds"
    )


# ---------------------------------------------------------------------------
# Exact one-step drift enumeration (independent of the update code)
# ---------------------------------------------------------------------------


def exact_nonleader_drift(state: SambaState, means: Sequence[float], a_star: int) -> float:
    """E[1/p*(t+1) - 1/p*(t)] by enumerating the three branches that move it.

    With x = 1/p*, only two outcomes change x: the best arm itself is pulled
    and rewarded (x shrinks by alpha/(1+alpha) * x) or the leader is pulled
    and rewarded (x grows by alpha*x / (p_lead*x - alpha)); everything else
    leaves x alone.
    """
    lead = state.leader
    if lead == a_star:
        raise ValueError("state's leader is the best arm; non-leader drift undefined")
    alpha = state.alpha
    p_star = state.p[a_star]
    p_lead = state.p[lead]
    x = 1.0 / p_star
    down = means[a_star] * p_star * (x / (1.0 + alpha) - x)
    up = means[lead] * p_lead * (alpha * x / (p_lead * x - alpha))
    return down + up


def exact_leader_qdrift(state: SambaState, means: Sequence[float], a_star: int) -> float:
    """E[q(t+1) - q(t)] for q = 1 - p* while the best arm leads.

    Each non-leader coordinate moves by alpha*p_a^2*(r_a - r_lead) in
    expectation: +alpha*p_a when itself pulled and rewarded, -alpha*p_a^2 /
    p_lead when the leader is.
    """
    if state.leader != a_star:
        raise ValueError("state's leader is not the best arm; leader drift undefined")
    alpha = state.alpha
    r_star = means[a_star]
    return sum(
        alpha * p * p * (means[a] - r_star)
        for a, p in enumerate(state.p)
        if a != a_star
    )


# ---------------------------------------------------------------------------
# Drift checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DriftReport:
    check: str
    mean_drift: float
    ci_half_width: float
    samples: int
    bound: float
    exact_drift: float
    passed: bool
    p_opt: float
    p_lead: float
    cost: float


def _worst_case_means_nonleader(
    instance: BanditInstance, leader: int, cost: float
) -> list[float]:
    """Cost-c shift most hostile to the non-leader drift: best arm down, leader up."""
    means = list(instance.means)
    a_star = instance.optimal_arm
    means[a_star] = max(0.0, means[a_star] - cost)
    means[leader] = min(1.0, means[leader] + cost)
    return means


def _worst_case_means_leader(instance: BanditInstance, cost: float) -> list[float]:
    """Cost-c shift most hostile to the leader drift: every suboptimal arm up, best down."""
    means = [min(1.0, m + cost) for m in instance.means]
    a_star = instance.optimal_arm
    means[a_star] = max(0.0, instance.means[a_star] - cost)
    return means


def _mc_one_step(
    state: SambaState,
    means: Sequence[float],
    metric: Callable[[SambaState], float],
    samples: int,
    rng: np.random.Generator,
    update_fn: Callable,
) -> tuple[float, float]:
    """Mean and 3-sigma CI half-width of metric(next) - metric(state)."""
    base = metric(state)
    total = 0.0
    total_sq = 0.0
    for _ in range(samples):
        arm = samba_select(state, rng)
        reward = 1 if rng.random() < means[arm] else 0
        nxt = update_fn(state.copy(), arm, reward)
        d = metric(nxt) - base
        total += d
        total_sq += d * d
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    ci = 3.0 * math.sqrt(var / samples)
    return mean, ci


def check_drift_nonleader(
    instance: BanditInstance,
    alpha: float,
    *,
    cost: float = 0.0,
    samples: int = 1_000_000,
    rng: np.random.Generator | None = None,
    state_prep: Callable[[np.random.Generator], SambaState] | None = None,
    update_fn: Callable = samba_update,
) -> DriftReport:
    """Measured drift of 1/p* in a suppressed state vs the analysis bound.

    Pass iff mean + CI <= -xi + alpha*cost*(1 + epsilon + 1/(1+alpha)). The
    single-step corruption applied is the worst case of total shift ``cost``.
    """
    consts = analysis_constants(instance, alpha)
    if not consts.theory_valid:
        raise ValueError("step size violates the drift condition; bound undefined")
    rng = rng if rng is not None else _default_rng()
    state = state_prep(rng) if state_prep is not None else prep_nonleader(instance, alpha, rng)
    a_star = instance.optimal_arm
    if state.leader == a_star:
        raise PrepFailure("prepared state has the best arm as leader")
    means = _worst_case_means_nonleader(instance, state.leader, cost)
    exact = exact_nonleader_drift(state, means, a_star)
    mean, ci = _mc_one_step(
        state, means, lambda s: 1.0 / s.p[a_star], samples, rng, update_fn
    )
    bound = -consts.xi + alpha * cost * (1.0 + consts.epsilon + 1.0 / (1.0 + alpha))
    return DriftReport(
        check="drift_nonleader",
        mean_drift=mean,
        ci_half_width=ci,
        samples=samples,
        bound=bound,
        exact_drift=exact,
        passed=mean + ci <= bound,
        p_opt=state.p[a_star],
        p_lead=state.p[state.leader],
        cost=cost,
    )


def check_drift_leader(
    instance: BanditInstance,
    alpha: float,
    *,
    cost: float = 0.0,
    samples: int = 1_000_000,
    rng: np.random.Generator | None = None,
    state_prep: Callable[[np.random.Generator], SambaState] | None = None,
    update_fn: Callable = samba_update,
) -> DriftReport:
    """Measured drift of q = 1 - p* once the best arm leads, vs the K-diluted bound.

    Pass iff mean + CI <= alpha*(2*cost - gap)*q^2/K (which is -alpha*gap*q^2/K
    when clean). Meaningful as an upper bound for cost <= gap/2.
    """
    consts = analysis_constants(instance, alpha)
    rng = rng if rng is not None else _default_rng()
    state = state_prep(rng) if state_prep is not None else prep_leader(instance, alpha, rng)
    a_star = instance.optimal_arm
    if state.leader != a_star or state.p[a_star] < 0.5:
        raise PrepFailure("prepared state does not have the best arm leading with p >= 1/2")
    means = _worst_case_means_leader(instance, cost)
    exact = exact_leader_qdrift(state, means, a_star)
    q0 = 1.0 - state.p[a_star]
    mean, ci = _mc_one_step(
        state, means, lambda s: 1.0 - s.p[a_star], samples, rng, update_fn
    )
    bound = alpha * (2.0 * cost - consts.gap) * q0 * q0 / instance.k
    return DriftReport(
        check="drift_leader",
        mean_drift=mean,
        ci_half_width=ci,
        samples=samples,
        bound=bound,
        exact_drift=exact,
        passed=mean + ci <= bound,
        p_opt=state.p[a_star],
        p_lead=state.p[state.leader],
        cost=cost,
    )


def tampered_update(state: SambaState, pulled: int, reward: int) -> SambaState:
    """Deliberately broken update rule so the drift checks can be shown to fail.

    Same bookkeeping as samba_update except a rewarded non-leader pull
    *shrinks* instead of grows: mass drains toward whoever currently leads,
    so in a suppressed-best-arm state 1/p* drifts upward and the non-leader
    checks go red. Wired to the CLI's hidden ``--tamper-update`` flag.
    """
    if reward == 0:
        return state
    p = state.p
    lead = state.leader
    alpha = state.alpha
    if pulled == lead:
        p_lead = p[lead]
        for a in range(len(p)):
            if a != lead:
                p[a] -= alpha * p[a] * p[a] / p_lead
    else:
        p[pulled] *= 1.0 - alpha
    p[lead] = 1.0 - sum(v for a, v in enumerate(p) if a != lead)
    state.leader = samba_leader(p)
    return state


# ---------------------------------------------------------------------------
# Vectorized episode batches (one-step equivalence with samba_update is
# asserted by the test suite; formulas match elementwise)
# ---------------------------------------------------------------------------


def samba_batch_step(
    P: np.ndarray,
    alpha: float,
    means: np.ndarray,
    u_arm: np.ndarray,
    u_rew: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Advance a (rows, K) matrix of independent states by one round in place.

    Row-wise identical to samba_select + samba_update driven by the two
    uniform vectors. Returns (arms, rewards).
    """
    n, k = P.shape
    leaders = np.argmax(P, axis=1)
    cum = np.cumsum(P, axis=1)
    arms = np.minimum((cum <= u_arm[:, None]).sum(axis=1), k - 1)
    rewards = u_rew < means[arms]
    rows = np.nonzero(rewards)[0]
    if rows.size:
        r_arms = arms[rows]
        r_leads = leaders[rows]
        lead_rows = rows[r_arms == r_leads]
        non_rows = rows[r_arms != r_leads]
        if lead_rows.size:
            p_lead = P[lead_rows, leaders[lead_rows]]
            P[lead_rows] -= alpha * P[lead_rows] * P[lead_rows] / p_lead[:, None]
        if non_rows.size:
            P[non_rows, arms[non_rows]] *= 1.0 + alpha
        rest = P[rows].sum(axis=1) - P[rows, r_leads]
        P[rows, r_leads] = 1.0 - rest
    return arms, rewards


def _batch_init(reps: int, k: int) -> np.ndarray:
    return np.full((reps, k), 1.0 / k)


# ---------------------------------------------------------------------------
# Recovery time after injected corruption
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RecoveryReport:
    mean_steps: float
    ci_half_width: float
    bound: float
    reps_used: int
    burnin_failures: int
    passed: bool


def check_recovery_time(
    instance: BanditInstance,
    alpha: float,
    cost: float | Sequence[float],
    *,
    reps: int = 10_000,
    t0: int = 20_000,
    rng: np.random.Generator | None = None,
    max_wait: int = 200_000,
) -> RecoveryReport:
    """Mean rounds until q returns below its pre-injection level.

    Burn the batch in cleanly for t0 rounds, drop replications that have not
    reached q <= 1/2 (counted; more than half failing raises
    :class:`BurnInFailure`), then corrupt one round per listed cost
    (suppressing the best arm) and count rounds until q(t) <= q(t0). The
    whole injection window counts toward every replication's clock — a dip
    below q(t0) between injections is not a recovery, since more corruption
    is still coming. Pass iff the mean is below 4*total_cost/gap plus the
    3-sigma CI; with zero total cost there is no claim to check and the
    report passes vacuously.
    """
    costs = [cost] if isinstance(cost, (int, float)) else list(cost)
    total_cost = float(sum(costs))
    rng = rng if rng is not None else _default_rng()
    a_star = instance.optimal_arm
    true_means = np.asarray(instance.means)
    P = _batch_init(reps, instance.k)

    for _ in range(t0):
        samba_batch_step(P, alpha, true_means, rng.random(reps), rng.random(reps))

    q0 = 1.0 - P[:, a_star]
    ok = q0 <= 0.5
    burnin_failures = int(reps - ok.sum())
    if burnin_failures > reps // 2:
        raise BurnInFailure(
            f"{burnin_failures}/{reps} replications above q=1/2 after {t0} clean rounds"
        )
    P = P[ok]
    q0 = q0[ok]
    n = P.shape[0]

    steps = np.zeros(n, dtype=np.int64)
    for c in costs:
        shifted = true_means.copy()
        shifted[a_star] = max(0.0, shifted[a_star] - c)
        samba_batch_step(P, alpha, shifted, rng.random(n), rng.random(n))
        steps += 1
    active = (1.0 - P[:, a_star]) > q0

    waited = 0
    while active.any():
        if waited >= max_wait:
            raise PrepFailure(f"{int(active.sum())} replications unrecovered after {max_wait} rounds")
        samba_batch_step(P, alpha, true_means, rng.random(n), rng.random(n))
        waited += 1
        steps[active] += 1
        q = 1.0 - P[:, a_star]
        active &= q > q0

    mean = float(steps.mean())
    ci = 3.0 * float(steps.std(ddof=1)) / math.sqrt(n) if n > 1 else 0.0
    bound = 4.0 * total_cost / instance.min_gap
    passed = True if total_cost == 0.0 else mean <= bound + ci
    return RecoveryReport(
        mean_steps=mean,
        ci_half_width=ci,
        bound=bound,
        reps_used=n,
        burnin_failures=burnin_failures,
        passed=passed,
    )


# ---------------------------------------------------------------------------
# Embedded-chain decay of q
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecayReport:
    s_grid: tuple[int, ...]
    means: tuple[float, ...]
    bounds: tuple[float, ...]
    ci_half_widths: tuple[float, ...]
    rows_used: int
    passed: bool


def check_qhat_decay(
    instance: BanditInstance,
    alpha: float,
    *,
    horizon: int = 50_000,
    reps: int = 200,
    s_grid: Sequence[int] = (100, 1_000, 10_000),
    rng: np.random.Generator | None = None,
) -> DecayReport:
    """Empirical mean of q along the embedded chain vs 2K/(4K + alpha*gap*s).

    The chain of a clean replication consists of the rounds with q <= 1/2,
    re-indexed s = 0, 1, 2, ...; replications whose chain never reaches
    max(s_grid) are dropped (more than 5% dropping fails the prep).
    """
    rng = rng if rng is not None else _default_rng()
    grid = tuple(int(s) for s in s_grid)
    s_max = max(grid)
    a_star = instance.optimal_arm
    k = instance.k
    gap = instance.min_gap
    true_means = np.asarray(instance.means)
    P = _batch_init(reps, k)
    counters = np.zeros(reps, dtype=np.int64)
    recorded = np.full((reps, len(grid)), np.nan)
    grid_arr = np.asarray(grid)

    for _ in range(horizon):
        q = 1.0 - P[:, a_star]
        in_chain = q <= 0.5
        hits = in_chain[:, None] & (counters[:, None] == grid_arr[None, :])
        if hits.any():
            rows, cols = np.nonzero(hits)
            recorded[rows, cols] = q[rows]
        counters[in_chain] += 1
        if counters.min() > s_max:
            break
        samba_batch_step(P, alpha, true_means, rng.random(reps), rng.random(reps))

    complete = counters > s_max
    used = int(complete.sum())
    if used < 0.95 * reps:
        raise PrepFailure(
            f"only {used}/{reps} replications produced an embedded chain of length {s_max}"
        )
    vals = recorded[complete]
    means = vals.mean(axis=0)
    sds = vals.std(axis=0, ddof=1)
    cis = 3.0 * sds / math.sqrt(used)
    bounds = 2.0 * k / (4.0 * k + alpha * gap * grid_arr)
    passed = bool(np.all(means <= bounds + cis))
    return DecayReport(
        s_grid=grid,
        means=tuple(float(v) for v in means),
        bounds=tuple(float(b) for b in bounds),
        ci_half_widths=tuple(float(c) for c in cis),
        rows_used=used,
        passed=passed,
    )


def quadratic_decay_envelope(a0: float, gamma: float, t: int) -> float:
    """Envelope a0 / (1 + gamma*t*a0) for a_{t+1} = a_t - gamma*a_t^2."""
    return a0 / (1.0 + gamma * t * a0)


# ---------------------------------------------------------------------------
# Exact expected pseudo-regret by outcome-tree enumeration
# ---------------------------------------------------------------------------


def exact_regret_oracle(instance: BanditInstance, alpha: float, horizon: int) -> float:
    """Exact E[pseudo-regret] of a clean run, by exhaustive enumeration.

    Collapses the K+1 outcomes per round (each arm pulled-and-rewarded, or
    any zero-reward pull, which never moves the state) and walks the tree.
    The transition arithmetic is written out here independently of
    samba_update. Guarded to K <= 3, horizon <= 10.
    """
    k = instance.k
    if k > 3 or horizon > 10:
        raise InstanceTooLarge(
            f"enumeration over (K+1)^T outcomes infeasible for K={k}, T={horizon}"
        )
    means = instance.means
    gaps = instance.gaps
    total = 0.0
    leaf_mass = 0.0

    def argmax_low(p: tuple[float, ...]) -> int:
        best, lead = p[0], 0
        for a in range(1, len(p)):
            if p[a] > best:
                best, lead = p[a], a
        return lead

    def advance(p: tuple[float, ...], lead: int, arm: int) -> tuple[float, ...]:
        q = list(p)
        if arm == lead:
            for a in range(k):
                if a != lead:
                    q[a] = q[a] - alpha * q[a] * q[a] / p[lead]
        else:
            q[arm] = q[arm] * (1.0 + alpha)
        q[lead] = 1.0 - (sum(q) - q[lead])
        return tuple(q)

    def walk(p: tuple[float, ...], t: int, prob: float) -> None:
        nonlocal total, leaf_mass
        if t == horizon:
            leaf_mass += prob
            return
        total += prob * sum(pa * g for pa, g in zip(p, gaps))
        lead = argmax_low(p)
        stay = 1.0 - sum(pa * m for pa, m in zip(p, means))
        if stay > 0.0:
            walk(p, t + 1, prob * stay)
        for arm in range(k):
            w = p[arm] * means[arm]
            if w > 0.0:
                walk(advance(p, lead, arm), t + 1, prob * w)

    walk(tuple([1.0 / k] * k), 0, 1.0)
    if abs(leaf_mass - 1.0) > 1e-12:
        raise RuntimeError(f"outcome probabilities sum to {leaf_mass!r}, not 1")
    return total


def mc_regret(
    instance: BanditInstance,
    alpha: float,
    horizon: int,
    episodes: int,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Monte-Carlo mean pseudo-regret of clean runs and its 3-sigma CI."""
    rng = rng if rng is not None else _default_rng()
    true_means = np.asarray(instance.means)
    gaps = np.asarray(instance.gaps)
    P = _batch_init(episodes, instance.k)
    regret = np.zeros(episodes)
    for _ in range(horizon):
        arms, _ = samba_batch_step(
            P, alpha, true_means, rng.random(episodes), rng.random(episodes)
        )
        regret += gaps[arms]
    mean = float(regret.mean())
    ci = 3.0 * float(regret.std(ddof=1)) / math.sqrt(episodes)
    return mean, ci


# ---------------------------------------------------------------------------
# Logarithmic growth fitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogFit:
    intercept: float
    slope: float
    rss: float


def fit_log_regret(curve: Sequence[tuple[int, float]]) -> LogFit:
    """Least-squares fit regret(t) ~ intercept + slope * ln(t).

    Needs at least 5 checkpoints spanning at least one decade, otherwise
    :class:`DegenerateFit`.
    """
    if len(curve) < 5:
        raise DegenerateFit(f"need >= 5 checkpoints, got {len(curve)}")
    ts = np.asarray([t for t, _ in curve], dtype=float)
    ys = np.asarray([r for _, r in curve], dtype=float)
    if ts.min() < 1 or ts.max() / ts.min() < 10.0:
        raise DegenerateFit("checkpoints must span at least one decade of rounds")
    x = np.log(ts)
    design = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(design, ys, rcond=None)
    resid = ys - design @ coef
    return LogFit(intercept=float(coef[0]), slope=float(coef[1]), rss=float(resid @ resid))


def compare_log_vs_logsq(curve: Sequence[tuple[int, float]]) -> tuple[float, float]:
    """Residual sums of a ln(t) fit and a (ln t)^2 fit of the same curve."""
    fit = fit_log_regret(curve)
    ts = np.asarray([t for t, _ in curve], dtype=float)
    ys = np.asarray([r for _, r in curve], dtype=float)
    x2 = np.log(ts) ** 2
    design = np.column_stack([np.ones_like(x2), x2])
    coef, *_ = np.linalg.lstsq(design, ys, rcond=None)
    resid = ys - design @ coef
    return fit.rss, float(resid @ resid)


# ---------------------------------------------------------------------------
# Whole-suite driver (used by the CLI)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class SuiteSizes:
    drift_samples: int = 1_000_000
    recovery_reps: int = 10_000
    recovery_t0: int = 20_000
    decay_reps: int = 200
    decay_horizon: int = 50_000
    decay_grid: tuple[int, ...] = (100, 1_000, 10_000)
    mc_episodes: int = 1_000_000
    fit_reps: int = 40
    fit_horizon: int = 100_000

    @staticmethod
    def fast() -> "SuiteSizes":
        return SuiteSizes(
            drift_samples=400_000,
            recovery_reps=1_000,
            recovery_t0=8_000,
            decay_reps=60,
            decay_horizon=30_000,
            decay_grid=(100, 1_000, 5_000),
            mc_episodes=100_000,
            fit_reps=10,
            fit_horizon=30_000,
        )


def run_verification_suite(
    instance: BanditInstance,
    alpha: float,
    *,
    sizes: SuiteSizes | None = None,
    seed: int = 2024,
    update_fn: Callable = samba_update,
    log_curve: Sequence[tuple[int, float]] | None = None,
) -> list[CheckOutcome]:
    """Run every analysis check; the caller supplies the clean regret curve
    for the log-fit stage (the CLI produces one with the engine)."""
    sizes = sizes or SuiteSizes()
    consts = analysis_constants(instance, alpha)
    outcomes = [
        CheckOutcome(
            name="constants",
            passed=consts.theory_valid,
            detail=(
                f"alpha={alpha} vs bound={consts.alpha_bound:.6g}, "
                f"epsilon={consts.epsilon:.6g}, xi={consts.xi:.6g}, zeta={consts.zeta:.6g}"
            ),
        )
    ]
    half_gap_eighth = instance.min_gap / 8.0
    drift_cases = [
        ("drift_nonleader_clean", check_drift_nonleader, 0.0),
        ("drift_nonleader_corrupted", check_drift_nonleader, half_gap_eighth),
        ("drift_leader_clean", check_drift_leader, 0.0),
        ("drift_leader_corrupted", check_drift_leader, half_gap_eighth),
    ]
    for i, (name, fn, cost) in enumerate(drift_cases):
        report = fn(
            instance,
            alpha,
            cost=cost,
            samples=sizes.drift_samples,
            rng=_default_rng(seed + i),
            update_fn=update_fn,
        )
        outcomes.append(
            CheckOutcome(
                name=name,
                passed=report.passed,
                detail=(
                    f"drift={report.mean_drift:.3e} +/- {report.ci_half_width:.1e} "
                    f"vs bound={report.bound:.3e} (exact {report.exact_drift:.3e})"
                ),
            )
        )

    rec = check_recovery_time(
        instance,
        alpha,
        instance.optimal_mean,
        reps=sizes.recovery_reps,
        t0=sizes.recovery_t0,
        rng=_default_rng(seed + 11),
    )
    outcomes.append(
        CheckOutcome(
            name="recovery",
            passed=rec.passed,
            detail=(
                f"mean={rec.mean_steps:.2f} +/- {rec.ci_half_width:.2f} rounds "
                f"vs bound={rec.bound:.1f} ({rec.reps_used} reps)"
            ),
        )
    )

    decay = check_qhat_decay(
        instance,
        alpha,
        horizon=sizes.decay_horizon,
        reps=sizes.decay_reps,
        s_grid=sizes.decay_grid,
        rng=_default_rng(seed + 12),
    )
    decay_detail = ", ".join(
        f"s={s}: {m:.4f}<= {b:.4f}+{c:.4f}"
        for s, m, b, c in zip(decay.s_grid, decay.means, decay.bounds, decay.ci_half_widths)
    )
    outcomes.append(CheckOutcome(name="decay", passed=decay.passed, detail=decay_detail))

    from .core import make_instance  # local import to avoid cycle at module load

    small = make_instance((0.9, 0.5))
    exact = exact_regret_oracle(small, 0.1, 8)
    mc_mean, mc_ci = mc_regret(small, 0.1, 8, sizes.mc_episodes, _default_rng(seed + 13))
    outcomes.append(
        CheckOutcome(
            name="oracle_mc",
            passed=abs(mc_mean - exact) <= mc_ci,
            detail=f"mc={mc_mean:.5f} +/- {mc_ci:.5f} vs exact={exact:.5f}",
        )
    )

    if log_curve is not None:
        tail = [(t, r) for t, r in log_curve if t >= 1000]
        try:
            fit = fit_log_regret(tail)
            rss_log, rss_sq = compare_log_vs_logsq(tail)
            cap = instance.k / (alpha * instance.min_gap)
            ok = 0.0 < fit.slope <= cap and rss_log < rss_sq
            detail = (
                f"slope={fit.slope:.1f} (cap {cap:.0f}), "
                f"rss ln={rss_log:.3g} vs ln^2={rss_sq:.3g}"
            )
        except DegenerateFit as exc:
            ok, detail = False, f"degenerate fit: {exc}"
        outcomes.append(CheckOutcome(name="log_fit", passed=ok, detail=detail))

    return outcomes
