"""Budgeted mean-shifting adversary.

The adversary acts before each round's arm draw: it may shift the expected
rewards to a corrupted vector r', paying cost max_a |r_a - r'_a(t)| from a
fixed budget C. It sees the learner's current sampling distribution but not
the arm about to be drawn. Where the corruption lands in time is fixed by a
*schedule* built ahead of the run; how hard each scheduled round is hit is
capped by ``per_step_cost`` and by whatever budget remains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import BanditInstance, BanditLabError

SCHEMES = ("none", "consecutive", "even_steps", "delayed_block", "random_early", "custom")
STRATEGIES = ("suppress_optimal", "swap_extremes")


class BudgetExceedsHorizonCapacity(BanditLabError, ValueError):
    """The schedule cannot place enough corrupted rounds inside the horizon."""


@dataclass(frozen=True)
class CorruptionPlan:
    """Immutable description of what the adversary intends to do.

    scheme : one of SCHEMES
        "consecutive"  — rounds 0..n-1
        "even_steps"   — rounds 0, 2, 4, ...
        "delayed_block"— consecutive rounds starting at horizon // 4
        "random_early" — n distinct rounds drawn from the first tenth
        "custom"       — explicit rounds, caller-controlled
    budget : float
        Total corruption budget C >= 0.
    strategy : one of STRATEGIES
        "suppress_optimal" pushes the best arm's mean toward 0;
        "swap_extremes" additionally pushes the worst arm's mean toward 1.
    horizon : int
        Number of rounds T the schedule must fit into.
    custom_rounds : tuple of int
        Only used by scheme "custom".
    """

    scheme: str
    budget: float
    strategy: str = "suppress_optimal"
    horizon: int = 0
    custom_rounds: tuple[int, ...] = ()

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}, expected one of {SCHEMES}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}, expected one of {STRATEGIES}")
        if self.budget < 0:
            raise ValueError(f"budget must be >= 0, got {self.budget}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")


def default_per_step_cost(instance: BanditInstance, strategy: str) -> float:
    """Largest single-round cost the strategy can realize on this instance."""
    r_best = instance.optimal_mean
    if strategy == "suppress_optimal":
        return r_best
    worst = min(instance.means)
    return max(r_best, 1.0 - worst)


def build_schedule(
    plan: CorruptionPlan, per_step_cost: float, rng: np.random.Generator | None = None
) -> tuple[int, ...]:
    """Rounds at which corruption will be applied, sorted ascending.

    The number of rounds is ceil(budget / per_step_cost): every scheduled
    round carries the full per-step cost except the last, which carries the
    residual. Raises :class:`BudgetExceedsHorizonCapacity` when the scheme
    cannot place that many rounds inside the horizon.
    """
    if plan.scheme == "none" or plan.budget == 0.0:
        return ()
    if per_step_cost <= 0:
        raise ValueError(f"per_step_cost must be > 0, got {per_step_cost}")
    n = math.ceil(plan.budget / per_step_cost)
    t_max = plan.horizon

    if plan.scheme == "custom":
        rounds = tuple(sorted(int(t) for t in plan.custom_rounds))
        if rounds and (rounds[0] < 0 or rounds[-1] >= t_max):
            raise BudgetExceedsHorizonCapacity(
                f"custom round outside horizon {t_max}: {rounds}"
            )
        if len(set(rounds)) != len(rounds):
            raise ValueError("custom rounds must be distinct")
        return rounds

    if plan.scheme == "consecutive":
        if n > t_max:
            raise BudgetExceedsHorizonCapacity(
                f"{n} consecutive corrupted rounds do not fit in horizon {t_max}"
            )
        return tuple(range(n))
    if plan.scheme == "even_steps":
        if 2 * (n - 1) >= t_max:
            raise BudgetExceedsHorizonCapacity(
                f"{n} even-step corrupted rounds do not fit in horizon {t_max}"
            )
        return tuple(range(0, 2 * n, 2))
    if plan.scheme == "delayed_block":
        start = t_max // 4
        if start + n > t_max:
            raise BudgetExceedsHorizonCapacity(
                f"{n} corrupted rounds starting at {start} do not fit in horizon {t_max}"
            )
        return tuple(range(start, start + n))
    if plan.scheme == "random_early":
        window = t_max // 10
        if n > window:
            raise BudgetExceedsHorizonCapacity(
                f"{n} distinct corrupted rounds do not fit in the first {window} rounds"
            )
        if rng is None:
            raise ValueError("random_early schedule needs an rng")
        picks = rng.choice(window, size=n, replace=False)
        return tuple(sorted(int(t) for t in picks))
    raise AssertionError(f"unhandled scheme {plan.scheme}")


@dataclass
class CorruptionLedger:
    """Runtime budget accounting for one episode.

    ``spent`` increases by the *realized* cost of each corrupted round
    (max_a |r_a - r'_a|, recomputed from the shifted vector), so
    ``spent <= plan.budget`` holds at all times.
    """

    plan: CorruptionPlan
    per_step_cost: float
    schedule: tuple[int, ...]
    spent: float = 0.0
    _scheduled: frozenset = field(init=False, repr=False)

    def __post_init__(self):
        self._scheduled = frozenset(self.schedule)

    def remaining(self) -> float:
        return self.plan.budget - self.spent


def make_ledger(
    instance: BanditInstance,
    plan: CorruptionPlan,
    per_step_cost: float | None = None,
    rng: np.random.Generator | None = None,
) -> CorruptionLedger:
    """Build the episode ledger, defaulting per-step cost to the strategy max."""
    if per_step_cost is None:
        per_step_cost = default_per_step_cost(instance, plan.strategy)
    schedule = build_schedule(plan, per_step_cost, rng)
    return CorruptionLedger(plan=plan, per_step_cost=per_step_cost, schedule=schedule)


def apply_corruption(
    instance: BanditInstance, ledger: CorruptionLedger, t: int
) -> tuple[tuple[float, ...], float]:
    """Corrupted means and realized cost for round t.

    Unscheduled rounds (and rounds after the budget ran out) return the true
    means with zero cost. Returned vectors must be treated as read-only.
    """
    means = instance.means
    if t not in ledger._scheduled:
        return means, 0.0
    remaining = ledger.remaining()
    if remaining <= 0.0:
        return means, 0.0
    shift = min(ledger.per_step_cost, remaining)
    shifted = list(means)
    a_best = instance.optimal_arm
    shifted[a_best] = max(0.0, means[a_best] - shift)
    if ledger.plan.strategy == "swap_extremes":
        a_worst = min(range(len(means)), key=lambda a: (means[a], a))
        shifted[a_worst] = min(1.0, means[a_worst] + shift)
    cost = max(abs(means[a] - shifted[a]) for a in range(len(means)))
    ledger.spent += cost
    return tuple(shifted), cost
