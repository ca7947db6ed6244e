"""Core types for stochastic bandit instances, traces, and regret accounting.

Rewards are Bernoulli in {0, 1}. Regret is always measured against the
instance's *true* means, regardless of any reward tampering recorded in a
trace: the cost fields describe what an adversary spent, never what the
learner is charged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

MAX_ARMS = 10_000


class BanditLabError(Exception):
    """Base class for all package errors."""


class KTooSmall(BanditLabError, ValueError):
    """Fewer than two arms."""


class InstanceTooLarge(BanditLabError, ValueError):
    """Instance exceeds a hard size cap (arm count or enumeration size)."""


class MeanOutOfRange(BanditLabError, ValueError):
    """A mean reward lies outside [0, 1]."""


class TiedOptimum(BanditLabError, ValueError):
    """Two arms share the maximal mean and degenerate instances were not allowed."""


class ArmIndexOutOfRange(BanditLabError, IndexError):
    """An arm index does not exist in the instance."""


class InvalidReward(BanditLabError, ValueError):
    """Reward outside {0, 1}."""


@dataclass(frozen=True)
class BanditInstance:
    """A fixed K-armed Bernoulli instance.

    Attributes
    ----------
    means : tuple of float
        True expected rewards, one per arm.
    optimal_arm : int
        Index of the maximal mean (lowest index on a permitted tie).
    gaps : tuple of float
        Suboptimality gaps ``max(means) - means[a]``, all >= 0.
    min_gap : float
        Smallest positive gap; 0.0 for an all-equal degenerate instance.
    """

    means: tuple[float, ...]
    optimal_arm: int
    gaps: tuple[float, ...]
    min_gap: float

    @property
    def k(self) -> int:
        return len(self.means)

    @property
    def optimal_mean(self) -> float:
        return self.means[self.optimal_arm]


def make_instance(means: Sequence[float], *, allow_degenerate: bool = False) -> BanditInstance:
    """Validate means and build a :class:`BanditInstance`.

    Parameters
    ----------
    means : sequence of float
        One mean per arm, each in [0, 1]; at least two arms.
    allow_degenerate : bool
        Permit ties at the maximum (e.g. an all-equal instance for trivial
        tests). Experiments require a unique optimum.

    Raises
    ------
    KTooSmall, InstanceTooLarge, MeanOutOfRange, TiedOptimum
    """
    vals = tuple(float(m) for m in means)
    if len(vals) < 2:
        raise KTooSmall(f"need at least 2 arms, got {len(vals)}")
    if len(vals) > MAX_ARMS:
        raise InstanceTooLarge(f"{len(vals)} arms exceeds cap {MAX_ARMS}")
    for a, m in enumerate(vals):
        if not (0.0 <= m <= 1.0) or m != m:
            raise MeanOutOfRange(f"mean of arm {a} is {m!r}, must lie in [0, 1]")
    best = max(vals)
    optimal_arm = vals.index(best)
    if vals.count(best) > 1 and not allow_degenerate:
        raise TiedOptimum(
            "maximal mean %r is shared by several arms; pass allow_degenerate=True "
            "if this is intentional" % best
        )
    gaps = tuple(best - m for m in vals)
    positive = [g for g in gaps if g > 0.0]
    min_gap = min(positive) if positive else 0.0
    return BanditInstance(means=vals, optimal_arm=optimal_arm, gaps=gaps, min_gap=min_gap)


def draw_reward(mean: float, rng: np.random.Generator) -> int:
    """One Bernoulli(mean) sample in {0, 1}. mean=0 and mean=1 are exact."""
    return 1 if rng.random() < mean else 0


@dataclass(frozen=True)
class RoundRecord:
    """What happened in one simulated round."""

    t: int
    arm: int
    reward: int
    cost: float


@dataclass
class Trace:
    """Full per-round record of one episode plus regret checkpoints.

    ``arms``/``rewards``/``costs`` all have length T. ``checkpoints`` holds
    ``(t, cumulative pseudo-regret after t rounds)`` pairs on a sparse grid
    (always including T) so long-horizon curves stay small.
    """

    instance: BanditInstance
    algorithm: str
    seed: int
    arms: np.ndarray
    rewards: np.ndarray
    costs: np.ndarray
    checkpoints: list[tuple[int, float]] = field(default_factory=list)

    @property
    def horizon(self) -> int:
        return len(self.arms)

    def record(self, t: int) -> RoundRecord:
        if not 0 <= t < self.horizon:
            raise IndexError(f"round {t} outside horizon {self.horizon}")
        return RoundRecord(
            t=t, arm=int(self.arms[t]), reward=int(self.rewards[t]), cost=float(self.costs[t])
        )

    def spent(self) -> float:
        return float(self.costs.sum())


def pseudo_regret(arms: Sequence[int] | np.ndarray, instance: BanditInstance) -> float:
    """Cumulative pseudo-regret sum_t gap(arm_t) against the true means.

    Additive over concatenated segments and blind to rewards/costs by
    construction.
    """
    idx = np.asarray(arms, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= instance.k):
        bad = int(idx[(idx < 0) | (idx >= instance.k)][0])
        raise ArmIndexOutOfRange(f"arm {bad} not in instance with {instance.k} arms")
    gaps = np.asarray(instance.gaps)
    return float(gaps[idx].sum())


def checkpoint_grid(horizon: int, *, per_decade: int = 20) -> list[int]:
    """Geometric checkpoint rounds in [1, horizon], horizon always included."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    pts = {horizon}
    k = 0
    while True:
        t = int(round(10 ** (k / per_decade)))
        if t >= horizon:
            break
        pts.add(max(t, 1))
        k += 1
    return sorted(pts)
