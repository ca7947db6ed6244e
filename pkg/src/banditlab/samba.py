"""Simplex policy-gradient bandit algorithm with a tracked leader arm.

The sampling distribution p lives on the K-simplex. One arm — the *leader*,
the argmax of p with ties broken toward the lowest index — is never updated
directly; it absorbs whatever mass the other coordinates gain or lose, so the
simplex constraint holds exactly by construction. Updates depend only on the
current state and the observed (arm, reward) pair, cost O(K) per round, and
never reference the horizon.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import BanditLabError, KTooSmall

CLAMP_FLOOR = 1e-12


class AlphaOutOfRange(BanditLabError, ValueError):
    """Step size outside the open interval (0, 1)."""


class InvalidArm(BanditLabError, IndexError):
    """Pulled arm index does not exist in the state."""


class InvalidRewardValue(BanditLabError, ValueError):
    """Reward outside {0, 1}."""


class SambaState:
    """Mutable algorithm state: simplex point, step size, cached leader.

    Single-owner: updates mutate in place and return ``self``. Use
    :meth:`copy` before branching histories.
    """

    __slots__ = ("p", "alpha", "leader", "clamp_events")

    def __init__(self, p: list[float], alpha: float, leader: int, clamp_events: int = 0):
        self.p = p
        self.alpha = alpha
        self.leader = leader
        self.clamp_events = clamp_events

    @property
    def k(self) -> int:
        return len(self.p)

    def copy(self) -> "SambaState":
        return SambaState(list(self.p), self.alpha, self.leader, self.clamp_events)

    def probabilities(self) -> np.ndarray:
        return np.asarray(self.p, dtype=float)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        probs = ", ".join(f"{v:.6f}" for v in self.p)
        return f"SambaState(p=[{probs}], alpha={self.alpha}, leader={self.leader})"


def samba_leader(p: Sequence[float]) -> int:
    """Argmax of p, lowest index on ties."""
    best = p[0]
    lead = 0
    for a in range(1, len(p)):
        if p[a] > best:
            best = p[a]
            lead = a
    return lead


def samba_init(k: int, alpha: float) -> SambaState:
    """Uniform initial state.

    Raises
    ------
    KTooSmall
        If fewer than 2 arms.
    AlphaOutOfRange
        If the step size is not strictly inside (0, 1).
    """
    if k < 2:
        raise KTooSmall(f"need at least 2 arms, got {k}")
    if not (0.0 < alpha < 1.0):
        raise AlphaOutOfRange(f"step size must lie in (0, 1), got {alpha!r}")
    return SambaState(p=[1.0 / k] * k, alpha=float(alpha), leader=0)


def samba_from_probabilities(p: Sequence[float], alpha: float) -> SambaState:
    """Build a state from an explicit simplex point (mainly for tests/analysis)."""
    if len(p) < 2:
        raise KTooSmall(f"need at least 2 arms, got {len(p)}")
    if not (0.0 < alpha < 1.0):
        raise AlphaOutOfRange(f"step size must lie in (0, 1), got {alpha!r}")
    vals = [float(v) for v in p]
    total = sum(vals)
    if abs(total - 1.0) > 1e-9 or min(vals) <= 0.0:
        raise ValueError("probabilities must be positive and sum to 1")
    return SambaState(p=vals, alpha=float(alpha), leader=samba_leader(vals))


def samba_select(state: SambaState, rng: np.random.Generator) -> int:
    """Sample an arm from the current distribution."""
    u = rng.random()
    acc = 0.0
    p = state.p
    for a in range(len(p) - 1):
        acc += p[a]
        if u < acc:
            return a
    return len(p) - 1


def samba_update(state: SambaState, pulled: int, reward: int) -> SambaState:
    """Apply one observation in place and return the state.

    Reward 0 leaves the state untouched. On reward 1: pulling the leader
    shrinks every other coordinate by alpha * p_a^2 / p_leader; pulling a
    non-leader grows only that coordinate by the factor (1 + alpha). The
    leader coordinate is then recomputed as one minus the rest and the
    leader cache refreshed.
    """
    p = state.p
    k = len(p)
    if not 0 <= pulled < k:
        raise InvalidArm(f"arm {pulled} not in state with {k} arms")
    if reward == 0:
        return state
    if reward != 1:
        raise InvalidRewardValue(f"reward must be 0 or 1, got {reward!r}")

    alpha = state.alpha
    lead = state.leader
    if pulled == lead:
        p_lead = p[lead]
        for a in range(k):
            if a != lead:
                p[a] -= alpha * p[a] * p[a] / p_lead
    else:
        p[pulled] *= 1.0 + alpha

    rest = 0.0
    for a in range(k):
        if a != lead:
            rest += p[a]
    p[lead] = 1.0 - rest

    # Exact arithmetic keeps every coordinate positive for alpha < 1; the
    # floor below only guards floating-point underflow and is counted so
    # standard runs can assert it never fired.
    low = min(p)
    if low < CLAMP_FLOOR:
        state.clamp_events += 1
        for a in range(k):
            if p[a] < CLAMP_FLOOR:
                p[a] = CLAMP_FLOOR
        lead_now = samba_leader(p)
        rest = 0.0
        for a in range(k):
            if a != lead_now:
                rest += p[a]
        p[lead_now] = 1.0 - rest

    state.leader = samba_leader(p)
    return state


class SambaPolicy:
    """Engine-facing handle around the simplex state."""

    name = "samba"

    def __init__(self, k: int, alpha: float = 0.05):
        self.alpha = float(alpha)
        self.state = samba_init(k, alpha)

    def select(self, rng: np.random.Generator) -> int:
        return samba_select(self.state, rng)

    def update(self, arm: int, reward: int) -> None:
        samba_update(self.state, arm, reward)

    def get_params(self) -> dict:
        return {"alpha": self.alpha}
