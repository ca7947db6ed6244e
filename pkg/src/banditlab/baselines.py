"""Baseline bandit policies sharing one engine-facing handle contract.

Every policy exposes ``name``, ``select(rng) -> arm``, ``update(arm, reward)``
and ``get_params() -> dict``. ``select``/``update`` are called exactly once
per round, in that order, with the arm fed back verbatim.
"""

from __future__ import annotations

import math

import numpy as np

from .core import BanditLabError, KTooSmall
from .samba import SambaPolicy


class NoConvergence(BanditLabError, RuntimeError):
    """Root finder failed to normalize the weight vector."""


# ---------------------------------------------------------------------------
# Active-arm elimination race with a corruption-tolerant slow layer
# ---------------------------------------------------------------------------


class FastSlowEliminationPolicy:
    """Two elimination layers racing over shared observations.

    Both layers see every sample. The fast layer eliminates with plain
    Hoeffding radii and wins cleanly when nobody tampers with rewards. The
    slow layer widens each arm's radius by ``c_known / n_a`` — the most the
    empirical mean of an arm can be displaced by tampering with total budget
    ``c_known`` — so it never discards the true best arm. Slow eliminations
    propagate to the fast layer; if the fast layer somehow empties, it is
    reset to the slow layer's survivors. A fixed share of rounds round-robins
    over the slow survivor set so its intervals keep shrinking even after the
    fast layer has locked onto a favourite.
    """

    name = "fs_aae"

    def __init__(self, k: int, c_known: float = 0.0, delta: float = 1e-5, slow_share: float = 0.25):
        if k < 2:
            raise KTooSmall(f"need at least 2 arms, got {k}")
        if not 0.0 < delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {delta}")
        if c_known < 0.0:
            raise ValueError(f"c_known must be >= 0, got {c_known}")
        if not 0.0 <= slow_share <= 1.0:
            raise ValueError(f"slow_share must lie in [0, 1], got {slow_share}")
        self.k = k
        self.c_known = float(c_known)
        self.delta = float(delta)
        self.slow_share = float(slow_share)
        self._log_const = math.log(4.0 * k / delta)
        self.counts = [0] * k
        self.sums = [0.0] * k
        self._mean = [0.0] * k
        self._rad = [math.inf] * k
        self.fast_active = list(range(k))
        self.slow_active = list(range(k))

    def select(self, rng: np.random.Generator) -> int:
        pool = self.slow_active if rng.random() < self.slow_share else self.fast_active
        counts = self.counts
        best = pool[0]
        for a in pool[1:]:
            if counts[a] < counts[best]:
                best = a
        return best

    def update(self, arm: int, reward: int) -> None:
        self.counts[arm] += 1
        self.sums[arm] += reward
        n = self.counts[arm]
        self._mean[arm] = self.sums[arm] / n
        self._rad[arm] = math.sqrt((self._log_const + 2.0 * math.log(n)) / (2.0 * n))
        self._eliminate()

    def _eliminate(self) -> None:
        mean, rad, c = self._mean, self._rad, self.c_known

        slow_lcb = max(
            mean[a] - rad[a] - c / self.counts[a]
            for a in self.slow_active
            if self.counts[a] > 0
        ) if any(self.counts[a] > 0 for a in self.slow_active) else -math.inf
        survivors = [
            a
            for a in self.slow_active
            if self.counts[a] == 0 or mean[a] + rad[a] + c / self.counts[a] >= slow_lcb
        ]
        if len(survivors) != len(self.slow_active):
            self.slow_active = survivors
            self.fast_active = [a for a in self.fast_active if a in set(survivors)]

        fast_lcb = max(
            (mean[a] - rad[a] for a in self.fast_active if self.counts[a] > 0),
            default=-math.inf,
        )
        self.fast_active = [
            a for a in self.fast_active if self.counts[a] == 0 or mean[a] + rad[a] >= fast_lcb
        ]
        if not self.fast_active:
            self.fast_active = list(self.slow_active)

    def get_params(self) -> dict:
        return {
            "c_known": self.c_known,
            "delta": self.delta,
            "slow_share": self.slow_share,
        }


# ---------------------------------------------------------------------------
# Phased gap-estimate algorithms
# ---------------------------------------------------------------------------


class BarbarPolicy:
    """Phase-based algorithm pulling each arm inversely to its squared gap estimate.

    Phase m draws arm a ``ceil(lambda_scale / gap_a^2)`` times in shuffled
    order, with gap estimates floored at 2^-m, so the presumed-best arm's
    allocation doubles geometrically while suspected-bad arms keep a trickle
    of probes. After a phase the gaps are re-estimated from that phase's
    empirical means alone, which limits how long any single stretch of
    tampered rewards can distort the schedule.

    ``delta`` is accepted for interface parity; the theoretical constant
    lambda ~ log(K/delta) is folded into ``lambda_scale``, whose small default
    keeps eight-plus phases inside a 1e5-round horizon.
    """

    name = "barbar"

    def __init__(self, k: int, lambda_scale: float = 4.0, delta: float = 0.05):
        if k < 2:
            raise KTooSmall(f"need at least 2 arms, got {k}")
        if lambda_scale <= 0:
            raise ValueError(f"lambda_scale must be > 0, got {lambda_scale}")
        self.k = k
        self.lambda_scale = float(lambda_scale)
        self.delta = float(delta)
        self.phase_index = 0
        self.gap_estimates = [1.0] * k
        self._targets = [0] * k
        self._schedule: list[int] = []
        self._pos = 0
        self._phase_sums = [0.0] * k
        self._phase_counts = [0] * k
        self.phase_lengths: list[int] = []

    def _start_phase(self, rng: np.random.Generator) -> None:
        self.phase_index += 1
        lam = self.lambda_scale
        self._targets = [max(1, math.ceil(lam / (g * g))) for g in self.gap_estimates]
        schedule: list[int] = []
        for a, n in enumerate(self._targets):
            schedule.extend([a] * n)
        rng.shuffle(schedule)
        self._schedule = schedule
        self._pos = 0
        self._phase_sums = [0.0] * self.k
        self._phase_counts = [0] * self.k
        self.phase_lengths.append(len(schedule))

    def _finish_phase(self) -> None:
        m = self.phase_index
        floor = 2.0 ** -m
        means = [
            self._phase_sums[a] / self._phase_counts[a] if self._phase_counts[a] else 0.0
            for a in range(self.k)
        ]
        anchor = max(means[a] - self.gap_estimates[a] / 16.0 for a in range(self.k))
        self.gap_estimates = [
            self._refine(a, floor, anchor - means[a]) for a in range(self.k)
        ]

    def _refine(self, arm: int, floor: float, raw_gap: float) -> float:
        return max(floor, raw_gap)

    def select(self, rng: np.random.Generator) -> int:
        if self._pos >= len(self._schedule):
            if self._schedule:
                self._finish_phase()
            self._start_phase(rng)
        return self._schedule[self._pos]

    def update(self, arm: int, reward: int) -> None:
        self._phase_sums[arm] += reward
        self._phase_counts[arm] += 1
        self._pos += 1

    def get_params(self) -> dict:
        return {"lambda_scale": self.lambda_scale, "delta": self.delta}


class CBarbarPolicy(BarbarPolicy):
    """Phased variant whose gap estimates also decay at most geometrically.

    Anchoring each new estimate at half the previous one stops a single
    corrupted phase from collapsing a large estimated gap outright — the
    adversary has to pay again in every later phase it wants to stay hidden.
    """

    name = "cbarbar"

    def _refine(self, arm: int, floor: float, raw_gap: float) -> float:
        return max(floor, self.gap_estimates[arm] / 2.0, raw_gap)


# ---------------------------------------------------------------------------
# Online mirror descent with Tsallis regularization
# ---------------------------------------------------------------------------


def _solve_weight_scale(z: list[float], eta: float, y0: float | None = None) -> float:
    """Root y > 0 of sum_a 4/(eta^2 (z_a + y)^2) = 1 for shifted losses z >= 0.

    The sum is strictly decreasing in y and the root lies in (0, 2*sqrt(K)/eta]
    (equality when all z are equal), so a bisection-safeguarded Newton
    iteration cannot escape. Raises NoConvergence if the residual never
    reaches 1e-11.
    """
    k = len(z)
    hi = 2.000001 * math.sqrt(k) / eta
    lo = 0.0
    y = y0 if (y0 is not None and lo < y0 < hi) else 0.5 * hi
    coeff = 4.0 / (eta * eta)
    for _ in range(200):
        s = 0.0
        d = 0.0
        for za in z:
            inv = 1.0 / (za + y)
            w = coeff * inv * inv
            s += w
            d -= 2.0 * w * inv
        f = s - 1.0
        if abs(f) <= 1e-11:
            return y
        if f > 0.0:
            lo = y
        else:
            hi = y
        y_new = y - f / d
        if not lo < y_new < hi:
            y_new = 0.5 * (lo + hi)
        y = y_new
    raise NoConvergence(f"weight normalization stalled (eta={eta}, K={k})")


def tsallis_solve_normalization(losses, eta: float) -> np.ndarray:
    """Simplex weights w_a = 4 / (eta * (L_a - x))^2 with scalar x < min(L).

    x is the Lagrange normalizer; smaller cumulative loss means a smaller
    (L_a - x) and therefore a larger weight. |sum(w) - 1| <= 1e-10 on return.
    """
    if eta <= 0:
        raise ValueError(f"eta must be > 0, got {eta}")
    vals = [float(v) for v in losses]
    base = min(vals)
    z = [v - base for v in vals]
    y = _solve_weight_scale(z, eta)
    coeff = 4.0 / (eta * eta)
    return np.array([coeff / ((za + y) * (za + y)) for za in z])


class TsallisInfPolicy:
    """Importance-weighted loss minimizer with learning rate eta_t = scale/sqrt(t).

    Per-round work is dominated by the weight normalization solve, warm
    started from the previous round, so cost per step is roughly constant
    but noticeably higher than the counting-based policies.
    """

    name = "tsallis_inf"

    def __init__(self, k: int, eta_scale: float = 1.0):
        if k < 2:
            raise KTooSmall(f"need at least 2 arms, got {k}")
        if eta_scale <= 0:
            raise ValueError(f"eta_scale must be > 0, got {eta_scale}")
        self.k = k
        self.eta_scale = float(eta_scale)
        self.losses = [0.0] * k
        self.t = 0
        self._w: list[float] = [1.0 / k] * k
        self._warm_y: float | None = None
        self._warm_eta: float | None = None

    @property
    def weights(self) -> np.ndarray:
        return np.asarray(self._w)

    def select(self, rng: np.random.Generator) -> int:
        self.t += 1
        eta = self.eta_scale / math.sqrt(self.t)
        base = min(self.losses)
        z = [v - base for v in self.losses]
        y0 = None
        if self._warm_y is not None:
            y0 = self._warm_y * (self._warm_eta / eta)
        y = _solve_weight_scale(z, eta, y0)
        self._warm_y, self._warm_eta = y, eta
        coeff = 4.0 / (eta * eta)
        w = [coeff / ((za + y) * (za + y)) for za in z]
        self._w = w
        u = rng.random()
        acc = 0.0
        for a in range(self.k - 1):
            acc += w[a]
            if u < acc:
                return a
        return self.k - 1

    def update(self, arm: int, reward: int) -> None:
        self.losses[arm] += (1.0 - reward) / self._w[arm]

    def get_params(self) -> dict:
        return {"eta_scale": self.eta_scale}


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

ALGORITHMS = ("samba", "fs_aae", "barbar", "cbarbar", "tsallis_inf")


def make_policy(
    algorithm: str,
    k: int,
    params: dict | None = None,
    *,
    c_known: float = 0.0,
    horizon: int | None = None,
):
    """Construct a fresh policy handle for one episode.

    ``c_known`` (the plan's budget) is forwarded to corruption-aware
    policies; the elimination race also defaults its confidence level to
    1/horizon when a horizon is given.
    """
    params = dict(params or {})
    if algorithm == "samba":
        return SambaPolicy(k, **params)
    if algorithm == "fs_aae":
        if "delta" not in params and horizon:
            params["delta"] = 1.0 / horizon
        return FastSlowEliminationPolicy(k, c_known=c_known, **params)
    if algorithm == "barbar":
        return BarbarPolicy(k, **params)
    if algorithm == "cbarbar":
        return CBarbarPolicy(k, **params)
    if algorithm == "tsallis_inf":
        return TsallisInfPolicy(k, **params)
    raise ValueError(f"unknown algorithm {algorithm!r}, expected one of {ALGORITHMS}")
