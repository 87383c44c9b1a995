"""Two-armed bandit with a rewarding update rule.

Each round plays arm A with the current probability ``theta`` and arm B
otherwise; a played arm that performs well pulls ``theta`` toward
itself.  Both endpoints are absorbing: 1 is the desirable outcome when
arm A outperforms arm B in long-run frequency, 0 is the trap.  The
performance events may be serially dependent — an autoregressive
thresholded generator is provided next to the i.i.d. one to exercise
exactly that regime.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from avgsa.engine import StepSchedule, Trajectory
from avgsa.innovations import Ar1MixingSource, IidUniformSource, InnovationSource

__all__ = [
    "IidEventSource",
    "Ar1ThresholdEventSource",
    "make_event_source",
    "bandit_step",
    "classify_terminal",
    "BanditResult",
    "bandit_run",
]


class IidEventSource(InnovationSource):
    """Independent Bernoulli performance events for the two arms, one
    0/1 pair per row, with marginal frequencies ``freq_a`` and
    ``freq_b``."""

    kind = "bandit-iid-events"

    def __init__(self, freq_a: float, freq_b: float, seed: int = 0):
        super().__init__(2)
        _check_freqs(freq_a, freq_b)
        self.freq_a = freq_a
        self.freq_b = freq_b
        self._rng = np.random.default_rng(np.random.SeedSequence(seed))

    def _generate(self, count: int) -> np.ndarray:
        u = self._rng.random((count, 2))
        return (u <= (self.freq_a, self.freq_b)).astype(float)


class Ar1ThresholdEventSource(InnovationSource):
    """Serially dependent performance events: two independent
    autoregressive Gaussian chains, thresholded so the stationary
    frequencies come out at ``freq_a`` and ``freq_b``.

    The chain ``x' = a x + z`` has stationary variance ``1/(1-a^2)``,
    so the cutoff for a frequency ``nu`` sits at
    ``Phi^{-1}(nu) / sqrt(1-a^2)``.  Consecutive events are positively
    correlated for ``a > 0`` — streaks of good and bad performance.
    """

    kind = "bandit-ar1-events"

    def __init__(self, freq_a: float, freq_b: float, seed: int = 0, mixing: float = 0.5):
        super().__init__(2)
        _check_freqs(freq_a, freq_b)
        self.freq_a = freq_a
        self.freq_b = freq_b
        self.mixing = mixing
        scale = 1.0 / math.sqrt(1.0 - mixing**2)
        nd = NormalDist()
        self._cutoffs = np.array(
            [nd.inv_cdf(freq_a) * scale, nd.inv_cdf(freq_b) * scale]
        )
        self._chain = Ar1MixingSource(2, seed, a=mixing)

    def _generate(self, count: int) -> np.ndarray:
        x = self._chain.take_block(count)
        return (x <= self._cutoffs).astype(float)


def _check_freqs(freq_a: float, freq_b: float) -> None:
    for name, f in (("freq_a", freq_a), ("freq_b", freq_b)):
        if not 0.0 <= f <= 1.0:
            raise ValueError(f"{name} must be a frequency in [0, 1], got {f}")


def make_event_source(
    kind: str, freq_a: float, freq_b: float, seed: int, mixing: float = 0.5
) -> InnovationSource:
    """Build a performance-event stream: ``"iid"`` or ``"ar1"``."""
    if kind == "iid":
        return IidEventSource(freq_a, freq_b, seed)
    if kind == "ar1":
        return Ar1ThresholdEventSource(freq_a, freq_b, seed, mixing)
    raise ValueError(f"unknown event stream kind {kind!r}; use 'iid' or 'ar1'")


def bandit_step(
    theta: float, u: float, a_occurred: bool, b_occurred: bool, gamma: float
) -> float:
    """One rewarding update.  Plays arm A when ``u <= theta``; a played
    arm whose event occurred pulls ``theta`` its way by ``gamma`` times
    the remaining distance.  Steps above 1 would throw the iterate out
    of [0, 1], so they are rejected."""
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"step must lie in (0, 1], got {gamma}")
    up = (1.0 - theta) if (u <= theta and a_occurred) else 0.0
    down = theta if (u > theta and b_occurred) else 0.0
    return theta + gamma * (up - down)


def classify_terminal(theta: float) -> str:
    """Bucket a terminal iterate: ``near-1`` (>= 0.99), ``near-0``
    (<= 0.01), or ``undecided``."""
    if theta >= 0.99:
        return "near-1"
    if theta <= 0.01:
        return "near-0"
    return "undecided"


@dataclass(frozen=True)
class BanditResult:
    """A bandit trajectory plus the terminal bucket it landed in."""

    trajectory: Trajectory
    classification: str

    @property
    def final_theta(self) -> float:
        return float(self.trajectory.final_theta[0])


def bandit_run(
    events: InnovationSource,
    uniforms: InnovationSource,
    schedule: StepSchedule,
    horizon: int,
    theta0: float = 0.5,
    record_stride: int = 100,
) -> BanditResult:
    """Run the rewarding rule for ``horizon`` rounds.

    ``events`` yields one 0/1 pair per round (arm A and arm B
    performance); ``uniforms`` yields the independent randomisation
    draws deciding which arm is played.  The iterate stays in [0, 1]
    exactly as long as every step is at most 1.
    """
    if events.dimension != 2:
        raise ValueError("event stream must yield one pair per round")
    if uniforms.dimension != 1:
        raise ValueError("randomisation stream must be scalar")
    if not 0.0 <= theta0 <= 1.0:
        raise ValueError(f"initial play probability must lie in [0, 1], got {theta0}")
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if record_stride < 1:
        raise ValueError("record_stride must be at least 1")

    start = time.perf_counter()
    gammas = schedule.gamma_array(horizon)
    ns = [0]
    path = [theta0]
    theta = theta0
    n = 0
    while n < horizon:
        m = min(1 << 14, horizon - n)
        ev = events.take_block(m)
        us = uniforms.take_block(m)[:, 0]
        for i in range(m):
            theta = bandit_step(
                theta, us[i], ev[i, 0] != 0.0, ev[i, 1] != 0.0, gammas[n]
            )
            n += 1
            if n % record_stride == 0 or n == horizon:
                ns.append(n)
                path.append(theta)

    traj = Trajectory(
        ns=np.asarray(ns, dtype=np.int64),
        thetas=np.asarray(path, dtype=float).reshape(-1, 1),
        monitors={},
        final_theta=np.array([theta]),
        horizon=horizon,
        wall_time=time.perf_counter() - start,
    )
    return BanditResult(traj, classify_terminal(theta))
