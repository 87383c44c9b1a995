"""Convergence diagnostics for innovation streams and runs.

Averaging quality is an empirical matter: how fast does the running mean
of a test function along the stream approach its limit, and does the
decay match the rate the theory attaches to the stream family?  The
helpers here measure exactly that, plus a weighted occupation-measure
average for decreasing-step Euler schemes and a Lyapunov channel for
recorded trajectories.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from avgsa.engine import Trajectory
from avgsa.innovations import InnovationSource

__all__ = [
    "ErrorPath",
    "RateFit",
    "LyapunovChannel",
    "empirical_average_path",
    "fit_rate",
    "weighted_empirical_average",
    "lyapunov_monitor",
]


@dataclass(frozen=True)
class ErrorPath:
    """Absolute empirical-average errors |mean_n(f) - target| recorded at
    increasing sample sizes."""

    ns: np.ndarray
    errors: np.ndarray

    def __post_init__(self) -> None:
        if self.ns.shape != self.errors.shape:
            raise ValueError("ns and errors must align")


@dataclass(frozen=True)
class RateFit:
    """Log-log least-squares fit error ~ C * n**(-beta_hat)."""

    beta_hat: float
    log_constant: float
    r_squared: float
    points_used: int


@dataclass(frozen=True)
class LyapunovChannel:
    """A scalar criterion evaluated along a recorded trajectory, with a
    tail-stability summary."""

    ns: np.ndarray
    values: np.ndarray
    tail_range: float
    settled: bool


def empirical_average_path(
    source: InnovationSource,
    f: Callable[[np.ndarray], float],
    target: float,
    checkpoints: Sequence[int],
) -> ErrorPath:
    """Running-mean error of ``f`` along the stream at the requested
    sample sizes.

    Single pass, constant memory: the stream is consumed once up to the
    largest checkpoint and only the running sum is kept.
    """
    cps = sorted(int(c) for c in checkpoints)
    if not cps or cps[0] < 1:
        raise ValueError("checkpoints must be positive sample sizes")
    errors = []
    total = 0.0
    seen = 0
    it = iter(cps)
    nxt = next(it)
    # consume in blocks; evaluate f per element (f need not be vectorised)
    while seen < cps[-1]:
        block = source.take_block(min(4096, cps[-1] - seen))
        for row in block:
            total += f(row)
            seen += 1
            if seen == nxt:
                errors.append(abs(total / seen - target))
                nxt = next(it, None)
    return ErrorPath(ns=np.asarray(cps, dtype=np.int64), errors=np.asarray(errors))


def fit_rate(path: ErrorPath) -> RateFit:
    """Fit a power-law decay to an error path by least squares in log-log
    coordinates.

    Exact zero errors carry no rate information on a log scale; they are
    dropped with a warning.  At least five usable points are required.
    """
    mask = path.errors > 0.0
    dropped = int((~mask).sum())
    if dropped:
        warnings.warn(
            f"fit_rate: dropped {dropped} exact-zero error value(s) before fitting",
            stacklevel=2,
        )
    ns = path.ns[mask].astype(float)
    errs = path.errors[mask]
    if ns.size < 5:
        raise ValueError(f"need at least 5 nonzero errors to fit a rate, have {ns.size}")
    x = np.log(ns)
    y = np.log(errs)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(
        beta_hat=float(-slope),
        log_constant=float(intercept),
        r_squared=r2,
        points_used=int(ns.size),
    )


def weighted_empirical_average(
    source: InnovationSource,
    f: Callable[[np.ndarray], float],
    n: int,
    weights: Callable[[int], float] | None = None,
) -> float:
    """Weighted occupation-measure average
    ``sum_k eta_k f(Y_{k-1}) / sum_k eta_k`` over the first ``n``
    emissions (k = 1..n); unit weights by default."""
    if n < 1:
        raise ValueError("need at least one emission")
    num = 0.0
    den = 0.0
    k = 0
    while k < n:
        block = source.take_block(min(4096, n - k))
        for row in block:
            k += 1
            w = 1.0 if weights is None else float(weights(k))
            if w < 0.0:
                raise ValueError("weights must be nonnegative")
            num += w * f(row)
            den += w
    if den == 0.0:
        raise ValueError("all weights vanished")
    return num / den


def lyapunov_monitor(
    traj: Trajectory,
    criterion: Callable[[np.ndarray], float],
    tolerance: float,
    tail_fraction: float = 0.2,
) -> LyapunovChannel:
    """Evaluate a scalar criterion on every recorded iterate and report
    whether its tail has settled (range of the last ``tail_fraction`` of
    records below ``tolerance``)."""
    if not 0.0 < tail_fraction <= 1.0:
        raise ValueError("tail fraction must lie in (0, 1]")
    vals = np.array([float(criterion(th)) for th in traj.thetas])
    k = max(1, int(round(tail_fraction * vals.size)))
    tail = vals[-k:]
    tail_range = float(tail.max() - tail.min())
    return LyapunovChannel(
        ns=traj.ns.copy(),
        values=vals,
        tail_range=tail_range,
        settled=bool(tail_range <= tolerance),
    )
