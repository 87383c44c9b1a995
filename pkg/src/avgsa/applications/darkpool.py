"""Order splitting across rebate-paying execution venues.

A volume ``V`` must be executed across ``N`` venues, each granting a
rebate ``rho_i`` on whatever part of the order it can actually fill
(capped by its capacity ``D_i``); the remainder executes at the
reference price.  The allocation fractions live on the simplex, and the
optimal split equalises the marginal rebate-weighted fill rates.  The
recursion rewards venues that outperform the cross-venue mean and, by
construction, moves only inside the hyperplane ``sum r_i = 1``.

Real capacity data being proprietary, a synthetic generator mimics the
documented construction: capacities are mixtures of the volume itself
and correlated substitute series, scaled to keep the venues in
shortage (total expected capacity below expected volume).
"""

from __future__ import annotations

import logging
import math
import time

import numpy as np

from avgsa.engine import StepSchedule, Trajectory
from avgsa.innovations import Ar1MixingSource

__all__ = [
    "darkpool_field",
    "simplex_safeguard",
    "darkpool_step",
    "synthetic_capacities",
    "synthetic_darkpool_series",
    "relative_cost_reduction",
    "brute_force_allocation",
    "darkpool_run",
]

logger = logging.getLogger(__name__)


def _as_rebates(rebates) -> np.ndarray:
    rho = np.asarray(rebates, dtype=float)
    if np.any(rho < 0.0) or np.any(rho >= 1.0):
        raise ValueError("rebates must lie in [0, 1)")
    return rho


def darkpool_field(r, volume: float, capacities, rebates) -> np.ndarray:
    """Mean-centred reward field: venue ``i`` earns ``V rho_i`` when its
    share still fits its capacity (``r_i V < D_i``), minus the cross-venue
    average of the same quantity.  Components sum to zero, so the update
    never leaves the allocation hyperplane."""
    if volume <= 0.0:
        raise ValueError("volume must be positive")
    r = np.asarray(r, dtype=float)
    rho = np.asarray(rebates, dtype=float)
    active = rho * (r * volume < np.asarray(capacities, dtype=float))
    return volume * (active - active.mean())


def simplex_safeguard(candidate: np.ndarray, total: float = 1.0) -> tuple[np.ndarray, bool]:
    """Restore nonnegativity after an aggressive step: negative
    components are clipped to zero and the deficit is taken out of the
    positive components proportionally, preserving ``total``.  Returns
    the repaired allocation and whether anything was clipped."""
    neg = candidate < 0.0
    if not neg.any():
        return candidate, False
    repaired = np.where(neg, 0.0, candidate)
    pos_sum = repaired.sum()
    if pos_sum <= 0.0:
        # every component clipped or zero: fall back to the uniform split
        return np.full(candidate.shape, total / candidate.size), True
    return repaired * (total / pos_sum), True


def darkpool_step(r, volume: float, capacities, rebates, gamma: float) -> np.ndarray:
    """One allocation update ``r + gamma * field`` followed by the
    nonnegativity safeguard.  The field sums to zero, so the component
    sum is preserved to roundoff; callers renormalise periodically."""
    r = np.asarray(r, dtype=float)
    candidate = r + gamma * darkpool_field(r, volume, capacities, rebates)
    repaired, clipped = simplex_safeguard(candidate, float(r.sum()))
    if clipped:
        logger.warning(
            "allocation safeguard clipped negative components at gamma=%g", gamma
        )
    return repaired


def synthetic_capacities(volumes, substitutes, mix, scale) -> np.ndarray:
    """Capacity series from the documented mixture construction:
    ``D_i = scale_i ((1-mix_i) V + mix_i S_i * mean(V)/mean(S_i))``
    with the means taken empirically over the whole series.  By design
    ``mean(D_i) = scale_i * mean(V)`` exactly, so ``sum scale_i < 1``
    puts the venues in shortage."""
    v = np.asarray(volumes, dtype=float)
    s = np.asarray(substitutes, dtype=float)
    alpha = np.asarray(mix, dtype=float)
    beta = np.asarray(scale, dtype=float)
    if v.ndim != 1 or s.ndim != 2 or s.shape[0] != v.size:
        raise ValueError("need volumes (n,) and substitutes (n, pools)")
    if s.shape[1] != alpha.size or alpha.size != beta.size:
        raise ValueError("mix and scale must have one entry per pool")
    if np.any(alpha < 0.0) or np.any(alpha > 1.0):
        raise ValueError("mix coefficients must lie in [0, 1]")
    if np.any(beta <= 0.0):
        raise ValueError("scale factors must be positive")
    s_means = s.mean(axis=0)
    if np.any(s_means <= 0.0):
        raise ValueError("substitute series must have positive mean")
    return beta * ((1.0 - alpha) * v[:, None] + alpha * s * (v.mean() / s_means))


def synthetic_darkpool_series(
    n: int,
    seed: int,
    mix,
    scale,
    mixing: float = 0.5,
    log_sigma: float = 0.5,
) -> tuple[np.ndarray, np.ndarray]:
    """Stationary synthetic (volume, capacities) series: the volume and
    one substitute series per venue are lognormals driven by independent
    autoregressive Gaussian chains, then passed through
    :func:`synthetic_capacities`."""
    alpha = np.asarray(mix, dtype=float)
    if n < 1:
        raise ValueError("series length must be at least 1")
    pools = alpha.size
    raw = Ar1MixingSource(1 + pools, seed, a=mixing).take_block(n)
    volumes = np.exp(log_sigma * raw[:, 0])
    substitutes = np.exp(log_sigma * raw[:, 1:])
    return volumes, synthetic_capacities(volumes, substitutes, alpha, scale)


def relative_cost_reduction(r, volume: float, capacities, rebates) -> float:
    """Rebate earned by the standing allocation on one order, as a
    fraction of executing the whole volume at the reference price:
    ``sum rho_i min(r_i V, D_i) / V``."""
    if volume <= 0.0:
        raise ValueError("volume must be positive")
    r = np.asarray(r, dtype=float)
    rho = np.asarray(rebates, dtype=float)
    filled = np.minimum(r * volume, np.asarray(capacities, dtype=float))
    return float(np.dot(rho, filled) / volume)


def _simplex_grid(pools: int, resolution: float) -> np.ndarray:
    steps = round(1.0 / resolution)
    if pools == 2:
        r1 = np.linspace(0.0, 1.0, steps + 1)
        return np.column_stack([r1, 1.0 - r1])
    if pools == 3:
        pts = []
        for i in range(steps + 1):
            for j in range(steps + 1 - i):
                pts.append((i / steps, j / steps, (steps - i - j) / steps))
        return np.asarray(pts)
    raise ValueError("grid search supports 2 or 3 pools only")


def brute_force_allocation(
    volumes, capacities, rebates, resolution: float = 0.01
) -> np.ndarray:
    """Reference optimiser: evaluate the empirical rebate objective
    ``mean_t sum_i rho_i min(r_i V_t, D_it)`` on a simplex grid and
    return the best grid point.  Only practical for 2 or 3 venues; this
    is the measuring stick the recursion is judged against."""
    v = np.asarray(volumes, dtype=float)
    d = np.asarray(capacities, dtype=float)
    rho = _as_rebates(rebates)
    if d.ndim != 2 or d.shape[0] != v.size or d.shape[1] != rho.size:
        raise ValueError("need volumes (n,), capacities (n, pools), one rebate per pool")
    grid = _simplex_grid(rho.size, resolution)
    best_value = -math.inf
    best = grid[0]
    for point in grid:
        value = float(np.mean(np.minimum(np.outer(v, point), d) @ rho))
        if value > best_value:
            best_value = value
            best = point
    return best.copy()


def darkpool_run(
    volumes,
    capacities,
    rebates,
    schedule: StepSchedule,
    r0=None,
    record_stride: int = 100,
    renorm_every: int = 10_000,
) -> Trajectory:
    """Run the allocation recursion once through a (volume, capacity)
    series.

    The allocation in force when an order arrives earns that order's
    rebates; the trajectory records the allocation path (``theta_i``
    columns), the running mean of the per-order relative cost reduction
    (monitor ``mean_cost_reduction``), and the cumulative safeguard
    trigger count (monitor ``safeguard_count``).  The component sum is
    renormalised to exactly 1 every ``renorm_every`` steps so roundoff
    cannot accumulate over long series.
    """
    v = np.asarray(volumes, dtype=float)
    d = np.asarray(capacities, dtype=float)
    rho = _as_rebates(rebates)
    if d.ndim != 2 or d.shape[0] != v.size or d.shape[1] != rho.size:
        raise ValueError("need volumes (n,), capacities (n, pools), one rebate per pool")
    if np.any(v <= 0.0):
        raise ValueError("volumes must be positive")
    horizon = v.size
    pools = rho.size
    if r0 is None:
        r = np.full(pools, 1.0 / pools)
    else:
        r = np.asarray(r0, dtype=float).copy()
        if r.shape != (pools,) or np.any(r < 0.0) or abs(r.sum() - 1.0) > 1e-9:
            raise ValueError("initial allocation must be a simplex point")
    if record_stride < 1 or renorm_every < 1:
        raise ValueError("record_stride and renorm_every must be at least 1")

    start = time.perf_counter()
    gammas = schedule.gamma_array(horizon)
    ns = [0]
    path = [r.copy()]
    mean_cr = [0.0]
    clip_counts = [0.0]
    cr_sum = 0.0
    clipped_total = 0

    for t in range(horizon):
        cr_sum += relative_cost_reduction(r, v[t], d[t], rho)
        candidate = r + gammas[t] * darkpool_field(r, v[t], d[t], rho)
        r, clipped = simplex_safeguard(candidate, float(r.sum()))
        if clipped:
            clipped_total += 1
            if clipped_total == 1:
                logger.warning(
                    "allocation safeguard engaged at step %d (a zero-rebate or "
                    "exhausted venue is being pinned to the boundary); further "
                    "triggers log at DEBUG and are counted in 'safeguard_count'",
                    t + 1,
                )
            else:
                logger.debug("allocation safeguard clipped at step %d", t + 1)
        n = t + 1
        if n % renorm_every == 0:
            r /= r.sum()
        if n % record_stride == 0 or n == horizon:
            ns.append(n)
            path.append(r.copy())
            mean_cr.append(cr_sum / n)
            clip_counts.append(float(clipped_total))

    return Trajectory(
        ns=np.asarray(ns, dtype=np.int64),
        thetas=np.vstack(path),
        monitors={
            "mean_cost_reduction": np.asarray(mean_cr),
            "safeguard_count": np.asarray(clip_counts),
        },
        final_theta=r.copy(),
        horizon=horizon,
        wall_time=time.perf_counter() - start,
    )
