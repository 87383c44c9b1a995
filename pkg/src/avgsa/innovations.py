"""Innovation streams that drive the recursive procedures.

The point of this module is that a stochastic-approximation recursion does
not care whether its inputs are genuinely random: any sequence whose
empirical averages settle down at a known rate can play the role of the
noise.  We provide the stream families used throughout the package

* i.i.d. uniform and Gaussian draws (PCG64 underneath),
* low-discrepancy Halton points and Gaussians built from them,
* geometrically mixing AR(1) chains and finite-state Markov chains,
* decreasing-step Euler schemes whose weighted occupation measure
  approximates the invariant law of a diffusion,

together with the quality measures attached to them (exact star
discrepancy, averaging checks for step/weight systems).

Every source is deterministic given its construction arguments: the same
seed always reproduces the same stream, element for element, regardless of
how the consumer interleaves single draws and block draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "first_primes",
    "radical_inverse",
    "halton_point",
    "halton_block",
    "box_muller_pair",
    "star_discrepancy_exact",
    "ar1_next",
    "euler_step",
    "DecreasingStepSchedule",
    "AveragingCheck",
    "averaging_system_check",
    "InnovationSource",
    "IidUniformSource",
    "IidGaussianSource",
    "HaltonSource",
    "HaltonGaussianSource",
    "Ar1MixingSource",
    "FiniteMarkovChainSource",
    "EulerDecreasingSource",
    "SOURCE_KINDS",
    "make_source",
    "next_innovation",
]

# Fixed internal buffer size.  Sources materialise their output in chunks of
# this many rows so that the emitted sequence is independent of the pattern
# of next()/take_block() calls.  Must be even (Gaussian pairs).
_BLOCK = 4096

_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Halton / radical inverse
# ---------------------------------------------------------------------------

def first_primes(q: int) -> list[int]:
    """Return the first ``q`` prime numbers (trial division; q is small)."""
    if q < 1:
        raise ValueError("need at least one prime")
    primes: list[int] = []
    cand = 2
    while len(primes) < q:
        if all(cand % p for p in primes):
            primes.append(cand)
        cand += 1
    return primes


def radical_inverse(n: int, base: int) -> float:
    """Radical inverse of the integer ``n >= 1`` in the given base.

    Digits of ``n`` are mirrored around the radix point:
    ``n = d_0 + d_1 b + d_2 b^2 + ...``  maps to ``d_0/b + d_1/b^2 + ...``.
    Pure integer arithmetic until the final division, so the result is the
    correctly rounded double.
    """
    if base < 2:
        raise ValueError(f"base must be >= 2, got {base}")
    if n < 1:
        raise ValueError(f"index must be >= 1, got {n}")
    rev = 0
    denom = 1
    while n > 0:
        n, digit = divmod(n, base)
        rev = rev * base + digit
        denom *= base
    return rev / denom


def halton_point(n: int, q: int) -> np.ndarray:
    """n-th point (1-indexed) of the q-dimensional Halton sequence.

    Coordinate ``i`` is the radical inverse of ``n`` in the i-th prime
    base.  Starting the count at ``n = 1`` keeps every coordinate strictly
    inside ``(0, 1)``, which matters downstream (the Box-Muller map takes a
    logarithm of the first coordinate).
    """
    return np.array([radical_inverse(n, b) for b in first_primes(q)])


def halton_block(start: int, count: int, q: int) -> np.ndarray:
    """Halton points for indices ``start, ..., start+count-1`` as an
    ``(count, q)`` array.  Vectorised digit extraction; exact."""
    if start < 1:
        raise ValueError("Halton indices start at 1")
    idx0 = np.arange(start, start + count, dtype=np.int64)
    out = np.empty((count, q))
    for j, b in enumerate(first_primes(q)):
        idx = idx0.copy()
        rev = np.zeros(count, dtype=np.int64)
        denom = 1
        while idx.any():
            rev = rev * b + idx % b
            idx //= b
            denom *= b
        out[:, j] = rev / denom
    return out


# ---------------------------------------------------------------------------
# Gaussian map
# ---------------------------------------------------------------------------

def box_muller_pair(u1: float, u2: float) -> tuple[float, float]:
    """Map a pair of uniforms to a pair of independent standard normals.

    Uses the polar form ``r = sqrt(-2 log u1)`` with angle ``2 pi u2``; the
    sine component comes first.  ``u1`` must lie in ``(0, 1]`` (``u1 = 1``
    is fine and yields the origin), ``u2`` in ``[0, 1)``.
    """
    if not 0.0 < u1 <= 1.0:
        raise ValueError(f"u1 must be in (0, 1], got {u1}")
    if not 0.0 <= u2 < 1.0:
        raise ValueError(f"u2 must be in [0, 1), got {u2}")
    r = math.sqrt(-2.0 * math.log(u1))
    return r * math.sin(_TWO_PI * u2), r * math.cos(_TWO_PI * u2)


def _gaussians_from_pairs(u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
    """Vectorised Box-Muller: returns interleaved (sin, cos) components,
    length ``2 * len(u1)``."""
    r = np.sqrt(-2.0 * np.log(u1))
    out = np.empty(2 * u1.size)
    out[0::2] = r * np.sin(_TWO_PI * u2)
    out[1::2] = r * np.cos(_TWO_PI * u2)
    return out


# ---------------------------------------------------------------------------
# Exact star discrepancy
# ---------------------------------------------------------------------------

_DISCREPANCY_BUDGET = 10**8


def star_discrepancy_exact(points: np.ndarray) -> float:
    """Exact star discrepancy of a point set in ``[0, 1)^q``.

    The supremum over anchored boxes ``[0, x)`` of
    ``| #(points in box)/n - volume |`` is attained on the critical grid
    whose coordinates are the point coordinates themselves (plus 1.0), each
    corner being tested with both the closed and the open box.  Cost grows
    like ``n^q``, so a budget guard rejects inputs with
    ``n**q * q > 1e8``.

    Accepts an ``(n, q)`` array or a length-n vector (treated as 1D).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError("need a non-empty (n, q) point array")
    n, q = pts.shape
    if np.any(pts < 0.0) or np.any(pts >= 1.0):
        raise ValueError("points must lie in [0, 1)^q")
    if n**q * q > _DISCREPANCY_BUDGET:
        raise ValueError(
            f"exact discrepancy budget exceeded: n**q*q = {n**q * q:.3g} > {_DISCREPANCY_BUDGET:.0e}"
        )

    # Candidate grid per dimension: sorted point coordinates plus 1.0.
    cands = [np.unique(np.concatenate([pts[:, j], [1.0]])) for j in range(q)]
    ranks = [np.searchsorted(cands[j], pts[:, j]) for j in range(q)]

    if q == 1:
        m = cands[0].size
        hist = np.bincount(ranks[0], minlength=m).astype(np.int64)
        closed = np.cumsum(hist)
        open_ = np.concatenate([[0], closed[:-1]])
        vol = cands[0]
        d_closed = np.max(closed / n - vol)
        d_open = np.max(vol - open_ / n)
        return float(max(d_closed, d_open))

    if q == 2:
        # Stream over the first axis to keep memory at O(m2).
        m1, m2 = cands[0].size, cands[1].size
        hist = np.zeros((m1, m2), dtype=np.int64)
        np.add.at(hist, (ranks[0], ranks[1]), 1)
        best = 0.0
        acc = np.zeros(m2, dtype=np.int64)
        prev_closed = np.zeros(m2, dtype=np.int64)  # closed counts of row i-1
        c2 = cands[1]
        for i in range(m1):
            acc += hist[i]
            closed = np.cumsum(acc)
            # open box at (i, j): points strictly below both coordinates,
            # i.e. the closed count one grid step down in each axis.
            open_ = np.concatenate([[0], prev_closed[:-1]])
            vol = cands[0][i] * c2
            d_closed = np.max(closed / n - vol)
            d_open = np.max(vol - open_ / n)
            if d_closed > best:
                best = d_closed
            if d_open > best:
                best = d_open
            prev_closed = closed
        return float(best)

    # General dimension: dense grid, guarded small by the budget.
    shape = tuple(c.size for c in cands)
    hist = np.zeros(shape, dtype=np.int64)
    np.add.at(hist, tuple(ranks), 1)
    closed = hist
    for ax in range(q):
        closed = np.cumsum(closed, axis=ax)
    padded = np.pad(closed, [(1, 0)] * q)
    open_ = padded[tuple(slice(0, s) for s in shape)]
    vol = cands[0]
    for j in range(1, q):
        vol = np.multiply.outer(vol, cands[j])
    d_closed = np.max(closed / n - vol)
    d_open = np.max(vol - open_ / n)
    return float(max(d_closed, d_open))


# ---------------------------------------------------------------------------
# Recursions used as innovation generators
# ---------------------------------------------------------------------------

def ar1_next(x: float, a: float, z: float) -> float:
    """One transition of the linear autoregression ``x' = a x + z``."""
    if not abs(a) < 1.0:
        raise ValueError(f"autoregression coefficient must satisfy |a| < 1, got {a}")
    return a * x + z


def euler_step(
    y: float,
    gamma_bar: float,
    drift: Callable[[float], float],
    diffusion: Callable[[float], float],
    u: float,
) -> float:
    """One update of the decreasing-step Euler scheme
    ``y' = y + gamma_bar * b(y) + sqrt(gamma_bar) * sigma(y) * u``."""
    if gamma_bar <= 0.0:
        raise ValueError(f"step must be positive, got {gamma_bar}")
    return y + gamma_bar * drift(y) + math.sqrt(gamma_bar) * diffusion(y) * u


@dataclass(frozen=True)
class DecreasingStepSchedule:
    """Power schedule ``gamma_bar_n = gamma0 * n**(-exponent)`` for Euler
    discretisation, with exponent in ``(0, 1)`` so that the steps vanish
    while their partial sums diverge."""

    gamma0: float
    exponent: float

    def __post_init__(self) -> None:
        if self.gamma0 <= 0.0:
            raise ValueError(f"gamma0 must be positive, got {self.gamma0}")
        if not 0.0 < self.exponent < 1.0:
            raise ValueError(
                f"exponent must lie in (0, 1), got {self.exponent}"
            )

    def step(self, n: int) -> float:
        """Step used for the n-th transition, n >= 1."""
        return self.gamma0 * n ** (-self.exponent)


@dataclass(frozen=True)
class AveragingCheck:
    """Outcome of an averaging step/weight system check.

    ``verdict`` is 'averaging', 'not-averaging' or 'inconclusive'.  The
    partial sums are reported so a caller can judge borderline cases.
    """

    verdict: str
    closed_form_rule: str | None
    weight_sum: float
    positive_variation_sum: float
    weighted_square_sum: float
    final_step: float


def averaging_system_check(
    schedule: DecreasingStepSchedule,
    horizon: int,
    eta: Callable[[int], float] | None = None,
) -> AveragingCheck:
    """Decide whether a step/weight pair is an averaging system.

    The defining requirements for weights ``eta_n`` with partial sums
    ``H_n`` are: the weight series diverges, the steps vanish, the series
    ``sum (1/H_n) (d(eta_n/gamma_n))_+`` and ``sum (eta_n/(H_n sqrt(gamma_n)))**2``
    both converge.  With unit weights and a power schedule the answer is
    closed form — exponent strictly between 0 and 1 — and that rule is
    used for the verdict; the partial sums are still evaluated up to
    ``horizon`` and reported.  For custom weights the verdict falls back
    to a trend heuristic and reports 'inconclusive' unless the evidence is
    decisive.
    """
    if horizon < 100:
        raise ValueError("need a horizon of at least 100 to say anything")
    ns = np.arange(1, horizon + 1, dtype=float)
    gam = schedule.gamma0 * ns ** (-schedule.exponent)
    if eta is None:
        w = np.ones_like(ns)
    else:
        w = np.array([float(eta(int(k))) for k in range(1, horizon + 1)])
        if np.any(w < 0.0):
            raise ValueError("weights must be nonnegative")
    H = np.cumsum(w)
    ratio = w / gam
    dplus = np.clip(np.diff(ratio), 0.0, None)
    s_var = float(np.sum(dplus / H[1:]))
    s_sq = float(np.sum((w / (H * np.sqrt(gam))) ** 2))
    out = dict(
        weight_sum=float(H[-1]),
        positive_variation_sum=s_var,
        weighted_square_sum=s_sq,
        final_step=float(gam[-1]),
    )

    if eta is None:
        ok = 0.0 < schedule.exponent < 1.0
        rule = "unit weights, power steps: averaging iff exponent in (0, 1)"
        return AveragingCheck(
            verdict="averaging" if ok else "not-averaging",
            closed_form_rule=rule,
            **out,
        )

    # Custom weights: judge each series by whether its last-decade
    # increment is still as large as the one before (divergent-looking)
    # or has collapsed relative to the total (convergent-looking).
    def trend(series_terms: np.ndarray) -> str:
        total = float(np.sum(series_terms))
        if total <= 0.0:
            return "convergent"
        i8, i9 = int(0.8 * horizon), int(0.9 * horizon)
        prev10 = float(np.sum(series_terms[i8:i9]))
        last10 = float(np.sum(series_terms[i9:]))
        if prev10 > 0.0 and last10 >= 0.999 * prev10:
            return "divergent"
        if last10 / total < 1e-3:
            return "convergent"
        return "unclear"

    t_var = trend(dplus / H[1:])
    t_sq = trend((w / (H * np.sqrt(gam))) ** 2)
    if "divergent" in (t_var, t_sq):
        verdict = "not-averaging"
    elif t_var == t_sq == "convergent":
        verdict = "averaging"
    else:
        verdict = "inconclusive"
    return AveragingCheck(verdict=verdict, closed_form_rule=None, **out)


# ---------------------------------------------------------------------------
# Innovation sources
# ---------------------------------------------------------------------------

class InnovationSource:
    """Common machinery for sequential innovation streams.

    Subclasses implement ``_generate(count)`` returning the next ``count``
    rows as an ``(count, dimension)`` array.  Generation always happens in
    fixed-size internal chunks, so the emitted sequence depends only on the
    construction arguments, never on how it is consumed.
    """

    kind: str = "abstract"

    def __init__(self, dimension: int):
        if dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {dimension}")
        self.dimension = dimension
        self._buf: np.ndarray | None = None
        self._pos = 0

    # -- subclass hook ------------------------------------------------
    def _generate(self, count: int) -> np.ndarray:
        raise NotImplementedError

    # -- public stream interface --------------------------------------
    def _refill(self) -> None:
        self._buf = self._generate(_BLOCK)
        self._pos = 0

    def next(self) -> np.ndarray:
        """Next innovation as a length-``dimension`` vector."""
        if self._buf is None or self._pos >= len(self._buf):
            self._refill()
        row = self._buf[self._pos]
        self._pos += 1
        return row

    def take_block(self, count: int) -> np.ndarray:
        """Next ``count`` innovations as an ``(count, dimension)`` array."""
        parts = []
        need = count
        while need > 0:
            if self._buf is None or self._pos >= len(self._buf):
                self._refill()
            take = min(need, len(self._buf) - self._pos)
            parts.append(self._buf[self._pos : self._pos + take])
            self._pos += take
            need -= take
        return np.concatenate(parts) if len(parts) > 1 else parts[0].copy()

    def __iter__(self):
        while True:
            yield self.next()


def next_innovation(source: InnovationSource) -> np.ndarray:
    """Advance the stream by one element and return it."""
    return source.next()


class IidUniformSource(InnovationSource):
    """Independent uniforms on ``[0, 1)^q`` from a PCG64 generator."""

    kind = "iid-uniform"

    def __init__(self, dimension: int = 1, seed: int = 0):
        super().__init__(dimension)
        self.seed = seed
        self._rng = np.random.default_rng(np.random.SeedSequence(seed))

    def _generate(self, count: int) -> np.ndarray:
        return self._rng.random((count, self.dimension))


class IidGaussianSource(InnovationSource):
    """Independent standard normals built from PCG64 uniforms through the
    same Box-Muller map the quasi-Monte Carlo sources use, so an i.i.d. run
    and a low-discrepancy run differ only in the underlying uniforms."""

    kind = "iid-gaussian"

    def __init__(self, dimension: int = 1, seed: int = 0):
        super().__init__(dimension)
        self.seed = seed
        self._rng = np.random.default_rng(np.random.SeedSequence(seed))

    def _generate(self, count: int) -> np.ndarray:
        npairs = (count * self.dimension) // 2  # count * dim is even
        u = self._rng.random((2, npairs))
        u1 = 1.0 - u[0]  # map [0,1) to (0,1] for the logarithm
        g = _gaussians_from_pairs(u1, u[1])
        return g.reshape(count, self.dimension)


class HaltonSource(InnovationSource):
    """Deterministic Halton stream in ``q`` dimensions, 1-indexed."""

    kind = "halton"

    def __init__(self, dimension: int = 1, start: int = 1):
        super().__init__(dimension)
        if start < 1:
            raise ValueError("Halton indices start at 1")
        self._next_index = start

    def _generate(self, count: int) -> np.ndarray:
        block = halton_block(self._next_index, count, self.dimension)
        self._next_index += count
        return block


class HaltonGaussianSource(InnovationSource):
    """Gaussian vectors obtained by pushing consecutive coordinate pairs of
    a Halton stream through the Box-Muller map.  A q-dimensional output row
    consumes one Halton point of dimension ``2*ceil(q/2)``; for odd q the
    final cosine component is dropped."""

    kind = "halton-gaussian"

    def __init__(self, dimension: int = 1, start: int = 1):
        super().__init__(dimension)
        if start < 1:
            raise ValueError("Halton indices start at 1")
        self._pairs = (dimension + 1) // 2
        self._next_index = start

    def _generate(self, count: int) -> np.ndarray:
        pts = halton_block(self._next_index, count, 2 * self._pairs)
        self._next_index += count
        out = np.empty((count, 2 * self._pairs))
        for p in range(self._pairs):
            g = _gaussians_from_pairs(pts[:, 2 * p], pts[:, 2 * p + 1])
            out[:, 2 * p] = g[0::2]
            out[:, 2 * p + 1] = g[1::2]
        return out[:, : self.dimension]


class Ar1MixingSource(InnovationSource):
    """Geometrically mixing linear autoregression ``x' = a x + z`` with
    standard normal increments (componentwise independent chains when the
    dimension exceeds one).  With ``a = 0`` the stream reduces to its
    i.i.d. Gaussian noise."""

    kind = "ar1-mixing"

    def __init__(
        self,
        dimension: int = 1,
        seed: int = 0,
        a: float = 0.5,
        x0: float | Sequence[float] = 0.0,
    ):
        super().__init__(dimension)
        if not abs(a) < 1.0:
            raise ValueError(f"|a| < 1 required for mixing, got {a}")
        self.seed = seed
        self.a = a
        self._state = np.broadcast_to(np.asarray(x0, dtype=float), (dimension,)).copy()
        self._noise = IidGaussianSource(dimension, seed)

    def _generate(self, count: int) -> np.ndarray:
        z = self._noise.take_block(count)
        out = np.empty_like(z)
        x = self._state
        a = self.a
        for i in range(count):
            x = a * x + z[i]
            out[i] = x
        self._state = x
        return out


class FiniteMarkovChainSource(InnovationSource):
    """Homogeneous finite-state Markov chain emitting per-state values.

    ``transition`` is a row-stochastic matrix, ``values`` assigns a vector
    (or scalar) to each state.  The first emission is the value of the
    initial state; the chain then moves according to the matrix.
    """

    kind = "finite-markov-chain"

    def __init__(
        self,
        transition: np.ndarray,
        values: np.ndarray,
        seed: int = 0,
        initial_state: int = 0,
    ):
        P = np.asarray(transition, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ValueError("transition matrix must be square")
        if np.any(P < 0.0) or not np.allclose(P.sum(axis=1), 1.0, atol=1e-12):
            raise ValueError("transition matrix rows must be probability vectors")
        vals = np.asarray(values, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.shape[0] != P.shape[0]:
            raise ValueError("one value row per state required")
        if not 0 <= initial_state < P.shape[0]:
            raise ValueError(f"initial state {initial_state} out of range")
        super().__init__(vals.shape[1])
        self.seed = seed
        self._P_cum = np.cumsum(P, axis=1)
        self._values = vals
        self._state = initial_state
        self._emitted_initial = False
        self._rng = np.random.default_rng(np.random.SeedSequence(seed))

    def stationary_distribution(self) -> np.ndarray:
        """Left eigenvector of the transition matrix for eigenvalue 1,
        normalised to a probability vector."""
        P = np.diff(self._P_cum, axis=1, prepend=0.0)
        w, v = np.linalg.eig(P.T)
        i = int(np.argmin(np.abs(w - 1.0)))
        pi = np.real(v[:, i])
        pi = np.abs(pi)
        return pi / pi.sum()

    def _generate(self, count: int) -> np.ndarray:
        out = np.empty((count, self.dimension))
        u = self._rng.random(count)
        s = self._state
        for i in range(count):
            if not self._emitted_initial:
                self._emitted_initial = True
            else:
                s = int(np.searchsorted(self._P_cum[s], u[i], side="right"))
            out[i] = self._values[s]
        self._state = s
        return out


class EulerDecreasingSource(InnovationSource):
    """Decreasing-step Euler scheme of a scalar diffusion, emitted as an
    innovation stream starting from the initial condition.

    The n-th transition uses step ``schedule.step(n)`` and an independent
    standard normal; the occupation measure of the emitted sequence
    approximates the invariant law of the diffusion.
    """

    kind = "euler-decreasing"

    def __init__(
        self,
        drift: Callable[[float], float],
        diffusion: Callable[[float], float],
        schedule: DecreasingStepSchedule,
        y0: float = 0.0,
        seed: int = 0,
    ):
        super().__init__(1)
        self.seed = seed
        self.schedule = schedule
        self._drift = drift
        self._diffusion = diffusion
        self._y = float(y0)
        self._n = 0  # transitions applied so far
        self._emitted_initial = False
        self._noise = IidGaussianSource(1, seed)

    def _generate(self, count: int) -> np.ndarray:
        out = np.empty((count, 1))
        z = self._noise.take_block(count)
        y = self._y
        n = self._n
        g0 = self.schedule.gamma0
        r = self.schedule.exponent
        drift, diffusion = self._drift, self._diffusion
        for i in range(count):
            if not self._emitted_initial:
                self._emitted_initial = True
            else:
                n += 1
                gam = g0 * n ** (-r)
                y = y + gam * drift(y) + math.sqrt(gam) * diffusion(y) * z[i, 0]
            out[i, 0] = y
        self._y = y
        self._n = n
        return out


SOURCE_KINDS = (
    "iid-uniform",
    "iid-gaussian",
    "halton",
    "halton-gaussian",
    "ar1-mixing",
    "finite-markov-chain",
    "euler-decreasing",
)


def make_source(kind: str, dimension: int = 1, seed: int = 0, **params) -> InnovationSource:
    """Construct an innovation source from a flat description.

    This is the entry point the configuration layer uses; unknown kinds and
    unknown parameters are hard errors.
    """
    if kind == "iid-uniform":
        _reject_extra(kind, params)
        return IidUniformSource(dimension, seed)
    if kind == "iid-gaussian":
        _reject_extra(kind, params)
        return IidGaussianSource(dimension, seed)
    if kind == "halton":
        start = params.pop("start", 1)
        _reject_extra(kind, params)
        return HaltonSource(dimension, start=start)
    if kind == "halton-gaussian":
        start = params.pop("start", 1)
        _reject_extra(kind, params)
        return HaltonGaussianSource(dimension, start=start)
    if kind == "ar1-mixing":
        a = params.pop("a", 0.5)
        x0 = params.pop("x0", 0.0)
        _reject_extra(kind, params)
        return Ar1MixingSource(dimension, seed, a=a, x0=x0)
    if kind == "finite-markov-chain":
        try:
            transition = params.pop("transition")
            values = params.pop("values")
        except KeyError as exc:
            raise ValueError(f"finite-markov-chain requires {exc.args[0]!r}") from None
        initial_state = params.pop("initial_state", 0)
        _reject_extra(kind, params)
        return FiniteMarkovChainSource(transition, values, seed, initial_state)
    if kind == "euler-decreasing":
        raise ValueError(
            "euler-decreasing sources carry drift/diffusion callables; "
            "construct EulerDecreasingSource directly or use an application preset"
        )
    raise ValueError(f"unknown innovation kind {kind!r}; known: {', '.join(SOURCE_KINDS)}")


def _reject_extra(kind: str, params: dict) -> None:
    if params:
        raise ValueError(f"unknown parameters for {kind!r}: {sorted(params)}")
