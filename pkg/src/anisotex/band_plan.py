"""Rational-slope band directions for turning-bands synthesis.

A band of slope ``p/q`` maps the grid ``{k1/r, k2/r}`` onto the integer
lattice ``k1*q + k2*p``, so each band line is an fBm on ``r(|p| + q) + 1``
integer points.  Bands are picked among Farey-type fractions so that the
angular gaps stay below ``epsilon`` at minimal total line length.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class Band:
    p: int
    q: int
    theta: float
    width: float | None = None

    @property
    def cost(self) -> int:
        return abs(self.p) + abs(self.q)


def _fractions(qmax: int):
    """All reduced ``p/q`` with ``q >= 1`` and ``|p| + q <= qmax``, sorted by angle."""
    q, p = np.meshgrid(np.arange(1, qmax), np.arange(-qmax + 1, qmax), indexing="ij")
    q, p = q.ravel(), p.ravel()
    keep = (np.abs(p) + q <= qmax) & (np.gcd(np.abs(p), q) == 1)
    p, q = p[keep], q[keep]
    theta = np.arctan2(p, q)
    order = np.argsort(theta, kind="stable")
    return p[order], q[order], theta[order]


def _cyclic_gaps(theta):
    return np.append(np.diff(theta), theta[0] + math.pi - theta[-1])


@lru_cache(maxsize=32)
def _candidates(epsilon: float):
    # the seam gap 2*atan(1/(Q-1)) bounds Q from below
    qmax = max(2, int(math.floor(1.0 / math.tan(0.5 * epsilon))))
    while True:
        p, q, theta = _fractions(qmax)
        if len(theta) > 0 and _cyclic_gaps(theta).max() <= epsilon:
            return p, q, theta
        qmax += 1


def _check_epsilon(epsilon):
    if not 0.0 < epsilon <= HALF_PI:
        raise ValueError(f"epsilon must lie in (0, pi/2], got {epsilon}")


def candidate_angles(epsilon: float) -> list[Band]:
    """Smallest Farey-type candidate set whose cyclic angular gaps are <= epsilon."""
    _check_epsilon(epsilon)
    p, q, theta = _candidates(float(epsilon))
    return [Band(int(a), int(b), float(t)) for a, b, t in zip(p, q, theta)]


def band_widths(thetas) -> np.ndarray:
    """Widths ``theta[i+1] - theta[i]``, closed cyclically over the period pi."""
    thetas = np.asarray(thetas, dtype=float)
    if thetas.ndim != 1 or len(thetas) == 0:
        raise ValueError("need a non-empty 1-D array of angles")
    if np.any(np.diff(thetas) <= 0.0):
        raise ValueError("angles must be strictly increasing")
    if thetas[0] <= -HALF_PI or thetas[-1] >= HALF_PI:
        raise ValueError("angles must lie in (-pi/2, pi/2)")
    return _cyclic_gaps(thetas)


@lru_cache(maxsize=32)
def _select(epsilon: float) -> tuple[int, ...]:
    """Indices (into the candidate arrays) of a min-cost cyclic cover.

    Every feasible selection has a member inside any closed window of length
    ``epsilon``, so the DP is restarted from each candidate of the sparsest
    such window; all restarts run simultaneously as rows of one table.
    """
    p, q, theta = _candidates(epsilon)
    n = len(theta)
    cost = (np.abs(p) + q).astype(float)
    ext_theta = np.concatenate([theta, theta + math.pi, theta + 2.0 * math.pi])
    ext_cost = np.tile(cost, 3)

    ends = np.searchsorted(ext_theta, theta + epsilon, side="right")
    anchor = int(np.argmin(ends - np.arange(n)))
    starts = np.arange(anchor, ends[anchor])
    first, last = anchor, starts[-1] + n
    ncols = last - first + 1

    dp = np.full((len(starts), ncols), np.inf)
    parent = np.full((len(starts), ncols), -1, dtype=np.int64)
    rows = np.arange(len(starts))
    dp[rows, starts - first] = ext_cost[starts]
    lows = np.searchsorted(ext_theta, ext_theta - epsilon, side="left")
    for j in range(first + 1, last + 1):
        lo = max(lows[j], first)
        col = j - first
        if lo >= j:
            continue
        window = dp[:, lo - first:col]
        k = np.argmin(window, axis=1)
        best = window[rows, k] + ext_cost[j]
        better = best < dp[:, col]
        dp[better, col] = best[better]
        parent[better, col] = k[better] + lo

    totals = dp[rows, starts + n - first] - ext_cost[starts]
    t = int(np.argmin(totals))
    if not np.isfinite(totals[t]):
        raise RuntimeError(f"no feasible band selection for epsilon={epsilon}")
    chosen = []
    j = int(starts[t] + n)
    while True:
        j = int(parent[t, j - first])
        if j == starts[t]:
            break
        chosen.append(j % n)
    chosen.append(int(starts[t]) % n)
    return tuple(sorted(chosen))


@dataclass(frozen=True)
class BandPlan:
    """Ordered rational bands covering the period with gaps <= epsilon."""

    bands: tuple
    epsilon: float
    r: int

    def __post_init__(self):
        object.__setattr__(self, "bands", tuple(self.bands))

    def __len__(self):
        return len(self.bands)

    @classmethod
    def from_pq(cls, pq, epsilon: float, r: int) -> "BandPlan":
        """Build a plan from ``(p, q)`` pairs; angles and widths are recomputed."""
        pq = sorted(((int(a), int(b)) for a, b in pq), key=lambda ab: math.atan2(*ab))
        for a, b in pq:
            if b < 1 or math.gcd(abs(a), b) != 1:
                raise ValueError(f"band {a}/{b} is not a reduced fraction with q >= 1")
        thetas = np.array([math.atan2(a, b) for a, b in pq])
        widths = band_widths(thetas)
        bands = [Band(a, b, float(t), float(w)) for (a, b), t, w in zip(pq, thetas, widths)]
        return cls(tuple(bands), float(epsilon), int(r))

    @cached_property
    def p(self) -> np.ndarray:
        return np.array([b.p for b in self.bands], dtype=np.int64)

    @cached_property
    def q(self) -> np.ndarray:
        return np.array([b.q for b in self.bands], dtype=np.int64)

    @cached_property
    def thetas(self) -> np.ndarray:
        return np.array([b.theta for b in self.bands])

    @cached_property
    def widths(self) -> np.ndarray:
        return np.array([b.width for b in self.bands])

    @property
    def total_cost(self) -> int:
        """Total line length ``sum r(|p| + q)`` needed by the plan."""
        return int(self.r * sum(b.cost for b in self.bands))

    def to_json(self) -> str:
        return json.dumps({"epsilon": self.epsilon, "r": self.r,
                           "bands": [{"p": b.p, "q": b.q} for b in self.bands]})

    @classmethod
    def from_json(cls, text: str) -> "BandPlan":
        doc = json.loads(text)
        return cls.from_pq([(b["p"], b["q"]) for b in doc["bands"]], doc["epsilon"], doc["r"])


def select_bands(r: int, epsilon: float) -> BandPlan:
    """Cheapest subset of the candidates whose cyclic gaps are all <= epsilon."""
    if r < 1:
        raise ValueError("r must be >= 1")
    _check_epsilon(epsilon)
    p, q, _ = _candidates(float(epsilon))
    idx = _select(float(epsilon))
    return BandPlan.from_pq([(p[i], q[i]) for i in idx], epsilon, r)


class ComparisonCounter:
    """Tally of comparisons made by the binary searches in :func:`bands_in_cone`."""

    def __init__(self):
        self.count = 0


def _bisect(a, x, right, counter):
    lo, hi = 0, len(a)
    while lo < hi:
        mid = (lo + hi) // 2
        if counter is not None:
            counter.count += 1
        if (x < a[mid]) if right else (a[mid] < x):
            if right:
                hi = mid
            else:
                lo = mid + 1
        else:
            if right:
                lo = mid + 1
            else:
                hi = mid
    return lo


def _reduce_half_open(t):
    """Reduce into ``[-pi/2, pi/2)``."""
    return t - math.pi * math.floor((t + HALF_PI) / math.pi)


def bands_in_cone(plan: BandPlan, alpha0: float, support: float, counter=None):
    """Index ranges ``[(start, stop), ...]`` of bands within ``support`` of ``alpha0``.

    At most two ranges are returned (two when the cone straddles the
    +-pi/2 seam), in increasing index order.
    """
    thetas = plan.thetas
    n = len(thetas)
    if support >= HALF_PI:
        return [(0, n)]
    lo = _reduce_half_open(alpha0 - support)
    hi = _reduce_half_open(alpha0 + support)
    i0 = _bisect(thetas, lo, False, counter)
    i1 = _bisect(thetas, hi, True, counter)
    if lo <= hi:
        return [(i0, i1)] if i0 < i1 else []
    return [rg for rg in ((0, i1), (i0, n)) if rg[0] < rg[1]]


def cone_ranges_grid(thetas: np.ndarray, alpha0: np.ndarray, support: float):
    """Vectorised :func:`bands_in_cone` over an array of cone axes.

    Returns ``(start, stop, wrapped)`` arrays; band ``i`` is selected where
    ``start <= i < stop`` if not wrapped, or ``i < stop or i >= start`` if
    wrapped.
    """
    n = len(thetas)
    alpha0 = np.asarray(alpha0, dtype=float)
    if support >= HALF_PI:
        zeros = np.zeros(alpha0.shape, dtype=np.int64)
        return zeros, np.full(alpha0.shape, n, dtype=np.int64), np.zeros(alpha0.shape, dtype=bool)
    lo = alpha0 - support
    hi = alpha0 + support
    lo = lo - math.pi * np.floor((lo + HALF_PI) / math.pi)
    hi = hi - math.pi * np.floor((hi + HALF_PI) / math.pi)
    start = np.searchsorted(thetas, lo, side="left")
    stop = np.searchsorted(thetas, hi, side="right")
    return start, stop, lo > hi
