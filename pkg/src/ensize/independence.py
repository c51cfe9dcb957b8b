"""Probability that ``n`` votes contain ``m`` linearly independent ones.

The votes are fed in one at a time and we track the dimension of their span.
The first vote gives dimension 1; every later vote keeps the dimension ``d``
with probability ``p_d`` and raises it by one otherwise. The probability of
ending at dimension ``m`` is

    prod_{i<m} (1 - p_i) * sum_{k=0}^{n-m} h_k(p_1, ..., p_{m-1})

where ``h_k`` is the complete homogeneous symmetric polynomial of degree
``k``. :func:`reach_probability` evaluates it by stepping the dimension
chain forward, which is O(n m); :func:`reach_probability_bruteforce` expands
the sum term by term and is only meant as a check.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import CapacityError, DependenceProfile, DomainError, as_profile

MAX_ENSEMBLE_SIZE = 10**6
BRUTEFORCE_MAX_EXTRA = 12
BRUTEFORCE_MAX_M = 6


def _check(n, m, profile) -> DependenceProfile:
    profile = as_profile(profile)
    if m < 2:
        raise DomainError(f"need at least two class labels, got m={m}")
    if n < 1:
        raise DomainError(f"need at least one vote, got n={n}")
    if len(profile) != m - 1:
        raise DomainError(f"profile has {len(profile)} entries, expected m-1 = {m - 1}")
    return profile


@dataclass(frozen=True)
class DimensionChainState:
    """``dist[d - 1]`` is the probability that the span has dimension ``d``."""

    dist: np.ndarray

    @property
    def reached(self) -> float:
        return float(self.dist[-1])

    @property
    def unreached(self) -> float:
        return float(self.dist[:-1].sum())


def _stay(profile: DependenceProfile) -> np.ndarray:
    # dimension m is absorbing
    return np.append(profile.p, 1.0)


def _step(dist, stay, go):
    out = dist * stay
    out[1:] += dist[:-1] * go[:-1]
    return out


def dimension_chain(n: int, m: int, profile) -> DimensionChainState:
    """Distribution of the span dimension after ``n`` votes."""
    profile = _check(n, m, profile)
    stay = _stay(profile)
    go = 1.0 - stay
    dist = np.zeros(m)
    dist[0] = 1.0
    for _ in range(n - 1):
        dist = _step(dist, stay, go)
    return DimensionChainState(dist)


def reach_curve(n_max: int, m: int, profile):
    """Reach and unreached probabilities for every ``n`` in ``1..n_max``.

    Returns two arrays of length ``n_max``; entry ``n - 1`` belongs to ``n``
    votes. One forward pass, so this is the cheap way to tabulate a curve.
    """
    profile = _check(n_max, m, profile)
    stay = _stay(profile)
    go = 1.0 - stay
    dist = np.zeros(m)
    dist[0] = 1.0
    reached = np.empty(n_max)
    unreached = np.empty(n_max)
    for i in range(n_max):
        if i:
            dist = _step(dist, stay, go)
        reached[i] = dist[-1]
        unreached[i] = dist[:-1].sum()
    return reached, unreached


def reach_probability(n: int, m: int, profile) -> float:
    """Probability of ``m`` linearly independent votes among ``n``.

    Examples
    --------
    >>> reach_probability(4, 3, [0.5, 0.5])
    0.5
    >>> reach_probability(3, 2, [0.5])
    0.75
    """
    return dimension_chain(n, m, profile).reached


def unreached_probability(n: int, m: int, profile) -> float:
    """``1 - reach_probability`` summed over the transient states, so it keeps
    full relative precision when the reach probability is close to 1."""
    return dimension_chain(n, m, profile).unreached


def reach_probability_bruteforce(n: int, m: int, profile) -> float:
    """Literal term-by-term expansion of the product-times-sum formula."""
    profile = _check(n, m, profile)
    if n - m > BRUTEFORCE_MAX_EXTRA or m > BRUTEFORCE_MAX_M:
        raise CapacityError(
            f"enumeration limited to n - m <= {BRUTEFORCE_MAX_EXTRA} and m <= {BRUTEFORCE_MAX_M}"
        )
    p = profile.tolist()
    total = 0.0
    for k in range(n - m + 1):
        # each multiset of size k over {1..m-1} is one exponent tuple x with sum k
        for combo in itertools.combinations_with_replacement(range(m - 1), k):
            term = 1.0
            for j in combo:
                term *= p[j]
            total += term
    head = 1.0
    for pi in p:
        head *= 1.0 - pi
    return head * total


def tail_bound_constant(profile) -> float:
    """Constant ``C`` with ``1 - P(n) <= C * max(p)**(n - m)`` for all ``n >= m``.

    Built from the partial-fraction form of ``h_k`` and therefore finite only
    when the entries of the profile are pairwise distinct; returns ``inf``
    otherwise (ties add a polynomial factor in ``n`` and no constant exists).
    """
    p = as_profile(profile).tolist()
    m = len(p) + 1
    c = 0.0
    head = 1.0
    for d in range(1, m):
        sub = p[:d]
        for j, pj in enumerate(sub):
            denom = 1.0
            for i, pi in enumerate(sub):
                if i != j:
                    denom *= pj - pi
            if denom == 0.0:
                return math.inf
            c += head * pj ** (m - 1) / abs(denom)
        head *= 1.0 - p[d - 1]
    return c


def tail_decay_ratio(n: int, m: int, profile) -> float:
    """``(1 - P(n + 1)) / (1 - P(n))`` without underflow for very large ``n``.

    Raises the transient block of the chain to the ``n - 1``-th power by
    repeated squaring, rescaling after each product.
    """
    profile = _check(n, m, profile)
    p = profile.p
    k = m - 1
    t = np.diag(p)
    t[np.arange(1, k), np.arange(k - 1)] = 1.0 - p[:-1]

    def scaled(a):
        s = np.abs(a).max()
        return a / s if s > 0 else a

    v = np.zeros(k)
    v[0] = 1.0
    power, e = t.copy(), n - 1
    while e:
        if e & 1:
            v = power @ v
            s = v.max()
            if s == 0:
                return 0.0
            v /= s
        e >>= 1
        if e:
            power = scaled(power @ power)
    total = v.sum()
    return float((t @ v).sum() / total) if total > 0 else 0.0


@dataclass(frozen=True)
class SizeRecommendation:
    """Smallest ensemble size reaching ``target``; ``n_min`` is ``None`` when
    the target cannot be met."""

    n_min: Optional[int]
    target: float
    achieved: float

    @property
    def reachable(self) -> bool:
        return self.n_min is not None

    def to_dict(self):
        return {
            "n_min": self.n_min if self.reachable else "unreachable",
            "target": self.target,
            "achieved": self.achieved,
        }


def min_ensemble_size(m: int, profile, target: float = 0.999, cap: int = MAX_ENSEMBLE_SIZE) -> SizeRecommendation:
    """Smallest ``n`` whose reach probability is at least ``target``.

    The reach probability is nondecreasing in ``n`` so a forward scan that
    stops at the first hit is exact. Any ``p_k == 1`` caps the span below
    ``m`` forever and is reported as unreachable without scanning.
    """
    if not 0.0 < target < 1.0:
        raise DomainError(f"target must lie in (0, 1), got {target}")
    profile = _check(1, m, profile)
    if np.any(profile.p >= 1.0):
        return SizeRecommendation(None, target, 0.0)
    stay = _stay(profile)
    go = 1.0 - stay
    dist = np.zeros(m)
    dist[0] = 1.0
    n = 1
    while dist[-1] < target:
        if n >= cap:
            return SizeRecommendation(None, target, float(dist[-1]))
        dist = _step(dist, stay, go)
        n += 1
    return SizeRecommendation(n, target, float(dist[-1]))


def _count_reached(n, p, trials, seed_seq) -> int:
    rng = np.random.default_rng(seed_seq)
    extra = np.zeros(trials)
    for pk in p:
        if pk >= 1.0:
            return 0
        # failures before the first success = votes wasted at this dimension
        extra += rng.geometric(1.0 - pk, size=trials) - 1
    return int(np.count_nonzero(extra <= n - (len(p) + 1)))


def simulate_chain(n: int, m: int, profile, trials: int, seed: int = 0, partitions: int = 1, jobs: int = 1) -> float:
    """Monte Carlo estimate of :func:`reach_probability`.

    Each trial draws, for every dimension, how many votes are spent before
    the span grows; the trial succeeds when the total fits in ``n`` votes.
    Trials are split into ``partitions`` chunks with seeds spawned from
    ``seed``; the result depends on ``(seed, partitions)`` only, not on
    ``jobs``.
    """
    profile = _check(n, m, profile)
    if trials < 1:
        raise DomainError("trials must be >= 1")
    partitions = max(1, min(int(partitions), trials))
    sizes = [trials // partitions + (i < trials % partitions) for i in range(partitions)]
    seeds = np.random.SeedSequence(seed).spawn(partitions)
    p = profile.tolist()
    if jobs > 1 and partitions > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            hits = list(pool.map(lambda a: _count_reached(n, p, *a), zip(sizes, seeds)))
    else:
        hits = [_count_reached(n, p, s, ss) for s, ss in zip(sizes, seeds)]
    return sum(hits) / trials
