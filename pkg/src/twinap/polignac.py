"""Strong and weak de Polignac statistics and the combinatorial lower bound."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core_primes import base_primes, sieve_primes
from .errors import DomainError

EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class GapSpectrum:
    """Histogram of consecutive-prime gaps p' - p over pairs with p' <= limit."""

    limit: int
    counts: dict[int, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def to_rows(self) -> list[tuple[int, int]]:
        return sorted(self.counts.items())


def gap_spectrum(N: int) -> GapSpectrum:
    if N < 3:
        raise DomainError("N must be >= 3")
    ps = sieve_primes(N)
    gaps, counts = np.unique(np.diff(ps), return_counts=True)
    return GapSpectrum(N, {int(g): int(c) for g, c in zip(gaps, counts)})


@dataclass(frozen=True)
class PolignacBound:
    k: int
    primorial: int
    bound: Fraction
    comparator: float

    @property
    def ratio(self) -> float:
        return float(self.bound) / self.comparator

    def to_dict(self) -> dict:
        return {"k": self.k, "P": self.primorial,
                "bound": f"{self.bound.numerator}/{self.bound.denominator}",
                "bound_float": float(self.bound), "comparator": self.comparator,
                "ratio": self.ratio}


def polignac_lower_bound(k: int) -> PolignacBound:
    """phi(P)/(P k (k - 1)) with P the product of the primes <= k.

    The comparator is exp(-gamma)/(k^2 log k).
    """
    if k < 2:
        raise DomainError("k must be >= 2")
    ps = base_primes(k).tolist()
    P = math.prod(ps)
    phi = math.prod(p - 1 for p in ps)
    bound = Fraction(phi, P * k * (k - 1))
    return PolignacBound(k, P, bound, math.exp(-EULER_GAMMA) / (k * k * math.log(k)))


@dataclass(frozen=True)
class GapCounts:
    gap: int
    weak: int       # p <= N with p and p + d prime
    strong: int     # ... and no prime in between


def weak_strong_summary(N: int, max_gap: int) -> list[GapCounts]:
    """Weak and strong counts for every even d <= max_gap, over p <= N."""
    if N < 100:
        raise DomainError("N must be >= 100")
    if max_gap < 2:
        return []
    ps = sieve_primes(N + max_gap)
    mask = np.zeros(N + max_gap + 1, dtype=bool)
    mask[ps] = True
    small = ps[ps <= N]
    # successor of each p <= N; when it lies beyond N + max_gap it matches no row anyway
    idx = np.searchsorted(ps, small, side="right")
    nxt = np.where(idx < len(ps), ps[np.minimum(idx, len(ps) - 1)], -1)
    strong = Counter((nxt - small)[nxt > 0].tolist())
    rows = []
    for d in range(2, max_gap + 1, 2):
        weak = int(mask[small + d].sum())
        rows.append(GapCounts(d, weak, strong.get(d, 0)))
    return rows
