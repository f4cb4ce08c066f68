"""Admissible k-tuples and their singular series."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core_primes import base_primes
from .errors import DomainError, NotFoundError

#: pi(x) < RS_CONST * x / log x for all x > 1 (Rosser-Schoenfeld).
RS_CONST = 1.25506


def normalize(offsets: Iterable[int]) -> tuple[int, ...]:
    """Sort, validate distinctness and shift so the first offset is 0."""
    hs = sorted(int(h) for h in offsets)
    if not hs:
        raise DomainError("empty tuple")
    if len(set(hs)) != len(hs):
        raise DomainError(f"offsets not distinct: {hs}")
    if hs[0] < 0:
        raise DomainError(f"negative offset in {hs}")
    return tuple(h - hs[0] for h in hs)


def parse_tuple(text: str) -> tuple[int, ...]:
    """'0,4,6' -> (0, 4, 6)."""
    try:
        return normalize(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError as exc:
        raise DomainError(f"bad tuple literal {text!r}") from exc


def format_tuple(offsets: Sequence[int]) -> str:
    return ",".join(map(str, offsets))


def residue_classes(offsets: Sequence[int], p: int) -> set[int]:
    """Omega(p): the classes n mod p with p | prod(n + h)."""
    return {(-h) % p for h in offsets}


@dataclass(frozen=True)
class AdmissibilityResult:
    admissible: bool
    # prime -> an omitted class of h mod p (admissible case)
    omitted: dict[int, int] = field(default_factory=dict)
    covering_prime: int | None = None

    def __bool__(self) -> bool:
        return self.admissible


def is_admissible(offsets: Sequence[int]) -> AdmissibilityResult:
    """Check that the offsets miss a residue class modulo every prime.

    Only p <= k needs testing: k offsets cannot cover p > k classes.
    """
    hs = normalize(offsets)
    k = len(hs)
    omitted = {}
    for p in base_primes(k).tolist():
        present = {h % p for h in hs}
        if len(present) == p:
            return AdmissibilityResult(False, covering_prime=p)
        omitted[p] = min(set(range(p)) - present)
    return AdmissibilityResult(True, omitted)


@dataclass(frozen=True)
class AdmissibleTuple:
    offsets: tuple[int, ...]

    def __post_init__(self):
        hs = normalize(self.offsets)
        if hs != tuple(self.offsets):
            object.__setattr__(self, "offsets", hs)
        check = is_admissible(hs)
        if not check:
            raise DomainError(f"{format_tuple(hs)} covers every class mod {check.covering_prime}")

    @property
    def k(self) -> int:
        return len(self.offsets)

    @property
    def diameter(self) -> int:
        return self.offsets[-1] - self.offsets[0]

    def __iter__(self):
        return iter(self.offsets)

    def __len__(self) -> int:
        return len(self.offsets)

    def __str__(self) -> str:
        return format_tuple(self.offsets)

    @classmethod
    def parse(cls, text: str) -> "AdmissibleTuple":
        return cls(parse_tuple(text))


def primes_above_k_tuple(k: int) -> AdmissibleTuple:
    """The first k primes exceeding k, shifted to start at 0."""
    if k < 1:
        raise DomainError("k must be >= 1")
    bound = max(30, int(2 * k * (math.log(k + 2) + 2)))
    while True:
        ps = base_primes(bound)
        ps = ps[ps > k]
        if len(ps) >= k:
            return AdmissibleTuple(tuple(int(p) for p in ps[:k]))
        bound *= 2


def _search_diameter(k: int, D: int, primes: list[int]) -> tuple[int, ...] | None:
    """Lexicographically first admissible tuple {0, ..., D} of size k."""
    if k == 1:
        return (0,) if D == 0 else None
    # residue counts per prime, seeded with 0 and D
    counts = {p: [0] * p for p in primes}
    covered = {p: 0 for p in primes}

    def add(h: int) -> bool:
        ok = True
        for p in primes:
            r = h % p
            if counts[p][r] == 0:
                covered[p] += 1
                if covered[p] == p:
                    ok = False
            counts[p][r] += 1
        return ok

    def remove(h: int) -> None:
        for p in primes:
            r = h % p
            counts[p][r] -= 1
            if counts[p][r] == 0:
                covered[p] -= 1

    if not (add(0) & add(D)):
        return None
    # all offsets share the parity of 0 once p = 2 is in play
    step = 2 if 2 in primes else 1
    candidates = list(range(step, D, step))
    chosen: list[int] = []

    def dfs(start: int) -> bool:
        need = k - 2 - len(chosen)
        if need == 0:
            return True
        for idx in range(start, len(candidates) - need + 1):
            h = candidates[idx]
            # skip classes that would close out a prime
            if add(h):
                chosen.append(h)
                if dfs(idx + 1):
                    return True
                chosen.pop()
            remove(h)
        return False

    if dfs(0):
        return (0, *chosen, D)
    return None


def narrowest_tuple(k: int, search_limit: int) -> AdmissibleTuple:
    """Admissible k-tuple of minimal diameter within [0, search_limit].

    Ties go to the lexicographically smallest offset vector.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    primes = base_primes(k).tolist()
    for D in range(0 if k == 1 else k - 1, search_limit + 1):
        found = _search_diameter(k, D, primes)
        if found is not None:
            return AdmissibleTuple(found)
    raise NotFoundError(f"no admissible {k}-tuple with diameter <= {search_limit}")


def narrowest_tuple_exhaustive(k: int, search_limit: int) -> AdmissibleTuple:
    """Plain subset enumeration; only sensible for small k."""
    for D in range(0 if k == 1 else k - 1, search_limit + 1):
        inner = range(1, D)
        for mid in itertools.combinations(inner, k - 2) if k >= 2 else [()]:
            hs = (0,) if k == 1 else (0, *mid, D)
            if is_admissible(hs):
                return AdmissibleTuple(hs)
    raise NotFoundError(f"no admissible {k}-tuple with diameter <= {search_limit}")


@dataclass(frozen=True)
class SingularSeriesValue:
    value: float
    truncation_prime: int
    tail_error_bound: float

    @property
    def lower(self) -> float:
        return self.value / self.tail_error_bound

    @property
    def upper(self) -> float:
        return self.value * self.tail_error_bound


def prime_tail_bound(k: int, T: int) -> float:
    """Bound on sum_{p > T} |log((1 - k/p)(1 - 1/p)^-k)|, valid for T >= 2k.

    Per factor the log is at most k^2/p^2 in size; the prime tail
    sum_{p>T} 1/p^2 is at most 2 * RS_CONST / (T log T).
    """
    if T < max(2, 2 * k):
        raise DomainError(f"tail bound needs T >= 2k (T={T}, k={k})")
    return k * k * 2.0 * RS_CONST / (T * math.log(T))


def _local_counts(hs: Sequence[int], ps: np.ndarray) -> np.ndarray:
    k = len(hs)
    nu = np.full(ps.shape, k, dtype=np.int64)
    diam = hs[-1] - hs[0]
    for i in np.flatnonzero(ps <= diam).tolist():
        nu[i] = len(residue_classes(hs, int(ps[i])))
    return nu


def singular_series(offsets: Sequence[int], truncation_prime: int = 10**6) -> SingularSeriesValue:
    """Partial Euler product prod_p (1 - |Omega(p)|/p)(1 - 1/p)^-k with a
    rigorous multiplicative bracket for the omitted tail."""
    hs = normalize(offsets)
    k = len(hs)
    if truncation_prime < k:
        raise DomainError(f"truncation prime {truncation_prime} < k = {k}")
    T = max(truncation_prime, hs[-1], 2 * k, 2)
    ps = base_primes(T)
    nu = _local_counts(hs, ps)
    tail = math.exp(prime_tail_bound(k, T))
    if np.any(nu == ps):
        return SingularSeriesValue(0.0, T, tail)
    pf = ps.astype(float)
    logs = np.log1p(-nu / pf) - k * np.log1p(-1.0 / pf)
    return SingularSeriesValue(math.exp(math.fsum(logs.tolist())), T, tail)


def series_lower_bound(k: int, truncation_prime: int = 10**6) -> float:
    """prod_{p<=2k} 1/p * prod_{p>2k} (1 - k/p)(1 - 1/p)^-k, bounded below."""
    T = max(truncation_prime, 2 * k, 2)
    ps = base_primes(T).astype(float)
    small = ps[ps <= 2 * k]
    big = ps[ps > 2 * k]
    logs = list(-np.log(small)) + list(np.log1p(-k / big) - k * np.log1p(-1.0 / big))
    return math.exp(math.fsum(logs) - prime_tail_bound(k, T))
