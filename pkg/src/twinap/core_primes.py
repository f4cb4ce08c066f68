"""Prime tables, factorization and the elementary arithmetic functions.

Everything downstream (tuples, weights, scanners) reads primality and least
prime factors from a :class:`PrimeTable` built by a segmented sieve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import CapacityError, DomainError

U64_MAX = 2**64 - 1
#: Largest span (hi - lo + 1) a single table may cover.
DEFAULT_BUDGET = 10**8
#: Largest n for which ``factorize`` falls back to trial division.
TRIAL_DIVISION_BOUND = 10**14
SEGMENT = 1 << 20


def sieve_primes(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (plain, non-segmented sieve)."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    is_prime[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if is_prime[p]:
            is_prime[p * p :: 2 * p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


@lru_cache(maxsize=8)
def _base_primes(limit: int) -> np.ndarray:
    out = sieve_primes(limit)
    out.setflags(write=False)
    return out


def base_primes(limit: int) -> np.ndarray:
    # round up to a power of two so repeated calls share the cache
    size = 1 << max(limit, 16).bit_length()
    primes = _base_primes(size)
    return primes[: np.searchsorted(primes, limit, side="right")]


def _check_range(lo: int, hi: int, budget: int) -> None:
    if lo < 0 or hi < lo:
        raise DomainError(f"need 0 <= lo <= hi, got lo={lo}, hi={hi}")
    if hi > U64_MAX:
        raise OverflowError(f"hi={hi} exceeds 64-bit range")
    if hi - lo + 1 > budget:
        raise CapacityError(
            f"range [{lo}, {hi}] has {hi - lo + 1} entries, budget is {budget}"
        )


def _spf_segment(lo: int, hi: int) -> np.ndarray:
    """Smallest prime factor of every n in [lo, hi] (0 -> 0, 1 -> 1)."""
    spf = np.zeros(hi - lo + 1, dtype=np.int64)
    for p in base_primes(math.isqrt(hi)).tolist():
        start = max(p * p, -(-lo // p) * p)
        if start > hi:
            continue
        view = spf[start - lo :: p]
        view[view == 0] = p
    unset = np.flatnonzero(spf == 0)
    spf[unset] = unset + lo
    return spf


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Primality and least-prime-factor lookup over the closed range [lo, hi].

    ``spf[n - lo]`` is the least prime factor of n, with the conventions
    spf(0) = 0 and spf(1) = 1.
    """

    lo: int
    hi: int
    spf: np.ndarray

    @property
    def membership(self) -> np.ndarray:
        n = np.arange(self.lo, self.hi + 1, dtype=np.int64)
        return (self.spf == n) & (n >= 2)

    def covers(self, n: int) -> bool:
        return self.lo <= n <= self.hi

    def _index(self, n: int) -> int:
        if not self.covers(n):
            raise DomainError(f"{n} outside table range [{self.lo}, {self.hi}]")
        return n - self.lo

    def is_prime(self, n: int) -> bool:
        return n >= 2 and int(self.spf[self._index(n)]) == n

    def least_prime_factor(self, n: int) -> int:
        return int(self.spf[self._index(n)])

    def primes(self) -> np.ndarray:
        return np.flatnonzero(self.membership) + self.lo

    def prime_count(self) -> int:
        return int(np.count_nonzero(self.membership))

    def __contains__(self, n: int) -> bool:
        return self.covers(n) and self.is_prime(n)


def build_tables(lo: int, hi: int, *, budget: int = DEFAULT_BUDGET,
                 segment: int = SEGMENT) -> PrimeTable:
    """Segmented sieve over [lo, hi] recording least prime factors.

    Raises CapacityError when the span exceeds ``budget``.
    """
    _check_range(lo, hi, budget)
    parts = []
    start = lo
    while start <= hi:
        stop = min(hi, start + segment - 1)
        parts.append(_spf_segment(start, stop))
        start = stop + 1
    spf = np.concatenate(parts) if len(parts) > 1 else parts[0]
    spf.setflags(write=False)
    return PrimeTable(lo, hi, spf)


def primality_mask(lo: int, hi: int, *, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Boolean primality of lo..hi, cheaper than a full table."""
    _check_range(lo, hi, budget)
    mask = np.ones(hi - lo + 1, dtype=bool)
    mask[: max(0, 2 - lo)] = False
    for p in base_primes(math.isqrt(hi)).tolist():
        start = max(p * p, -(-lo // p) * p)
        if start <= hi:
            mask[start - lo :: p] = False
    return mask


@dataclass(frozen=True)
class ExponentPattern:
    """Multiset of prime exponents, sorted descending."""

    exponents: tuple[int, ...]

    @property
    def big_omega(self) -> int:
        return sum(self.exponents)

    @property
    def omega(self) -> int:
        return len(self.exponents)

    @property
    def num_divisors(self) -> int:
        return math.prod(e + 1 for e in self.exponents)

    def __str__(self) -> str:
        return ".".join(map(str, self.exponents))

    @classmethod
    def parse(cls, text: str) -> "ExponentPattern":
        exps = tuple(sorted((int(t) for t in text.replace(",", ".").split(".")),
                            reverse=True))
        if not exps or min(exps) < 1:
            raise DomainError(f"bad exponent pattern {text!r}")
        return cls(exps)


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    @property
    def big_omega(self) -> int:
        return sum(e for _, e in self.factors)

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def num_divisors(self) -> int:
        return math.prod(e + 1 for _, e in self.factors)

    @property
    def least_prime_factor(self) -> int | None:
        """P^-(n); None for n = 1."""
        return self.factors[0][0] if self.factors else None

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def pattern(self) -> ExponentPattern:
        return ExponentPattern(tuple(sorted((e for _, e in self.factors), reverse=True)))

    def is_prime(self) -> bool:
        return len(self.factors) == 1 and self.factors[0][1] == 1

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def mobius(self) -> int:
        if not self.is_squarefree():
            return 0
        return -1 if self.omega % 2 else 1


def _trial_divide(n: int, found: dict[int, int]) -> None:
    for p in base_primes(math.isqrt(n)).tolist():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            found[p] = found.get(p, 0) + e
    if n > 1:
        found[n] = found.get(n, 0) + 1


def factorize(n: int, tables: PrimeTable | None = None) -> Factorization:
    """Prime factorization of n >= 1.

    Uses the table's least-prime-factor index while the cofactor stays
    inside its range, then trial division by stored primes up to sqrt(n).
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"factorize needs n >= 1, got {n}")
    if n > U64_MAX:
        raise OverflowError(f"{n} exceeds 64-bit range")
    found: dict[int, int] = {}
    m = n
    if tables is not None:
        while m > 1 and tables.covers(m):
            p = int(tables.spf[m - tables.lo])
            found[p] = found.get(p, 0) + 1
            m //= p
    if m > 1:
        if m > TRIAL_DIVISION_BOUND:
            raise CapacityError(f"{m} beyond trial-division bound {TRIAL_DIVISION_BOUND}")
        _trial_divide(m, found)
    return Factorization(n, tuple(sorted(found.items())))


def exponent_pattern(n: int, tables: PrimeTable | None = None) -> ExponentPattern:
    if n <= 1:
        raise DomainError(f"exponent pattern needs n >= 2, got {n}")
    return factorize(n, tables).pattern


def mobius(n: int) -> int:
    return factorize(n).mobius()


def is_prime(n: int) -> bool:
    """Deterministic primality for n < 2**64 (Miller-Rabin, fixed bases)."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primorial(x: int) -> int:
    """Product of the primes <= x."""
    return math.prod(base_primes(x).tolist())


def checked_mul(a: int, b: int) -> int:
    out = a * b
    if out > U64_MAX:
        raise OverflowError(f"{a} * {b} overflows 64 bits")
    return out


@dataclass(frozen=True, eq=False)
class ArithmeticSegment:
    """Per-entry spf, Omega, omega and d(n) over [lo, hi] (n >= 1)."""

    lo: int
    hi: int
    spf: np.ndarray
    big_omega: np.ndarray
    omega: np.ndarray
    ndiv: np.ndarray

    def index(self, n: int) -> int:
        return n - self.lo


def arithmetic_segment(lo: int, hi: int, *, budget: int = DEFAULT_BUDGET) -> ArithmeticSegment:
    """Factor-sieve an entire range at once.

    Each base prime p <= sqrt(hi) strips its full power from the multiples
    of p; whatever cofactor survives is a single large prime.
    """
    _check_range(lo, hi, budget)
    if lo < 1:
        raise DomainError("arithmetic_segment needs lo >= 1")
    size = hi - lo + 1
    rem = np.arange(lo, hi + 1, dtype=np.int64)
    spf = np.zeros(size, dtype=np.int64)
    big = np.zeros(size, dtype=np.int16)
    small = np.zeros(size, dtype=np.int16)
    ndiv = np.ones(size, dtype=np.int64)
    for p in base_primes(math.isqrt(hi)).tolist():
        first = -(-lo // p) * p
        if first > hi:
            continue
        sl = slice(first - lo, None, p)
        sub = rem[sl] // p
        exp = np.ones(sub.shape, dtype=np.int16)
        while True:
            hit = sub % p == 0
            if not hit.any():
                break
            sub = np.where(hit, sub // p, sub)
            exp += hit
        rem[sl] = sub
        big[sl] += exp
        small[sl] += 1
        ndiv[sl] *= exp.astype(np.int64) + 1
        view = spf[sl]
        view[view == 0] = p
    tail = rem > 1
    big += tail
    small += tail
    ndiv[tail] *= 2
    unset = spf == 0
    spf[unset] = rem[unset]
    return ArithmeticSegment(lo, hi, spf, big, small, ndiv)


def iter_segments(lo: int, hi: int, size: int) -> Iterator[tuple[int, int]]:
    start = lo
    while start <= hi:
        stop = min(hi, start + size - 1)
        yield start, stop
        start = stop + 1
