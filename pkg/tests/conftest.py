import math

import pytest

from twinap.core_primes import sieve_primes


def naive_is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, math.isqrt(n) + 1))


def naive_factor(n: int) -> dict[int, int]:
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@pytest.fixture(scope="session")
def primes_1e6():
    return sieve_primes(10**6)


def naive_mobius(d: int) -> int:
    f = naive_factor(d)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def brute_gpy_weight(n: int, offsets, R: float, a: int) -> float:
    """Direct divisor sum over every d <= R dividing prod(n + h)."""
    P = math.prod(n + h for h in offsets)
    logR = math.log(R)
    terms = [naive_mobius(d) * (logR - math.log(d)) ** a
             for d in range(1, int(R) + 1) if P % d == 0]
    return math.fsum(terms) / math.factorial(a)
