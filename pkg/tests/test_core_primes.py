import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twinap.core_primes import (ExponentPattern, arithmetic_segment, base_primes, build_tables,
                                checked_mul, exponent_pattern, factorize, is_prime, iter_segments,
                                mobius, primality_mask, primorial, sieve_primes)
from twinap.errors import CapacityError, DomainError

from conftest import naive_factor, naive_is_prime


def test_prime_counts(primes_1e6):
    assert len(primes_1e6) == 78498
    assert len(sieve_primes(100)) == 25
    assert sieve_primes(1).size == 0
    assert sieve_primes(2).tolist() == [2]


def test_base_primes_prefix():
    assert base_primes(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_segmented_matches_monolithic(primes_1e6):
    t = build_tables(0, 10**6, segment=4099)
    assert np.array_equal(t.primes(), primes_1e6)
    assert t.least_prime_factor(0) == 0 and t.least_prime_factor(1) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 5000), st.integers(50, 3000))
def test_segmented_window(lo, span, seg):
    hi = lo + span
    t = build_tables(lo, hi, segment=seg)
    expect = [n for n in range(lo, hi + 1) if naive_is_prime(n)] if span < 400 else \
        [int(p) for p in sieve_primes(hi) if p >= lo]
    assert t.primes().tolist() == expect
    assert np.array_equal(primality_mask(lo, hi), t.membership)


def test_spf_is_least_factor():
    t = build_tables(2, 5000)
    for n in range(2, 5001):
        assert t.least_prime_factor(n) == min(naive_factor(n))


def test_budget():
    with pytest.raises(CapacityError):
        build_tables(1, 10**6, budget=1000)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10**12))
def test_factorize_roundtrip(n):
    f = factorize(n)
    assert math.prod(p**e for p, e in f.factors) == n
    assert all(is_prime(p) for p, _ in f.factors)


def test_factorize_examples():
    f = factorize(12)
    assert dict(f.factors) == {2: 2, 3: 1}
    assert (f.big_omega, f.omega, f.num_divisors) == (3, 2, 6)
    assert factorize(9699690).omega == 8
    assert str(exponent_pattern(420)) == "2.1.1.1"
    assert factorize(1).least_prime_factor is None
    with pytest.raises(DomainError):
        factorize(0)
    with pytest.raises(DomainError):
        exponent_pattern(1)
    with pytest.raises(OverflowError):
        factorize(2**64)


def test_factorize_with_tables():
    t = build_tables(0, 10**4)
    for n in (9973 * 9967, 2**20 * 3, 999983 * 7):
        assert dict(factorize(n, t).factors) == naive_factor(n)


def test_divisor_counts_oracle():
    seg = arithmetic_segment(1, 10**4)
    for n in range(1, 10**4 + 1):
        f = naive_factor(n)
        i = seg.index(n)
        assert seg.ndiv[i] == math.prod(e + 1 for e in f.values())
        assert seg.big_omega[i] == sum(f.values())
        assert seg.omega[i] == len(f)
        assert seg.spf[i] == (min(f) if f else 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 10**9), st.integers(0, 2000))
def test_arithmetic_segment_offsets(lo, span):
    seg = arithmetic_segment(lo, lo + span)
    for n in range(lo, lo + span + 1, max(1, span // 20)):
        f = factorize(n)
        assert seg.big_omega[n - lo] == f.big_omega
        assert seg.ndiv[n - lo] == f.num_divisors


def test_pattern_parse_roundtrip():
    p = ExponentPattern.parse("2.1.1.1")
    assert (p.big_omega, p.omega, p.num_divisors) == (5, 4, 24)
    assert str(p) == "2.1.1.1"


def test_mobius_and_misc():
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert primorial(7) == 210 and primorial(1) == 1
    with pytest.raises(OverflowError):
        checked_mul(2**40, 2**40)
    assert list(iter_segments(1, 10, 4)) == [(1, 4), (5, 8), (9, 10)]


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6))
def test_is_prime_oracle(n):
    assert is_prime(n) == naive_is_prime(n)


def test_is_prime_large():
    assert is_prime(2**61 - 1)
    assert not is_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7
