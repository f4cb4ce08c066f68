from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from twinap.core_primes import sieve_primes
from twinap.errors import DomainError
from twinap.polignac import gap_spectrum, polignac_lower_bound, weak_strong_summary

from conftest import naive_is_prime


def test_spectrum_examples():
    s = gap_spectrum(100)
    assert s.counts[2] == 8 and s.counts[4] == 7
    assert gap_spectrum(3).counts == {1: 1}
    with pytest.raises(DomainError):
        gap_spectrum(2)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 2 * 10**5))
def test_spectrum_mass(N):
    s = gap_spectrum(N)
    assert s.total == len(sieve_primes(N)) - 1
    assert all(g % 2 == 0 for g in s.counts if g != 1)


def test_bounds():
    assert polignac_lower_bound(6).bound == Fraction(2, 225)
    assert polignac_lower_bound(2).bound == Fraction(1, 4)
    assert 0.5 <= polignac_lower_bound(30).ratio <= 2
    assert 0.0177 <= 2 * float(polignac_lower_bound(6).bound) <= 0.0178
    with pytest.raises(DomainError):
        polignac_lower_bound(1)


def test_weak_strong():
    rows = {r.gap: r for r in weak_strong_summary(100, 10)}
    assert rows[6].weak > rows[6].strong
    assert rows[2].weak == rows[2].strong
    assert weak_strong_summary(100, 0) == []
    with pytest.raises(DomainError):
        weak_strong_summary(50, 4)


def test_weak_strong_brute():
    N = 2000
    ps = [p for p in range(2, N + 1) if naive_is_prime(p)]
    for r in weak_strong_summary(N, 30):
        weak = sum(naive_is_prime(p + r.gap) for p in ps)
        strong = sum(naive_is_prime(p + r.gap) and not any(naive_is_prime(m) for m in range(p + 1, p + r.gap))
                     for p in ps)
        assert (r.weak, r.strong) == (weak, strong)
        assert r.strong <= r.weak
