"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every check runs at the tolerance and inside the time limit stated for it;
a slow run counts as a failure.
"""

import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from twinap.constellation import pattern_census, pattern_pair_scan, scan
from twinap.core_primes import base_primes, sieve_primes
from twinap.greentao import (MeasureParams, build_wtrick, expectation_nu, find_aps, nu_measure,
                             nu_window)
from twinap.param_planner import c0_of_theta, crucial_lhs
from twinap.polignac import gap_spectrum, polignac_lower_bound
from twinap.sieve_weights import (WeightParams, gpy_weight, restricted_sum_ratio, sum_S0, sum_S1,
                                  t_q1_polynomial)
from twinap.tuples import narrowest_tuple, primes_above_k_tuple, singular_series

from conftest import brute_gpy_weight


@contextmanager
def criterion(capsys, label: str, limit: float):
    """Time the block, print one verdict line, and fail on error or overrun."""
    start = time.perf_counter()
    err = None
    try:
        yield
    except AssertionError as exc:
        err = exc
    elapsed = time.perf_counter() - start
    ok = err is None and elapsed < limit
    with capsys.disabled():
        note = "" if err is None else f": {err}".splitlines()[0]
        print(f"\n{'PASS' if ok else 'FAIL'} {label} ({elapsed:.2f} s, limit {limit:g} s){note}")
    if err is not None:
        raise err
    assert elapsed < limit, f"{label} took {elapsed:.1f} s (limit {limit} s)"


def test_c01_exact_constants(capsys):
    with criterion(capsys, "C1 exact constants", 1):
        r = crucial_lhs(7, 1, 1)
        assert r.lhs == Fraction(21, 20) and r.passes
        r = crucial_lhs(7, 1, Fraction(20, 21))
        assert r.lhs == 1 and not r.passes
        assert c0_of_theta(Fraction(1, 2)) == 9
        assert polignac_lower_bound(6).bound == Fraction(2, 225)
        for k in (1, 2, 6):
            for l in range(11):
                assert t_q1_polynomial(k, l, 0) == math.comb(2 * l, l)


def brute_narrowest(k: int) -> tuple[int, ...]:
    """Smallest diameter, then lexicographic order, by subset enumeration."""
    def admissible(hs):
        return all(len({h % p for h in hs}) < p for p in range(2, k + 1)
                   if all(p % q for q in range(2, p)))

    if k == 1:
        return (0,)
    D = k - 1
    while True:
        for mid in combinations(range(1, D), k - 2):
            if admissible((0, *mid, D)):
                return (0, *mid, D)
        D += 1


def test_c02_tuple_machinery(capsys):
    with criterion(capsys, "C2 tuple machinery", 30):
        assert primes_above_k_tuple(6).diameter == 16
        for k in range(1, 6):
            assert narrowest_tuple(k, 100).offsets == brute_narrowest(k)


def test_c03_singular_series(capsys):
    with criterion(capsys, "C3 singular series", 10):
        assert singular_series([0]).value == 1.0
        assert singular_series([0, 2, 4]).value == 0.0
        v5 = singular_series([0, 2], 10**5)
        v6 = singular_series([0, 2], 10**6)
        assert f"{v5.value:.6g}" == f"{v6.value:.6g}"
        assert abs(v5.value - v6.value) / v6.value < 1e-6
        # the finer bracket sits inside the coarser one, so both contain the limit
        assert v5.lower <= v6.lower <= v6.value <= v6.upper <= v5.upper


def test_c04_weight_oracle(capsys):
    rng = random.Random(20240611)
    with criterion(capsys, "C4 weight oracle equivalence", 60):
        worst = 0.0
        for _ in range(10**4):
            k = rng.randint(1, 4)
            hs = sorted(rng.sample(range(0, 31), k))
            hs = [h - hs[0] for h in hs]
            n = rng.randint(1, 10**4)
            R = rng.uniform(1.01, 1000.0)
            a = k + rng.randint(0, 3)
            p = WeightParams(tuple(hs), l=a - k, R=R, N=10**4)
            worst = max(worst, abs(gpy_weight(n, p) - brute_gpy_weight(n, hs, R, a)))
        assert worst < 1e-9, f"max deviation {worst:.3g}"


def test_c05_main_term_trend(capsys):
    with criterion(capsys, "C5 S0/S1 main-term trend", 600):
        dist0, dist1 = {}, {}
        for N in (10**5, 10**6, 10**7):
            p = WeightParams.with_power((0, 2), 1, N, 0.2)
            r0, r1 = sum_S0(p).ratio, sum_S1(p, 0).ratio
            dist0[N], dist1[N] = abs(r0 - 1), abs(r1 - 1)
            if N == 10**6:
                assert 0.4 <= r0 <= 1.6 and 0.4 <= r1 <= 1.6
        assert dist0[10**7] < dist0[10**5]
        assert dist1[10**7] < dist1[10**5]


def test_c06_restricted_law(capsys):
    with criterion(capsys, "C6 restricted-sum law", 300):
        for power in (0.2, 0.4):
            p = WeightParams.with_power((0, 2), 1, 10**6, power)
            ratios = [restricted_sum_ratio(p, eta).ratio for eta in (0.05, 0.1, 0.2)]
            assert all(r / eta <= 20 for r, eta in zip(ratios, (0.05, 0.1, 0.2)))
            assert ratios == sorted(ratios)


def test_c07_scanner_ground_truth(capsys):
    with criterion(capsys, "C7 scanner ground truth", 120):
        two = [r for r in scan(5, 100, (0, 2), 0.3) if r.prime_count >= 2]
        assert len(two) == 7
        assert list(pattern_census(two, 0.3).counts) == [(1, 1)]
        for N in (100, 10**4, 10**6):
            cons = sum(1 for r in scan(1, N - 2, (0, 2), 0.3) if r.consecutive_pair == (0, 1))
            assert cons == gap_spectrum(N).counts[2]


def test_c08_wtrick_exactness(capsys):
    with criterion(capsys, "C8 W-trick exactness", 60):
        for tup in ((0, 2), (0, 2, 6), (0, 4, 6, 10, 12, 16)):
            for w in base_primes(23).tolist():
                ctx = build_wtrick(w, tup)
                ps = base_primes(w).tolist()
                W = math.prod(ps)
                size = W * math.prod(Fraction(p - len({(-a) % p for a in tup}), p) for p in ps)
                assert len(ctx.residues) == size
                for p in ps:
                    for a in tup:
                        assert not np.any((ctx.residues + a) % p == 0)
        # on windows where every component avoids primes <= R, nu is the closed form
        checked = 0
        for w, tup, R in ((5, (0, 2), 7.0), (7, (0, 2, 6), 13.0), (3, (0, 2), 30.0)):
            ctx = build_wtrick(w, tup)
            b = int(ctx.residues[0])
            mp = MeasureParams(20000, R, ctx, b)
            vals = nu_window(mp)
            lo, hi = mp.window
            closed = ctx.phi_ratio ** ctx.r * math.log(R) ** ctx.r
            small = base_primes(int(R)).tolist()
            for n in range(lo, hi + 1):
                if all((ctx.W * n + b + a) % q for a in tup for q in small):
                    assert abs(nu_measure(n, mp) - closed) <= 1e-9 * closed
                    assert abs(vals[n - lo] - closed) <= 1e-9 * closed
                    checked += 1
        assert checked > 100


def test_c09_expectation_trend(capsys):
    with criterion(capsys, "C9 E(nu) trend", 300):
        dev = {}
        ctx = build_wtrick(3, (0, 2))
        for N in (10**4, 10**6):
            mp = MeasureParams(N, float(N) ** 0.05, ctx, int(ctx.residues[0]))
            dev[N] = expectation_nu(mp).deviation
        assert dev[10**6] <= dev[10**4], dev


def twin_anchors(limit: int) -> list[int]:
    ps = sieve_primes(limit + 2)
    mask = np.zeros(limit + 3, dtype=bool)
    mask[ps] = True
    return [int(p) for p in ps if p <= limit and mask[p + 2]]


def test_c10_twin_aps(capsys):
    with criterion(capsys, "C10 APs of twin anchors", 120):
        small = find_aps(twin_anchors(10**4), 3)
        assert any((a.start, a.step) == (5, 6) for a in small)
        anchors = twin_anchors(10**6)
        members = set(anchors)
        four = find_aps(anchors, 4)
        assert four, "no 4-term AP of twin anchors below 10^6"
        assert all(set(a.members) <= members for a in four)


def test_c11_pair_scans(capsys):
    with criterion(capsys, "C11 n, n+1 pattern pairs", 600):
        t0 = time.perf_counter()
        assert pattern_pair_scan(10, "d").hits[0] == 2
        assert time.perf_counter() - t0 < 1
        r = pattern_pair_scan(10**7, "omega=4,Omega=5,d=24")
        assert r.count > 0
