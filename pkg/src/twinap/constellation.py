"""Almost-prime constellation scanning, pattern census and n, n+1 pair scans."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .core_primes import (ArithmeticSegment, ExponentPattern, PrimeTable, arithmetic_segment,
                          factorize, is_prime, iter_segments)
from .errors import DomainError
from .param_planner import as_rational
from .tuples import AdmissibleTuple, is_admissible, normalize

SEGMENT = 1 << 18


def default_c1(k: int) -> float:
    return 0.05 if k <= 10 else 1 / (4 * k)


@dataclass(frozen=True)
class ConstellationRecord:
    n: int
    component_omegas: tuple[int, ...]
    prime_mask: tuple[bool, ...]
    min_pf_ok: bool
    # 0-based component indices of the first consecutive prime pair
    consecutive_pair: tuple[int, int] | None = None

    @property
    def prime_count(self) -> int:
        return sum(self.prime_mask)

    def csv_row(self) -> list[str]:
        pair = "-" if self.consecutive_pair is None else "{};{}".format(*self.consecutive_pair)
        return [str(self.n), ";".join(map(str, self.component_omegas)),
                "".join("1" if b else "0" for b in self.prime_mask),
                "1" if self.min_pf_ok else "0", pair]

    @classmethod
    def from_csv_row(cls, row: Sequence[str]) -> "ConstellationRecord":
        n, b, mask, ok, pair = row
        cp = None if pair == "-" else tuple(int(x) for x in pair.split(";"))
        return cls(int(n), tuple(int(x) for x in b.split(";")), tuple(c == "1" for c in mask),
                   ok == "1", cp)


CSV_HEADER = ["n", "b_vector", "prime_mask", "min_pf_ok", "consecutive_pair"]


def _above_threshold(spf: np.ndarray, n: np.ndarray, c1) -> np.ndarray:
    """spf > n**c1, with boundary cases settled in exact integer arithmetic."""
    c = as_rational(c1)
    thr = n.astype(float) ** float(c)
    out = spf > thr
    close = np.flatnonzero(np.abs(spf - thr) <= 1e-9 * thr + 1e-9)
    for i in close.tolist():
        # spf > n^(p/q)  <=>  spf^q > n^p
        out[i] = int(spf[i]) ** c.denominator > int(n[i]) ** c.numerator
    return out


@dataclass
class _Block:
    n: np.ndarray
    omegas: np.ndarray          # (len, k)
    primes: np.ndarray          # (len, k) bool
    ok: np.ndarray              # (len,) bool
    prime_prefix: np.ndarray    # cumulative prime count over [lo, hi + diam]
    base: int


def _scan_block(lo: int, hi: int, hs: Sequence[int], c1) -> _Block:
    diam = hs[-1]
    seg = arithmetic_segment(lo, hi + diam)
    size = hi - lo + 1
    n = np.arange(lo, hi + 1, dtype=np.int64)
    idx = np.arange(size)[:, None] + np.asarray(hs)[None, :]
    omegas = seg.big_omega[idx].astype(np.int64)
    primes = omegas == 1
    ok = np.ones(size, dtype=bool)
    for j in range(len(hs)):
        ok &= _above_threshold(seg.spf[idx[:, j]], n, c1)
    all_primes = seg.big_omega == 1
    prefix = np.concatenate([[0], np.cumsum(all_primes)])
    return _Block(n, omegas, primes, ok, prefix, lo)


def _first_consecutive(block: _Block, row: int, hs: Sequence[int]) -> tuple[int, int] | None:
    comps = np.flatnonzero(block.primes[row]).tolist()
    off = int(block.n[row]) - block.base
    for i, j in zip(comps, comps[1:]):
        a, b = off + hs[i], off + hs[j]
        # primes strictly between n + h_i and n + h_j
        if block.prime_prefix[b] - block.prime_prefix[a + 1] == 0:
            return i, j
    return None


def scan(range_lo: int, range_hi: int, tup, c1: float | None = None, *,
         segment: int = SEGMENT) -> Iterator[ConstellationRecord]:
    """Yield a record for each n in [range_lo, range_hi] with P^-(n + h) > n^c1 for every h."""
    hs = normalize(tup)
    if not is_admissible(hs):
        raise DomainError(f"inadmissible tuple {hs}: survivor set is finite")
    c1 = default_c1(len(hs)) if c1 is None else c1
    if not 0 < c1 < 1:
        raise DomainError("c1 must lie in (0, 1)")
    if range_hi < range_lo:
        return
    if range_lo < 1:
        raise DomainError("range must start at n >= 1")
    for lo, hi in iter_segments(range_lo, range_hi, segment):
        block = _scan_block(lo, hi, hs, c1)
        for row in np.flatnonzero(block.ok).tolist():
            mask = tuple(bool(x) for x in block.primes[row])
            pair = _first_consecutive(block, row, hs) if sum(mask) >= 2 else None
            yield ConstellationRecord(int(block.n[row]), tuple(int(x) for x in block.omegas[row]),
                                      mask, True, pair)


@dataclass
class ScanSummary:
    survivors: int = 0
    two_prime: int = 0
    consecutive: int = 0
    two_prime_n: list[int] = field(default_factory=list)

    def reference(self, N: int, k: int) -> float:
        """N / log^k N, the order of magnitude the two-prime count is compared with."""
        return N / math.log(N) ** k


def summarize(records: Iterable[ConstellationRecord], keep_n: bool = True) -> ScanSummary:
    s = ScanSummary()
    for r in records:
        s.survivors += 1
        if r.prime_count >= 2:
            s.two_prime += 1
            if keep_n:
                s.two_prime_n.append(r.n)
        if r.consecutive_pair is not None:
            s.consecutive += 1
    return s


def consecutive_pair_check(n: int, i: int, j: int, tup, tables: PrimeTable | None = None) -> bool:
    """True iff n + h_i and n + h_j (both prime, i < j, 0-based) are consecutive primes."""
    hs = normalize(tup)
    if not 0 <= i < j < len(hs):
        raise DomainError("need 0 <= i < j < k")
    a, b = n + hs[i], n + hs[j]

    def prime(m: int) -> bool:
        return tables.is_prime(m) if tables is not None and tables.covers(m) else is_prime(m)

    if not (prime(a) and prime(b)):
        raise DomainError(f"{a} and {b} must both be prime")
    return not any(prime(m) for m in range(a + 1, b))


@dataclass
class Census:
    counts: Counter
    modal: tuple[int, ...] | None
    cap: int | None

    @property
    def distinct(self) -> int:
        return len(self.counts)

    def within_cap(self) -> bool:
        return self.cap is None or self.distinct <= self.cap

    def to_rows(self) -> list[tuple[str, int]]:
        return [(";".join(map(str, b)), c) for b, c in sorted(self.counts.items())]


def pattern_census(records: Iterable[ConstellationRecord], c1: float | None = None) -> Census:
    """Histogram of b-vectors; single pass, so memory is bounded by the number of keys."""
    counts: Counter = Counter()
    k = None
    for r in records:
        counts[r.component_omegas] += 1
        k = len(r.component_omegas)
    modal = min(counts, key=lambda b: (-counts[b], b)) if counts else None
    cap = math.floor(1 / c1) ** k if (c1 is not None and k) else None
    return Census(counts, modal, cap)


# ---------------------------------------------------------------------------
# n, n + 1 pattern pairs

_FIELDS = {"omega": "omega", "Omega": "big_omega", "d": "ndiv", "pattern": "pattern"}


@dataclass(frozen=True)
class PairPredicate:
    """Conjunction of conditions holding for both n and n + 1.

    Each of omega, big_omega, ndiv, pattern is None (unconstrained), "eq"
    (n and n + 1 agree) or a fixed value both must equal.
    """

    omega: int | str | None = None
    big_omega: int | str | None = None
    ndiv: int | str | None = None
    pattern: ExponentPattern | str | None = None

    @classmethod
    def parse(cls, text: str) -> "PairPredicate":
        """'d' -> d(n) = d(n+1); 'omega=4,Omega=5,d=24'; 'pattern=2.1.1.1'."""
        kw = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            name, _, value = part.partition("=")
            if name not in _FIELDS:
                raise DomainError(f"unknown predicate field {name!r}")
            attr = _FIELDS[name]
            if not value or value == "eq":
                kw[attr] = "eq"
            elif attr == "pattern":
                kw[attr] = ExponentPattern.parse(value)
            else:
                kw[attr] = int(value)
        if not kw:
            raise DomainError("empty predicate")
        return cls(**kw)

    def __str__(self) -> str:
        out = []
        for name, attr in _FIELDS.items():
            v = getattr(self, attr)
            if v is not None:
                out.append(name if v == "eq" else f"{name}={v}")
        return ",".join(out)


def _implied(pred: PairPredicate) -> dict[str, int | str | None]:
    """Arithmetic constraints implied by a fixed or matching pattern."""
    vals = {"omega": pred.omega, "big_omega": pred.big_omega, "ndiv": pred.ndiv}
    if isinstance(pred.pattern, ExponentPattern):
        fixed = {"omega": pred.pattern.omega, "big_omega": pred.pattern.big_omega,
                 "ndiv": pred.pattern.num_divisors}
        for key, v in fixed.items():
            if vals[key] not in (None, "eq") and vals[key] != v:
                return {}
            vals[key] = v
    elif pred.pattern == "eq":
        vals = {key: ("eq" if v is None else v) for key, v in vals.items()}
    return vals


def _pair_mask(seg: ArithmeticSegment, vals) -> np.ndarray:
    size = seg.hi - seg.lo
    mask = np.ones(size, dtype=bool)
    for key, v in vals.items():
        if v is None:
            continue
        arr = getattr(seg, key)
        a, b = arr[:-1], arr[1:]
        mask &= (a == b) if v == "eq" else ((a == v) & (b == v))
    return mask


@dataclass
class PairScanResult:
    limit: int
    predicate: str
    hits: list[int]

    @property
    def count(self) -> int:
        return len(self.hits)

    @property
    def reference(self) -> float:
        """limit / log^3 limit."""
        return self.limit / math.log(self.limit) ** 3 if self.limit > 1 else 0.0

    def to_dict(self) -> dict:
        return {"limit": self.limit, "predicate": self.predicate, "count": self.count,
                "smallest": self.hits[0] if self.hits else None,
                "reference": self.reference, "hits": self.hits}


def pattern_pair_scan(limit: int, predicate: PairPredicate | str, *,
                      segment: int = 1 << 20, max_hits: int | None = None) -> PairScanResult:
    """All n in [1, limit] such that n and n + 1 both satisfy the predicate."""
    pred = PairPredicate.parse(predicate) if isinstance(predicate, str) else predicate
    vals = _implied(pred)
    hits: list[int] = []
    if limit < 1 or (pred.pattern is not None and not vals):
        return PairScanResult(limit, str(pred), hits)
    for lo, hi in iter_segments(1, limit, segment):
        seg = arithmetic_segment(lo, hi + 1)
        cand = np.flatnonzero(_pair_mask(seg, vals)) + lo
        if pred.pattern is not None:
            keep = []
            for n in cand.tolist():
                pa, pb = factorize(n).pattern, factorize(n + 1).pattern
                if pred.pattern == "eq" and pa == pb or pa == pred.pattern == pb:
                    keep.append(n)
            cand = keep
        else:
            cand = cand.tolist()
        hits.extend(cand)
        if max_hits is not None and len(hits) >= max_hits:
            hits = hits[:max_hits]
            break
    return PairScanResult(limit, str(pred), hits)
