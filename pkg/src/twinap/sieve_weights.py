"""GPY/Selberg sieve weights and the empirical sums built from them.

Range sums never evaluate the weight n by n.  For every squarefree d <= R the
classes n mod d with d | P_H(n) are found by CRT from the per-prime classes
{-h mod p}, and lambda_R(d; a) is added along those arithmetic progressions.
Single-n evaluation (:func:`gpy_weight`) goes through per-component
factorizations instead and serves as the cross-check for the range path.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .core_primes import base_primes, factorize, primality_mask, iter_segments
from .errors import DomainError
from .tuples import is_admissible, normalize, residue_classes, singular_series

MAX_A = 40
SEGMENT = 1 << 21
DEFAULT_EPS = 0.01


def truncated_von_mangoldt(n: int, R: float) -> float:
    """Lambda_R(n) = sum_{d <= R, d | n} mu(d) log(R/d)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    primes = [p for p in factorize(n).primes if p <= R]
    logR = math.log(R)
    return math.fsum(mu * (logR - math.log(d)) for d, mu in squarefree_divisors(primes, R))


def lambda_rd(d: int, a: int, R: float) -> float:
    """lambda_R(d; a) = mu(d)/a! * (log(R/d))_+^a."""
    if d < 1 or a < 0:
        raise DomainError("need d >= 1, a >= 0")
    if d > R:
        return 0.0
    mu = factorize(d).mobius()
    if mu == 0:
        return 0.0
    return mu * math.log(R / d) ** a / math.factorial(a)


def squarefree_divisors(primes: Sequence[int], bound: float) -> list[tuple[int, int]]:
    """(d, mu(d)) for every product of distinct ``primes`` that is <= bound."""
    out = [(1, 1)]
    for p in sorted(set(primes)):
        if p > bound:
            break
        out += [(d * p, -mu) for d, mu in out if d * p <= bound]
    return out


@dataclass(frozen=True)
class WeightParams:
    """Bundle of (H, l, R, N, eta, c1); k is |H| and the weight order is a = k + l."""

    offsets: tuple[int, ...]
    l: int = 1
    R: float = 10.0
    N: int = 10**5
    eta: float = 0.0
    c1: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "offsets", normalize(self.offsets))
        if self.l < 0:
            raise DomainError("l must be >= 0")
        if self.a > MAX_A:
            raise DomainError(f"k + l = {self.a} exceeds {MAX_A}")
        if not self.R > 1:
            raise DomainError("R must exceed 1")
        if self.N >= 1 and self.R > self.N:
            raise DomainError("R must not exceed N")
        if not 0 <= self.eta < 1:
            raise DomainError("eta must lie in [0, 1)")
        if not 0 < self.c1 <= 0.25:
            raise DomainError("c1 must lie in (0, 1/4]")

    @property
    def k(self) -> int:
        return len(self.offsets)

    @property
    def a(self) -> int:
        return self.k + self.l

    @property
    def admissible(self) -> bool:
        return bool(is_admissible(self.offsets))

    @classmethod
    def with_power(cls, offsets, l: int, N: int, power: float, **kw) -> "WeightParams":
        """Convenience: R = N**power."""
        return cls(tuple(offsets), l=l, R=float(N) ** power, N=N, **kw)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["offsets"] = list(self.offsets)
        d["k"] = self.k
        return d


def gpy_weight_raw(n: int, offsets: Sequence[int], R: float, a: int) -> float:
    """Lambda_R(n; H, a) from the distinct primes p <= R dividing some n + h."""
    primes = set()
    for h in offsets:
        primes.update(p for p in factorize(n + h).primes if p <= R)
    logR = math.log(R)
    fa = math.factorial(a)
    return math.fsum(mu * (logR - math.log(d)) ** a for d, mu in squarefree_divisors(primes, R)) / fa


def gpy_weight(n: int, params: WeightParams, a: int | None = None) -> float:
    return gpy_weight_raw(n, params.offsets, params.R, params.a if a is None else a)


# ---------------------------------------------------------------------------
# range evaluation

def _crt(res: np.ndarray, d: int, cls: np.ndarray, p: int) -> np.ndarray:
    inv = pow(d, -1, p)
    t = ((cls[None, :] - res[:, None]) * inv) % p
    return (res[:, None] + d * t).ravel()


def divisor_plan(offsets: Sequence[int], R: float, a: int,
                 max_prime: float | None = None) -> list[tuple[int, float, np.ndarray]]:
    """(d, lambda_R(d; a), classes n mod d with d | P_H(n)) for squarefree d <= R.

    ``max_prime`` restricts d to primes below it (used for restricted sums).
    """
    hs = normalize(offsets)
    logR = math.log(R)
    fa = math.factorial(a)
    ps = base_primes(int(R)).tolist()
    if max_prime is not None:
        ps = [p for p in ps if p < max_prime]
    local = {p: np.array(sorted(residue_classes(hs, p)), dtype=np.int64) for p in ps}
    plan = []

    def walk(start: int, d: int, mu: int, res: np.ndarray) -> None:
        plan.append((d, mu * (logR - math.log(d)) ** a / fa, res))
        for i in range(start, len(ps)):
            p = ps[i]
            if d * p > R:
                break
            walk(i + 1, d * p, -mu, _crt(res, d, local[p], p))

    walk(0, 1, 1, np.zeros(1, dtype=np.int64))
    return plan


def _add_progressions(w: np.ndarray, lo: int, d: int, value: float, res: np.ndarray) -> None:
    if d == 1:
        w += value
        return
    if 2 * len(res) >= d or len(res) > 64:
        pattern = np.zeros(d)
        pattern[res] = value
        w += np.resize(np.roll(pattern, -(lo % d)), len(w))
        return
    for r in ((res - lo) % d).tolist():
        w[r::d] += value


def apply_plan(plan, lo: int, hi: int) -> np.ndarray:
    """Evaluate sum over the plan for every n in [lo, hi]."""
    w = np.zeros(hi - lo + 1)
    for d, value, res in plan:
        if value != 0.0:
            _add_progressions(w, lo, d, value, res)
    return w


def weight_array(offsets: Sequence[int], R: float, a: int, lo: int, hi: int) -> np.ndarray:
    """Lambda_R(n; H, a) for n = lo..hi."""
    return apply_plan(divisor_plan(offsets, R, a), lo, hi)


def small_factor_mask(offsets: Sequence[int], z: float, lo: int, hi: int) -> np.ndarray:
    """True where P_H(n) has a prime factor p < z."""
    hs = normalize(offsets)
    mask = np.zeros(hi - lo + 1, dtype=bool)
    for p in base_primes(max(int(math.ceil(z)) - 1, 1)).tolist():
        if p >= z:
            break
        for r in residue_classes(hs, p):
            mask[(r - lo) % p :: p] = True
    return mask


def theta_array(lo: int, hi: int) -> np.ndarray:
    """theta(m) = log m for prime m, 0 otherwise, over m = lo..hi."""
    prime = primality_mask(lo, hi)
    out = np.zeros(hi - lo + 1)
    idx = np.flatnonzero(prime)
    out[idx] = np.log((idx + lo).astype(float))
    return out


def _segments(N: int, segment: int) -> Iterator[tuple[int, int]]:
    if N < 1:
        return iter(())
    return iter_segments(N + 1, 2 * N, segment)


# ---------------------------------------------------------------------------
# sums

@dataclass
class SumReport:
    empirical: float
    main_term: float
    ratio: float | None
    count_n: int
    params: dict = field(default_factory=dict)

    @property
    def ratio_defined(self) -> bool:
        return self.ratio is not None

    def to_dict(self) -> dict:
        return asdict(self)


def _report(empirical: float, main: float, N: int, params: dict) -> SumReport:
    ratio = empirical / main if main != 0 else None
    return SumReport(empirical, main, ratio, max(N, 0), params)


def s0_main_term(params: WeightParams, truncation: int = 10**6) -> float:
    k, l = params.k, params.l
    ss = singular_series(params.offsets, max(truncation, k)).value
    return ss / math.factorial(k + 2 * l) * math.comb(2 * l, l) * params.N * math.log(params.R) ** (k + 2 * l)


def s1_main_term(params: WeightParams, h: int, truncation: int = 10**6) -> float:
    k, l = params.k, params.l
    m = 1 if h in params.offsets else 0
    plus = sorted(set(params.offsets) | {h})
    ss = singular_series(plus, max(truncation, len(plus))).value
    return (ss / math.factorial(k + 2 * l + m) * math.comb(2 * (l + m), l + m)
            * params.N * math.log(params.R) ** (k + 2 * l + m))


def sum_S0(params: WeightParams, *, segment: int = SEGMENT) -> SumReport:
    """sum_{N < n <= 2N} Lambda_R(n; H, k+l)^2 against its main term."""
    plan = divisor_plan(params.offsets, params.R, params.a)
    parts = []
    for lo, hi in _segments(params.N, segment):
        w = apply_plan(plan, lo, hi)
        parts.append(math.fsum((w * w).tolist()))
    main = s0_main_term(params) if params.N >= 1 else 0.0
    return _report(math.fsum(parts), main, params.N, params.to_dict())


def sum_S1(params: WeightParams, h: int, *, segment: int = SEGMENT) -> SumReport:
    """sum_{N < n <= 2N} theta(n + h) Lambda_R(n; H, k+l)^2 against its main term."""
    if h < 0:
        raise DomainError("h must be >= 0")
    plan = divisor_plan(params.offsets, params.R, params.a)
    parts = []
    for lo, hi in _segments(params.N, segment):
        w = apply_plan(plan, lo, hi)
        parts.append(math.fsum((theta_array(lo + h, hi + h) * w * w).tolist()))
    main = s1_main_term(params, h) if params.N >= 1 else 0.0
    info = params.to_dict() | {"h": h}
    return _report(math.fsum(parts), main, params.N, info)


@dataclass
class RestrictedReport:
    eta: float
    ratio: float
    restricted: float
    total: float
    # prime q -> (sum over q | P_H(n)) / total
    per_prime: dict[int, float]
    # sum_{q <= R^eta} |Omega(q)|/q * log q / log R
    driver: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_prime"] = {str(q): v for q, v in self.per_prime.items()}
        return d


def restricted_sum_ratio(params: WeightParams, eta: float | None = None, *,
                         segment: int = SEGMENT) -> RestrictedReport:
    """Share of sum Lambda^2 carried by n where P_H(n) has a prime factor < R^eta."""
    eta = params.eta if eta is None else eta
    if eta < 0:
        raise DomainError("eta must be >= 0")
    z = params.R ** eta
    qs = [q for q in base_primes(max(int(z), 1)).tolist() if q < z]
    plan = divisor_plan(params.offsets, params.R, params.a)
    classes = {q: sorted(residue_classes(params.offsets, q)) for q in qs}
    tot, res = [], []
    per_q = {q: [] for q in qs}
    for lo, hi in _segments(params.N, segment):
        w2 = apply_plan(plan, lo, hi) ** 2
        tot.append(math.fsum(w2.tolist()))
        any_mask = np.zeros(len(w2), dtype=bool)
        for q in qs:
            m = np.zeros(len(w2), dtype=bool)
            for r in classes[q]:
                m[(r - lo) % q :: q] = True
            per_q[q].append(math.fsum(w2[m].tolist()))
            any_mask |= m
        res.append(math.fsum(w2[any_mask].tolist()))
    total = math.fsum(tot)
    restricted = math.fsum(res)
    ratio = restricted / total if total and qs else 0.0
    logR = math.log(params.R)
    driver = math.fsum(len(classes[q]) / q * math.log(q) / logR for q in qs)
    per_prime = {q: (math.fsum(v) / total if total else 0.0) for q, v in per_q.items()}
    return RestrictedReport(eta, ratio, restricted, total, per_prime, driver)


def criterion_R(N: int, theta: float, eta: float, eps: float = DEFAULT_EPS) -> float:
    """R = N^((theta - eps)/(2 + eta))."""
    return float(N) ** ((theta - eps) / (2 + eta))


def criterion_terms(offsets: Sequence[int], a: int, R: float, N: int, eta: float,
                    lo: int, hi: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-n pieces over [lo, hi]: (sum_h theta(n+h) - log 3N, Lambda^2, kept mask).

    ``kept`` marks n with (P_H(n), P(R^eta)) = 1.
    """
    hs = normalize(offsets)
    w = weight_array(hs, R, a, lo, hi)
    th = sum(theta_array(lo + h, hi + h) for h in hs) - math.log(3 * N)
    kept = ~small_factor_mask(hs, R ** eta, lo, hi) if eta > 0 else np.ones(len(w), dtype=bool)
    return th, w * w, kept


@dataclass
class CriterionReport:
    value: float
    positive: bool
    R: float
    theta: float
    eps: float
    eta: float
    kept_n: int
    two_prime_n: int
    predicted: float | None
    params: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "positive" if self.positive else "negative"

    def to_dict(self) -> dict:
        return asdict(self) | {"verdict": self.verdict}


def combined_criterion_sum(params: WeightParams, theta: float, *, eps: float = DEFAULT_EPS,
                           segment: int = SEGMENT) -> CriterionReport:
    """sum over n ~ N with (P_H(n), P(R^eta)) = 1 of
    (sum_h theta(n+h) - log 3N) Lambda_R(n; H, k+l)^2.

    R is derived from theta as N^((theta - eps)/(2 + eta)); params.R is ignored.
    """
    N, eta = params.N, params.eta
    R = criterion_R(N, theta, eta, eps)
    if R <= 1:
        raise DomainError(f"derived R = {R} must exceed 1")
    parts, kept_n, two = [], 0, 0
    if params.admissible:
        plan = divisor_plan(params.offsets, R, params.a)
        for lo, hi in _segments(N, segment):
            w2 = apply_plan(plan, lo, hi) ** 2
            prime_hits = sum(primality_mask(lo + h, hi + h).astype(np.int64) for h in params.offsets)
            th = sum(theta_array(lo + h, hi + h) for h in params.offsets) - math.log(3 * N)
            kept = ~small_factor_mask(params.offsets, R ** eta, lo, hi) if eta > 0 \
                else np.ones(len(w2), dtype=bool)
            parts.append(math.fsum((th * w2)[kept].tolist()))
            kept_n += int(kept.sum())
            two += int(((prime_hits >= 2) & kept).sum())
    value = math.fsum(parts)
    predicted = None
    if params.admissible and N >= 1:
        k, l = params.k, params.l
        ss = singular_series(params.offsets).value
        bracket = (Fraction(k, k + 2 * l + 1) * Fraction(2 * (2 * l + 1), l + 1)
                   * (theta - eps) / (2 + eta)) - 1
        predicted = (ss / math.factorial(k + 2 * l) * math.comb(2 * l, l) * N * math.log(N)
                     * math.log(R) ** (k + 2 * l) * float(bracket))
    return CriterionReport(value, value > 0, R, theta, eps, eta, kept_n, two, predicted,
                           params.to_dict())


def weight_bound(k: int, l: int, R: float, eta: float) -> float:
    """2^(4k/eta) (log R)^(k+l) / (k+l)!: cap on |Lambda| when P^-(P_H(n)) > R^eta."""
    return 2.0 ** (4 * k / eta) * math.log(R) ** (k + l) / math.factorial(k + l)


# ---------------------------------------------------------------------------
# the residue polynomial T_{q,1}

def _series_mul(f: list[Fraction], g: list[Fraction], deg: int) -> list[Fraction]:
    out = [Fraction(0)] * (deg + 1)
    for i, fi in enumerate(f[: deg + 1]):
        if fi:
            for j, gj in enumerate(g[: deg + 1 - i]):
                out[i + j] += fi * gj
    return out


def _series_pow(f: list[Fraction], e: int, deg: int) -> list[Fraction]:
    out = [Fraction(1)] + [Fraction(0)] * deg
    base = f[: deg + 1] + [Fraction(0)] * max(0, deg + 1 - len(f))
    while e:
        if e & 1:
            out = _series_mul(out, base, deg)
        base = _series_mul(base, base, deg)
        e >>= 1
    return out


def _as_alpha(alpha) -> Fraction:
    alpha = Fraction(alpha) if not isinstance(alpha, float) else Fraction(repr(alpha))
    if abs(alpha) >= 1:
        raise DomainError("need |alpha| < 1")
    return alpha


def _f_coeffs(k: int, alpha: Fraction, deg: int) -> list[Fraction]:
    """Series coefficients of (1 + alpha/(1 + xi))^k up to xi^deg."""
    inv = [Fraction((-1) ** j) for j in range(deg + 1)]
    inner = [alpha * c for c in inv]
    inner[0] += 1
    return _series_pow(inner, k, deg)


def t_q1_polynomial(k: int, l: int, alpha) -> Fraction:
    """[xi^l] (1 + alpha/(1 + xi))^k (1 + alpha + xi)^(2l), exactly.

    This is the residue at xi = 0 of (a + xi)^(k+2l) / ((xi + 1)^k xi^(l+1)),
    a = 1 + alpha.
    """
    if k < 1 or l < 0:
        raise DomainError("need k >= 1, l >= 0")
    alpha = _as_alpha(alpha)
    f = _f_coeffs(k, alpha, l)
    g = _series_pow([1 + alpha, Fraction(1)], 2 * l, l)
    return _series_mul(f, g, l)[l]


def t_q1_binomial(k: int, l: int, alpha) -> Fraction:
    """Same quantity via sum_i C(k+2l, i) a^(k+2l-i) C(-k, l-i)."""
    a = 1 + _as_alpha(alpha)
    total = Fraction(0)
    for i in range(l + 1):
        j = l - i
        neg = (-1) ** j * math.comb(k + j - 1, j)
        total += math.comb(k + 2 * l, i) * a ** (k + 2 * l - i) * neg
    return total


def t_q1_terms(k: int, l: int, alpha) -> tuple[Fraction, list[Fraction]]:
    """Split into C(2l,l)(1+alpha)^(k+l) and the correction terms T_1..T_l."""
    alpha = _as_alpha(alpha)
    f = _f_coeffs(k, alpha, l)
    lead = math.comb(2 * l, l) * (1 + alpha) ** (k + l)
    terms = []
    for j in range(1, l + 1):
        deriv = f[j] * math.factorial(j)
        coef = Fraction(math.comb(l, j) * math.factorial(2 * l),
                        math.factorial(l) * math.factorial(l + j))
        terms.append(coef * (1 + alpha) ** (l + j) * deriv)
    return lead, terms


def t_q1_slope(k: int, l: int) -> Fraction:
    """d/d alpha of T_{q,1}(1 + alpha) at alpha = 0: (k + 2l) C(2l - 1, l)."""
    if l == 0:
        return Fraction(k)
    return Fraction((k + 2 * l) * math.comb(2 * l - 1, l))
