"""Parameter arithmetic for the two-primes criterion.

The quantity everything revolves around is

    lhs(k, l, theta) = k/(k + 2l + 1) * (2l + 1)/(l + 1) * theta,

which must strictly exceed 1.  Rational theta is handled exactly so that
boundary cases such as lhs = 1 never flip on rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import DomainError, NotFoundError

FLOAT_SLACK = 1e-12
DEFAULT_L_MAX = 50
#: theta beyond which a combination of the l = 0 and l = 1 weights reaches k = 6
LINEAR_COMBINATION_THRESHOLD = 4 * (8 - math.sqrt(19)) / 15


def as_rational(x) -> Fraction:
    """Exact value of x; floats are read through their shortest decimal repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError(f"non-finite value {x}")
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot read {x!r} as a rational") from exc
    raise DomainError(f"unsupported numeric type {type(x).__name__}")


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


@dataclass(frozen=True)
class CrucialParams:
    k: int
    l: int
    theta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "theta", as_rational(self.theta))
        if self.k < 1 or self.l < 0:
            raise DomainError("need k >= 1 and l >= 0")
        if not 0 < self.theta <= 1:
            raise DomainError("theta must lie in (0, 1]")

    @property
    def delta(self) -> Fraction:
        return self.theta - Fraction(1, 2)


@dataclass(frozen=True)
class CrucialResult:
    params: CrucialParams
    lhs: Fraction

    @property
    def passes(self) -> bool:
        return self.lhs > 1

    def to_dict(self) -> dict:
        return {"k": self.params.k, "l": self.params.l,
                "theta": format_rational(self.params.theta),
                "lhs": format_rational(self.lhs), "lhs_float": float(self.lhs),
                "pass": self.passes}


def lhs_value(k: int, l: int, theta) -> Fraction:
    return Fraction(k, k + 2 * l + 1) * Fraction(2 * l + 1, l + 1) * as_rational(theta)


def crucial_lhs(k: int, l: int, theta) -> CrucialResult:
    p = CrucialParams(k, l, theta)
    return CrucialResult(p, lhs_value(k, l, p.theta))


def crucial_lhs_float(k: int, l: int, theta: float) -> tuple[float, bool]:
    """Float path for irrational theta; passes only when clear of 1 by the slack."""
    v = k / (k + 2 * l + 1) * (2 * l + 1) / (l + 1) * theta
    return v, v > 1 + FLOAT_SLACK


def c0_of_theta(delta) -> int:
    """(2 * ceil(1/(2 delta)) + 1)^2."""
    delta = as_rational(delta)
    if not 0 < delta <= Fraction(1, 2):
        raise DomainError("delta must lie in (0, 1/2]")
    return (2 * math.ceil(1 / (2 * delta)) + 1) ** 2


def optimal_l(k: int) -> int:
    """Integer l maximizing lhs at fixed k (ties to the smaller l).

    The real maximizer is (sqrt(k) - 1)/2; its floor and ceiling are compared
    exactly.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    r = math.isqrt(k)
    lo = max(0, (r - 1) // 2)
    cands = [lo, lo + 1]
    return max(cands, key=lambda l: (lhs_value(k, l, 1), -l))


def _min_k_for_l(theta: Fraction, l: int) -> int | None:
    # k/(k+2l+1) > (l+1)/(theta(2l+1)) =: c  <=>  k > c(2l+1)/(1-c)
    c = Fraction(l + 1) / (theta * (2 * l + 1))
    if c >= 1:
        return None
    bound = c * (2 * l + 1) / (1 - c)
    return max(1, math.floor(bound) + 1)


def minimal_k(theta, l_max: int = DEFAULT_L_MAX) -> tuple[int, int]:
    """Smallest k admitting some l <= l_max with lhs > 1; ties go to the smaller l."""
    theta = as_rational(theta)
    if theta <= Fraction(1, 2):
        raise NotFoundError("theta <= 1/2: the crucial inequality has no solution")
    if theta > 1:
        raise DomainError("theta must not exceed 1")
    best = None
    for l in range(0, l_max + 1):
        k = _min_k_for_l(theta, l)
        if k is not None and (best is None or k < best[0]):
            best = (k, l)
    if best is None:
        raise NotFoundError(f"no solution with l <= {l_max}")
    assert lhs_value(*best, theta) > 1
    return best


def minimal_k_bruteforce(theta, l_max: int = DEFAULT_L_MAX, k_max: int = 10**4) -> tuple[int, int]:
    theta = as_rational(theta)
    for k in range(1, k_max + 1):
        for l in range(0, l_max + 1):
            if lhs_value(k, l, theta) > 1:
                return k, l
    raise NotFoundError("no solution in search box")


def planner_table(thetas, l_max: int = DEFAULT_L_MAX) -> list[dict]:
    """Rows (theta, minimal k, l, lhs, c0) for a grid of theta values."""
    rows = []
    for t in thetas:
        t = as_rational(t)
        try:
            k, l = minimal_k(t, l_max)
        except NotFoundError:
            rows.append({"theta": format_rational(t), "k": None, "l": None, "lhs": None, "c0": None})
            continue
        rows.append({"theta": format_rational(t), "k": k, "l": l,
                     "lhs": format_rational(lhs_value(k, l, t)),
                     "c0": c0_of_theta(t - Fraction(1, 2)) if t > Fraction(1, 2) else None})
    return rows
