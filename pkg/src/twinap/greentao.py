"""W-trick residues, the measure nu, the Delta product and an AP finder."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .constellation import _scan_block, _first_consecutive, default_c1
from .core_primes import DEFAULT_BUDGET, U64_MAX, base_primes, iter_segments, primorial
from .errors import CapacityError, DomainError
from .sieve_weights import squarefree_divisors, truncated_von_mangoldt
from .tuples import AdmissibleTuple, residue_classes

#: W = primorial(w) must stay below this for the default choice of w.
DEFAULT_W_CAP = 10**6
#: enumeration of X_W is refused beyond this many residues
MAX_RESIDUES = 5 * 10**7


def default_w(cap: int = DEFAULT_W_CAP) -> int:
    """Largest prime w with primorial(w) <= cap."""
    best = 2
    for p in base_primes(100).tolist():
        if primorial(p) > cap:
            break
        best = p
    return best


def _crt_merge(res: np.ndarray, M: int, cls: np.ndarray, p: int) -> np.ndarray:
    inv = pow(M, -1, p)
    t = ((cls[None, :] - res[:, None] % p) * inv) % p
    return (res[:, None] + M * t).ravel()


@dataclass(frozen=True, eq=False)
class WTrickContext:
    w: int
    W: int
    tuple: AdmissibleTuple
    residues: np.ndarray            # sorted X_W

    @property
    def r(self) -> int:
        return self.tuple.k

    @property
    def phi_ratio(self) -> float:
        """phi(W)/W."""
        return math.prod(1 - 1 / p for p in base_primes(self.w).tolist())

    def expected_size(self) -> int:
        """W * prod_{p <= w} (1 - |Omega_A(p)|/p), as an integer."""
        return math.prod(p - len(residue_classes(self.tuple.offsets, p))
                         for p in base_primes(self.w).tolist())

    def __contains__(self, b: int) -> bool:
        i = np.searchsorted(self.residues, b)
        return i < len(self.residues) and int(self.residues[i]) == b


def build_wtrick(w: int, tup, *, max_residues: int = MAX_RESIDUES) -> WTrickContext:
    """X_W = {b mod W : gcd(b + a_i, W) = 1 for all i}, built prime by prime with CRT."""
    if w < 2:
        raise DomainError("w must be >= 2")
    tup = tup if isinstance(tup, AdmissibleTuple) else AdmissibleTuple(tuple(tup))
    ps = base_primes(w).tolist()
    W = math.prod(ps)
    if W > U64_MAX:
        raise OverflowError(f"W = primorial({w}) exceeds 64 bits")
    size = math.prod(p - len(residue_classes(tup.offsets, p)) for p in ps)
    if size > max_residues:
        raise CapacityError(f"|X_W| = {size} exceeds {max_residues}")
    res = np.zeros(1, dtype=np.int64)
    M = 1
    for p in ps:
        allowed = np.array(sorted(set(range(p)) - residue_classes(tup.offsets, p)), dtype=np.int64)
        res = _crt_merge(res, M, allowed, p)
        M *= p
    res.sort()
    res.setflags(write=False)
    return WTrickContext(w, W, tup, res)


@dataclass(frozen=True)
class MeasureParams:
    """nu lives on [1, N]; inside ``window`` it is the weighted product, elsewhere 1."""

    N: int
    R: float
    context: WTrickContext
    b: int
    window: tuple[int, int] | None = None

    def __post_init__(self):
        if self.window is None:
            object.__setattr__(self, "window", (max(1, self.N // 4), max(1, self.N // 2)))
        lo, hi = self.window
        if not 1 <= lo <= hi <= self.N:
            raise DomainError(f"window {self.window} must be a non-empty part of [1, {self.N}]")
        if self.R <= 1:
            raise DomainError("R must exceed 1")
        if self.b not in self.context:
            raise DomainError(f"b = {self.b} not in X_W")

    @property
    def window_size(self) -> int:
        return self.window[1] - self.window[0] + 1


def nu_measure(n: int, params: MeasureParams) -> float:
    """(phi(W)/W)^r prod Lambda_R(Wn + b + a_i)^2 / log R inside the window, else 1."""
    lo, hi = params.window
    if not lo <= n <= hi:
        return 1.0
    ctx = params.context
    logR = math.log(params.R)
    prod = 1.0
    for a in ctx.tuple.offsets:
        lam = truncated_von_mangoldt(ctx.W * n + params.b + a, params.R)
        prod *= lam * lam / logR
    return ctx.phi_ratio ** ctx.r * prod


def von_mangoldt_progression(W: int, c: int, lo: int, hi: int, R: float) -> np.ndarray:
    """Lambda_R(W n + c) for n = lo..hi, summed along the progressions d | W n + c."""
    out = np.zeros(hi - lo + 1)
    logR = math.log(R)
    for d, mu in squarefree_divisors(base_primes(int(R)).tolist(), R):
        g = math.gcd(W, d)
        if c % g:
            continue
        dd = d // g
        # W n + c = 0 (mod d)  <=>  n = n0 (mod dd)
        n0 = (-(c // g) * pow(W // g, -1, dd)) % dd if dd > 1 else 0
        out[(n0 - lo) % dd :: dd] += mu * (logR - math.log(d))
    return out


def nu_window(params: MeasureParams) -> np.ndarray:
    """nu over the window, vectorized."""
    lo, hi = params.window
    ctx = params.context
    logR = math.log(params.R)
    prod = np.ones(hi - lo + 1)
    for a in ctx.tuple.offsets:
        lam = von_mangoldt_progression(ctx.W, params.b + a, lo, hi, params.R)
        prod *= lam * lam / logR
    return ctx.phi_ratio ** ctx.r * prod


@dataclass
class ExpectationReport:
    expectation: float
    deviation: float
    window_mean: float
    window_size: int
    N: int


def expectation_nu(params: MeasureParams) -> ExpectationReport:
    """Average of nu over [1, N]."""
    vals = nu_window(params)
    inside = math.fsum(vals.tolist())
    total = inside + (params.N - params.window_size)
    e = total / params.N
    return ExpectationReport(e, abs(e - 1), inside / params.window_size, params.window_size, params.N)


def expectation_closed_form_small_R(params: MeasureParams) -> float:
    """E(nu) when R < 2: every Lambda_R equals log R."""
    if params.R >= 2:
        raise DomainError("closed form needs R < 2")
    ctx = params.context
    inside = ctx.phi_ratio ** ctx.r * math.log(params.R) ** ctx.r
    return (params.window_size * inside + params.N - params.window_size) / params.N


def delta_product(h_list: Sequence[int], tup: Sequence[int], W: int) -> int:
    """prod_{i<j} (h_i - h_j) * prod_{i<j} prod_{u<v} (W (h_i - h_j) + a_u - a_v).

    Both products run over all pairs i < j (double-product reading).
    """
    hs = [int(h) for h in h_list]
    if len(set(hs)) != len(hs):
        raise DomainError("h values must be distinct")
    a = [int(x) for x in tup]
    out = 1
    for i in range(len(hs)):
        for j in range(i + 1, len(hs)):
            diff = hs[i] - hs[j]
            out *= diff
            for u in range(len(a)):
                for v in range(u + 1, len(a)):
                    out *= W * diff + a[u] - a[v]
    return out


# ---------------------------------------------------------------------------
# constellation members along the progression W n + b

def constellation_members(ctx: WTrickContext, lo_n: int, hi_n: int, c1: float | None = None,
                          *, consecutive: bool = True, budget: int = DEFAULT_BUDGET) -> dict[int, list[int]]:
    """For each b in X_W, the n in [lo_n, hi_n] with W n + b a two-prime constellation.

    A constellation here is a scanner survivor with at least two primes
    (and a consecutive prime pair when ``consecutive``).
    """
    hs = ctx.tuple.offsets
    c1 = default_c1(len(hs)) if c1 is None else c1
    lo, hi = ctx.W * lo_n, ctx.W * hi_n + ctx.W - 1
    if hi - lo + 1 > budget:
        raise CapacityError(f"calibration range of {hi - lo + 1} exceeds budget {budget}")
    out: dict[int, list[int]] = {}
    for slo, shi in iter_segments(max(lo, 1), hi, 1 << 18):
        block = _scan_block(slo, shi, hs, c1)
        good = block.ok & (block.primes.sum(axis=1) >= 2)
        for row in np.flatnonzero(good).tolist():
            if consecutive and _first_consecutive(block, row, hs) is None:
                continue
            m = int(block.n[row])
            out.setdefault(m % ctx.W, []).append(m // ctx.W)
    return {b: v for b, v in out.items() if b in ctx}


def choose_residue(ctx: WTrickContext, window: tuple[int, int], c1: float | None = None) -> int:
    """The b in X_W with the most constellation hits in the window (ties: smallest b)."""
    hits = constellation_members(ctx, *window, c1=c1)
    if not hits:
        return int(ctx.residues[0])
    return min(hits, key=lambda b: (-len(hits[b]), b))


def domination_violations(params: MeasureParams, members: Sequence[int], ap_length: int = 3) -> list[int]:
    """n in members (inside the window) where nu(n) < [Lambda~(n) / (k 2^(k+5))]^r.

    Lambda~(n) = (phi(W)/W) log(W n + b) for W n + b in the constellation set.
    """
    ctx = params.context
    k = ap_length
    lo, hi = params.window
    bad = []
    for n in members:
        if not lo <= n <= hi:
            continue
        lam = ctx.phi_ratio * math.log(ctx.W * n + params.b)
        if nu_measure(n, params) < (lam / (k * 2 ** (k + 5))) ** ctx.r:
            bad.append(n)
    return bad


# ---------------------------------------------------------------------------
# arithmetic progressions

@dataclass(frozen=True)
class AP:
    start: int
    step: int
    length: int

    @property
    def members(self) -> list[int]:
        return [self.start + i * self.step for i in range(self.length)]

    def to_dict(self) -> dict:
        return {"start": self.start, "step": self.step, "length": self.length,
                "members": self.members}


def find_aps(anchor_set: Sequence[int], m: int, cap: int | None = None) -> list[AP]:
    """All m-term APs inside a sorted set of distinct integers, ordered by (start, step).

    ``cap`` stops after that many progressions.
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    xs = np.asarray(sorted(set(int(x) for x in anchor_set)), dtype=np.int64)
    if len(xs) != len(anchor_set):
        raise DomainError("anchor set must be distinct")
    out: list[AP] = []
    if len(xs) == 0:
        return out
    if m == 1:
        out = [AP(int(x), 0, 1) for x in xs]
        return out[:cap] if cap is not None else out
    lo, hi = int(xs[0]), int(xs[-1])
    member = np.zeros(hi - lo + 1, dtype=bool)
    member[xs - lo] = True
    for i, a in enumerate(xs.tolist()):
        steps = xs[i + 1 :] - a
        steps = steps[a + (m - 1) * steps <= hi]
        for t in range(2, m):
            if len(steps) == 0:
                break
            steps = steps[member[a + t * steps - lo]]
        for s in steps.tolist():
            out.append(AP(a, s, m))
            if cap is not None and len(out) >= cap:
                return out
    return out


def ap_reference(N: int, r: int, m: int) -> float:
    """N^2 / log^(r m) N."""
    return N * N / math.log(N) ** (r * m)
