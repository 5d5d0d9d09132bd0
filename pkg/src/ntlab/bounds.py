"""
Numeric evaluation of the bound expressions used in the n^2 + 1 and ABC
arguments: approximation bounds from linear forms in logarithms, the
threshold B(R), the AM-GM collapse, the master chain inequality, and the
empirical fitting of the leading constants.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Iterable

from .intarith import log_int

__all__ = [
    "DomainError",
    "BoundConstants",
    "BoundReport",
    "iterated_log",
    "threshold_B",
    "eg_arch_rhs",
    "eg_nonarch_rhs",
    "amgm_product_bound",
    "chain_rhs",
    "chain_rhs_m1",
    "calculus_check",
    "growth_shape",
    "kappa_point",
    "fit_kappa",
    "SHAPES",
]

E = math.e
SHAPES = ("thm1", "thm2", "cor4")


class DomainError(ValueError):
    """Input outside the range where an expression is defined."""


@dataclass(frozen=True)
class BoundConstants:
    """Unspecified absolute constants of the proofs; all default to 1."""

    K_d: float = 1.0
    K: float = 1.0
    K_prime: float = 1.0
    K_double_prime: float = 1.0
    M: float = 1.0
    kappa: float = 1.0
    kappa_prime: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
                raise ValueError(f"constant {f.name} must be a positive finite number, got {v!r}")

    @classmethod
    def names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def updated(self, **kw: float) -> "BoundConstants":
        unknown = set(kw) - set(self.names())
        if unknown:
            raise KeyError(f"unknown constant(s): {', '.join(sorted(unknown))}")
        return replace(self, **{k: float(v) for k, v in kw.items()})

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class BoundReport:
    lhs: float
    rhs: float
    holds: bool
    ratio: float
    inputs: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def compare(cls, lhs: float, rhs: float, **inputs: Any) -> "BoundReport":
        ratio = lhs / rhs if rhs > 0 else math.inf
        return cls(float(lhs), float(rhs), bool(lhs <= rhs), ratio, inputs)


def _log(x) -> float:
    if isinstance(x, int):
        return log_int(x)
    return math.log(x)


def iterated_log(x, k: int) -> float:
    """k-fold natural log; every intermediate argument must exceed 1."""
    v = x
    for i in range(k):
        if v <= 1:
            raise DomainError(f"log_{k} undefined at {x}: argument {v} of log number {i + 1} is <= 1")
        v = _log(v)
    return float(v)


def threshold_B(R) -> float:
    """exp(sqrt(log R * log log R)); R may be a huge int."""
    if R <= E:
        raise DomainError(f"threshold needs R > e, got {R}")
    L = _log(R)
    return math.exp(math.sqrt(L * math.log(L)))


def _heights_product(gen_heights: Iterable[float], m: int) -> float:
    hs = list(gen_heights)
    if not hs:
        raise ValueError("generator height list is empty")
    if len(hs) != m:
        raise ValueError(f"expected {m} generator heights, got {len(hs)}")
    if any(h < 0 for h in hs):
        raise ValueError("heights are non-negative")
    return math.prod(hs)


def eg_arch_rhs(m: int, gen_heights, h_xi: float, c: BoundConstants = BoundConstants()) -> float:
    """K_d^m * log max(e, h(xi)) * prod h(xi_j): archimedean approximation bound."""
    if m < 1:
        raise ValueError("rank m must be at least 1")
    prod_h = _heights_product(gen_heights, m)
    return c.K_d**m * math.log(max(E, h_xi)) * prod_h


def eg_nonarch_rhs(
    m: int, gen_heights, h_xi: float, norm_p: int, c: BoundConstants = BoundConstants()
) -> float:
    """K_d^m * N/log N * log max(e, N h(xi)) * prod h(xi_j) at a place of norm N."""
    if m < 1:
        raise ValueError("rank m must be at least 1")
    if norm_p < 2:
        raise ValueError("the norm of a prime ideal is at least 2")
    prod_h = _heights_product(gen_heights, m)
    return c.K_d**m * (norm_p / math.log(norm_p)) * math.log(max(E, norm_p * h_xi)) * prod_h


def amgm_product_bound(logR: float, m: int) -> float:
    """(log R / (m - 1))^(m - 1), bounding prod log p_j over m - 1 distinct primes of R."""
    if m < 2:
        raise ValueError("AM-GM bound needs m >= 2")
    if not logR > 0:
        raise ValueError("log R must be positive")
    return (logR / (m - 1)) ** (m - 1)


def chain_rhs(logR: float, B: float, m: int, c: BoundConstants = BoundConstants()) -> float:
    """2K B log R (2K log R / (m - 1))^(m - 1), the bound on log n / log log n."""
    two_k = 2 * c.K
    return two_k * B * logR * amgm_product_bound(two_k * logR, m)


def chain_rhs_m1(logR: float, B: float, c: BoundConstants = BoundConstants()) -> float:
    """Bound 2K B log R used when no exponent exceeds the threshold (m = 1)."""
    if not logR > 0:
        raise ValueError("log R must be positive")
    return 2 * c.K * B * logR


def calculus_check(A: float, grid: int = 10_000) -> bool:
    """Sampled check that t -> t log(A/t) increases strictly on [1, A/e]."""
    if not A > E:
        raise DomainError(f"need A > e, got {A}")
    if grid < 2:
        raise ValueError("grid needs at least two points")
    hi = A / E
    step = (hi - 1.0) / (grid - 1)
    prev = -math.inf
    for k in range(grid):
        t = 1.0 + k * step if k < grid - 1 else hi
        v = t * math.log(A / t)
        if not v > prev:
            return False
        prev = v
    return True


def growth_shape(n) -> float:
    """(log_2 n)^2 / log_3 n, the common growth rate of the lower bounds."""
    l2 = iterated_log(n, 2)
    l3 = iterated_log(n, 3)
    return l2 * l2 / l3


def kappa_point(n, lhs: float) -> float:
    """lhs * log_3 n / (log_2 n)^2: the kappa a single sample point allows."""
    l2 = iterated_log(n, 2)
    l3 = iterated_log(n, 3)
    return lhs * l3 / (l2 * l2)


def fit_kappa(series: Iterable[tuple[int, float]], shape: str, n_min: int = 100) -> float:
    """Largest kappa with lhs >= kappa * (log_2 n)^2 / log_3 n on every sampled point.

    ``series`` yields (n, lhs) pairs: for thm1 lhs is the largest prime factor
    of n^2 + 1, for thm2 log rad(n^2 + 1), for cor4 the largest prime factor of
    abc with n = b.
    """
    if shape not in SHAPES:
        raise ValueError(f"unknown shape {shape!r}; expected one of {SHAPES}")
    floor = max(n_min, 16)
    best = math.inf
    seen = False
    for n, lhs in series:
        if n < floor:
            raise DomainError(f"n = {n} below the fitting floor {floor}")
        seen = True
        best = min(best, kappa_point(n, lhs))
    if not seen:
        raise ValueError("empty series")
    return best
