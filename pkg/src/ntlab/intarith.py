"""
Integer factorization and the elementary arithmetic functions built on it:
radical, largest prime factor, p-adic valuation, exponent product and
Chebyshev's theta function.
"""

from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass
from math import gcd, isqrt, prod

import numpy as np

__all__ = [
    "CapacityError",
    "Factorization",
    "is_prime",
    "factorize",
    "radical",
    "largest_prime_factor",
    "valuation",
    "exponent_product",
    "log_int",
    "primes_upto",
    "chebyshev_theta",
    "theta_table",
    "set_sieve_ceiling",
    "get_sieve_ceiling",
    "factor_n2p1_range",
    "sqrt_minus_one",
    "SmallIntTable",
]

LOG2 = math.log(2.0)

# trial division is cheap only for small primes; Brent's rho takes over
TRIAL_LIMIT = 1 << 10
RHO_ITERATION_BUDGET = 1 << 22
MAX_BITS = 512


class CapacityError(RuntimeError):
    """Raised when an input exceeds a configured sieve or factorization limit."""


@dataclass(frozen=True)
class Factorization:
    """Prime factorization of a positive integer.

    ``factors`` is a tuple of ``(p, e)`` pairs sorted by strictly increasing
    prime ``p`` with ``e >= 1``.
    """

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.value < 1:
            raise ValueError(f"factorization of non-positive value {self.value}")
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"malformed factor list {self.factors!r}")
            last = p

    @classmethod
    def from_dict(cls, d: dict[int, int]) -> "Factorization":
        items = tuple(sorted((p, e) for p, e in d.items() if e))
        return cls(prod(p**e for p, e in items), items)

    def __mul__(self, other: "Factorization") -> "Factorization":
        d = dict(self.factors)
        for p, e in other.factors:
            d[p] = d.get(p, 0) + e
        return Factorization.from_dict(d)

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)

    def expand(self) -> int:
        return prod(p**e for p, e in self.factors)

    def check(self) -> None:
        """Full validation: product and primality of every base."""
        if self.expand() != self.value:
            raise ValueError(f"factors of {self.value} multiply to {self.expand()}")
        for p, _ in self.factors:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")

    def __str__(self):
        if not self.factors:
            return "1"
        return " * ".join(str(p) if e == 1 else f"{p}^{e}" for p, e in self.factors)


# --- primality ---------------------------------------------------------------

_SMALL_PRIMES = [p for p in range(2, TRIAL_LIMIT) if all(p % q for q in range(2, isqrt(p) + 1))]
_SMALL_SET = frozenset(_SMALL_PRIMES)
# deterministic for n < 3.3e24, covering all n < 2^64
_MR_BASES_64 = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_ROUNDS = 40


def _mr_round(n: int, d: int, s: int, a: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Miller-Rabin: deterministic below 2^64, 40 input-seeded rounds above."""
    if n < 2:
        return False
    if n < TRIAL_LIMIT:
        return n in _SMALL_SET
    for p in _SMALL_PRIMES[:16]:
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    if n < 1 << 64:
        bases = _MR_BASES_64
    else:
        rng = random.Random(n)
        bases = [rng.randrange(2, n - 1) for _ in range(_MR_ROUNDS)]
    return all(_mr_round(n, d, s, a) for a in bases)


# --- factorization -----------------------------------------------------------


def _brent(n: int) -> int:
    """Return a non-trivial factor of the odd composite ``n``."""
    rng = random.Random(n)
    spent = 0
    while spent < RHO_ITERATION_BUDGET:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r <<= 1
            spent += r
            if spent >= RHO_ITERATION_BUDGET:
                break
        if g == n:
            # batch overshoot: back up one step at a time
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    raise CapacityError(f"Pollard-Brent exhausted its iteration budget on {n}")


def _split(n: int, out: dict[int, int]) -> None:
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = _brent(m)
        stack += [d, m // d]


def factorize(n: int) -> Factorization:
    """Complete prime factorization of ``n >= 1``.

    >>> str(factorize(50))
    '2 * 5^2'
    """
    if isinstance(n, bool) or not isinstance(n, int):
        raise TypeError(f"expected an int, got {type(n).__name__}")
    if n < 1:
        raise ValueError(f"cannot factor {n}: input must be positive")
    if n.bit_length() > MAX_BITS:
        raise CapacityError(f"{n.bit_length()}-bit input exceeds the {MAX_BITS}-bit factoring limit")
    out: dict[int, int] = {}
    m = n
    for p in _SMALL_PRIMES:
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out[p] = e
    if m > 1:
        _split(m, out)
    return Factorization(n, tuple(sorted(out.items())))


def radical(f: Factorization) -> int:
    return prod(f.primes)


def largest_prime_factor(f: Factorization) -> int:
    """Largest prime dividing ``f.value``; 1 for the value 1."""
    return f.factors[-1][0] if f.factors else 1


def valuation(n: int, p: int) -> int:
    if n < 1:
        raise ValueError("valuation needs n >= 1")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def exponent_product(f: Factorization) -> int:
    return prod(e for _, e in f.factors)


def log_int(n: int) -> float:
    """Natural log of a positive integer of any size.

    Uses the top 64 bits and the bit length, so the relative error stays far
    below 1e-12 no matter how large ``n`` is.
    """
    if n <= 0:
        raise ValueError("log of non-positive integer")
    shift = n.bit_length() - 64
    if shift <= 0:
        return math.log(n)
    return math.log(n >> shift) + shift * LOG2


# --- prime sieve cache ---------------------------------------------------------

_DEFAULT_CEILING = 10**8


class _SieveCache:
    """Lazily grown prime table shared across threads."""

    def __init__(self, ceiling: int = _DEFAULT_CEILING):
        self.ceiling = ceiling
        self._lock = threading.Lock()
        self._limit = 1
        self._primes = np.zeros(0, dtype=np.int64)
        self._theta = np.zeros(1, dtype=np.float64)

    def _check(self, x: float) -> None:
        if x > self.ceiling:
            raise CapacityError(f"{x} exceeds the prime sieve ceiling {self.ceiling}")

    def ensure(self, limit: int) -> None:
        self._check(limit)
        if limit <= self._limit:
            return
        with self._lock:
            if limit <= self._limit:
                return
            new_limit = min(max(limit, 2 * self._limit, 1 << 16), self.ceiling)
            primes = _eratosthenes(new_limit)
            theta = np.concatenate(([0.0], np.cumsum(np.log(primes.astype(np.float64)))))
            self._primes, self._theta, self._limit = primes, theta, new_limit

    def primes(self, limit: int) -> np.ndarray:
        self.ensure(limit)
        return self._primes[: np.searchsorted(self._primes, limit, side="right")]

    def theta(self, x: float) -> float:
        if x < 2:
            return 0.0
        self.ensure(int(x))
        k = np.searchsorted(self._primes, math.floor(x), side="right")
        return float(self._theta[k])


def _eratosthenes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, isqrt(limit) + 1, 2):
        if sieve[p]:
            sieve[p * p :: 2 * p] = False
    return np.flatnonzero(sieve).astype(np.int64)


_SIEVE = _SieveCache()


def set_sieve_ceiling(ceiling: int) -> None:
    if ceiling < 2:
        raise ValueError("sieve ceiling must be at least 2")
    _SIEVE.ceiling = int(ceiling)


def get_sieve_ceiling() -> int:
    return _SIEVE.ceiling


def primes_upto(limit: int) -> np.ndarray:
    """Sorted int64 array of the primes ``<= limit``."""
    return _SIEVE.primes(int(limit))


def chebyshev_theta(x: float) -> float:
    """theta(x) = sum of log p over primes p <= x."""
    if x < 0:
        raise ValueError("theta is defined for x >= 0")
    _SIEVE._check(x)
    return _SIEVE.theta(x)


def theta_table(limit: int) -> np.ndarray:
    """theta(k) for every integer ``0 <= k <= limit`` as a float array."""
    _SIEVE._check(limit)
    logs = np.zeros(limit + 1, dtype=np.float64)
    p = primes_upto(limit)
    logs[p] = np.log(p.astype(np.float64))
    return np.cumsum(logs)


# --- batch factorization of n^2 + 1 --------------------------------------------


def sqrt_minus_one(p: int) -> int:
    """A root of x^2 = -1 mod p for p = 2 or p = 1 mod 4."""
    if p == 2:
        return 1
    if p % 4 != 1:
        raise ValueError(f"-1 is not a square mod {p}")
    for c in range(2, p):
        if pow(c, (p - 1) // 2, p) == p - 1:
            return pow(c, (p - 1) // 4, p)
    raise AssertionError("unreachable for prime p")


def factor_n2p1_range(lo: int, hi: int) -> list[Factorization]:
    """Factorizations of n^2 + 1 for every ``lo <= n <= hi``.

    Sieves by the primes p <= hi with p = 2 or p = 1 mod 4, stepping through
    the residue classes n = +-r (mod p) where r^2 = -1. Whatever is left is 1
    or a single prime above hi, since two such primes would exceed hi^2 + 1.
    """
    if lo < 1 or hi < lo:
        raise ValueError(f"bad range [{lo}, {hi}]")
    size = hi - lo + 1
    rest = [n * n + 1 for n in range(lo, hi + 1)]
    found: list[list[tuple[int, int]]] = [[] for _ in range(size)]
    for p in primes_upto(max(hi, 2)).tolist():
        if p != 2 and p % 4 != 1:
            continue
        r = sqrt_minus_one(p)
        for root in {r, p - r}:
            start = (root - lo) % p
            for k in range(start, size, p):
                v = rest[k]
                e = 0
                while v % p == 0:
                    v //= p
                    e += 1
                rest[k] = v
                found[k].append((p, e))
    out = []
    for k in range(size):
        facs = found[k]
        if rest[k] > 1:
            facs.append((rest[k], 1))
        n = lo + k
        out.append(Factorization(n * n + 1, tuple(facs)))
    return out


class SmallIntTable:
    """Per-integer arithmetic arrays for ``0..limit`` built from a smallest-prime-factor sieve.

    Arrays: ``rad``, ``lpf`` (largest prime factor, 1 for 0 and 1) and
    ``nu_prod`` (product of the exponents). Entries at 0 are placeholders.
    """

    def __init__(self, limit: int):
        if limit < 1:
            raise ValueError("limit must be positive")
        self.limit = limit
        spf = np.zeros(limit + 1, dtype=np.int64)
        for p in primes_upto(limit).tolist()[::-1]:
            spf[p::p] = p
        x = np.arange(limit + 1, dtype=np.int64)
        x[0] = 1
        rad = np.ones(limit + 1, dtype=np.int64)
        lpf = np.ones(limit + 1, dtype=np.int64)
        nu = np.ones(limit + 1, dtype=np.int64)
        idx = np.flatnonzero(x > 1)
        while idx.size:
            p = spf[x[idx]]
            e = np.zeros(idx.size, dtype=np.int64)
            div = np.ones(idx.size, dtype=bool)
            while div.any():
                x[idx[div]] //= p[div]
                e[div] += 1
                div = x[idx] % p == 0
            rad[idx] *= p
            lpf[idx] = np.maximum(lpf[idx], p)
            nu[idx] *= e
            idx = idx[x[idx] > 1]
        self.rad = rad
        self.lpf = lpf
        self.nu_prod = nu
        self.log_rad = np.log(rad.astype(np.float64))
