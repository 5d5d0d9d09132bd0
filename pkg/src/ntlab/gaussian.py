"""
Arithmetic in Z[i] and Q(i).

Covers Euclidean division and gcd, splitting of rational primes, the
factorization of n + i, heights on Q(i), and the threshold split of
(n - i)/(n + i) into a torsion part, a small-exponent part and the
large-exponent generators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from math import lcm
from operator import mul
from typing import Any

from .intarith import Factorization, factorize, is_prime, log_int, sqrt_minus_one

__all__ = [
    "GaussianInt",
    "QiNumber",
    "GaussianFactorization",
    "MultiplicativeDecomposition",
    "gi_divmod",
    "gi_gcd",
    "split_prime",
    "factor_n_plus_i",
    "gaussian_prime_factors",
    "height_qi",
    "height_places",
    "height_q",
    "decompose_xi",
]


def _round_half_down(num: int, den: int) -> int:
    """Nearest integer to num/den (den > 0), ties toward -infinity."""
    return -((den - 2 * num) // (2 * den))


@dataclass(frozen=True, slots=True)
class GaussianInt:
    re: int
    im: int = 0

    def __add__(self, other):
        other = _as_gi(other)
        return GaussianInt(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_gi(other)
        return GaussianInt(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _as_gi(other) - self

    def __neg__(self):
        return GaussianInt(-self.re, -self.im)

    def __mul__(self, other):
        other = _as_gi(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussianInt(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a Gaussian integer; use QiNumber")
        result, base = GaussianInt(1), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __bool__(self):
        return bool(self.re or self.im)

    def conj(self) -> "GaussianInt":
        return GaussianInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def is_unit(self) -> bool:
        return self.norm() == 1

    def associates(self) -> tuple["GaussianInt", ...]:
        a, b = self.re, self.im
        return (GaussianInt(a, b), GaussianInt(-b, a), GaussianInt(-a, -b), GaussianInt(b, -a))

    def canonical(self) -> "GaussianInt":
        """The associate with re > 0 and im >= 0 (zero maps to zero)."""
        if not self:
            return self
        for z in self.associates():
            if z.re > 0 and z.im >= 0:
                return z
        raise AssertionError("unreachable")

    def canonical_unit(self) -> "GaussianInt":
        """The unit u with self = u * self.canonical()."""
        c = self.canonical()
        for u in UNITS:
            if u * c == self:
                return u
        raise AssertionError("unreachable")

    def divides(self, other: "GaussianInt") -> bool:
        return exact_div(other, self) is not None

    def __str__(self):
        a, b = self.re, self.im
        if b == 0:
            return str(a)
        im = {1: "i", -1: "-i"}.get(b, f"{b}i")
        if a == 0:
            return im
        return f"{a}{'+' if b > 0 else ''}{im}"


UNITS = (GaussianInt(1), GaussianInt(0, 1), GaussianInt(-1), GaussianInt(0, -1))
ONE_PLUS_I = GaussianInt(1, 1)


def _as_gi(x) -> GaussianInt:
    if isinstance(x, GaussianInt):
        return x
    if isinstance(x, int):
        return GaussianInt(x)
    return NotImplemented


def exact_div(alpha: GaussianInt, beta: GaussianInt) -> GaussianInt | None:
    """alpha / beta if beta divides alpha, else None."""
    if not beta:
        raise ZeroDivisionError("Gaussian division by zero")
    n = beta.norm()
    num = alpha * beta.conj()
    if num.re % n or num.im % n:
        return None
    return GaussianInt(num.re // n, num.im // n)


def gi_divmod(alpha: GaussianInt, beta: GaussianInt) -> tuple[GaussianInt, GaussianInt]:
    """Euclidean division with norm(r) <= norm(beta)/2.

    Each coordinate of alpha/beta is rounded to the nearest integer, ties
    toward -infinity.
    """
    if not beta:
        raise ZeroDivisionError("Gaussian division by zero")
    n = beta.norm()
    num = alpha * beta.conj()
    q = GaussianInt(_round_half_down(num.re, n), _round_half_down(num.im, n))
    return q, alpha - q * beta


def gi_gcd(alpha: GaussianInt, beta: GaussianInt) -> GaussianInt:
    if not alpha and not beta:
        raise ValueError("gcd(0, 0) is undefined")
    while beta:
        alpha, beta = beta, gi_divmod(alpha, beta)[1]
    return alpha.canonical()


@lru_cache(maxsize=1 << 16)
def split_prime(p: int) -> GaussianInt:
    """Canonical Gaussian prime of norm p, for p = 2 or p = 1 mod 4."""
    if p == 2:
        return ONE_PLUS_I
    if p % 4 != 1 or not is_prime(p):
        raise ValueError(f"{p} does not split in Z[i]")
    r = sqrt_minus_one(p)
    pi = gi_gcd(GaussianInt(p), GaussianInt(r, 1))
    assert pi.norm() == p
    return pi


@dataclass(frozen=True)
class GaussianFactorization:
    """n + i = unit * prod(gamma ** e)."""

    n: int
    unit: GaussianInt
    factors: tuple[tuple[GaussianInt, int], ...]
    primes: tuple[int, ...]  # rational prime under each gamma

    def expand(self) -> GaussianInt:
        return reduce(mul, (g**e for g, e in self.factors), self.unit)

    def __str__(self):
        parts = " ".join(f"({g})^{e}" for g, e in self.factors)
        return f"{self.unit} * {parts}" if parts else str(self.unit)


def factor_n_plus_i(n: int, fact: Factorization | None = None) -> GaussianFactorization:
    """Factor n + i in Z[i] from the rational factorization of n^2 + 1.

    ``fact`` may be passed when the factorization of n^2 + 1 is already known
    (batch sweeps); otherwise it is computed.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if fact is None:
        fact = factorize(n * n + 1)
    elif fact.value != n * n + 1:
        raise ValueError(f"factorization of {fact.value} given for n^2+1 = {n * n + 1}")
    target = GaussianInt(n, 1)
    rest = target
    factors = []
    for p, e in fact.factors:
        pi = split_prime(p)
        if p != 2 and not pi.divides(target):
            pi = pi.conj().canonical()
        # pi and its conjugate are coprime and only one divides n + i, so the
        # full power p^e sits on a single Gaussian prime
        for _ in range(e):
            q = exact_div(rest, pi)
            if q is None:
                raise ArithmeticError(f"{pi}^{e} does not divide {target}")
            rest = q
        factors.append((pi, e))
    if not rest.is_unit():
        raise ArithmeticError(f"cofactor {rest} of {target} is not a unit")
    return GaussianFactorization(n, rest, tuple(factors), fact.primes)


def gaussian_prime_factors(z: GaussianInt) -> list[tuple[GaussianInt, int]]:
    """Canonical Gaussian primes dividing z with multiplicities (any nonzero z)."""
    if not z:
        raise ValueError("cannot factor zero")
    out = []
    rest = z
    for p, e in factorize(z.norm()).factors:
        if p % 4 == 3:
            cands = [GaussianInt(p)]
        elif p == 2:
            cands = [ONE_PLUS_I]
        else:
            pi = split_prime(p)
            cands = [pi, pi.conj().canonical()]
        for pi in cands:
            k = 0
            while (q := exact_div(rest, pi)) is not None:
                rest = q
                k += 1
            if k:
                out.append((pi, k))
    assert rest.is_unit()
    return out


@dataclass(frozen=True, slots=True)
class QiNumber:
    """Exact element re + im*i of Q(i)."""

    re: Fraction
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, x) -> "QiNumber":
        if isinstance(x, QiNumber):
            return x
        if isinstance(x, GaussianInt):
            return cls(Fraction(x.re), Fraction(x.im))
        if isinstance(x, (int, Fraction)):
            return cls(Fraction(x))
        raise TypeError(f"cannot convert {type(x).__name__} to QiNumber")

    @classmethod
    def ratio(cls, num: GaussianInt, den: GaussianInt) -> "QiNumber":
        n = den.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        z = num * den.conj()
        return cls(Fraction(z.re, n), Fraction(z.im, n))

    def __add__(self, other):
        o = QiNumber.of(other)
        return QiNumber(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = QiNumber.of(other)
        return QiNumber(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return QiNumber.of(other) - self

    def __neg__(self):
        return QiNumber(-self.re, -self.im)

    def __mul__(self, other):
        o = QiNumber.of(other)
        return QiNumber(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = QiNumber.of(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return self * QiNumber(o.re / n, -o.im / n)

    def __rtruediv__(self, other):
        return QiNumber.of(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return QiNumber(Fraction(1)) / self ** (-e)
        result, base = QiNumber(Fraction(1)), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        try:
            o = QiNumber.of(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def conj(self) -> "QiNumber":
        return QiNumber(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def as_fraction(self) -> tuple[GaussianInt, GaussianInt]:
        """Coprime (beta, delta) with self = beta/delta and delta canonical."""
        den = lcm(self.re.denominator, self.im.denominator)
        num = GaussianInt(int(self.re * den), int(self.im * den))
        if not num:
            return num, GaussianInt(1)
        g = gi_gcd(num, GaussianInt(den))
        beta, delta = exact_div(num, g), exact_div(GaussianInt(den), g)
        u = delta.canonical_unit()
        return beta * u.conj(), delta * u.conj()

    def height(self) -> float:
        beta, delta = self.as_fraction()
        return height_qi(beta, delta)

    def __str__(self):
        beta, delta = self.as_fraction()
        if delta == GaussianInt(1):
            return str(beta)
        return f"({beta})/({delta})"


def height_qi(beta: GaussianInt, delta: GaussianInt) -> float:
    """Absolute height of beta/delta for coprime beta, delta.

    Summing log max(1, |x|_v) over the complex place and all finite places
    of Q(i) telescopes to log max(N(beta), N(delta)); dividing by the degree
    2 gives the value returned here.
    """
    if not delta:
        raise ZeroDivisionError("zero denominator")
    if beta and not gi_gcd(beta, delta).is_unit():
        raise ValueError(f"{beta} and {delta} are not coprime")
    big = max(beta.norm(), delta.norm())
    return 0.5 * log_int(big)


def height_places(x: QiNumber) -> float:
    """Height of x evaluated place by place straight from the definition.

    Slow reference route; works on any representation of x.
    """
    if x == 0:
        return 0.0
    den = lcm(x.re.denominator, x.im.denominator)
    num = GaussianInt(int(x.re * den), int(x.im * den))
    deng = GaussianInt(den)
    total = max(0.0, math.log(x.norm()))  # complex place: |x|_v = |x|^2
    vals: dict[GaussianInt, int] = {}
    for pi, k in gaussian_prime_factors(num):
        vals[pi] = vals.get(pi, 0) + k
    for pi, k in gaussian_prime_factors(deng):
        vals[pi] = vals.get(pi, 0) - k
    for pi, v in vals.items():
        if v < 0:
            total += -v * math.log(pi.norm())
    return total / 2


def height_q(x: Fraction) -> float:
    """Absolute height of a rational number."""
    x = Fraction(x)
    if x == 0:
        return 0.0
    return log_int(max(abs(x.numerator), x.denominator))


@dataclass(frozen=True)
class MultiplicativeDecomposition:
    """target = w * xi0 * prod(xi_j ** e_j for (xi_j, e_j) in large_part).

    ``generators`` lists every xi_j (index j into this tuple); ``xi0_exponents``
    holds the (j, e_j) pairs with |e_j| <= threshold, kept symbolic.
    Elements are QiNumber for Q(i) and Fraction for Q.
    """

    target: Any
    w: Any
    generators: tuple
    primes: tuple[int, ...]
    xi0_exponents: tuple[tuple[int, int], ...]
    large_part: tuple[tuple[Any, int], ...]
    large_indices: tuple[int, ...]
    m: int
    threshold: float
    field: str = field(default="Q(i)")

    def one(self):
        return self.w**0

    def xi0(self):
        return reduce(mul, (self.generators[j] ** e for j, e in self.xi0_exponents), self.one())

    def reconstruct(self):
        return reduce(mul, (x**e for x, e in self.large_part), self.w * self.xi0())

    def height(self, x) -> float:
        return x.height() if isinstance(x, QiNumber) else height_q(x)

    def xi0_height(self) -> float:
        return self.height(self.xi0())

    def generator_heights(self) -> list[float]:
        """h(xi_0) followed by h(xi_j) for j in the large set."""
        return [self.xi0_height()] + [self.height(x) for x, _ in self.large_part]


def decompose_xi(fact: GaussianFactorization, B: float) -> MultiplicativeDecomposition:
    """Split (n - i)/(n + i) by exponent size against the threshold B."""
    if not B > 0:
        raise ValueError("threshold must be positive")
    n = fact.n
    target = QiNumber.ratio(GaussianInt(n, -1), GaussianInt(n, 1))
    u = QiNumber.of(fact.unit)
    w = u.conj() / u
    gens = tuple(QiNumber.ratio(g.conj(), g) for g, _ in fact.factors)
    small, large, large_idx = [], [], []
    for j, (_, e) in enumerate(fact.factors):
        if e > B:
            large.append((gens[j], e))
            large_idx.append(j)
        else:
            small.append((j, e))
    return MultiplicativeDecomposition(
        target=target,
        w=w,
        generators=gens,
        primes=fact.primes,
        xi0_exponents=tuple(small),
        large_part=tuple(large),
        large_indices=tuple(large_idx),
        m=1 + len(large),
        threshold=B,
    )
