"""
Elliptic curves over Q: the family y^2 = x^3 + 3x + 2n, Frey-Hellegouarch
curves of ABC triples, and Tate's algorithm for local reduction data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, prod

import numpy as np

from .intarith import (
    Factorization,
    exponent_product,
    factorize,
    is_prime,
    log_int,
    radical,
    valuation,
)

__all__ = [
    "CurveModel",
    "LocalReductionData",
    "curve_for",
    "frey_curve",
    "equation_discriminant",
    "tate_local",
    "local_data",
    "minimal_discriminant",
    "conductor",
    "lemma_prod_report",
    "LemmaProdReport",
    "reduction_kind_by_count",
    "component_count",
]


@dataclass(frozen=True)
class CurveModel:
    """Long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def __post_init__(self):
        if self.discriminant == 0:
            raise ValueError(f"singular model {self.ainvs}")

    @property
    def ainvs(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b2(self) -> int:
        return self.a1 * self.a1 + 4 * self.a2

    @property
    def b4(self) -> int:
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self) -> int:
        return self.a3 * self.a3 + 4 * self.a6

    @property
    def b8(self) -> int:
        a1, a2, a3, a4, a6 = self.ainvs
        return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4

    @property
    def c4(self) -> int:
        return self.b2**2 - 24 * self.b4

    @property
    def c6(self) -> int:
        b2, b4 = self.b2, self.b4
        return -(b2**3) + 36 * b2 * b4 - 216 * self.b6

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = _b_invariants(self.ainvs)
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def rst(self, r: int, s: int, t: int) -> "CurveModel":
        """Model after x = x' + r, y = y' + s x' + t."""
        a1, a2, a3, a4, a6 = self.ainvs
        return CurveModel(
            a1 + 2 * s,
            a2 - s * a1 + 3 * r - s * s,
            a3 + r * a1 + 2 * t,
            a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
            a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1,
        )

    def scale(self, u: int) -> "CurveModel":
        """Model with a_k replaced by a_k / u^k; every division must be exact."""
        out = []
        for k, a in zip((1, 2, 3, 4, 6), self.ainvs):
            q, rem = divmod(a, u**k)
            if rem:
                raise ValueError(f"a{k} = {a} not divisible by {u}^{k}")
            out.append(q)
        return CurveModel(*out)


def _b_invariants(ainvs):
    a1, a2, a3, a4, a6 = ainvs
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def curve_for(n: int) -> CurveModel:
    """E_n: y^2 = x^3 + 3x + 2n."""
    if n < 1:
        raise ValueError("n must be positive")
    return CurveModel(0, 0, 0, 3, 2 * n)


def frey_curve(a: int, b: int, c: int) -> CurveModel:
    """y^2 = x(x - a)(x + b) for a coprime triple a + b = c."""
    if min(a, b, c) < 1:
        raise ValueError("triple entries must be positive")
    if a + b != c:
        raise ValueError(f"{a} + {b} != {c}")
    if gcd(a, b) != 1:
        raise ValueError(f"gcd({a}, {b}) = {gcd(a, b)}")
    return CurveModel(0, b - a, 0, -a * b, 0)


def equation_discriminant(m: CurveModel) -> int:
    return m.discriminant


@dataclass(frozen=True)
class LocalReductionData:
    p: int
    kodaira: str
    f: int  # conductor exponent
    v_delta_min: int
    reduction: str  # "good" | "multiplicative" | "additive"
    v_delta: int = 0  # valuation of the input model's discriminant
    scalings: int = 0  # how many times the model was divided by p to reach minimality

    def __post_init__(self):
        if self.reduction == "good" and self.f != 0:
            raise ValueError("good reduction with nonzero conductor exponent")
        if self.reduction == "multiplicative" and self.f != 1:
            raise ValueError("multiplicative reduction needs f = 1")
        if self.reduction == "additive" and self.f < 2:
            raise ValueError("additive reduction needs f >= 2")


def _val(x: int, p: int) -> int:
    """p-adic valuation with v(0) reported as a large sentinel."""
    if x == 0:
        return 1 << 30
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def component_count(kodaira: str) -> int:
    """Number of irreducible components of the special fibre."""
    if kodaira.startswith("I") and kodaira.endswith("*") and kodaira[1:-1].isdigit():
        return 5 + int(kodaira[1:-1])
    if kodaira.startswith("I") and kodaira[1:].isdigit():
        return max(1, int(kodaira[1:]))
    return {"II": 1, "III": 2, "IV": 3, "IV*": 7, "III*": 8, "II*": 9}[kodaira]


def tate_local(model: CurveModel, p: int) -> LocalReductionData:
    """Tate's algorithm at the prime p.

    Step numbers in the comments follow the usual presentation of the
    algorithm (Silverman, Advanced Topics, IV.9.4; Cohen, GTM 138, 7.5.1).
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    E = model
    v0 = _val(E.discriminant, p)
    scalings = 0
    half = (p + 1) // 2  # inverse of 2 mod odd p

    def done(kod, f, v, kind):
        return LocalReductionData(p, kod, f, v, kind, v0, scalings)

    while True:
        delta = E.discriminant
        n = _val(delta, p)
        # step 1
        if n == 0:
            return done("I0", 0, 0, "good")

        # step 2: move the singular point of the reduction to (0, 0)
        a1, a2, a3, a4, a6 = E.ainvs
        b2, b4, b6, b8 = _b_invariants(E.ainvs)
        c4 = E.c4
        if p == 2:
            if b2 % 2 == 0:
                r = a4 % 2
                t = (r * (1 + a2 + a4) + a6) % 2
            else:
                r = a3 % 2
                t = (r + a4) % 2
        elif p == 3:
            r = (-b6) % 3 if b2 % 3 == 0 else (-b2 * b4) % 3
            t = (a1 * r + a3) % 3
        else:
            if c4 % p == 0:
                r = (-pow(12, -1, p) * b2) % p
            else:
                r = (-pow(12 * c4, -1, p) * (E.c6 + b2 * c4)) % p
            t = (-half * (a1 * r + a3)) % p
        E = E.rst(r, 0, t)
        a1, a2, a3, a4, a6 = E.ainvs
        b2, b4, b6, b8 = _b_invariants(E.ainvs)

        # multiplicative reduction: p does not divide c4
        if c4 % p:
            return done(f"I{n}", 1, n, "multiplicative")
        if a3 % p or a4 % p or a6 % p:
            raise ArithmeticError(f"singular point not moved to the origin at p={p}")

        # steps 3-5
        if _val(a6, p) < 2:
            return done("II", n, n, "additive")
        if _val(b8, p) < 3:
            return done("III", n - 1, n, "additive")
        if _val(b6, p) < 3:
            return done("IV", n - 2, n, "additive")

        # step 6: arrange p | a1, a2; p^2 | a3, a4; p^3 | a6
        if p == 2:
            s = a2 % 2
            t = 2 * ((a6 // 4) % 2)
        else:
            s = -a1 * half
            t = -a3 * half
        E = E.rst(0, s, t)
        a1, a2, a3, a4, a6 = E.ainvs
        p2, p3 = p * p, p**3
        if a1 % p or a2 % p or a3 % p2 or a4 % p2 or a6 % p3:
            raise ArithmeticError(f"step 6 normalisation failed at p={p}: {E.ainvs}")

        # cubic T^3 + b T^2 + c T + d
        b, c, d = a2 // p, a4 // p2, a6 // p3
        w = 27 * d * d - b * b * c * c + 4 * b**3 * d - 18 * b * c * d + 4 * c**3
        x = 3 * c - b * b

        if w % p:
            # distinct roots
            return done("I0*", n - 4, n, "additive")

        if x % p:
            # step 7: double root, moved to T = 0, then the subprocedure for I_m*
            if p == 2:
                r = c
            elif p == 3:
                r = b * c
            else:
                r = (b * c - 9 * d) * pow(2 * x, -1, p)
            E = E.rst(p * (r % p), 0, 0)
            a1, a2, a3, a4, a6 = E.ainvs
            m, mx, my = 1, p2, p2
            while True:
                xa3 = a3 // my
                xa6 = a6 // (mx * my)
                if (xa3 * xa3 + 4 * xa6) % p:
                    break
                # quadratic in y has a double root: shift it to 0
                t = my * (xa6 % 2) if p == 2 else my * ((-xa3 * half) % p)
                E = E.rst(0, 0, t)
                a1, a2, a3, a4, a6 = E.ainvs
                my *= p
                m += 1
                xa2 = a2 // p
                xa4 = a4 // (p * mx)
                xa6 = a6 // (mx * my)
                if (xa4 * xa4 - 4 * xa2 * xa6) % p:
                    break
                # quadratic in x has a double root: shift it to 0
                if p == 2:
                    r = mx * ((xa6 * xa2) % 2)
                else:
                    r = mx * ((-xa4 * pow(2 * xa2, -1, p)) % p)
                E = E.rst(r, 0, 0)
                a1, a2, a3, a4, a6 = E.ainvs
                mx *= p
                m += 1
            return done(f"I{m}*", n - 4 - m, n, "additive")

        # step 8: triple root, moved to T = 0
        if p == 2:
            r = b
        elif p == 3:
            r = -d
        else:
            r = -b * pow(3, -1, p)
        E = E.rst(p * (r % p), 0, 0)
        a1, a2, a3, a4, a6 = E.ainvs
        x3 = a3 // p2
        x6 = a6 // p**4
        if (x3 * x3 + 4 * x6) % p:
            return done("IV*", n - 6, n, "additive")

        # step 9
        root = x6 % 2 if p == 2 else (-x3 * half) % p
        E = E.rst(0, 0, p2 * root)
        a1, a2, a3, a4, a6 = E.ainvs
        if _val(a4, p) < 4:
            return done("III*", n - 7, n, "additive")
        # step 10
        if _val(a6, p) < 6:
            return done("II*", n - 8, n, "additive")

        # step 11: model not minimal at p
        E = E.scale(p)
        scalings += 1


def _bad_primes(m: CurveModel, disc_factorization: Factorization | None) -> tuple[int, ...]:
    if disc_factorization is None:
        disc_factorization = factorize(abs(m.discriminant))
    return disc_factorization.primes


@dataclass(frozen=True)
class GlobalData:
    model: CurveModel
    local: tuple[LocalReductionData, ...]
    sign: int

    @property
    def minimal_discriminant(self) -> int:
        return self.sign * prod(ld.p**ld.v_delta_min for ld in self.local)

    @property
    def conductor(self) -> int:
        return prod(ld.p**ld.f for ld in self.local)

    def at(self, p: int) -> LocalReductionData:
        for ld in self.local:
            if ld.p == p:
                return ld
        return LocalReductionData(p, "I0", 0, 0, "good")


def local_data(m: CurveModel, disc_factorization: Factorization | None = None) -> GlobalData:
    """Tate's algorithm at every prime dividing the model discriminant.

    Pass ``disc_factorization`` (of |discriminant|) when already known.
    """
    primes = _bad_primes(m, disc_factorization)
    sign = -1 if m.discriminant < 0 else 1
    return GlobalData(m, tuple(tate_local(m, p) for p in primes), sign)


def minimal_discriminant(m: CurveModel, disc_factorization: Factorization | None = None) -> int:
    return local_data(m, disc_factorization).minimal_discriminant


def conductor(m: CurveModel, disc_factorization: Factorization | None = None) -> int:
    return local_data(m, disc_factorization).conductor


def _family_disc_factorization(n: int, fact: Factorization | None) -> Factorization:
    if fact is None:
        fact = factorize(n * n + 1)
    return fact * Factorization(1728, ((2, 6), (3, 3)))


@dataclass(frozen=True)
class LemmaProdReport:
    n: int
    nu_product: int
    rad: int
    rad8: int
    ratio: float
    holds: bool
    K: float
    conductor: int
    min_discriminant: int
    s: int  # exponent of 2 in Delta_min / -(n^2+1)
    t: int  # exponent of 3 in Delta_min / -(n^2+1)
    local: tuple[LocalReductionData, ...]
    kappa: float
    exponent_ratios: dict[int, float] = field(default_factory=dict)  # v_p(Delta)/(N log N)
    exponent_holds: bool = True


def lemma_prod_report(
    n: int, K: float = 1.0, kappa: float = 1.0, fact: Factorization | None = None
) -> LemmaProdReport:
    """Exponent product of n^2 + 1 against K * rad^8, with the curve E_n's data.

    Also evaluates v_p(Delta_min) <= kappa * N log N at every bad prime.
    """
    if fact is None:
        fact = factorize(n * n + 1)
    E = curve_for(n)
    g = local_data(E, _family_disc_factorization(n, fact))
    nu = exponent_product(fact)
    rad = radical(fact)
    rad8 = rad**8
    N = g.conductor
    dmin = g.minimal_discriminant
    v2n = valuation(n * n + 1, 2)
    s = g.at(2).v_delta_min - v2n
    t = g.at(3).v_delta_min
    nlogn = N * log_int(N)
    ratios = {ld.p: ld.v_delta_min / (kappa * nlogn) for ld in g.local}
    return LemmaProdReport(
        n=n,
        nu_product=nu,
        rad=rad,
        rad8=rad8,
        ratio=nu / rad8,
        holds=nu <= K * rad8,
        K=K,
        conductor=N,
        min_discriminant=dmin,
        s=s,
        t=t,
        local=g.local,
        kappa=kappa,
        exponent_ratios=ratios,
        exponent_holds=all(r <= 1 for r in ratios.values()),
    )


# --- brute-force reduction oracle ---------------------------------------------


@lru_cache(maxsize=1 << 14)
def _count_mod_p(ainvs_mod_p: tuple[int, ...], p: int) -> tuple[bool, int]:
    """(has a singular point, number of projective points) over F_p, by enumeration."""
    a1, a2, a3, a4, a6 = ainvs_mod_p
    xs = np.arange(p, dtype=np.int64)[:, None]
    ys = np.arange(p, dtype=np.int64)[None, :]
    F = (ys * ys + a1 * xs * ys + a3 * ys - (xs * xs % p * xs + a2 * xs * xs + a4 * xs + a6)) % p
    Fx = (a1 * ys - 3 * xs * xs - 2 * a2 * xs - a4) % p
    Fy = (2 * ys + a1 * xs + a3) % p
    on_curve = F == 0
    singular = bool(np.any(on_curve & (Fx == 0) & (Fy == 0)))
    return singular, int(on_curve.sum()) + 1  # one point at infinity, always smooth


def reduction_kind_by_count(m: CurveModel, p: int) -> str:
    """Reduction type at an odd prime from a point count of the curve mod p.

    A singular plane cubic has p + 1 points when cuspidal (additive) and p or
    p + 2 when nodal (split or non-split multiplicative). Only meaningful for
    a model that is minimal at p; intended for small p.
    """
    if p < 3:
        raise ValueError("counting oracle needs an odd prime")
    singular, count = _count_mod_p(tuple(a % p for a in m.ainvs), p)
    if not singular:
        return "good"
    return "additive" if count == p + 1 else "multiplicative"
