"""
ABC triples: enumeration and ingestion, per-triple statistics, the rational
threshold decomposition of b/c, and the checks behind the subexponential
ABC bounds and the corollary on P(xy(x + y)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, TextIO

import numpy as np

from .bounds import BoundConstants, BoundReport, DomainError, kappa_point
from .gaussian import MultiplicativeDecomposition
from .intarith import (
    Factorization,
    SmallIntTable,
    exponent_product,
    factorize,
    largest_prime_factor,
    log_int,
    radical,
)

__all__ = [
    "AbcTriple",
    "TripleReport",
    "Rejection",
    "TripleFormatError",
    "Thm3Reports",
    "enumerate_triples",
    "parse_triples",
    "triple_report",
    "shimura_abc_check",
    "decompose_rational",
    "thm3_case_reports",
    "required_kappa_case2",
    "corollary4_fit",
    "fit_abc_case2",
    "TripleSweepStats",
    "triple_sweep_stats",
    "CSV_HEADER",
]

EE = math.exp(math.e)
CSV_HEADER = ("a", "b", "c", "R", "q", "quality", "nu_product", "eta", "case1_ratio", "case2_ratio")


@dataclass(frozen=True, order=True, init=False, repr=False)
class AbcTriple:
    """Coprime positive a + b = c with a <= b."""

    c: int
    a: int
    b: int

    def __init__(self, a: int, b: int, c: int):
        if min(a, b, c) < 1:
            raise ValueError(f"non-positive entry in ({a}, {b}, {c})")
        if a + b != c:
            raise ValueError(f"{a} + {b} != {c}")
        if gcd(a, b) != 1:
            raise ValueError(f"gcd({a}, {b}) = {gcd(a, b)}")
        if a > b:
            a, b = b, a
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    def __repr__(self):
        return f"AbcTriple({self.a}, {self.b}, {self.c})"


@dataclass(frozen=True)
class Rejection:
    line_no: int
    text: str
    reason: str


class TripleFormatError(ValueError):
    def __init__(self, line_no: int, text: str, reason: str):
        super().__init__(f"line {line_no}: {reason}: {text!r}")
        self.line_no = line_no


def enumerate_triples(c_max: int, c_min: int = 2) -> Iterator[AbcTriple]:
    """Every normalized coprime triple with c_min <= c <= c_max, ordered by (c, a)."""
    for c in range(max(c_min, 2), c_max + 1):
        for a in range(1, c // 2 + 1):
            if gcd(a, c) == 1:
                yield AbcTriple(a, c - a, c)


def parse_triples(source: str | TextIO | Iterable[str]) -> Iterator[AbcTriple | Rejection]:
    """Read "a b c" lines; '#' starts a comment and blank lines are skipped.

    Triples breaking coprimality or a + b = c come back as Rejection records;
    lines that are not three integers raise TripleFormatError.
    """
    lines = source.splitlines() if isinstance(source, str) else source
    for line_no, raw in enumerate(lines, 1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != 3:
            raise TripleFormatError(line_no, raw.rstrip("\n"), f"expected 3 integers, found {len(parts)} fields")
        try:
            a, b, c = (int(x, 10) for x in parts)
        except ValueError:
            raise TripleFormatError(line_no, raw.rstrip("\n"), "not a base-10 integer") from None
        try:
            yield AbcTriple(a, b, c)
        except ValueError as exc:
            yield Rejection(line_no, raw.rstrip("\n"), str(exc))


@dataclass(frozen=True)
class TripleReport:
    a: int
    b: int
    c: int
    R: int
    q: int
    quality: float
    nu_product: int
    eta: float
    x: int  # q-attaining entry, signed so that x + y + z = 0
    y: int
    z: int
    p0: int | None  # prime of maximal valuation in x, smallest on ties
    nu_p0: int
    log_c: float
    log_R: float


def triple_report(t: AbcTriple, facts: tuple[Factorization, Factorization, Factorization] | None = None) -> TripleReport:
    fa, fb, fc = facts if facts is not None else (factorize(t.a), factorize(t.b), factorize(t.c))
    fabc = fa * fb * fc
    R = radical(fabc)
    lps = [largest_prime_factor(f) for f in (fa, fb, fc)]
    q = min(lps)
    k = lps.index(q)
    signed = (t.a, t.b, -t.c)
    x = signed[k]
    y, z = (v for i, v in enumerate(signed) if i != k)
    fx = (fa, fb, fc)[k]
    if fx.factors:
        nu_p0 = max(e for _, e in fx.factors)
        p0 = min(p for p, e in fx.factors if e == nu_p0)
    else:
        p0, nu_p0 = None, 0
    log_c = log_int(t.c)
    log_R = log_int(R)
    return TripleReport(
        a=t.a,
        b=t.b,
        c=t.c,
        R=R,
        q=q,
        quality=log_c / log_R,
        nu_product=exponent_product(fabc),
        eta=1.0 - log_int(t.a) / log_c,
        x=x,
        y=y,
        z=z,
        p0=p0,
        nu_p0=nu_p0,
        log_c=log_c,
        log_R=log_R,
    )


def shimura_abc_check(rep: TripleReport, exponent: float = 3) -> BoundReport:
    """prod v_p(abc) <= rad(abc)^exponent with unit constant."""
    if not exponent > 0:
        raise ValueError("exponent must be positive")
    nu, R = rep.nu_product, rep.R
    if float(exponent).is_integer():
        rhs_exact = R ** int(exponent)
        holds = nu <= rhs_exact
        try:
            rhs = float(rhs_exact)
        except OverflowError:
            rhs = math.inf
    else:
        rhs = math.exp(exponent * rep.log_R) if exponent * rep.log_R < 700 else math.inf
        holds = math.log(nu) <= exponent * rep.log_R
    ratio = math.exp(math.log(nu) - exponent * rep.log_R)
    return BoundReport(float(nu), rhs, holds, ratio, {"a": rep.a, "b": rep.b, "c": rep.c, "exponent": exponent})


def decompose_rational(t: AbcTriple, B: float, facts: tuple[Factorization, Factorization] | None = None) -> MultiplicativeDecomposition:
    """Split xi = b/c over the primes of bc by |exponent| against B."""
    if not B > 0:
        raise ValueError("threshold must be positive")
    fb, fc = facts if facts is not None else (factorize(t.b), factorize(t.c))
    exps = sorted([(p, e) for p, e in fb.factors] + [(p, -e) for p, e in fc.factors])
    gens = tuple(Fraction(p) for p, _ in exps)
    small, large, large_idx = [], [], []
    for j, (p, e) in enumerate(exps):
        if abs(e) > B:
            large.append((gens[j], e))
            large_idx.append(j)
        else:
            small.append((j, e))
    return MultiplicativeDecomposition(
        target=Fraction(t.b, t.c),
        w=Fraction(1),
        generators=gens,
        primes=tuple(p for p, _ in exps),
        xi0_exponents=tuple(small),
        large_part=tuple(large),
        large_indices=tuple(large_idx),
        m=1 + len(large),
        threshold=B,
        field="Q",
    )


@dataclass(frozen=True)
class Thm3Reports:
    case1: BoundReport
    case2: BoundReport
    anchor: BoundReport | None  # None outside the regime c^(1/2) <= a
    in_regime: bool


def _subexp_scale(log_R: float) -> float:
    """sqrt(log R * log_2 R)."""
    return math.sqrt(log_R * math.log(log_R))


def thm3_case_reports(rep: TripleReport, c: BoundConstants = BoundConstants()) -> Thm3Reports:
    """Both subexponential ABC bounds at constant c.kappa, plus the valuation anchor."""
    if rep.R <= EE:
        raise DomainError(f"R = {rep.R} <= e^e: iterated logs undefined")
    s = _subexp_scale(rep.log_R)
    growth = math.exp(c.kappa * s)
    inputs = {"a": rep.a, "b": rep.b, "c": rep.c, "kappa": c.kappa}
    case1 = BoundReport.compare(rep.log_c, growth / rep.eta, eta=rep.eta, **inputs)
    case2 = BoundReport.compare(rep.log_c, rep.q * growth, q=rep.q, **inputs)
    in_regime = rep.a * rep.a >= rep.c
    anchor = None
    if in_regime:
        lhs = rep.log_c / (2 * rep.log_R)
        anchor = BoundReport.compare(lhs, rep.nu_p0, p0=rep.p0, x=rep.x)
        if rep.nu_p0 > 2 * rep.nu_p0 * math.log(rep.p0):
            anchor = BoundReport(anchor.lhs, anchor.rhs, False, anchor.ratio, anchor.inputs)
    return Thm3Reports(case1, case2, anchor, in_regime)


def required_kappa_case2(rep: TripleReport) -> float:
    """Smallest kappa with log c <= q exp(kappa sqrt(log R log_2 R))."""
    if rep.R <= EE:
        raise DomainError(f"R = {rep.R} <= e^e")
    return math.log(rep.log_c / rep.q) / _subexp_scale(rep.log_R)


def fit_abc_case2(corpus: Iterable[AbcTriple]) -> float:
    """Smallest kappa making the q-bound hold on every triple with R > e^e."""
    best = -math.inf
    for t in corpus:
        rep = triple_report(t)
        if rep.R > EE:
            best = max(best, required_kappa_case2(rep))
    if best == -math.inf:
        raise ValueError("no triple with R > e^e in corpus")
    return best


def corollary4_fit(corpus: Iterable[AbcTriple], y_min: int = 16) -> float:
    """Infimum of P(abc) log_3 b / (log_2 b)^2 over the corpus, with y = b."""
    if y_min < 16:
        raise DomainError("y_min must be at least 16")
    best = math.inf
    seen = False
    for t in corpus:
        if t.b < y_min:
            raise DomainError(f"b = {t.b} below y_min = {y_min}")
        seen = True
        P = max(largest_prime_factor(factorize(v)) for v in (t.a, t.b, t.c))
        best = min(best, kappa_point(t.b, P))
    if not seen:
        raise ValueError("empty corpus")
    return best


@dataclass(frozen=True)
class TripleSweepStats:
    c_min: int
    c_max: int
    count: int
    shimura_exponent: float
    shimura_max_ratio: float
    shimura_argmax: tuple[int, int, int]
    shimura_violations: int
    cor4_kappa: float
    cor4_count: int
    case2_kappa: float
    case2_count: int


def triple_sweep_stats(c_max: int, c_min: int = 2, y_min: int = 16, exponent: int = 3) -> TripleSweepStats:
    """Vectorised statistics over every coprime triple with c in [c_min, c_max].

    Uses per-integer tables, relying on rad(abc) = rad(a) rad(b) rad(c) and
    the exponent product being multiplicative over coprime parts.
    """
    tab = SmallIntTable(c_max)
    count = 0
    worst, arg, violations = -math.inf, (0, 0, 0), 0
    cor4, cor4_n = math.inf, 0
    case2, case2_n = -math.inf, 0
    cap = 2_000_000  # cap^3 < 2^63; larger R exceed any exponent product here
    for c in range(max(c_min, 2), c_max + 1):
        a = np.arange(1, c // 2 + 1, dtype=np.int64)
        a = a[np.gcd(a, c) == 1]
        b = c - a
        count += a.size
        nu = tab.nu_prod[a] * tab.nu_prod[b] * tab.nu_prod[c]
        log_R = tab.log_rad[a] + tab.log_rad[b] + tab.log_rad[c]
        R_capped = np.minimum(tab.rad[a] * tab.rad[b] * tab.rad[c], cap)
        violations += int(np.count_nonzero(nu > R_capped**exponent))
        ratio = np.exp(np.log(nu) - exponent * log_R)
        k = int(np.argmax(ratio))
        if ratio[k] > worst:
            worst, arg = float(ratio[k]), (int(a[k]), int(b[k]), c)
        log_c = math.log(c)
        big = b >= y_min
        if big.any():
            bb = b[big].astype(np.float64)
            l2 = np.log(np.log(bb))
            P = np.maximum(np.maximum(tab.lpf[a[big]], tab.lpf[b[big]]), tab.lpf[c])
            cor4 = min(cor4, float(np.min(P * np.log(l2) / (l2 * l2))))
            cor4_n += int(big.sum())
        ok = log_R > math.e
        if ok.any():
            lr = log_R[ok]
            q = np.minimum(np.minimum(tab.lpf[a[ok]], tab.lpf[b[ok]]), tab.lpf[c])
            need = np.log(log_c / q) / np.sqrt(lr * np.log(lr))
            case2 = max(case2, float(np.max(need)))
            case2_n += int(ok.sum())
    return TripleSweepStats(
        c_min=c_min,
        c_max=c_max,
        count=count,
        shimura_exponent=exponent,
        shimura_max_ratio=worst,
        shimura_argmax=arg,
        shimura_violations=violations,
        cor4_kappa=cor4,
        cor4_count=cor4_n,
        case2_kappa=case2,
        case2_count=case2_n,
    )
