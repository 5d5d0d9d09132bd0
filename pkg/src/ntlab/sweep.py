"""
Batch sweeps over n with deterministic, worker-count independent output,
plus the range fits of the growth constants.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Iterator

from .abclab import TripleSweepStats, triple_sweep_stats
from .bounds import kappa_point, threshold_B
from .gaussian import decompose_xi, factor_n_plus_i
from .intarith import (
    Factorization,
    exponent_product,
    factor_n2p1_range,
    largest_prime_factor,
    log_int,
    radical,
)

__all__ = [
    "InvariantViolation",
    "SweepRecord",
    "sweep_record",
    "sweep_chunk",
    "iter_sweep",
    "chunk_ranges",
    "read_records",
    "fit_from_records",
    "fit_n_range",
    "fit_triple_range",
    "MIN_SWEEP_N",
]

MIN_SWEEP_N = 16
DEFAULT_CHUNK = 2000


class InvariantViolation(AssertionError):
    """A structural identity failed on computed data; signals a bug, never a counterexample."""


@dataclass(frozen=True)
class SweepRecord:
    n: int
    p_max: int
    rad: int
    nu_product: int
    m: int
    thm1_ratio: float
    thm2_ratio: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "SweepRecord":
        d = json.loads(line)
        names = [f.name for f in fields(cls)]
        if sorted(d) != sorted(names):
            raise ValueError(f"sweep record keys {sorted(d)} != {sorted(names)}")
        rec = cls(**d)
        for name in ("n", "p_max", "rad", "nu_product", "m"):
            if not isinstance(getattr(rec, name), int):
                raise ValueError(f"field {name} must be an integer")
        return rec

    def csv_row(self) -> list:
        return [getattr(self, f.name) for f in fields(self)]

    @classmethod
    def csv_header(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def _check(cond: bool, n: int, what: str) -> None:
    if not cond:
        raise InvariantViolation(f"n = {n}: {what}")


def sweep_record(n: int, fact: Factorization) -> SweepRecord:
    _check(fact.value == n * n + 1 and fact.expand() == fact.value, n, "factorization does not reproduce n^2+1")
    for p, e in fact.factors:
        _check(p % 4 == 1 or (p == 2 and e == 1), n, f"prime {p}^{e} cannot divide n^2+1")
    rad = radical(fact)
    p_max = largest_prime_factor(fact)
    nu = exponent_product(fact)
    log_rad = log_int(rad)
    _check(nu <= rad**8, n, "exponent product exceeds rad^8")
    _check(4 * p_max >= log_rad, n, "largest prime below log(rad)/4")
    gf = factor_n_plus_i(n, fact)
    dec = decompose_xi(gf, threshold_B(rad))
    return SweepRecord(
        n=n,
        p_max=p_max,
        rad=rad,
        nu_product=nu,
        m=dec.m,
        thm1_ratio=kappa_point(n, p_max),
        thm2_ratio=kappa_point(n, log_rad),
    )


def sweep_chunk(bounds: tuple[int, int]) -> list[SweepRecord]:
    lo, hi = bounds
    return [sweep_record(lo + k, f) for k, f in enumerate(factor_n2p1_range(lo, hi))]


def chunk_ranges(lo: int, hi: int, size: int = DEFAULT_CHUNK) -> list[tuple[int, int]]:
    return [(s, min(s + size - 1, hi)) for s in range(lo, hi + 1, size)]


def iter_sweep(lo: int, hi: int, jobs: int = 1, chunk: int = DEFAULT_CHUNK) -> Iterator[SweepRecord]:
    """Records for lo <= n <= hi in ascending n; identical for any ``jobs``."""
    if lo < MIN_SWEEP_N:
        raise ValueError(f"sweeps start at n >= {MIN_SWEEP_N} (log_3 n must be defined)")
    if hi < lo:
        raise ValueError(f"empty range [{lo}, {hi}]")
    parts = chunk_ranges(lo, hi, chunk)
    if jobs <= 1:
        for part in parts:
            yield from sweep_chunk(part)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map() returns results in submission order, which fixes the merge order
        for recs in pool.map(sweep_chunk, parts):
            yield from recs


def read_records(lines: Iterable[str]) -> Iterator[SweepRecord]:
    for k, line in enumerate(lines, 1):
        if line.strip():
            try:
                yield SweepRecord.from_json(line)
            except (ValueError, TypeError) as exc:
                raise ValueError(f"line {k}: {exc}") from None


def fit_from_records(records: Iterable[SweepRecord], shape: str, n_min: int = 100) -> float:
    """Minimum stored per-n ratio over records with n >= n_min."""
    key = {"thm1": "thm1_ratio", "thm2": "thm2_ratio"}[shape]
    floor = max(n_min, MIN_SWEEP_N)
    vals = [getattr(r, key) for r in records if r.n >= floor]
    if not vals:
        raise ValueError("no records at or above the fitting floor")
    return min(vals)


def fit_n_range(shape: str, lo: int, hi: int, n_min: int = 100, jobs: int = 1) -> float:
    lo = max(lo, n_min, MIN_SWEEP_N)
    return fit_from_records(iter_sweep(lo, hi, jobs), shape, n_min)


def _triple_part(args: tuple[int, int, int]) -> TripleSweepStats:
    lo, hi, y_min = args
    return triple_sweep_stats(hi, c_min=lo, y_min=y_min)


def fit_triple_range(shape: str, lo: int, hi: int, y_min: int = 16, jobs: int = 1) -> float:
    """cor4: infimum of P(abc) log_3 b/(log_2 b)^2; abc-case2: supremum of the kappa each triple needs."""
    if shape not in ("cor4", "abc-case2"):
        raise ValueError(f"unknown triple fit {shape!r}")
    parts = [(a, b, y_min) for a, b in chunk_ranges(max(lo, 2), hi, max(1, (hi - lo) // max(jobs, 1) + 1))]
    if jobs <= 1:
        stats = [_triple_part(p) for p in parts]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            stats = list(pool.map(_triple_part, parts))
    if shape == "cor4":
        if not any(s.cor4_count for s in stats):
            raise ValueError("no triple with b >= y_min in range")
        return min(s.cor4_kappa for s in stats)
    if not any(s.case2_count for s in stats):
        raise ValueError("no triple with R > e^e in range")
    return max(s.case2_kappa for s in stats)

