"""Command-line entry point: ``ntlab <command> ...``.

Exit codes: 0 success, 1 invariant violation, 2 usage or input error,
3 capacity limit (sieve ceiling or factorization budget).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path
from typing import Any, Callable, TextIO

from . import abclab, bounds, frey, gaussian, intarith, sweep
from .abclab import AbcTriple, Rejection, TripleFormatError
from .bounds import BoundConstants, DomainError
from .intarith import CapacityError
from .sweep import InvariantViolation

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3


class UsageError(ValueError):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- configuration ------------------------------------------------------------


def parse_assignment(text: str) -> tuple[str, str]:
    key, sep, value = text.partition("=")
    if not sep or not key.strip() or not value.strip():
        raise UsageError(f"expected key=value, got {text!r}")
    return key.strip(), value.strip()


def read_config(path: str | Path) -> dict[str, float]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for k, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                key, value = parse_assignment(line)
                out[key] = float(value)
            except ValueError:
                raise UsageError(f"{path}:{k}: expected 'key = number', got {line!r}") from None
    return out


def load_constants(config: str | None, overrides: list[str]) -> BoundConstants:
    values = read_config(config) if config else {}
    for item in overrides or ():
        key, value = parse_assignment(item)
        try:
            values[key] = float(value)
        except ValueError:
            raise UsageError(f"constant {key}: {value!r} is not a number") from None
    try:
        return BoundConstants().updated(**values)
    except KeyError as exc:
        raise UsageError(f"{exc.args[0]}; known: {', '.join(BoundConstants.names())}") from None


# --- output helpers -----------------------------------------------------------


def _jsonable(x: Any) -> Any:
    if isinstance(x, (gaussian.GaussianInt, gaussian.QiNumber)):
        return str(x)
    if hasattr(x, "numerator") and not isinstance(x, (int, float)):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def emit(payload: dict, fmt: str, out: TextIO, text: Callable[[dict], str], rows: list[list] | None = None):
    if fmt == "json":
        out.write(json.dumps(_jsonable(payload)) + "\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        if rows is None:
            flat = {k: v for k, v in payload.items() if not isinstance(v, (list, dict, tuple))}
            rows = [list(flat), list(flat.values())]
        for r in rows:
            w.writerow(_jsonable(r))
    else:
        out.write(text(payload) + "\n")


def _fmt_float(x: float) -> str:
    return f"{x:.6g}" if math.isfinite(x) else str(x)


# --- commands -----------------------------------------------------------------


def cmd_factor(args, consts, out):
    n = _parse_int(args.n, "n")
    f = intarith.factorize(n)
    payload = {
        "n": n,
        "factors": [list(pe) for pe in f.factors],
        "rad": intarith.radical(f),
        "largest_prime": intarith.largest_prime_factor(f),
        "nu_product": intarith.exponent_product(f),
    }
    rows = [["p", "e"]] + [list(pe) for pe in f.factors]
    emit(payload, args.format, out, lambda d: f"{n} = {f}", rows)
    return EXIT_OK


def cmd_theta(args, consts, out):
    x = float(args.x)
    th = intarith.chebyshev_theta(x)
    payload = {"x": args.x, "theta": th, "ratio_to_x": th / x if x > 0 else 0.0}
    emit(payload, args.format, out, lambda d: f"theta({args.x}) = {th!r}  (theta/x = {_fmt_float(d['ratio_to_x'])})")
    return EXIT_OK


def _decomposition_payload(dec: gaussian.MultiplicativeDecomposition) -> dict:
    return {
        "threshold": dec.threshold,
        "w": dec.w,
        "xi0": dec.xi0(),
        "xi0_exponents": [[dec.primes[j], e] for j, e in dec.xi0_exponents],
        "large_part": [[str(x), e, dec.primes[j]] for (x, e), j in zip(dec.large_part, dec.large_indices)],
        "m": dec.m,
        "heights": dec.generator_heights(),
        "exact": dec.reconstruct() == dec.target,
    }


def cmd_gaussian(args, consts, out):
    n = _parse_int(args.n, "n")
    fact = intarith.factorize(n * n + 1)
    gf = gaussian.factor_n_plus_i(n, fact)
    if gf.expand() != gaussian.GaussianInt(n, 1):
        raise InvariantViolation(f"factorization of {n}+i does not reconstruct")
    rad = intarith.radical(fact)
    if args.threshold == "auto":
        B = bounds.threshold_B(rad)
    else:
        try:
            B = float(args.threshold)
        except ValueError:
            raise UsageError(f"--threshold expects a number or 'auto', got {args.threshold!r}") from None
    dec = gaussian.decompose_xi(gf, B)
    if not dec.reconstruct() == dec.target:
        raise InvariantViolation(f"decomposition of ({n}-i)/({n}+i) does not reconstruct")
    payload = {
        "n": n,
        "n2p1": str(fact),
        "unit": gf.unit,
        "factors": [[str(g), e] for g, e in gf.factors],
        "rad": rad,
        "decomposition": _decomposition_payload(dec),
    }

    def text(d):
        dd = d["decomposition"]
        large = " ".join(f"({x})^{e} [p={p}]" for x, e, p in dd["large_part"]) or "none"
        hs = ", ".join(_fmt_float(h) for h in dd["heights"])
        return "\n".join(
            [
                f"n^2+1 = {n * n + 1} = {fact}",
                f"{n}+i = {gf}",
                f"unit: {gf.unit}",
                f"threshold B = {_fmt_float(B)}" + (" (auto)" if args.threshold == "auto" else ""),
                f"w = {dd['w']}, xi0 = {dd['xi0']}",
                f"large part: {large}",
                f"m = {dd['m']}; heights (xi0, large generators): {hs}",
            ]
        )

    rows = [["n", "unit", "threshold", "m", "xi0"], [n, gf.unit, B, dec.m, dec.xi0()]]
    emit(payload, args.format, out, text, rows)
    return EXIT_OK


def _local_rows(local) -> list[list]:
    return [[ld.p, ld.kodaira, ld.reduction, ld.f, ld.v_delta, ld.v_delta_min] for ld in local]


_LOCAL_HEADER = ["p", "kodaira", "reduction", "f", "v_disc", "v_disc_min"]


def _local_text(local) -> str:
    lines = ["  p  kodaira  reduction       f  v(disc)  v(disc_min)"]
    for p, kod, red, f, vd, vm in _local_rows(local):
        lines.append(f"  {p:<3}{kod:<9}{red:<16}{f:<3}{vd:<9}{vm}")
    return "\n".join(lines)


def cmd_curve(args, consts, out):
    n = _parse_int(args.n, "n")
    fact = intarith.factorize(n * n + 1)
    rep = frey.lemma_prod_report(n, K=consts.K, kappa=consts.kappa, fact=fact)
    E = frey.curve_for(n)
    payload = {
        "n": n,
        "ainvs": list(E.ainvs),
        "discriminant": E.discriminant,
        "min_discriminant": rep.min_discriminant,
        "conductor": rep.conductor,
        "s": rep.s,
        "t": rep.t,
        "nu_product": rep.nu_product,
        "rad": rep.rad,
        "nu_over_rad8": rep.ratio,
        "exponent_bound_holds": rep.holds,
        "local": [dict(zip(_LOCAL_HEADER, r)) for r in _local_rows(rep.local)],
    }

    def text(d):
        return "\n".join(
            [
                f"E: y^2 = x^3 + 3x + {2 * n}",
                f"discriminant = {E.discriminant}",
                f"minimal discriminant = {rep.min_discriminant} = -2^{rep.s} * 3^{rep.t} * (n^2+1)",
                f"conductor = {rep.conductor}",
                f"exponent product {rep.nu_product} vs rad^8: ratio {_fmt_float(rep.ratio)}"
                + (" (holds)" if rep.holds else " (FAILS)"),
                _local_text(rep.local),
            ]
        )

    emit(payload, args.format, out, text, [_LOCAL_HEADER] + _local_rows(rep.local))
    return EXIT_OK


def cmd_frey(args, consts, out):
    a, b, c = (_parse_int(v, name) for v, name in ((args.a, "a"), (args.b, "b"), (args.c, "c")))
    E = frey.frey_curve(a, b, c)
    g = frey.local_data(E)
    payload = {
        "a": a,
        "b": b,
        "c": c,
        "ainvs": list(E.ainvs),
        "discriminant": E.discriminant,
        "min_discriminant": g.minimal_discriminant,
        "conductor": g.conductor,
        "local": [dict(zip(_LOCAL_HEADER, r)) for r in _local_rows(g.local)],
    }

    def text(d):
        return "\n".join(
            [
                f"E: y^2 = x(x - {a})(x + {b})  ainvs {list(E.ainvs)}",
                f"discriminant = {E.discriminant}",
                f"minimal discriminant = {g.minimal_discriminant}",
                f"conductor = {g.conductor}",
                _local_text(g.local),
            ]
        )

    emit(payload, args.format, out, text, [_LOCAL_HEADER] + _local_rows(g.local))
    return EXIT_OK


def cmd_sweep(args, consts, out):
    lo, hi = args.lo, args.hi
    if lo < sweep.MIN_SWEEP_N:
        raise UsageError(f"--from must be at least {sweep.MIN_SWEEP_N}")
    if hi < lo:
        raise UsageError("--to must not be below --from")
    count = 0
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        if args.format == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(sweep.SweepRecord.csv_header())
            for rec in sweep.iter_sweep(lo, hi, args.jobs, args.chunk):
                w.writerow(rec.csv_row())
                count += 1
        else:
            for rec in sweep.iter_sweep(lo, hi, args.jobs, args.chunk):
                fh.write(rec.to_json() + "\n")
                count += 1
    print(f"wrote {count} records for n in [{lo}, {hi}] to {args.out}", file=out)
    return EXIT_OK


def _ratio_or_blank(r: bounds.BoundReport | None) -> str | float:
    return "" if r is None else r.ratio


def cmd_abc_scan(args, consts, out):
    rejected = 0
    written = 0
    worst = 0.0
    with open(args.input, encoding="utf-8") as src, open(args.out, "w", encoding="utf-8", newline="") as dst:
        w = csv.writer(dst, lineterminator="\n")
        w.writerow(abclab.CSV_HEADER)
        for item in abclab.parse_triples(src):
            if isinstance(item, Rejection):
                rejected += 1
                print(f"line {item.line_no}: rejected {item.text.strip()!r}: {item.reason}", file=sys.stderr)
                continue
            rep = abclab.triple_report(item)
            sh = abclab.shimura_abc_check(rep, 3)
            worst = max(worst, sh.ratio)
            if not sh.holds:
                raise InvariantViolation(
                    f"exponent product {rep.nu_product} exceeds rad^3 for triple ({rep.a}, {rep.b}, {rep.c})"
                )
            c1 = c2 = None
            if rep.R > abclab.EE:
                reps = abclab.thm3_case_reports(rep, consts)
                c1, c2 = reps.case1, reps.case2
            w.writerow(
                [rep.a, rep.b, rep.c, rep.R, rep.q, rep.quality, rep.nu_product, rep.eta,
                 _ratio_or_blank(c1), _ratio_or_blank(c2)]
            )
            written += 1
    print(
        f"scanned {written} triples ({rejected} rejected); max nu_product/R^3 = {_fmt_float(worst)}; wrote {args.out}",
        file=out,
    )
    return EXIT_OK


def cmd_abc_enumerate(args, consts, out):
    if args.cmax < 2:
        raise UsageError("--cmax must be at least 2")
    count = 0
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(f"# coprime a + b = c with a <= b, c <= {args.cmax}\n")
        for t in abclab.enumerate_triples(args.cmax):
            fh.write(f"{t.a} {t.b} {t.c}\n")
            count += 1
    print(f"wrote {count} triples to {args.out}", file=out)
    return EXIT_OK


def fit_value(shape: str, lo: int, hi: int, nmin: int | None, jobs: int, input_path: str | None) -> float:
    if hi < lo:
        raise UsageError("--to must not be below --from")
    if shape in ("thm1", "thm2"):
        nmin = 100 if nmin is None else nmin
        if input_path:
            with open(input_path, encoding="utf-8") as fh:
                recs = [r for r in sweep.read_records(fh) if lo <= r.n <= hi]
            return sweep.fit_from_records(recs, shape, nmin)
        return sweep.fit_n_range(shape, lo, hi, nmin, jobs)
    nmin = 16 if nmin is None else nmin
    if input_path:
        with open(input_path, encoding="utf-8") as fh:
            corpus = [t for t in abclab.parse_triples(fh) if isinstance(t, AbcTriple) and lo <= t.c <= hi]
        if shape == "cor4":
            return abclab.corollary4_fit([t for t in corpus if t.b >= nmin], nmin)
        return abclab.fit_abc_case2(corpus)
    return sweep.fit_triple_range(shape, lo, hi, nmin, jobs)


def cmd_fit(args, consts, out):
    k = fit_value(args.shape, args.lo, args.hi, args.nmin, args.jobs, args.input)
    payload = {"shape": args.shape, "kappa": k, "from": args.lo, "to": args.hi, "nmin": args.nmin}
    emit(payload, args.format, out, lambda d: f"{args.shape}: kappa_hat = {k!r} over [{args.lo}, {args.hi}]")
    return EXIT_OK


def _num(kw: dict, key: str, cast=float):
    if key not in kw:
        raise UsageError(f"missing argument {key}=...")
    try:
        return cast(kw.pop(key))
    except ValueError:
        raise UsageError(f"argument {key} is not a valid {cast.__name__}") from None


def _heights(kw: dict) -> list[float]:
    raw = kw.pop("heights", None)
    if raw is None:
        raise UsageError("missing argument heights=h1,h2,...")
    try:
        return [float(h) for h in raw.split(",")]
    except ValueError:
        raise UsageError(f"heights must be comma-separated numbers, got {raw!r}") from None


def _big(v: str):
    try:
        return int(v)
    except ValueError:
        return float(v)


BOUND_EXPRS: dict[str, Callable[[dict, BoundConstants], Any]] = {
    "threshold_B": lambda kw, c: bounds.threshold_B(_num(kw, "R", _big)),
    "eg_arch": lambda kw, c: bounds.eg_arch_rhs(_num(kw, "m", int), _heights(kw), _num(kw, "h_xi"), c),
    "eg_nonarch": lambda kw, c: bounds.eg_nonarch_rhs(
        _num(kw, "m", int), _heights(kw), _num(kw, "h_xi"), _num(kw, "norm_p", int), c
    ),
    "amgm": lambda kw, c: bounds.amgm_product_bound(_num(kw, "logR"), _num(kw, "m", int)),
    "chain": lambda kw, c: bounds.chain_rhs(_num(kw, "logR"), _num(kw, "B"), _num(kw, "m", int), c),
    "chain_m1": lambda kw, c: bounds.chain_rhs_m1(_num(kw, "logR"), _num(kw, "B"), c),
    "calculus": lambda kw, c: bounds.calculus_check(_num(kw, "A"), int(kw.pop("grid", 10_000))),
    "iterated_log": lambda kw, c: bounds.iterated_log(_num(kw, "x", _big), _num(kw, "k", int)),
    "growth_shape": lambda kw, c: bounds.growth_shape(_num(kw, "n", _big)),
    "kappa_point": lambda kw, c: bounds.kappa_point(_num(kw, "n", _big), _num(kw, "lhs")),
}


def cmd_bounds_eval(args, consts, out):
    fn = BOUND_EXPRS.get(args.expr)
    if fn is None:
        raise UsageError(f"unknown expression {args.expr!r}; known: {', '.join(BOUND_EXPRS)}")
    kw = dict(parse_assignment(a) for a in args.args)
    given = dict(kw)
    value = fn(kw, consts)
    if kw:
        raise UsageError(f"unused argument(s) for {args.expr}: {', '.join(sorted(kw))}")
    payload = {"expr": args.expr, "args": given, "value": value, "constants": consts.as_dict()}
    emit(payload, args.format, out, lambda d: f"{args.expr} = {value!r}",
         [["expr", "value"], [args.expr, value]])
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def _parse_int(text: str, name: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {text!r}") from None
    if v < 1:
        raise UsageError(f"{name} must be positive")
    return v


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = {"default": argparse.SUPPRESS} if suppress else {}
    p.add_argument("--config", metavar="FILE", help="flat 'key = value' file of bound constants",
                   **({"default": None} if not suppress else d))
    p.add_argument("--constants", metavar="KEY=VALUE", action="append",
                   help="override a bound constant (repeatable)", **({"default": []} if not suppress else d))
    p.add_argument("--format", choices=("json", "csv", "text"),
                   **({"default": "text"} if not suppress else d))


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="ntlab", description="Prime factors of n^2+1, curve data and ABC-triple statistics.")
    _add_globals(parser, suppress=False)
    common = _ArgumentParser(add_help=False)
    _add_globals(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    add("factor", cmd_factor, "factor a positive integer").add_argument("n")
    add("theta", cmd_theta, "Chebyshev theta(x)").add_argument("x")
    p = add("gaussian", cmd_gaussian, "factor n+i and decompose (n-i)/(n+i)")
    p.add_argument("n")
    p.add_argument("--threshold", default="auto", help="exponent threshold B, or 'auto' for B(rad(n^2+1))")
    add("curve", cmd_curve, "local data of y^2 = x^3 + 3x + 2n").add_argument("n")
    p = add("frey", cmd_frey, "local data of the curve attached to a + b = c")
    for name in ("a", "b", "c"):
        p.add_argument(name)

    p = add("sweep", cmd_sweep, "per-n records for n in a range")
    p.add_argument("--from", dest="lo", type=int, required=True)
    p.add_argument("--to", dest="hi", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--chunk", type=int, default=sweep.DEFAULT_CHUNK, help=argparse.SUPPRESS)
    p.add_argument("--out", required=True)

    abc = sub.add_parser("abc", help="ABC triples")
    abc_sub = abc.add_subparsers(dest="abc_command", required=True, parser_class=_ArgumentParser)
    p = abc_sub.add_parser("scan", parents=[common], help="report on a list of triples")
    p.set_defaults(func=cmd_abc_scan)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p = abc_sub.add_parser("enumerate", parents=[common], help="write every coprime triple up to c_max")
    p.set_defaults(func=cmd_abc_enumerate)
    p.add_argument("--cmax", type=int, required=True)
    p.add_argument("--out", required=True)

    p = add("fit", cmd_fit, "fit the leading growth constant over a range")
    p.add_argument("shape", choices=("thm1", "thm2", "cor4", "abc-case2"))
    p.add_argument("--from", dest="lo", type=int, required=True)
    p.add_argument("--to", dest="hi", type=int, required=True)
    p.add_argument("--nmin", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--input", default=None, help="sweep JSONL (thm1/thm2) or triple list (cor4/abc-case2)")

    bnd = sub.add_parser("bounds", help="evaluate bound expressions")
    bnd_sub = bnd.add_subparsers(dest="bounds_command", required=True, parser_class=_ArgumentParser)
    p = bnd_sub.add_parser("eval", parents=[common])
    p.set_defaults(func=cmd_bounds_eval)
    p.add_argument("--expr", required=True, choices=sorted(BOUND_EXPRS))
    p.add_argument("--args", nargs="*", default=[], metavar="KEY=VALUE")
    return parser


def run(argv: list[str] | None = None, out: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be at least 1")
        consts = load_constants(args.config, args.constants)
        return args.func(args, consts, out)
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except CapacityError as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (UsageError, TripleFormatError, DomainError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
