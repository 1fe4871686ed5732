"""Command-line driver for the verification suites.

    cmlab SUITE [--p 7,11] [--dmax 500] [--fmax 6] [--res 1] [--out reports]
                [--format tsv|json] [--seed 0] [--budget N] [--config FILE] [--jobs 1]

Exit status: 0 all checks passed, 1 an identity or property failed,
2 configuration error, 3 a computational budget was exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3
SUITES = ("spheres", "theta", "ssgraph", "quaternion", "cm", "genus", "katz")


class ConfigError(ValueError):
    pass


class BudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class RunConfig:
    p: Tuple[int, ...] = ()          # empty: per-suite default
    dmax: int = 500
    fmax: int = 6
    res: int = 1
    out: str = "reports"
    format: str = "tsv"
    seed: int = 0
    budget: int = 2_000_000
    jobs: int = 1

    def validate(self) -> "RunConfig":
        from .arith import is_prime
        for name in ("dmax", "fmax", "res", "budget", "jobs"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.format not in ("tsv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        bad = [q for q in self.p if not is_prime(q)]
        if bad:
            raise ConfigError(f"not prime: {bad}")
        return self


def _parse_primes(text: str) -> Tuple[int, ...]:
    out = []
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..")
            from .arith import primes_up_to
            out.extend(q for q in primes_up_to(int(hi)) if q >= int(lo))
        else:
            out.append(int(part))
    return tuple(out)


_CASTS: Dict[str, Callable[[str], object]] = {
    "p": _parse_primes, "dmax": int, "fmax": int, "res": int, "out": str,
    "format": str, "seed": int, "budget": int, "jobs": int,
}


def parse_config_text(text: str) -> Dict[str, object]:
    """key=value lines; '#' starts a comment."""
    out: Dict[str, object] = {}
    for k, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {k}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _CASTS:
            raise ConfigError(f"line {k}: unknown key {key!r}")
        try:
            out[key] = _CASTS[key](val)
        except ValueError as exc:
            raise ConfigError(f"line {k}: {exc}") from None
    return out


# ---------------------------------------------------------------------------
# suites: each returns (rows, failures)
# ---------------------------------------------------------------------------

Rows = List[Dict[str, object]]


def _fmt(x) -> object:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.12g}")
    if isinstance(x, (list, tuple)):
        return [_fmt(t) for t in x]
    return x


def suite_ssgraph(cfg: RunConfig) -> Tuple[Rows, List[str]]:
    from .arith import primes_up_to, sigma
    from .ssgraph import (PRIME_CAP, SUPPORTED_LEVELS, brandt_matrix, spectral_report,
                          supersingular_set, weighted_selfadjoint)
    rows, fails = [], []
    for p in cfg.p or tuple(primes_up_to(97)):
        if p > PRIME_CAP:
            raise BudgetError(f"p={p} above cap {PRIME_CAP}")
        ss = supersingular_set(p)
        mass_ok = ss.mass() == Fraction(p - 1, 24)
        ells = [l for l in SUPPORTED_LEVELS if l != p]
        brandt_ok = True
        for l in ells:
            B = brandt_matrix(p, l).entries
            brandt_ok &= all(s == sigma(l) for s in B.sum(axis=1))
            brandt_ok &= weighted_selfadjoint(B, ss.auts)
        ratio = None
        if len(ss) > 1 and p >= 5:
            rep = spectral_report(p, ells, seed=cfg.seed)
            brandt_ok &= rep.ramanujan_ok
            ratio = rep.max_ratio
        rows.append({"p": p, "classes": len(ss), "mass": str(ss.mass()), "mass_ok": mass_ok,
                     "brandt_ok": bool(brandt_ok), "max_ratio": ratio})
        if not mass_ok:
            fails.append(f"ssgraph: mass formula fails at p={p}")
        if not brandt_ok:
            fails.append(f"ssgraph: Brandt structure fails at p={p}")
    return rows, fails


def suite_quaternion(cfg: RunConfig) -> Tuple[Rows, List[str]]:
    from .padic_disc import fundamental_discriminants, is_supersingular
    from .quaternion import SUPPORTED_PRIMES, embedding_count_formula, gross_count
    rows, fails = [], []
    for p in cfg.p or SUPPORTED_PRIMES:
        if p not in SUPPORTED_PRIMES:
            continue
        for d in fundamental_discriminants(cfg.dmax):
            if d > 0 or not is_supersingular(d, p):
                continue
            got, want = gross_count(p, d), embedding_count_formula(p, d)
            rows.append({"p": p, "d": d, "count": got, "formula": str(want), "ok": got == want})
            if got != want:
                fails.append(f"quaternion: p={p} d={d}: {got} != {want}")
    return rows, fails


def _cm_primes(cfg: RunConfig) -> Tuple[int, ...]:
    return cfg.p or (7, 11)


def suite_cm(cfg: RunConfig) -> Tuple[Rows, List[str]]:
    from .arith import factorize
    from .cm import DISC_CAP, residual_report, zhang_consistency
    from .padic_disc import fundamental_discriminants, is_supersingular
    rows, fails = [], []
    for p in _cm_primes(cfg):
        for d in fundamental_discriminants(min(cfg.dmax, DISC_CAP)):
            if d > 0 or not is_supersingular(d, p):
                continue
            for f in range(1, cfg.fmax + 1):
                if f % p == 0 or abs(d) * f * f > DISC_CAP:
                    continue
                if f > 1 and factorize(f)[-1][0] > 7:
                    continue
                z = zhang_consistency(d, f, p)
                rr = residual_report(d, f, p)
                rows.append({"p": p, "D": d * f * f, "d": d, "f": f, "vector": list(rr.vector),
                             "deg": rr.degree, "deviation": float(rr.deviation),
                             "conductor_ok": z.conductor_ok, "degree_ok": z.degree_ok,
                             "p_power_ok": all(z.p_power_ok.values())})
                if not z.ok:
                    fails.append(f"cm: d={d} f={f} p={p}: {'; '.join(z.details)}")
    return rows, fails


def suite_genus(cfg: RunConfig) -> Tuple[Rows, List[str]]:
    from .arith import kronecker
    from .cm import genus_partition
    from .padic_disc import class_number, fundamental_discriminants, prime_quadratic_factorization
    rows, fails = [], []
    for d in fundamental_discriminants(min(cfg.dmax, 200)):
        if d > 0:
            continue
        primes = [abs(q) if q % 2 else 2 for q in prime_quadratic_factorization(d)]
        for p in primes:
            if cfg.p and p not in cfg.p:
                continue
            for f in range(1, 21):
                if f % p == 0:
                    continue
                g = genus_partition(d, f, p)
                prime = len(primes) == 1
                if prime:
                    k = kronecker(d, f)
                    ok = (g.deg_minus == 0) if k == 1 else (g.deg_plus == 0) if k == -1 else True
                else:
                    ok = g.deg_plus == g.deg_minus
                ok &= g.total == class_number(d * f * f)
                rows.append({"d": d, "p": p, "f": f, "deg_plus": g.deg_plus,
                             "deg_minus": g.deg_minus, "ok": bool(ok)})
                if not ok:
                    fails.append(f"genus: d={d} p={p} f={f}: ({g.deg_plus}, {g.deg_minus})")
    return rows, fails


def suite_katz(cfg: RunConfig) -> Tuple[Rows, List[str]]:
    from .katz import katz_consistency, tau
    from .padic_disc import fundamental_discriminants, is_supersingular
    from .arith import sigma
    rows, fails = [], []
    for p in cfg.p or (2, 3, 5, 7):
        for m in range(7):
            grid = [Fraction(k, 49) * Fraction(p, p + 1) for k in range(50)]
            ok = all(tau(p, m, x).degree == sigma(p**m) for x in grid)
            rows.append({"kind": "degree", "p": p, "d": "", "f": "", "r": m, "ok": ok})
            if not ok:
                fails.append(f"katz: degree of tau_{m} wrong at p={p}")
    for p in _cm_primes(cfg):
        for d in fundamental_discriminants(cfg.dmax):
            if d > 0 or not is_supersingular(d, p):
                continue
            for f in range(1, cfg.fmax + 1):
                if f % p == 0:
                    continue
                rep = katz_consistency(d, f, p, 3)
                rows.append({"kind": "cm", "p": p, "d": d, "f": f, "r": 3, "ok": rep.ok})
                if not rep.ok:
                    fails.append(f"katz: d={d} f={f} p={p}: {'; '.join(rep.mismatches)}")
    return rows, fails


def suite_spheres(cfg: RunConfig) -> Tuple[Rows, List[str]]:
    from .spheres import (SUM_OF_FOUR_SQUARES, SUM_OF_THREE_SQUARES, deviation_report,
                          enumerate_lattice_points, reduced_sphere, same_reduction_hypotheses,
                          transitivity_flag)
    rows, fails = [], []
    r = cfg.res
    for p in cfg.p or (3, 5):
        for Q, name in ((SUM_OF_THREE_SQUARES, "x2+y2+z2"), (SUM_OF_FOUR_SQUARES, "x2+y2+z2+w2")):
            if p ** (r * Q.n) > cfg.budget:
                raise BudgetError(f"(Z/{p}^{r})^{Q.n} exceeds budget {cfg.budget}")
            n_pairs = 0
            for ell in range(1, 13):
                for m in range(1, 150):
                    if m != ell and same_reduction_hypotheses(ell, m, p, r):
                        n_pairs += 1
                        if reduced_sphere(Q, ell, p, r).as_set() != reduced_sphere(Q, m, p, r).as_set():
                            fails.append(f"spheres: {name} p={p} r={r}: l={ell} m={m} differ")
            sigma = sorted(reduced_sphere(Q, 1, p, r).residues)
            transitive = transitivity_flag(Q, 1, p, r)
            for m in (1 + p**r * k for k in (1, 3, 9, 27, 81)):
                if m > cfg.budget:
                    raise BudgetError(f"m={m} exceeds budget")
                pts = enumerate_lattice_points(Q, m)
                if not len(pts):
                    continue
                rep = deviation_report(Q, m, p, r, sigma, pts)
                rows.append({"form": name, "p": p, "r": r, "m": m, "points": rep.n_points,
                             "max_dev": float(rep.max_dev), "bound_ratio": rep.bound_ratio,
                             "hensel_pairs": n_pairs, "transitivity": transitive})
    return rows, fails


def suite_theta(cfg: RunConfig) -> Tuple[Rows, List[str]]:
    from .spheres import SUM_OF_THREE_SQUARES, orbits
    from .theta import basis_complement, cusp_exponents, cusp_sum_table, finite_cusp_limit
    Q = SUM_OF_THREE_SQUARES
    rows, fails = [], []
    for p in cfg.p or (3,):
        r = cfg.res
        for orb in orbits(Q, p, r):
            sig = sorted(orb)
            if not any(any(s) for s in sig):
                continue
            B = basis_complement(sig)
            worst_const = worst_lim = 0.0
            for c in range(1, 13):
                s, t = cusp_exponents(p, r, c)
                for a in range(c):
                    if gcd(a, c) != 1:
                        continue
                    E = cusp_sum_table(Q, p, r, t, a, c, sig)
                    worst_const = max(worst_const, float(np.abs(E - E[0]).max()))
                    for f in B:
                        worst_lim = max(worst_lim, abs(finite_cusp_limit(Q, f, p, r, a, c)))
            ok = worst_const < 1e-9 and worst_lim < 1e-9
            rows.append({"p": p, "r": r, "orbit_size": len(sig), "rep": list(sig[0]),
                         "max_spread": worst_const, "max_limit": worst_lim, "ok": ok})
            if not ok:
                fails.append(f"theta: orbit of {sig[0]} at p={p}: spread {worst_const}, limit {worst_lim}")
    return rows, fails


RUNNERS = {
    "spheres": suite_spheres, "theta": suite_theta, "ssgraph": suite_ssgraph,
    "quaternion": suite_quaternion, "cm": suite_cm, "genus": suite_genus, "katz": suite_katz,
}


# ---------------------------------------------------------------------------
# report writing
# ---------------------------------------------------------------------------

def render(rows: Rows, fmt: str) -> str:
    rows = [{k: _fmt(v) for k, v in row.items()} for row in rows]
    if fmt == "json":
        return json.dumps(rows, indent=1, sort_keys=True) + "\n"
    keys: List[str] = []
    for row in rows:
        keys.extend(k for k in row if k not in keys)
    lines = ["\t".join(keys)]
    for row in rows:
        cells = []
        for k in keys:
            v = row.get(k, "")
            cells.append(json.dumps(v) if isinstance(v, list) else "" if v is None else str(v))
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


@dataclass
class SuiteResult:
    name: str
    status: int
    path: Optional[str]
    failures: List[str] = field(default_factory=list)


def _run_one(name: str, cfg: RunConfig) -> SuiteResult:
    from .spheres import BudgetExceeded
    from .cm import PrecisionExhausted
    from .ssgraph import PrimeTooLarge
    try:
        rows, fails = RUNNERS[name](cfg)
    except (BudgetError, BudgetExceeded, PrecisionExhausted, PrimeTooLarge) as exc:
        return SuiteResult(name, EXIT_BUDGET, None, [f"{name}: budget exceeded: {exc}"])
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.{cfg.format}"
    path.write_text(render(rows, cfg.format))
    return SuiteResult(name, EXIT_FAIL if fails else EXIT_OK, str(path), fails)


def run_suite(name: str, config: RunConfig) -> Tuple[int, List[SuiteResult]]:
    """Run one suite (or 'all'); returns the exit status and per-suite results."""
    if name != "all" and name not in RUNNERS:
        raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    config.validate()
    names = list(SUITES) if name == "all" else [name]
    if config.jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_one, names, [config] * len(names)))
    else:
        results = [_run_one(n, config) for n in names]
    statuses = [r.status for r in results]
    status = EXIT_BUDGET if EXIT_BUDGET in statuses else EXIT_FAIL if EXIT_FAIL in statuses else EXIT_OK
    return status, results


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cmlab", description="Run verification suites and write reports.")
    ap.add_argument("suite", help=f"one of {', '.join(SUITES)}, all")
    ap.add_argument("--p", help="comma-separated primes, ranges as lo..hi")
    ap.add_argument("--dmax", type=int, help="bound on |d| for fundamental discriminants")
    ap.add_argument("--fmax", type=int, help="largest conductor")
    ap.add_argument("--res", type=int, help="resolution r (residues mod p^r)")
    ap.add_argument("--out", help="report directory")
    ap.add_argument("--format", choices=("tsv", "json"))
    ap.add_argument("--seed", type=int)
    ap.add_argument("--budget", type=int, help="enumeration budget")
    ap.add_argument("--config", help="key=value file; flags override it")
    ap.add_argument("--jobs", type=int, help="suites run in parallel")
    return ap


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values: Dict[str, object] = {}
    if args.config:
        try:
            values.update(parse_config_text(Path(args.config).read_text()))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = _parse_primes(v) if f.name == "p" else v
    return replace(RunConfig(), **values).validate()


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = config_from_args(args)
        status, results = run_suite(args.suite, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for r in results:
        print(f"{r.name}\t{'pass' if r.status == EXIT_OK else 'FAIL'}\t{r.path or '-'}")
        for msg in r.failures:
            print(msg, file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
