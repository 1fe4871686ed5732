"""Valuation-level dynamics on a supersingular residue disc: the piecewise-affine
correspondence tau_m induced by T_{p^m}, the canonical-branch map and the
valuations of CM points."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Tuple

from .arith import kronecker, ord_p, sigma
from .padic_disc import NotSupersingular, class_number, factor_discriminant, is_ramified, is_supersingular, unit_weight


class OutOfRange(ValueError):
    pass


def _upper(p: int) -> Fraction:
    return Fraction(p, p + 1)


class RationalDivisor:
    """Finite formal sum of points of [0, p/(p+1)] with integer multiplicities."""

    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms: Dict[Fraction, int] | None = None):
        self.p = p
        self.terms: Dict[Fraction, int] = {}
        for x, c in (terms or {}).items():
            self._add(Fraction(x), c)

    def _add(self, x: Fraction, c: int) -> None:
        if not 0 <= x <= _upper(self.p):
            raise OutOfRange(f"{x} outside [0, {_upper(self.p)}]")
        c = self.terms.get(x, 0) + c
        if c:
            self.terms[x] = c
        else:
            self.terms.pop(x, None)

    @classmethod
    def point(cls, p: int, x: Fraction) -> "RationalDivisor":
        return cls(p, {Fraction(x): 1})

    def __add__(self, other: "RationalDivisor") -> "RationalDivisor":
        out = RationalDivisor(self.p, self.terms)
        for x, c in other.terms.items():
            out._add(x, c)
        return out

    def scale(self, k: int) -> "RationalDivisor":
        return RationalDivisor(self.p, {x: k * c for x, c in self.terms.items()})

    def __sub__(self, other: "RationalDivisor") -> "RationalDivisor":
        return self + other.scale(-1)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RationalDivisor) and self.p == other.p and self.terms == other.terms

    def __getitem__(self, x) -> int:
        return self.terms.get(Fraction(x), 0)

    def __iter__(self) -> Iterator[Tuple[Fraction, int]]:
        return iter(sorted(self.terms.items()))

    @property
    def degree(self) -> int:
        return sum(self.terms.values())

    @property
    def support(self) -> List[Fraction]:
        return sorted(self.terms)

    def is_effective(self) -> bool:
        return all(c > 0 for c in self.terms.values())

    def __repr__(self) -> str:
        body = " + ".join(f"{c}[{x}]" for x, c in self)
        return f"RationalDivisor(p={self.p}: {body or '0'})"


def _check_point(p: int, x) -> Fraction:
    x = Fraction(x)
    if not 0 <= x <= _upper(p):
        raise OutOfRange(f"{x} outside [0, {_upper(p)}]")
    return x


def tau1_point(p: int, x: Fraction) -> RationalDivisor:
    """[px] + p[x/p] below 1/(p+1), [1 - x] + p[x/p] above."""
    x = _check_point(p, x)
    first = p * x if x <= Fraction(1, p + 1) else 1 - x
    return RationalDivisor(p, {first: 1}) + RationalDivisor(p, {x / p: p})


def apply_tau1(D: RationalDivisor) -> RationalDivisor:
    out = RationalDivisor(D.p)
    for x, c in D.terms.items():
        out = out + tau1_point(D.p, x).scale(c)
    return out


@lru_cache(maxsize=100_000)
def _tau(p: int, m: int, x: Fraction) -> Tuple[Tuple[Fraction, int], ...]:
    if m == 0:
        return ((x, 1),)
    prev = RationalDivisor(p, dict(_tau(p, m - 1, x)))
    out = apply_tau1(prev)
    if m >= 2:
        out = out - RationalDivisor(p, dict(_tau(p, m - 2, x))).scale(p)
    return tuple(sorted(out.terms.items()))


def tau(p: int, m: int, x) -> RationalDivisor:
    """tau_m([x]) via tau_m = tau_1 o tau_{m-1} - p tau_{m-2}."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    x = _check_point(p, x)
    D = RationalDivisor(p, dict(_tau(p, m, x)))
    assert D.is_effective(), f"tau_{m}([{x}]) has negative multiplicities"
    return D


def canonical_valuation(p: int, x) -> Fraction:
    """Valuation after quotienting by the canonical subgroup: px up to 1/(p+1), 1 - x beyond."""
    x = Fraction(x)
    if not 0 < x < _upper(p):
        raise OutOfRange(f"{x} outside (0, {_upper(p)})")
    return p * x if x <= Fraction(1, p + 1) else 1 - x


def cm_valuation(D: int, p: int) -> Fraction:
    """1/2 p^-m (ramified) or p/(p+1) p^-m (inert), m = ord_p(conductor)."""
    if not is_supersingular(D, p):
        raise NotSupersingular(f"{D} is not {p}-supersingular")
    d, f = factor_discriminant(D)
    m = ord_p(f, p)
    base = Fraction(1, 2) if is_ramified(d, p) else _upper(p)
    return base / p**m


def p_part_ratio(d: int, p: int, r: int) -> int:
    """p-part of (R_d^-1 * sigma_1) at p^r: p^r - psi_d(p) p^(r-1)."""
    return p**r - kronecker(d, p) * p ** (r - 1) if r else 1


@dataclass
class KatzReport:
    d: int
    f: int
    p: int
    r: int
    degree_ok: bool = True
    support_ok: bool = True
    multiplicity_ok: bool = True
    mismatches: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.degree_ok and self.support_ok and self.multiplicity_ok


def katz_consistency(d: int, f: int, p: int, r: int, class_cap: int = 200_000) -> KatzReport:
    """Compare tau_s([v(df^2)]) for s <= r with the CM points of conductors f p^s.

    The CM part of level s is tau_s - tau_{s-1} (ramified) or tau_s - tau_{s-2}
    (inert); it must be a single point at v(d (f p^s)^2) whose multiplicity is
    the degree ratio deg(L_{d(fp^s)^2}) / (deg(L_{df^2}) / w_{d,f}).
    """
    if f % p == 0:
        raise ValueError("f must be prime to p")
    D = d * f * f
    rep = KatzReport(d, f, p, r)
    x0 = cm_valuation(D, p)
    allowed = {cm_valuation(D * p ** (2 * s), p) for s in range(r + 1)}
    ram = is_ramified(d, p)
    h0 = Fraction(class_number(D), unit_weight(d, f)) if abs(D) <= class_cap else None
    taus = [tau(p, s, x0) for s in range(r + 1)]
    for s in range(1, r + 1):
        T = taus[s]
        if T.degree != sigma(p**s):
            rep.degree_ok = False
            rep.mismatches.append(f"s={s}: deg {T.degree} != sigma_1(p^{s}) = {sigma(p**s)}")
        if not set(T.support) <= allowed:
            rep.support_ok = False
            rep.mismatches.append(f"s={s}: support {T.support} not in {sorted(allowed)}")
        back = s - 1 if ram else s - 2
        cm_part = T - taus[back] if back >= 0 else T
        target = cm_valuation(D * p ** (2 * s), p)
        ratio = p_part_ratio(d, p, s)
        if cm_part.terms != {target: ratio}:
            rep.multiplicity_ok = False
            rep.mismatches.append(f"s={s}: CM part {cm_part} vs {ratio}[{target}]")
        E = D * p ** (2 * s)
        if h0 is not None and abs(E) <= class_cap and class_number(E) != h0 * ratio:
            rep.multiplicity_ok = False
            rep.mismatches.append(f"s={s}: h({E}) = {class_number(E)} vs {h0 * ratio}")
    return rep
