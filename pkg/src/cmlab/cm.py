"""CM points at the level of supersingular residue discs: Hilbert class
polynomials, reduction vectors, the Hecke/conductor identities they satisfy,
residual equidistribution statistics and genus-character degree splits."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from math import log, pi, sqrt
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath as mp
import numpy as np

from .arith import divisors, factorize, ord_p, r_inverse, r_inverse_sigma, sigma
from .ffield import field
from .padic_disc import (BinaryForm, CharacterNotFound, NotSupersingular, class_group,
                         class_number, classify_padic, factor_discriminant, genus_character,
                         is_fundamental, is_ramified, is_supersingular, norm_group_contains,
                         prime_discriminant_at, prime_quadratic_factorization, unit_weight)
from .ssgraph import brandt_matrix, supersingular_set

DISC_CAP = 40_000
MARGIN = 0.3
MAX_RETRIES = 4


class PrecisionExhausted(RuntimeError):
    pass


class NonSupersingularRoot(RuntimeError):
    pass


class MismatchedIdentity(AssertionError):
    pass


# ---------------------------------------------------------------------------
# j and Hilbert class polynomials
# ---------------------------------------------------------------------------

def _euler_product(q, tol):
    """prod (1 - q^n) by the pentagonal number series, powers built incrementally."""
    s = mp.mpf(1)
    q3 = q * q * q
    a = q            # q^(k(3k-1)/2)
    qk = q           # q^k
    step = q3 * q    # q^(3k+1)
    k = 1
    while True:
        b = a * qk
        term = a + b
        s = s - term if k % 2 else s + term
        if abs(a) < tol:
            return s
        a *= step
        step *= q3
        qk *= q
        k += 1


def j_invariant(tau, bits: Optional[int] = None):
    """j(tau) = (1 + 256 u)^3 / u with u = Delta(2 tau) / Delta(tau), Im tau > 0."""
    with mp.workprec(bits or mp.mp.prec):
        tau = mp.mpc(tau)
        q = mp.exp(2j * mp.pi * tau)
        tol = mp.mpf(2) ** (-(mp.mp.prec + 10))
        u = q * (_euler_product(q * q, tol) / _euler_product(q, tol)) ** 24
        return (1 + 256 * u) ** 3 / u


def _precision_bits(D: int, forms: Sequence[BinaryForm]) -> int:
    return int(20 + 3.5 * pi * sqrt(-D) * sum(1.0 / f.a for f in forms) / log(2))


def _poly_mul(f: List, g: List) -> List:
    out = [mp.mpf(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for k, b in enumerate(g):
            out[i + k] += a * b
    return out


def _class_poly_at(D: int, forms: Sequence[BinaryForm], bits: int) -> Tuple[List[int], float]:
    with mp.workprec(bits):
        sq = mp.sqrt(-D)
        poly = [mp.mpf(1)]
        done = set()
        for f in forms:
            if f in done:
                continue
            tau = mp.mpc(-f.b, sq) / (2 * f.a)
            j = j_invariant(tau, bits)
            partner = BinaryForm(f.a, -f.b, f.c)
            if f.b != 0 and partner in forms and partner != f:
                done.add(partner)
                poly = _poly_mul(poly, [abs(j) ** 2, -2 * j.real, mp.mpf(1)])
            else:
                poly = _poly_mul(poly, [-j.real, mp.mpf(1)])
            done.add(f)
        ints = [int(mp.nint(c)) for c in poly]
        err = max(float(abs(c - n)) for c, n in zip(poly, ints))
    return ints, 0.5 - err


@lru_cache(maxsize=4096)
def _hilbert_class_poly(D: int, cap: int) -> Tuple[int, ...]:
    if abs(D) > cap:
        raise ValueError(f"|D| = {abs(D)} above cap {cap}")
    forms = class_group(D)
    bits = _precision_bits(D, forms)
    for _ in range(MAX_RETRIES):
        coeffs, margin = _class_poly_at(D, forms, bits)
        if margin >= MARGIN:
            assert coeffs[-1] == 1 and len(coeffs) == len(forms) + 1
            return tuple(coeffs)
        bits = int(bits * 1.5)
    raise PrecisionExhausted(f"H_{D}: rounding margin {margin:.3g} < {MARGIN}")


def hilbert_class_poly(D: int, cap: int = DISC_CAP) -> List[int]:
    """Integer coefficients of H_D, lowest degree first."""
    return list(_hilbert_class_poly(D, cap))


# ---------------------------------------------------------------------------
# reduction vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReductionVector:
    p: int
    D: int
    entries: Tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.entries)

    def to_json(self) -> Dict:
        return {"p": self.p, "D": self.D, "vector": list(self.entries), "deg": self.degree}


@lru_cache(maxsize=8192)
def reduction_vector(D: int, p: int, cap: int = DISC_CAP) -> ReductionVector:
    """Multiplicity of each supersingular j as a root of H_D mod p."""
    if not is_supersingular(D, p):
        raise NotSupersingular(f"{p} splits in Q(sqrt {D})")
    H = hilbert_class_poly(D, cap)
    F = field(p)
    ss = supersingular_set(p)
    f = F.poly_from_ints(H)
    entries = []
    for j in ss.js:
        k, f = F.root_multiplicity(f, j)
        entries.append(k)
    if sum(entries) != len(H) - 1:
        raise NonSupersingularRoot(f"H_{D} mod {p} has roots off the supersingular locus")
    return ReductionVector(p, D, tuple(entries))


def frobenius_invariant(v: Sequence, p: int) -> bool:
    frob = supersingular_set(p).frob
    return all(v[s] == v[frob[s]] for s in range(len(v)))


# ---------------------------------------------------------------------------
# residual equidistribution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidualReport:
    p: int
    d: int
    f: int
    vector: Tuple[int, ...]
    degree: int
    deviation: Fraction
    normalizer: float   # |d|^(-1/28) (f |f|_p)^(-1/2)

    def to_json(self) -> Dict:
        return {"p": self.p, "D": self.d * self.f**2, "vector": list(self.vector),
                "deg": self.degree, "deviation": float(self.deviation)}


def residual_report(d: int, f: int, p: int, cap: int = DISC_CAP) -> ResidualReport:
    """max_ss |v_ss / deg - 24 / ((p - 1) #Aut(ss))| for Lambda_{d f^2}."""
    if not is_fundamental(d):
        raise ValueError(f"{d} is not fundamental")
    D = d * f * f
    v = reduction_vector(D, p, cap)
    deg = v.degree
    target = supersingular_set(p).eisenstein_exact()
    dev = max(abs(Fraction(x, deg) - t) for x, t in zip(v.entries, target))
    k = ord_p(f, p)
    norm = abs(d) ** (-1 / 28) * (f / p**k) ** (-0.5)
    return ResidualReport(p, d, f, v.entries, deg, dev, norm)


# ---------------------------------------------------------------------------
# Hecke / conductor identities
# ---------------------------------------------------------------------------

def _mat_vec(M: np.ndarray, v: Sequence) -> List:
    return [sum(int(M[i, k]) * v[k] for k in range(len(v))) for i in range(M.shape[0])]


def zhang_prediction(d: int, f: int, p: int, cap: int = DISC_CAP) -> List[Fraction]:
    """sum_{f0 | f} R_d^-1(f / f0) B(f0)^T v(Lambda_d) / w_{d,1}."""
    v = reduction_vector(d, p, cap).entries
    w1 = unit_weight(d, 1)
    out = [Fraction(0)] * len(v)
    for f0 in divisors(f):
        c = r_inverse(d, f // f0)
        if c == 0:
            continue
        Bv = _mat_vec(brandt_matrix(p, f0).entries.T, v)
        out = [o + Fraction(c * x, w1) for o, x in zip(out, Bv)]
    return out


def p_power_prediction(D: int, p: int, r: int, cap: int = DISC_CAP) -> List[Fraction]:
    """v(Lambda_{D p^(2r)}) from T_{p^r}: T_{p^r} L - T_{p^(r-1)} L (ramified) or
    T_{p^r} L - T_{p^(r-2)} L (inert), L = Lambda_D / w."""
    d, f = factor_discriminant(D)
    if f % p == 0:
        raise ValueError("conductor must be prime to p")
    v = reduction_vector(D, p, cap).entries
    w = unit_weight(d, f)
    lower = r - 1 if is_ramified(d, p) else r - 2
    top = _mat_vec(brandt_matrix(p, p**r).entries.T, v)
    low = _mat_vec(brandt_matrix(p, p**lower).entries.T, v) if lower >= 0 else [0] * len(v)
    return [Fraction(a - b, w) for a, b in zip(top, low)]


def degree_formula(d: int, f: int) -> Fraction:
    """deg(Lambda_{d f^2}) = w_{d,f} h(d) / w_{d,1} * (R_d^-1 * sigma_1)(f)."""
    return Fraction(unit_weight(d, f) * class_number(d) * r_inverse_sigma(d, f), unit_weight(d, 1))


@dataclass
class ZhangReport:
    d: int
    f: int
    p: int
    conductor_ok: bool
    degree_ok: bool
    p_power_ok: Dict[int, bool]
    p_power_route: Dict[int, str]
    details: List[str] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.conductor_ok and self.degree_ok and all(self.p_power_ok.values())


def zhang_consistency(d: int, f: int, p: int, rs: Sequence[int] = (1, 2),
                      cap: int = DISC_CAP, strict: bool = False) -> ZhangReport:
    """Check (1) the conductor formula for reduction vectors, (2) the degree
    formula against class numbers and (3) invariance of the normalised vector
    under D -> D p^(2r)."""
    if f % p == 0:
        raise ValueError("f must be prime to p")
    if any(q not in (2, 3, 5, 7) for q, _ in factorize(f) if f > 1):
        raise ValueError("f must have prime factors <= 7")
    D = d * f * f
    details = []
    v = reduction_vector(D, p, cap).entries
    w = unit_weight(d, f)
    lhs = [Fraction(x, w) for x in v]
    rhs = zhang_prediction(d, f, p, cap)
    c_ok = lhs == rhs
    if not c_ok:
        details.append(f"conductor: {lhs} != {rhs}")
    h = class_number(D)
    deg_ok = degree_formula(d, f) == h and h == sum(v)
    if not deg_ok:
        details.append(f"degree: formula {degree_formula(d, f)} vs h={h}, sum v={sum(v)}")
    pp_ok, route = {}, {}
    for r in rs:
        E = D * p ** (2 * r)
        pred = p_power_prediction(D, p, r, cap)
        hE = class_number(E) if abs(E) <= 10**6 else None
        degE = degree_formula(d, f * p**r)
        ok = hE is None or hE == degE
        if abs(E) <= cap:
            vE = reduction_vector(E, p, cap).entries
            route[r] = "direct"
            ok &= all(x * sum(vE) == y * h for x, y in zip(v, vE))
            ok &= [Fraction(x) for x in vE] == pred
        else:
            route[r] = "hecke"
            ok &= frobenius_invariant(v, p)
            ok &= sum(pred) == degE
            ok &= all(x * degE == y * h for x, y in zip(v, pred))
        pp_ok[r] = bool(ok)
        if not ok:
            details.append(f"p-power r={r} ({route[r]}) failed")
    rep = ZhangReport(d, f, p, c_ok, deg_ok, pp_ok, route, details)
    if strict and not rep.ok:
        raise MismatchedIdentity("; ".join(details))
    return rep


# ---------------------------------------------------------------------------
# genus partition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GenusPartition:
    d: int
    f: int
    p: int
    pstar: int
    chi: Tuple[int, ...]      # character value per reduced form of d
    deg_plus: int
    deg_minus: int

    @property
    def total(self) -> int:
        return self.deg_plus + self.deg_minus


def genus_split(d: int, p: int, budget: int = 20) -> Tuple[Tuple[int, ...], int, int]:
    """chi = kronecker(p*, q) for a prime q represented by each class of d."""
    pstar = prime_discriminant_at(d, p)
    chi = []
    for form in class_group(d):
        try:
            chi.append(genus_character(form, pstar, budget))
        except CharacterNotFound:
            chi.append(genus_character(form, pstar, 4 * budget))
    return tuple(chi), chi.count(1), chi.count(-1)


def genus_partition(d: int, f: int, p: int) -> GenusPartition:
    """(deg Lambda^+_{d f^2}, deg Lambda^-_{d f^2}) from the split on the classes of d."""
    if not is_fundamental(d) or d % p:
        raise ValueError(f"need a fundamental discriminant divisible by {p}")
    if f % p == 0:
        raise ValueError("f must be prime to p")
    chi, plus, minus = genus_split(d, p)
    fd = classify_padic(d, p)
    w1, wf = unit_weight(d, 1), unit_weight(d, f)
    s_in = s_out = 0
    for f0 in divisors(f):
        t = r_inverse(d, f // f0) * sigma(f0)
        if norm_group_contains(f0, fd, p):
            s_in += t
        else:
            s_out += t
    dp = Fraction(wf) * (Fraction(plus, w1) * s_in + Fraction(minus, w1) * s_out)
    dm = Fraction(wf) * (Fraction(minus, w1) * s_in + Fraction(plus, w1) * s_out)
    assert dp.denominator == 1 and dm.denominator == 1
    return GenusPartition(d, f, p, prime_discriminant_at(d, p), chi, int(dp), int(dm))


def is_prime_discriminant(d: int) -> bool:
    return is_fundamental(d) and len(prime_quadratic_factorization(d)) == 1
