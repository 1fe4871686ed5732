"""Supersingular j-invariants, modular polynomials, Brandt matrices and their
joint spectrum in the automorphism-weighted inner product."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import comb, sqrt
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .arith import factorize, is_prime, ord_p, sigma
from .ffield import Elt, Fp2, field

SUPPORTED_LEVELS = (2, 3, 5, 7)
PRIME_CAP = 500


class PrimeTooLarge(ValueError):
    pass


class UnsupportedLevel(ValueError):
    pass


class UnsupportedFactor(ValueError):
    pass


class NonCommuting(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# supersingular set
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SupersingularSet:
    p: int
    points: Tuple[Tuple[Elt, int], ...]  # (j, #Aut)
    frob: Tuple[int, ...]

    @property
    def js(self) -> List[Elt]:
        return [j for j, _ in self.points]

    @property
    def auts(self) -> List[int]:
        return [a for _, a in self.points]

    def __len__(self) -> int:
        return len(self.points)

    def index(self, j: Elt) -> int:
        return self.js.index(j)

    def mass(self) -> Fraction:
        return sum((Fraction(1, a) for a in self.auts), Fraction(0))

    def eisenstein(self) -> np.ndarray:
        """v^ss with entries 24 / ((p - 1) #Aut)."""
        return np.array([24.0 / ((self.p - 1) * a) for a in self.auts])

    def eisenstein_exact(self) -> List[Fraction]:
        return [Fraction(24, (self.p - 1) * a) for a in self.auts]


def deuring_polynomial(p: int) -> List[int]:
    e = (p - 1) // 2
    return [comb(e, k) ** 2 % p for k in range(e + 1)]


def _legendre_roots(p: int, F: Fp2) -> List[Elt]:
    coeffs = deuring_polynomial(p)
    a, b = F.all_elements()
    acc_a = np.zeros_like(a)
    acc_b = np.zeros_like(b)
    for c in reversed(coeffs):
        acc_a, acc_b = F.vec_mul(acc_a, acc_b, a, b)
        acc_a = (acc_a + c) % p
    mask = (acc_a == 0) & (acc_b == 0)
    return [(int(x), int(y)) for x, y in zip(a[mask], b[mask])]


@lru_cache(maxsize=None)
def supersingular_set(p: int) -> SupersingularSet:
    """All supersingular j in F_{p^2} with automorphism counts, ordered with
    F_p-rational values first."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p > PRIME_CAP:
        raise PrimeTooLarge(f"p={p} above cap {PRIME_CAP}")
    F = field(p)
    if p in (2, 3):
        pts = (((0, 0), 24 if p == 2 else 12),)
    else:
        js = set()
        for lam in _legendre_roots(p, F):
            l2 = F.mul(lam, lam)
            num = F.pow(F.add(F.sub(l2, lam), (1, 0)), 3)
            den = F.mul(l2, F.pow(F.sub(lam, (1, 0)), 2))
            js.add(F.mul(F.mul((256 % p, 0), num), F.inv(den)))
        j1728 = (1728 % p, 0)

        def aut(j):
            return 6 if j == (0, 0) else 4 if j == j1728 else 2

        pts = tuple((j, aut(j)) for j in sorted(js, key=lambda x: (x[1], x[0])))
    js_ = [j for j, _ in pts]
    frob = tuple(js_.index(F.frob(j)) for j in js_)
    ss = SupersingularSet(p, pts, frob)
    if ss.mass() != Fraction(p - 1, 24):
        raise AssertionError(f"mass formula fails at p={p}: {ss.mass()}")
    return ss


def frobenius_matrix(p: int) -> np.ndarray:
    ss = supersingular_set(p)
    n = len(ss)
    F = np.zeros((n, n), dtype=np.int64)
    for s, t in enumerate(ss.frob):
        F[s, t] = 1
    return F


# ---------------------------------------------------------------------------
# modular polynomials
# ---------------------------------------------------------------------------

def parse_modpoly(text: str) -> Tuple[int, Dict[Tuple[int, int], int]]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines[0].startswith("ell="):
        raise ValueError("missing header")
    ell = int(lines[0][4:])
    coeffs: Dict[Tuple[int, int], int] = {}
    for ln in lines[1:]:
        i, j, c = (int(t) for t in ln.split())
        coeffs[(i, j)] = c
        coeffs[(j, i)] = c
    return ell, coeffs


@lru_cache(maxsize=None)
def modular_polynomial(ell: int) -> Dict[Tuple[int, int], int]:
    """Phi_ell as {(i, j): coefficient of X^i Y^j}."""
    if ell not in SUPPORTED_LEVELS:
        raise UnsupportedLevel(f"no bundled modular polynomial for level {ell}")
    text = resources.files("cmlab.data").joinpath(f"modpoly_{ell}.txt").read_text()
    got, coeffs = parse_modpoly(text)
    assert got == ell
    return coeffs


def specialize_x(ell: int, x: int) -> List[int]:
    """Integer coefficients of Phi_ell(x, Y) in Y, low degree first."""
    out = [0] * (ell + 2)
    for (i, j), c in modular_polynomial(ell).items():
        out[j] += c * x**i
    return out


def _phi_at(ell: int, F: Fp2, j: Elt) -> List[Elt]:
    out: List[Elt] = [(0, 0)] * (ell + 2)
    powers = [(1, 0)]
    for _ in range(ell + 1):
        powers.append(F.mul(powers[-1], j))
    for (a, b), c in modular_polynomial(ell).items():
        out[b] = F.add(out[b], F.mul((c % F.p, 0), powers[a]))
    return out


# ---------------------------------------------------------------------------
# Brandt matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BrandtMatrix:
    p: int
    m: int
    entries: np.ndarray = dc_field(compare=False)
    # p | m with another prime factor: assembled by multiplicativity, not checked by any identity
    experimental: bool = False

    def row_sums(self) -> List[int]:
        return [int(x) for x in self.entries.sum(axis=1)]


@lru_cache(maxsize=None)
def _brandt_prime(p: int, ell: int) -> np.ndarray:
    ss = supersingular_set(p)
    F = field(p)
    n = len(ss)
    B = np.zeros((n, n), dtype=np.int64)
    for s, js in enumerate(ss.js):
        poly = _phi_at(ell, F, js)
        total = 0
        for t, jt in enumerate(ss.js):
            k, _ = F.root_multiplicity(poly, jt)
            B[s, t] = k
            total += k
        if total != ell + 1:
            raise AssertionError(f"non-supersingular {ell}-isogenous j at p={p}")
    return B


@lru_cache(maxsize=None)
def _brandt_prime_power(p: int, q: int, e: int) -> np.ndarray:
    n = len(supersingular_set(p))
    if e == 0:
        return np.eye(n, dtype=np.int64)
    if q == p:
        return sigma(p**e) * np.linalg.matrix_power(frobenius_matrix(p), e)
    if q not in SUPPORTED_LEVELS:
        raise UnsupportedFactor(f"prime {q} unsupported (levels {SUPPORTED_LEVELS} or p)")
    Bq = _brandt_prime(p, q)
    if e == 1:
        return Bq
    return Bq @ _brandt_prime_power(p, q, e - 1) - q * _brandt_prime_power(p, q, e - 2)


def brandt_matrix(p: int, m: int) -> BrandtMatrix:
    """B(m): entry (s, t) counts order-m subgroups C of E_s with E_s/C ~ E_t."""
    if m < 1:
        raise ValueError("m must be positive")
    n = len(supersingular_set(p))
    B = np.eye(n, dtype=np.int64)
    for q, e in factorize(m) if m > 1 else ():
        B = B @ _brandt_prime_power(p, q, e)
    pm = p ** ord_p(m, p)
    return BrandtMatrix(p, m, B, experimental=pm > 1 and m != pm)


def weighted_selfadjoint(B: np.ndarray, auts: Sequence[int]) -> bool:
    """B[s, t] * aut[t] == B[t, s] * aut[s] for all s, t."""
    n = len(auts)
    return all(B[s, t] * auts[t] == B[t, s] * auts[s] for s in range(n) for t in range(n))


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

@dataclass
class SpectralReport:
    p: int
    ells: List[int]
    vectors: np.ndarray            # columns, orthonormal for <v, w> = sum v w / v^ss
    eigenvalues: Dict[int, np.ndarray]
    eisenstein_index: int
    ramanujan_ok: bool
    max_ratio: float               # max |lambda| / (2 sqrt ell) over cusp eigenvalues

    def cusp_eigenvalues(self, ell: int) -> np.ndarray:
        lam = self.eigenvalues[ell]
        return np.delete(lam, self.eisenstein_index)


def inner_product(v: np.ndarray, w: np.ndarray, p: int) -> float:
    return float(np.sum(v * w / supersingular_set(p).eisenstein()))


def spectral_report(p: int, ells: Sequence[int], tol: float = 1e-8, seed: int = 0) -> SpectralReport:
    """Joint eigenbasis of the B(ell)^T, orthonormal for the weighted product."""
    ss = supersingular_set(p)
    for ell in ells:
        if ell == p or ell not in SUPPORTED_LEVELS:
            raise UnsupportedFactor(f"level {ell} not usable at p={p}")
    vss = ss.eisenstein()
    g = 1.0 / np.sqrt(vss)  # <v, w> = (g v) . (g w)
    mats = {ell: brandt_matrix(p, ell).entries.T.astype(float) for ell in ells}
    sym = {ell: (g[:, None] * M) / g[None, :] for ell, M in mats.items()}
    for a in ells:
        for b in ells:
            if np.abs(sym[a] @ sym[b] - sym[b] @ sym[a]).max() > tol:
                raise NonCommuting(f"B({a}) and B({b}) do not commute at p={p}")
        if np.abs(sym[a] - sym[a].T).max() > tol:
            raise NonCommuting(f"B({a})^T not self-adjoint at p={p}")
    rng = np.random.default_rng(seed)
    n = len(ss)
    for _ in range(10):
        coef = rng.normal(size=len(ells))
        combo = sum(c * sym[ell] for c, ell in zip(coef, ells)) if ells else np.zeros((n, n))
        _, U = np.linalg.eigh(combo)
        eig = {}
        ok = True
        for ell in ells:
            D = U.T @ sym[ell] @ U
            if np.abs(D - np.diag(np.diag(D))).max() > tol:
                ok = False
                break
            eig[ell] = np.diag(D).copy()
        if ok:
            break
    else:
        raise NonCommuting("no joint eigenbasis found")
    V = U / g[:, None]
    unit = vss / sqrt(inner_product(vss, vss, p))
    overlaps = [abs(inner_product(V[:, k], unit, p)) for k in range(n)]
    k0 = int(np.argmax(overlaps))
    ratios = [abs(eig[ell][k]) / (2 * sqrt(ell)) for ell in ells for k in range(n) if k != k0]
    mr = max(ratios, default=0.0)
    return SpectralReport(p, list(ells), V, eig, k0, mr <= 1 + tol, mr)
