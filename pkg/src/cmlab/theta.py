"""Finite linear algebra behind theta series twisted by functions on residue
sets: orthonormal complements of the constant function, theta coefficients,
the variance identity, the level, and the exponential sums at cusps."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm, sqrt
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .arith import ord_p
from .spheres import QuadFormZ, _inverse, all_residues, encode, enumerate_lattice_points, kappa

Residue = Tuple[int, ...]
TOL = 1e-9


class Insufficient(ValueError):
    """Too few nonzero coefficients to fit a growth exponent."""


@dataclass(frozen=True)
class FunctionOnSigma:
    sigma: Tuple[Residue, ...]
    values: Tuple[complex, ...]

    def __post_init__(self):
        if len(self.sigma) != len(self.values):
            raise ValueError("one value per residue")

    @classmethod
    def constant(cls, sigma: Sequence[Residue], c=1) -> "FunctionOnSigma":
        sigma = tuple(tuple(int(t) for t in s) for s in sigma)
        return cls(sigma, tuple(c for _ in sigma))

    def __call__(self, s: Residue):
        return self.values[self.sigma.index(tuple(s))]

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=complex)

    def inner(self, other: "FunctionOnSigma"):
        """<f, g> = sum f conj(g)."""
        if self.sigma != other.sigma:
            raise ValueError("functions live on different sets")
        return sum(a * b.conjugate() for a, b in zip(self.values, other.values))


def basis_complement(sigma: Sequence[Residue], exact: bool = False) -> List[FunctionOnSigma]:
    """Basis of the orthogonal complement of 1_Sigma (Helmert vectors).

    With exact=False the vectors are orthonormal floats; with exact=True they
    are the unnormalised integer vectors f_k = (1, ..., 1, -k, 0, ...) whose
    squared norms are k(k + 1).
    """
    sigma = tuple(tuple(int(t) for t in s) for s in sigma)
    n = len(sigma)
    out = []
    for k in range(1, n):
        vals = [1] * k + [-k] + [0] * (n - k - 1)
        if exact:
            out.append(FunctionOnSigma(sigma, tuple(vals)))
        else:
            s = sqrt(k * (k + 1))
            out.append(FunctionOnSigma(sigma, tuple(v / s for v in vals)))
    return out


def gram_matrix(fs: Sequence[FunctionOnSigma]) -> np.ndarray:
    M = np.array([f.as_array() for f in fs]).reshape(len(fs), -1)
    return M @ M.conj().T


def _reduction_index(points: np.ndarray, sigma: Tuple[Residue, ...], mod: int) -> np.ndarray:
    """Index in sigma of each point's reduction, -1 if outside."""
    scodes = encode(np.array(sigma, dtype=np.int64).reshape(len(sigma), -1), mod)
    lookup = {int(c): i for i, c in enumerate(scodes)}
    if len(points) == 0:
        return np.zeros(0, dtype=np.int64)
    return np.array([lookup.get(int(c), -1) for c in encode(points, mod)], dtype=np.int64)


def theta_coefficient(Q: QuadFormZ, f: FunctionOnSigma, p: int, r: int, m: int,
                      points: Optional[np.ndarray] = None):
    """sum over x in V_m(Q) with red_r(x) in Sigma of f(red_r(x))."""
    if any(not any(s) for s in f.sigma):
        raise ValueError("Sigma must avoid the zero residue")
    if points is None:
        points = enumerate_lattice_points(Q, m)
    idx = _reduction_index(points, f.sigma, p**r)
    idx = idx[idx >= 0]
    counts = np.bincount(idx, minlength=len(f.sigma))
    return sum(int(c) * v for c, v in zip(counts, f.values))


def variance(Q: QuadFormZ, sigma: Sequence[Residue], p: int, r: int, m: int,
             points: Optional[np.ndarray] = None) -> Fraction:
    """sum_sigma (#{x : red_r x = sigma} / #V_m - 1/#Sigma)^2."""
    sigma = tuple(tuple(int(t) for t in s) for s in sigma)
    if points is None:
        points = enumerate_lattice_points(Q, m)
    idx = _reduction_index(points, sigma, p**r)
    if (idx < 0).any():
        raise ValueError("some reductions of V_m fall outside Sigma")
    counts = np.bincount(idx, minlength=len(sigma))
    total = len(points)
    if total == 0:
        raise ValueError(f"V_{m} is empty")
    return sum((Fraction(int(c), total) - Fraction(1, len(sigma))) ** 2 for c in counts)


def variance_from_theta(Q: QuadFormZ, sigma: Sequence[Residue], p: int, r: int, m: int,
                        points: Optional[np.ndarray] = None) -> Fraction:
    """sum_{f in B_0} |theta_f(m)|^2 / #V_m^2 over the exact Helmert basis."""
    if points is None:
        points = enumerate_lattice_points(Q, m)
    total = len(points)
    if total == 0:
        raise ValueError(f"V_{m} is empty")
    out = Fraction(0)
    for k, f in enumerate(basis_complement(sigma, exact=True), start=1):
        c = theta_coefficient(Q, f, p, r, m, points)
        out += Fraction(c * c, k * (k + 1))
    return out / (total * total)


def form_level(Q: QuadFormZ) -> int:
    """Smallest N with N A^-1 integral."""
    inv = _inverse(Q.gram.tolist())
    N = 1
    for row in inv:
        for x in row:
            N = lcm(N, x.denominator)
    return N


def level_N(Q: QuadFormZ, p: int, r: int) -> int:
    """lcm(2 p^(2r) N_Q, det(A_Q) 2^(n + 2))."""
    return lcm(2 * p ** (2 * r) * form_level(Q), Q.det * 2 ** (Q.n + 2))


def _lifts(sigma: Residue, mod_small: int, mod_big: int) -> np.ndarray:
    n = len(sigma)
    k = mod_big // mod_small
    offs = all_residues(n, k) * mod_small
    return offs + np.asarray(sigma, dtype=np.int64)


def cusp_sum(Q: QuadFormZ, p: int, r: int, t: int, a: int, c: int, sigma: Residue) -> complex:
    """sum over sigma' mod p^t c lifting sigma mod p^r of exp(2 pi i a Q(sigma') / c)."""
    if c < 1:
        raise ValueError("c must be positive")
    if (p**t * c) % p**r:
        raise ValueError(f"p^r = {p**r} does not divide p^t c = {p**t * c}")
    X = _lifts(tuple(sigma), p**r, p**t * c)
    qv = (Q.values(X) * a) % c
    return complex(np.exp(2j * np.pi * qv / c).sum())


def cusp_sum_table(Q: QuadFormZ, p: int, r: int, t: int, a: int, c: int,
                   sigma: Sequence[Residue]) -> np.ndarray:
    return np.array([cusp_sum(Q, p, r, t, a, c, s) for s in sigma])


def cusp_exponents(p: int, r: int, c: int) -> Tuple[int, int]:
    """(s, t): s the largest integer <= r with p^s | c, t = r - s."""
    s = min(ord_p(c, p), r)
    return s, r - s


def finite_cusp_limit(Q: QuadFormZ, f: FunctionOnSigma, p: int, r: int, a: int, c: int) -> complex:
    """Limit of theta_f(gamma tau) / (-i tau)^(n/2) at the cusp a/c."""
    if gcd(a, c) != 1:
        raise ValueError("a/c must be reduced")
    s, t = cusp_exponents(p, r, c)
    E = cusp_sum_table(Q, p, r, t, a, c, f.sigma)
    return complex(np.dot(f.as_array(), E) / (p ** ((r - s) * Q.n) * sqrt(Q.det)))


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    n_used: int
    reference: float  # n/4 - kappa_n


def decay_estimate(Q: QuadFormZ, f: FunctionOnSigma, p: int, r: int, ms: Sequence[int],
                   reference: Optional[float] = None,
                   coefficients: Optional[Dict[int, complex]] = None) -> DecayFit:
    """Least-squares slope of log |theta_f(m)| against log m over nonzero coefficients."""
    xs, ys = [], []
    for m in ms:
        c = coefficients[m] if coefficients is not None else theta_coefficient(Q, f, p, r, m)
        if abs(c) > TOL:
            xs.append(np.log(m))
            ys.append(np.log(abs(c)))
    if len(xs) < 5:
        raise Insufficient(f"only {len(xs)} nonzero coefficients")
    slope, intercept = np.polyfit(xs, ys, 1)
    ref = float(Fraction(Q.n, 4) - kappa(Q.n)) if reference is None else reference
    return DecayFit(float(slope), float(intercept), len(xs), ref)
