"""Definite quaternion algebras over Q ramified at one prime, their maximal
orders for the primes with a single supersingular class, Gross lattices, and
the optimal-embedding count of an imaginary quadratic order."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import List, Sequence, Tuple

import numpy as np

from .padic_disc import class_number, is_fundamental, is_ramified, is_supersingular, unit_weight
from .spheres import QuadFormZ, _det, _inverse, enumerate_lattice_points
from .ssgraph import supersingular_set

SUPPORTED_PRIMES = (2, 3, 5, 7, 13)

Quat = Tuple[Fraction, Fraction, Fraction, Fraction]


class UnsupportedPrime(ValueError):
    pass


@dataclass(frozen=True)
class QuaternionAlgebra:
    """Q<i, j> with i^2 = a, j^2 = b, k = ij = -ji."""
    a: int
    b: int

    def mul(self, x: Sequence, y: Sequence) -> Quat:
        a, b = self.a, self.b
        x0, x1, x2, x3 = x
        y0, y1, y2, y3 = y
        return (x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
                x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
                x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
                x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1)

    @staticmethod
    def conj(x: Sequence) -> Quat:
        return (x[0], -x[1], -x[2], -x[3])

    @staticmethod
    def trace(x: Sequence) -> Fraction:
        return 2 * Fraction(x[0])

    def norm(self, x: Sequence) -> Fraction:
        x0, x1, x2, x3 = (Fraction(t) for t in x)
        return x0 * x0 - self.a * x1 * x1 - self.b * x2 * x2 + self.a * self.b * x3 * x3

    def pairing(self, x: Sequence, y: Sequence) -> Fraction:
        """tr(x conj(y)) = nr(x + y) - nr(x) - nr(y)."""
        return self.trace(self.mul(x, self.conj(y)))


@dataclass(frozen=True)
class MaximalOrderData:
    p: int
    algebra: QuaternionAlgebra
    basis: Tuple[Quat, ...]  # rows in 1, i, j, k coordinates; basis[0] = 1

    def coordinates(self, x: Sequence) -> List[Fraction]:
        """Coordinates of x in the order basis."""
        inv = _inverse([[Fraction(t) for t in row] for row in self.basis])
        return [sum(Fraction(x[i]) * inv[i][k] for i in range(4)) for k in range(4)]

    def is_integral(self) -> bool:
        alg = self.algebra
        return all(alg.trace(e).denominator == 1 and alg.norm(e).denominator == 1
                   for e in self.basis)

    def is_closed(self) -> bool:
        alg = self.algebra
        for e in self.basis:
            for f in self.basis:
                if any(c.denominator != 1 for c in self.coordinates(alg.mul(e, f))):
                    return False
        return True

    def discriminant(self) -> int:
        """|det(tr(e_i conj e_j))|, the square of the reduced discriminant."""
        alg = self.algebra
        G = [[alg.pairing(e, f) for f in self.basis] for e in self.basis]
        return abs(int(_det(G)))

    def verify(self) -> None:
        if not self.is_integral():
            raise ValueError(f"order for p={self.p} has non-integral elements")
        if not self.is_closed():
            raise ValueError(f"order for p={self.p} is not closed under multiplication")
        if self.discriminant() != self.p**2:
            raise ValueError(f"order for p={self.p} has discriminant {self.discriminant()}")


def parse_order(text: str) -> MaximalOrderData:
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    head = dict(t.split("=") for t in lines[0])
    rows = tuple(tuple(Fraction(t) for t in ln) for ln in lines[1:5])
    if len(rows) != 4 or any(len(r) != 4 for r in rows):
        raise ValueError("order file needs four rows of four rationals")
    return MaximalOrderData(int(head["p"]), QuaternionAlgebra(int(head["a"]), int(head["b"])), rows)


@lru_cache(maxsize=None)
def maximal_order(p: int) -> MaximalOrderData:
    if p not in SUPPORTED_PRIMES:
        raise UnsupportedPrime(f"no maximal order data for p={p}")
    text = resources.files("cmlab.data").joinpath(f"order_{p}.txt").read_text()
    O = parse_order(text)
    assert O.p == p and O.basis[0] == (1, 0, 0, 0)
    O.verify()
    return O


@dataclass(frozen=True)
class GrossLattice:
    p: int
    basis: Tuple[Quat, ...]      # trace-zero elements 2x - tr(x)
    form: QuadFormZ              # evaluates nr on coordinates

    @property
    def gram(self) -> np.ndarray:
        return self.form.gram


def gross_lattice(order: MaximalOrderData) -> GrossLattice:
    """{2x - tr x : x in O}, the trace-zero part of Z + 2O, with nr as a ternary form."""
    alg = order.algebra
    basis = []
    for e in order.basis[1:]:
        t = alg.trace(e)
        basis.append((2 * e[0] - t, 2 * e[1], 2 * e[2], 2 * e[3]))
    G = [[alg.pairing(x, y) for y in basis] for x in basis]
    assert all(g.denominator == 1 for row in G for g in row)
    return GrossLattice(order.p, tuple(basis), QuadFormZ([[int(g) for g in row] for row in G]))


def trace_zero_basis(order: MaximalOrderData) -> List[Quat]:
    """A Z-basis of the trace-zero elements of O (kernel of the trace row)."""
    t = [int(order.algebra.trace(e)) for e in order.basis]
    # unimodular column operations bring t to (g, 0, 0, 0); the last columns span the kernel
    U = [[int(i == j) for j in range(4)] for i in range(4)]
    t = t[:]
    for c in range(1, 4):
        while t[c]:
            q = t[0] // t[c]
            t[0], t[c] = t[c], t[0] - q * t[c]
            for row in U:
                row[0], row[c] = row[c], row[0] - q * row[c]
    out = []
    for c in range(1, 4):
        v = [sum(U[i][c] * order.basis[i][k] for i in range(4)) for k in range(4)]
        out.append(tuple(Fraction(x) for x in v))
    return out


def lattice_index(gl: GrossLattice, order: MaximalOrderData) -> int:
    """[L : 2 O^0] with O^0 the trace-zero part of O."""
    big = [[Fraction(x) for x in v[1:]] for v in gl.basis]
    small = [[2 * Fraction(x) for x in v[1:]] for v in trace_zero_basis(order)]
    idx = abs(_det(small)) / abs(_det(big))
    assert idx.denominator == 1
    return int(idx)


def embedding_count_formula(p: int, d: int) -> Fraction:
    """#Aut(ss) h(d) / (2 w_{d,1} eps_d) for the single supersingular class."""
    ss = supersingular_set(p)
    if len(ss) != 1:
        raise UnsupportedPrime(f"p={p} has {len(ss)} supersingular classes")
    eps = Fraction(1) if is_ramified(d, p) else Fraction(1, 2)
    return Fraction(ss.auts[0] * class_number(d), 2 * unit_weight(d, 1)) / eps


def gross_count(p: int, d: int) -> int:
    """#{phi in the Gross lattice : nr(phi) = |d|}, by lattice enumeration."""
    if not is_fundamental(d):
        raise ValueError(f"{d} is not a fundamental discriminant")
    if not is_supersingular(d, p):
        raise ValueError(f"{d} is not {p}-supersingular")
    gl = gross_lattice(maximal_order(p))
    return len(enumerate_lattice_points(gl.form, -d))
