"""Arithmetic in F_{p^2} = F_p[t]/(t^2 - alpha t - beta) and polynomials over it.

Elements are pairs (a, b) standing for a + b t.
"""

from __future__ import annotations

from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

Elt = Tuple[int, int]


class Fp2:
    def __init__(self, p: int):
        self.p = p
        self.alpha, self.beta = self._modulus(p)

    @staticmethod
    def _modulus(p: int) -> Tuple[int, int]:
        # t^2 = alpha t + beta irreducible: no root in F_p
        for alpha in range(p):
            for beta in range(p):
                if all((x * x - alpha * x - beta) % p for x in range(p)):
                    return alpha, beta
        raise AssertionError("no irreducible quadratic")  # pragma: no cover

    # -- elements ----------------------------------------------------------
    def elt(self, a: int, b: int = 0) -> Elt:
        return (a % self.p, b % self.p)

    def add(self, x: Elt, y: Elt) -> Elt:
        p = self.p
        return ((x[0] + y[0]) % p, (x[1] + y[1]) % p)

    def sub(self, x: Elt, y: Elt) -> Elt:
        p = self.p
        return ((x[0] - y[0]) % p, (x[1] - y[1]) % p)

    def neg(self, x: Elt) -> Elt:
        return ((-x[0]) % self.p, (-x[1]) % self.p)

    def mul(self, x: Elt, y: Elt) -> Elt:
        p = self.p
        a, b = x
        c, d = y
        bd = b * d
        return ((a * c + bd * self.beta) % p, (a * d + b * c + bd * self.alpha) % p)

    def pow(self, x: Elt, n: int) -> Elt:
        out: Elt = (1, 0)
        while n:
            if n & 1:
                out = self.mul(out, x)
            x = self.mul(x, x)
            n >>= 1
        return out

    def inv(self, x: Elt) -> Elt:
        if x == (0, 0):
            raise ZeroDivisionError("inverse of 0 in F_p^2")
        return self.pow(x, self.p * self.p - 2)

    def frob(self, x: Elt) -> Elt:
        # t^p is the other root alpha - t
        a, b = x
        return ((a + b * self.alpha) % self.p, (-b) % self.p)

    def in_prime_field(self, x: Elt) -> bool:
        return x[1] == 0

    def all_elements(self) -> Tuple[np.ndarray, np.ndarray]:
        a, b = np.meshgrid(np.arange(self.p), np.arange(self.p), indexing="ij")
        return a.ravel().astype(np.int64), b.ravel().astype(np.int64)

    def vec_mul(self, a, b, c, d):
        p = self.p
        bd = b * d % p
        return (a * c + bd * self.beta) % p, (a * d + b * c + bd * self.alpha) % p

    def fmt(self, x: Elt) -> str:
        a, b = x
        if b == 0:
            return str(a)
        return f"{a}+{b}t" if a else f"{b}t"

    # -- polynomials (coefficient lists, low degree first) -----------------
    def poly_from_ints(self, coeffs: Sequence[int]) -> List[Elt]:
        return [(c % self.p, 0) for c in coeffs]

    def poly_trim(self, f: List[Elt]) -> List[Elt]:
        f = list(f)
        while f and f[-1] == (0, 0):
            f.pop()
        return f

    def poly_eval(self, f: Sequence[Elt], x: Elt) -> Elt:
        acc: Elt = (0, 0)
        for c in reversed(f):
            acc = self.add(self.mul(acc, x), c)
        return acc

    def poly_div_linear(self, f: Sequence[Elt], r: Elt) -> Tuple[List[Elt], Elt]:
        """f = (X - r) q + rem."""
        n = len(f) - 1
        if n < 1:
            return [], f[0] if f else (0, 0)
        q = [(0, 0)] * n
        acc = f[n]
        for i in range(n - 1, -1, -1):
            q[i] = acc
            acc = self.add(f[i], self.mul(acc, r))
        return q, acc

    def root_multiplicity(self, f: Sequence[Elt], r: Elt) -> Tuple[int, List[Elt]]:
        """Multiplicity of r as a root of f, and the cofactor."""
        f = self.poly_trim(list(f))
        if not f:
            raise ValueError("zero polynomial")
        k = 0
        while len(f) > 1:
            q, rem = self.poly_div_linear(f, r)
            if rem != (0, 0):
                break
            f = q
            k += 1
        return k, f


@lru_cache(maxsize=None)
def field(p: int) -> Fp2:
    return Fp2(p)
