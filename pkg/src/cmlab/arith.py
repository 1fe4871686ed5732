"""Elementary arithmetic: factorisation, multiplicative functions, Dirichlet
convolution, Kronecker and Hilbert symbols, p-adic square roots."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from typing import Callable, Dict, List, Tuple, Union

Number = Union[int, Fraction]


class NotASquare(ValueError):
    """Raised when a p-adic unit has no square root."""


# ---------------------------------------------------------------------------
# factorisation and friends (trial division, desk scale)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=200_000)
def factorize(n: int) -> Tuple[Tuple[int, int], ...]:
    """Prime factorisation of |n| as ((q, e), ...) with q increasing."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            out.append((q, e))
        q += 1 if q == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = factorize(n)
    return len(f) == 1 and f[0][1] == 1


def primes_up_to(n: int) -> List[int]:
    return [q for q in range(2, n + 1) if is_prime(q)]


def ord_p(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("ord_p(0) is infinite")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def divisors(n: int) -> List[int]:
    ds = [1]
    for q, e in factorize(n):
        ds = [d * q**k for d in ds for k in range(e + 1)]
    return sorted(ds)


def sigma(n: int, k: int = 1) -> int:
    """Sum of k-th powers of the divisors of n."""
    out = 1
    for q, e in factorize(n):
        out *= sum(q ** (k * i) for i in range(e + 1))
    return out


def num_divisors(n: int) -> int:
    out = 1
    for _, e in factorize(n):
        out *= e + 1
    return out


def mobius(n: int) -> int:
    f = factorize(n) if n > 1 else ()
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for _, e in factorize(n))


# ---------------------------------------------------------------------------
# arithmetic functions and Dirichlet convolution
# ---------------------------------------------------------------------------

class ArithFn:
    """An arithmetic function n -> value, memoised on demand up to `bound`."""

    def __init__(self, fn: Callable[[int], Number], bound: int, name: str = "f"):
        if bound < 1:
            raise ValueError("bound must be >= 1")
        self._fn = fn
        self.bound = bound
        self.name = name
        self._cache: Dict[int, Number] = {}

    def __call__(self, n: int) -> Number:
        if not 1 <= n <= self.bound:
            raise ValueError(f"{self.name}({n}) outside 1..{self.bound}")
        if n not in self._cache:
            self._cache[n] = self._fn(n)
        return self._cache[n]

    def values(self) -> List[Number]:
        return [self(n) for n in range(1, self.bound + 1)]

    def __repr__(self) -> str:
        return f"ArithFn({self.name}, bound={self.bound})"


def convolve(f: ArithFn, g: ArithFn, bound: int | None = None) -> ArithFn:
    """Dirichlet convolution (f * g)(n) = sum_{ab=n} f(a) g(b)."""
    b = min(f.bound, g.bound) if bound is None else bound
    return ArithFn(lambda n: sum(f(a) * g(n // a) for a in divisors(n)), b,
                   f"({f.name}*{g.name})")


def identity_e(bound: int) -> ArithFn:
    return ArithFn(lambda n: 1 if n == 1 else 0, bound, "e")


def dirichlet_inverse(f: ArithFn, bound: int | None = None) -> ArithFn:
    """The Dirichlet inverse g of f, by the recursion over proper divisors."""
    bound = f.bound if bound is None else bound
    f1 = f(1)
    if f1 == 0:
        raise ValueError("f(1) = 0 has no Dirichlet inverse")
    inv1 = Fraction(1, 1) / f1
    if inv1.denominator == 1:
        inv1 = int(inv1)

    def g(n: int) -> Number:
        if n == 1:
            return inv1
        s = sum(f(n // a) * g_fn(a) for a in divisors(n) if a < n)
        v = -inv1 * s
        return int(v) if isinstance(v, Fraction) and v.denominator == 1 else v

    g_fn = ArithFn(g, bound, f"{f.name}^-1")
    # fill in increasing order so the recursion never goes deep
    for n in range(1, bound + 1):
        g_fn(n)
    return g_fn


def psi(d: int, bound: int) -> ArithFn:
    """n -> kronecker(d, n)."""
    return ArithFn(lambda n: kronecker(d, n), bound, f"psi_{d}")


def r_function(d: int, bound: int) -> ArithFn:
    """R_d = 1 * psi_d: number of ideals of norm n in the maximal order."""
    return ArithFn(lambda n: sum(kronecker(d, a) for a in divisors(n)), bound, f"R_{d}")


@lru_cache(maxsize=100_000)
def r_inverse(d: int, n: int) -> int:
    """Closed form of R_d^{-1} = mu * (mu psi_d), multiplicative in n."""
    out = 1
    for q, e in factorize(n) if n > 1 else ():
        ps = kronecker(d, q)
        if e == 1:
            out *= -1 - ps
        elif e == 2:
            out *= ps
        else:
            return 0
    return out


def r_inverse_sigma(d: int, n: int) -> int:
    """(R_d^{-1} * sigma_1)(n); on prime powers q^s it is q^s - psi_d(q) q^(s-1)."""
    out = 1
    for q, e in factorize(n) if n > 1 else ():
        out *= q**e - kronecker(d, q) * q ** (e - 1)
    return out


# ---------------------------------------------------------------------------
# Kronecker symbol
# ---------------------------------------------------------------------------

def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), fully extended to all integers n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    res = 1
    if n < 0:
        n = -n
        if a < 0:
            res = -res
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            res = -res
    # Jacobi symbol (a/n), n odd positive
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                res = -res
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            res = -res
        a %= n
    return res if n == 1 else 0


def legendre(a: int, p: int) -> int:
    return kronecker(a, p)


# ---------------------------------------------------------------------------
# Hilbert symbol over Q_p
# ---------------------------------------------------------------------------

def _split(a: int, p: int) -> Tuple[int, int]:
    v = ord_p(a, p)
    return v, a // p**v


def hilbert_symbol(a: int, b: int, p: int) -> int:
    """Hilbert symbol (a, b)_p for nonzero integers a, b."""
    if a == 0 or b == 0:
        raise ValueError("hilbert symbol needs nonzero arguments")
    alpha, u = _split(a, p)
    beta, v = _split(b, p)
    if p != 2:
        sign = -1 if (alpha * beta * (p - 1) // 2) % 2 else 1
        return sign * legendre(u, p) ** (beta % 2) * legendre(v, p) ** (alpha % 2)

    def eps(x):
        return ((x - 1) // 2) % 2

    def omega(x):
        return ((x * x - 1) // 8) % 2

    e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
    return -1 if e % 2 else 1


# ---------------------------------------------------------------------------
# square roots
# ---------------------------------------------------------------------------

def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def is_unit_square(n: int, p: int) -> bool:
    """Is the p-adic unit n a square in Z_p? (Legendre for odd p, n = 1 mod 8 for p = 2.)"""
    if n % p == 0:
        raise ValueError(f"{n} is not a {p}-adic unit")
    return n % 8 == 1 if p == 2 else legendre(n, p) == 1


def _sqrt_mod_prime(a: int, p: int) -> int:
    """Tonelli-Shanks."""
    a %= p
    if a == 0:
        return 0
    if p == 2:
        return a
    if legendre(a, p) != 1:
        raise NotASquare(f"{a} is not a square mod {p}")
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, x = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, x = t * c % p, x * b % p
    return x


def padic_sqrt(a: int, p: int, r: int) -> int:
    """x with x^2 = a mod p^r for a p-adic unit a (the smaller of +-x)."""
    if a % p == 0:
        raise ValueError(f"{a} is not a {p}-adic unit")
    if r < 1 or (p == 2 and r < 3):
        raise ValueError("precision too small")
    mod = p**r
    if p == 2:
        if a % 8 != 1:
            raise NotASquare(f"{a} is not a 2-adic square")
        x = 1
        # x^2 = a mod 2^k  ->  lift to 2^(k+1), k >= 3
        for k in range(3, r):
            if (x * x - a) % 2 ** (k + 1):
                x += 2 ** (k - 1)
        x %= mod
    else:
        x = _sqrt_mod_prime(a, p)
        pk = p
        for _ in range(1, r):
            pk *= p
            # Newton step in Z/p^k
            x = (x - (x * x - a) * pow(2 * x, -1, pk)) % pk
    return min(x, mod - x)


def crt(residues: List[int], moduli: List[int]) -> Tuple[int, int]:
    x, m = 0, 1
    for r_, n in zip(residues, moduli):
        g = gcd(m, n)
        if (r_ - x) % g:
            raise ValueError("incompatible congruences")
        l = m // g * n
        t = ((r_ - x) // g * pow(m // g, -1, n // g)) % (n // g)
        x = (x + m * t) % l
        m = l
    return x, m
