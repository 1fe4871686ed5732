"""Imaginary quadratic discriminants: conductors, p-adic classes, local norm
groups, reduced binary quadratic forms and class numbers."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt
from typing import Iterator, List, Tuple

from .arith import factorize, is_prime, is_squarefree, is_unit_square, kronecker, legendre, ord_p


class NotSupersingular(ValueError):
    """p splits in the quadratic field of the discriminant."""


class CharacterNotFound(RuntimeError):
    """No represented prime coprime to the discriminant within the search budget."""


# ---------------------------------------------------------------------------
# discriminants
# ---------------------------------------------------------------------------

def is_discriminant(D: int) -> bool:
    return D < 0 and D % 4 in (0, 1)


def is_fundamental(d: int) -> bool:
    if not is_discriminant(d):
        return False
    if d % 4 == 1:
        return is_squarefree(d)
    d0 = d // 4
    return d0 % 4 in (2, 3) and is_squarefree(d0)


@lru_cache(maxsize=100_000)
def factor_discriminant(D: int) -> Tuple[int, int]:
    """(d, f) with d fundamental and D = d f^2."""
    if not is_discriminant(D):
        raise ValueError(f"{D} is not a negative discriminant")
    core, f = -1, 1
    for q, e in factorize(D):
        f *= q ** (e // 2)
        core *= q ** (e % 2)
    # core is the squarefree kernel (with sign); d = core or 4 core
    if core % 4 == 1:
        return core, f
    return 4 * core, f // 2


def fundamental_discriminants(bound: int, lo: int = 1) -> List[int]:
    """Negative fundamental discriminants d with lo <= |d| <= bound, by |d|."""
    return [-n for n in range(max(lo, 3), bound + 1) if is_fundamental(-n)]


def is_supersingular(D: int, p: int) -> bool:
    """p is inert or ramified in Q(sqrt D)."""
    d, _ = factor_discriminant(D)
    if p == 2:
        return d % 8 != 1
    return kronecker(d, p) != 1


def is_ramified(D: int, p: int) -> bool:
    d, _ = factor_discriminant(D)
    return d % p == 0


def unit_weight(d: int, f: int) -> int:
    """Half the number of units of the order of discriminant d f^2."""
    if f == 1 and d == -3:
        return 3
    if f == 1 and d == -4:
        return 2
    return 1


def prime_quadratic_factorization(d: int) -> List[int]:
    """Write a fundamental d as a product of coprime prime discriminants."""
    if not is_fundamental(d):
        raise ValueError(f"{d} is not fundamental")
    out = []
    rest = d
    for q, _ in factorize(d):
        if q == 2:
            continue
        qs = q if q % 4 == 1 else -q
        out.append(qs)
        rest //= qs
    if rest != 1:
        assert rest in (-4, 8, -8), rest
        out.insert(0, rest)
    return out


def prime_discriminant_at(d: int, p: int) -> int:
    """The prime discriminant factor p* of d at p (requires p | d)."""
    for pd in prime_quadratic_factorization(d):
        if pd % p == 0:
            return pd
    raise ValueError(f"{p} does not divide {d}")


# ---------------------------------------------------------------------------
# p-adic classes
# ---------------------------------------------------------------------------

# 2-adic fundamental classes as (representative, modulus), with a d0 realising each
TWO_ADIC_CLASSES: Tuple[Tuple[int, int], ...] = (
    (-3, 8), (-4, 32), (12, 32), (8, 64), (-8, 64), (24, 64), (-24, 64))
TWO_ADIC_D0: Tuple[int, ...] = (-3, -1, -5, -14, -2, -10, -6)
ODD_CLASS_NAMES: Tuple[str, ...] = ("nonsquare unit", "p * square unit", "p * nonsquare unit")


@dataclass(frozen=True)
class PadicDiscClass:
    p: int
    fundamental_id: int
    m: int
    ramified: bool

    def contains(self, D: int) -> bool:
        """Is D in fundamental_class * p^(2m)?"""
        p, k = self.p, 2 * self.m
        if D == 0 or ord_p(D, p) < k:
            return False
        x = D // p**k
        if p == 2:
            rep, mod = TWO_ADIC_CLASSES[self.fundamental_id]
            return (x - rep) % mod == 0
        v = ord_p(x, p)
        if self.fundamental_id == 0:
            return v == 0 and legendre(x, p) == -1
        want = 1 if self.fundamental_id == 1 else -1
        return v == 1 and legendre(x // p, p) == want

    def d0(self) -> int:
        """A squarefree integer with Q_p(sqrt d0) the quadratic extension of this class."""
        if self.p == 2:
            return TWO_ADIC_D0[self.fundamental_id]
        a = nonresidue(self.p)
        return (a, self.p, a * self.p)[self.fundamental_id]


def nonresidue(p: int) -> int:
    a = 2
    while legendre(a, p) != -1:
        a += 1
    return a


def fundamental_classes(p: int) -> List[PadicDiscClass]:
    n = 7 if p == 2 else 3
    return [PadicDiscClass(p, i, 0, i != 0) for i in range(n)]


def classify_padic(D: int, p: int) -> PadicDiscClass:
    """The p-adic discriminant containing D; raises NotSupersingular if p splits."""
    d, f = factor_discriminant(D)
    if not is_supersingular(d, p):
        raise NotSupersingular(f"{p} splits in Q(sqrt {D})")
    m = ord_p(f, p)
    for c in fundamental_classes(p):
        if c.contains(d):
            return PadicDiscClass(p, c.fundamental_id, m, c.ramified)
    raise AssertionError(f"no class for d={d}, p={p}")  # pragma: no cover


def norm_group_contains(n: int, fd: PadicDiscClass, p: int) -> bool:
    """Is the unit n a norm from the units of the maximal order of the class fd?"""
    if n % p == 0:
        raise ValueError(f"{n} is not a {p}-adic unit")
    if not fd.ramified:
        return True
    if p != 2:
        return legendre(n, p) == 1
    d0 = fd.d0()
    if d0 in (-1, -5):
        return n % 4 == 1
    if d0 in (-2, -10):
        return n % 8 in (1, 3)
    if d0 in (-6, -14):
        return n % 8 in (1, 7)
    raise AssertionError(d0)  # pragma: no cover


# ---------------------------------------------------------------------------
# binary quadratic forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BinaryForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        return not ((abs(b) == a or a == c) and b < 0)

    def reduce(self) -> "BinaryForm":
        a, b, c = self.a, self.b, self.c
        while True:
            if not (-a < b <= a):
                k = (a - b) // (2 * a)
                b, c = b + 2 * k * a, a * k * k + b * k + c
            if a > c:
                a, b, c = c, -b, a
                continue
            if a == c and b < 0:
                b = -b
            return BinaryForm(a, b, c)

    def inverse(self) -> "BinaryForm":
        return BinaryForm(self.a, -self.b, self.c).reduce()

    def compose(self, other: "BinaryForm") -> "BinaryForm":
        """Dirichlet composition of primitive forms of equal discriminant, reduced."""
        f1, f2 = self, other
        if f1.disc != f2.disc:
            raise ValueError("different discriminants")
        D = f1.disc
        if f1.a > f2.a:
            f1, f2 = f2, f1
        a1, b1, _ = f1.a, f1.b, f1.c
        a2, b2, c2 = f2.a, f2.b, f2.c
        s = (b1 + b2) // 2
        n = b2 - s
        if a2 % a1 == 0:
            y1, d = 0, a1
        else:
            d, u, _ = _xgcd(a2, a1)
            y1 = u
        if s % d == 0:
            y2, x2, d1 = -1, 0, d
        else:
            d1, x2, y2 = _xgcd(s, d)
            y2 = -y2
        v1, v2 = a1 // d1, a2 // d1
        r = (y1 * y2 * n - x2 * c2) % v1
        b3 = b2 + 2 * v2 * r
        a3 = v1 * v2
        c3 = (b3 * b3 - D) // (4 * a3)
        return BinaryForm(a3, b3, c3).reduce()

    def represented_primes(self, budget: int = 20) -> Iterator[int]:
        """Primes a x^2 + b x y + c y^2 with gcd(x, y) = 1, |x|, |y| <= budget, by size."""
        seen = set()
        vals = []
        for x in range(-budget, budget + 1):
            for y in range(0, budget + 1):
                if (y == 0 and x != 1) or gcd(x, y) != 1:
                    continue
                v = self(x, y)
                if v not in seen and is_prime(v):
                    seen.add(v)
                    vals.append(v)
        yield from sorted(vals)

    def __repr__(self) -> str:
        return f"({self.a},{self.b},{self.c})"


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """(g, u, v) with u a + v b = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


@lru_cache(maxsize=20_000)
def _reduced_forms(D: int) -> Tuple[BinaryForm, ...]:
    out = []
    amax = isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            out.append(BinaryForm(a, b, c))
    return tuple(out)


def class_group(D: int) -> List[BinaryForm]:
    """Reduced primitive forms of discriminant D; the first is the principal form."""
    if not is_discriminant(D):
        raise ValueError(f"{D} is not a negative discriminant")
    return list(_reduced_forms(D))


def class_number(D: int) -> int:
    return len(_reduced_forms(D))


def principal_form(D: int) -> BinaryForm:
    return BinaryForm(1, D % 2, (D % 2 - D) // 4)


def genus_character(form: BinaryForm, pstar: int, budget: int = 20) -> int:
    """kronecker(p*, q) for a prime q represented by `form` and coprime to its discriminant."""
    D = form.disc
    for q in form.represented_primes(budget):
        if D % q:
            return kronecker(pstar, q)
    raise CharacterNotFound(f"no usable prime represented by {form} within budget {budget}")
