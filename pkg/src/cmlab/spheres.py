"""Integral quadratic forms: lattice points on spheres V_m(Q), their reductions
mod p^r, Hensel-certified reduced p-adic spheres, deviation statistics and the
orthogonal-group orbits mod p^r."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .arith import NotASquare, factorize, is_unit_square, ord_p, padic_sqrt

ENUM_BUDGET = 2 * 10**6      # largest m accepted by enumerate_lattice_points
GROUP_BUDGET = 2 * 10**6     # largest number of matrices scanned by orbit_bruteforce

Residue = Tuple[int, ...]


class BudgetExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# forms
# ---------------------------------------------------------------------------

def _det(M: Sequence[Sequence[Fraction]]) -> Fraction:
    M = [list(map(Fraction, row)) for row in M]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            if f:
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return det


def _inverse(M: Sequence[Sequence[int]]) -> List[List[Fraction]]:
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for c in range(n):
        piv = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return [row[n:] for row in A]


class QuadFormZ:
    """Q(x) = x^T A x / 2 for a positive-definite symmetric A with even diagonal."""

    def __init__(self, gram):
        A = np.array(gram, dtype=np.int64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("gram matrix must be square")
        if not (A == A.T).all():
            raise ValueError("gram matrix must be symmetric")
        if (np.diag(A) % 2).any():
            raise ValueError("gram matrix must have even diagonal")
        self.gram = A
        self.n = A.shape[0]
        rows = A.tolist()
        minors = [_det([r[:k] for r in rows[:k]]) for k in range(1, self.n + 1)]
        if any(mi <= 0 for mi in minors):
            raise ValueError("form is not positive definite")
        self.det = int(minors[-1])
        inv = _inverse(rows)
        self.level = 1
        for row in inv:
            for x in row:
                self.level = self.level * x.denominator // gcd(self.level, x.denominator)

    @classmethod
    def diagonal(cls, coeffs: Sequence[int]) -> "QuadFormZ":
        """sum c_i x_i^2."""
        return cls(np.diag([2 * c for c in coeffs]))

    @classmethod
    def from_text(cls, text: str) -> "QuadFormZ":
        lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        n = int(lines[0][0])
        rows = [[int(t) for t in ln] for ln in lines[1:1 + n]]
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError("malformed form file")
        return cls(rows)

    def to_text(self) -> str:
        return "\n".join([str(self.n)] + [" ".join(map(str, r)) for r in self.gram.tolist()]) + "\n"

    def __call__(self, x) -> int:
        x = [int(t) for t in x]
        A = self.gram.tolist()
        return sum(A[i][j] * x[i] * x[j] for i in range(self.n) for j in range(self.n)) // 2

    def values(self, X: np.ndarray) -> np.ndarray:
        """Q on the rows of an integer array."""
        return np.einsum("ki,ij,kj->k", X, self.gram, X) // 2

    def gradient(self, X: np.ndarray) -> np.ndarray:
        return X @ self.gram

    def __eq__(self, other) -> bool:
        return isinstance(other, QuadFormZ) and np.array_equal(self.gram, other.gram)

    def __hash__(self) -> int:
        return hash(self.gram.tobytes())

    def __repr__(self) -> str:
        return f"QuadFormZ({self.gram.tolist()})"


SUM_OF_THREE_SQUARES = QuadFormZ.diagonal([1, 1, 1])
SUM_OF_FOUR_SQUARES = QuadFormZ.diagonal([1, 1, 1, 1])


# ---------------------------------------------------------------------------
# lattice points
# ---------------------------------------------------------------------------

def _fincke_pohst(A: np.ndarray) -> np.ndarray:
    """Upper-triangular q with Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2."""
    n = A.shape[0]
    q = A.astype(float) / 2.0
    for i in range(n):
        for j in range(i + 1, n):
            q[j, i] = q[i, j]
            q[i, j] = q[i, j] / q[i, i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k, l] -= q[k, i] * q[i, l]
    return np.triu(q)


def _isqrt_vec(v: np.ndarray) -> np.ndarray:
    s = np.floor(np.sqrt(np.maximum(v, 0).astype(float))).astype(np.int64)
    s -= (s * s > v)
    s += ((s + 1) * (s + 1) <= v)
    return s


def enumerate_lattice_points(Q: QuadFormZ, m: int, budget: int = ENUM_BUDGET) -> np.ndarray:
    """All x in Z^n with Q(x) = m, one per row."""
    if m < 1:
        raise ValueError("m must be positive")
    if m > budget:
        raise BudgetExceeded(f"m={m} above enumeration budget {budget}")
    A = Q.gram
    n = Q.n
    q = _fincke_pohst(A)
    eps = 1e-7 * (1 + m)
    a11 = int(A[0, 0])

    def solve_first(prefix: np.ndarray) -> np.ndarray:
        # prefix holds x_2..x_n; solve (a11/2) x1^2 + B x1 + C = m exactly
        if prefix.shape[0] == 0:
            return np.zeros((0, n), dtype=np.int64)
        B = prefix @ A[0, 1:]
        C = np.einsum("ki,ij,kj->k", prefix, A[1:, 1:], prefix) // 2
        disc = B * B - 2 * a11 * (C - m)
        ok = disc >= 0
        s = _isqrt_vec(np.where(ok, disc, 0))
        ok &= s * s == disc
        out = []
        for sign in (1, -1):
            num = -B + sign * s
            good = ok & (num % a11 == 0)
            if sign == -1:
                good &= s > 0
            x1 = num[good] // a11
            out.append(np.column_stack([x1, prefix[good]]))
        return np.vstack(out)

    if n == 1:
        x2 = Fraction(2 * m, a11)
        if x2.denominator == 1 and isqrt(int(x2)) ** 2 == int(x2):
            r = isqrt(int(x2))
            return np.array([[r], [-r]] if r else [[0]], dtype=np.int64)
        return np.zeros((0, 1), dtype=np.int64)

    chunks = []
    top = int(np.floor(np.sqrt(m / q[n - 1, n - 1]) + eps))
    for xn in range(-top, top + 1):
        # rows: values of x_k..x_n (columns ordered x_k, ..., x_n); partial sums
        rows = np.array([[xn]], dtype=np.int64)
        part = np.array([q[n - 1, n - 1] * xn * xn])
        for k in range(n - 2, 0, -1):
            cols = rows  # x_{k+1}..x_n
            c = -(cols @ q[k, k + 1:])
            rad2 = (m - part) / q[k, k]
            rad = np.sqrt(np.maximum(rad2, 0.0))
            lo = np.ceil(c - rad - eps).astype(np.int64)
            hi = np.floor(c + rad + eps).astype(np.int64)
            cnt = np.where(rad2 >= -eps, hi - lo + 1, 0)
            cnt = np.maximum(cnt, 0)
            total = int(cnt.sum())
            if total == 0:
                rows = np.zeros((0, n - k), dtype=np.int64)
                break
            idx = np.repeat(np.arange(len(cnt)), cnt)
            offs = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
            xk = lo[idx] + offs
            base = rows[idx]
            t = xk - c[idx]
            part = part[idx] + q[k, k] * t * t
            keep = part <= m + eps
            rows = np.column_stack([xk[keep], base[keep]])
            part = part[keep]
        chunks.append(solve_first(rows))
    pts = np.vstack(chunks) if chunks else np.zeros((0, n), dtype=np.int64)
    assert (Q.values(pts) == m).all()
    return pts


# ---------------------------------------------------------------------------
# residues mod p^r
# ---------------------------------------------------------------------------

def encode(X: np.ndarray, mod: int) -> np.ndarray:
    """Integer code of each row mod `mod` (base-mod digits)."""
    X = np.asarray(X, dtype=np.int64) % mod
    w = mod ** np.arange(X.shape[1], dtype=np.int64)
    return X @ w


def all_residues(n: int, mod: int) -> np.ndarray:
    return np.array(list(itertools.product(range(mod), repeat=n)), dtype=np.int64).reshape(-1, n)


def reduce_points(X: np.ndarray, p: int, r: int) -> np.ndarray:
    return np.asarray(X, dtype=np.int64) % p**r


def scale_points(X: np.ndarray, u: int) -> np.ndarray:
    """M_u: x -> u x."""
    return np.asarray(X, dtype=np.int64) * u


def _ord_vec(v: np.ndarray, p: int, cap: int) -> np.ndarray:
    """p-adic valuation of each entry, with 0 mapped to `cap`."""
    v = np.abs(np.asarray(v, dtype=np.int64))
    out = np.zeros(v.shape, dtype=np.int64)
    cur = v.copy()
    zero = cur == 0
    for _ in range(cap):
        div = (cur % p == 0) & ~zero
        if not div.any():
            break
        out += div
        cur = np.where(div, cur // p, cur)
    out[zero] = cap
    return out


@dataclass(frozen=True)
class ReducedSphere:
    p: int
    r: int
    ell: int
    residues: Tuple[Residue, ...]     # certified (liftable) residues, sorted
    undecided: Tuple[Residue, ...]    # could not be decided within the depth cap

    def __len__(self) -> int:
        return len(self.residues)

    def as_set(self) -> frozenset:
        return frozenset(self.residues)

    def is_certified(self, x: Residue) -> bool:
        return tuple(x) in self.as_set()


def certify(Q: QuadFormZ, Y: np.ndarray, ell: int, p: int, r: int, cap: int = 60) -> np.ndarray:
    """Hensel test on integer rows Y: |Q(y) - l| < |dQ(y)|^2 and |Q(y) - l| <= p^-r |dQ(y)|."""
    F = Q.values(Y) - ell
    v = _ord_vec(F, p, cap)
    g = _ord_vec(Q.gradient(Y), p, cap).min(axis=1)
    return (g < cap) & (v > 2 * g) & (v >= r + g)


@lru_cache(maxsize=256)
def reduced_sphere(Q: QuadFormZ, ell: int, p: int, r: int, depth: Optional[int] = None) -> ReducedSphere:
    """Residues mod p^r of the Z_p-points of Q = ell, each certified by Hensel's lemma."""
    if ell == 0:
        raise ValueError("ell must be nonzero")
    n = Q.n
    if p ** (r * n) > GROUP_BUDGET:
        raise BudgetExceeded(f"(Z/{p}^{r})^{n} too large")
    if depth is None:
        depth = r + 2 * (ord_p(ell, p) + ord_p(Q.det, p) + (p == 2)) + 3
    modr = p**r
    X = all_residues(n, modr)
    X = X[(Q.values(X) - ell) % modr == 0]
    certified = set()
    frontier = X
    N = r
    lifts = all_residues(n, p)
    while True:
        if frontier.shape[0]:
            ok = certify(Q, frontier, ell, p, r)
            for row in frontier[ok] % modr:
                certified.add(tuple(int(t) for t in row))
            frontier = frontier[~ok]
        if frontier.shape[0]:
            done = np.array([tuple(int(t) for t in row) in certified for row in frontier % modr])
            frontier = frontier[~done]
        if frontier.shape[0] == 0 or N >= depth:
            break
        pN = p**N
        if (p ** (N + 1)) ** 2 * n * n * int(np.abs(Q.gram).max()) > 2**62:
            break
        Y = (frontier[:, None, :] + pN * lifts[None, :, :]).reshape(-1, n)
        N += 1
        Y = Y[(Q.values(Y) - ell) % p**N == 0]
        frontier = Y
    undecided = sorted({tuple(int(t) for t in row) for row in frontier % modr} - certified)
    return ReducedSphere(p, r, ell, tuple(sorted(certified)), tuple(undecided))


def same_reduction_hypotheses(ell: int, m: int, p: int, r: int) -> bool:
    """|m - l|_p < |2l|_p^2 and |m - l|_p <= |2l|_p p^-r, which force equal reductions mod p^r."""
    if ell == 0 or m == 0:
        raise ValueError("ell and m must be nonzero")
    if m == ell:
        return True
    v, w = ord_p(m - ell, p), ord_p(2 * ell, p)
    return v > 2 * w and v >= w + r


# ---------------------------------------------------------------------------
# deviation statistics
# ---------------------------------------------------------------------------

def kappa(n: int) -> Fraction:
    return Fraction(1, 2) if n % 2 == 0 else Fraction(2, 7)


@dataclass(frozen=True)
class DeviationReport:
    m: int
    n_points: int
    sigma: Tuple[Residue, ...]
    counts: Tuple[int, ...]
    variance: Fraction
    max_dev: Fraction
    bound_ratio: float


def residue_counts(points: np.ndarray, p: int, r: int, sigma: Sequence[Residue]) -> np.ndarray:
    mod = p**r
    sig = np.array(sigma, dtype=np.int64).reshape(len(sigma), -1)
    scodes = encode(sig, mod)
    order = np.argsort(scodes)
    pcodes = encode(points, mod) if len(points) else np.zeros(0, dtype=np.int64)
    pos = np.searchsorted(scodes[order], pcodes)
    pos = np.minimum(pos, len(scodes) - 1)
    if len(pcodes) and not (scodes[order][pos] == pcodes).all():
        raise ValueError("some reductions of V_m fall outside Sigma")
    counts = np.bincount(order[pos], minlength=len(sigma))
    return counts


def deviation_report(Q: QuadFormZ, m: int, p: int, r: int, sigma: Sequence[Residue],
                     points: Optional[np.ndarray] = None) -> DeviationReport:
    sigma = tuple(tuple(int(t) for t in s) for s in sigma)
    if not sigma:
        raise ValueError("Sigma must be nonempty")
    if points is None:
        points = enumerate_lattice_points(Q, m)
    total = len(points)
    if total == 0:
        raise ValueError(f"V_{m} is empty")
    counts = residue_counts(points, p, r, sigma)
    k = len(sigma)
    devs = [Fraction(int(c), total) - Fraction(1, k) for c in counts]
    var = sum((d * d for d in devs), Fraction(0))
    mx = max(abs(d) for d in devs)
    ratio = float(mx) * total / m ** float(Fraction(Q.n, 4) - kappa(Q.n))
    return DeviationReport(m, total, sigma, tuple(int(c) for c in counts), var, mx, ratio)


def square_part(m: int) -> int:
    """Largest square dividing m."""
    out = 1
    for q, e in factorize(m) if m > 1 else ():
        out *= q ** (2 * (e // 2))
    return out


@dataclass(frozen=True)
class PushforwardRow:
    m: int
    status: str          # "ok" or a skip reason
    u: Optional[int]
    n_points: int
    tv: Optional[float]


def linnik_pushforward_test(Q: QuadFormZ, ell: int, p: int, r: int, ms: Sequence[int],
                            square_cap: Optional[int] = None, buffer: int = 2) -> List[PushforwardRow]:
    """Total-variation distance between the law of u_j^-1 V_{m_j} mod p^r and the
    uniform law on the reduced sphere of ell, for m_j = ell u_j^2."""
    if Q.n == 3 and square_cap is None:
        raise ValueError("ternary forms need a square-part cap")
    target = reduced_sphere(Q, ell, p, r).residues
    tset = set(target)
    prec = max(r + buffer, 3 if p == 2 else 1)
    modr = p**r
    rows = []
    for m in ms:
        k = ord_p(ell, p)
        if ord_p(m, p) != k:
            rows.append(PushforwardRow(m, "valuation differs", None, 0, None))
            continue
        w = (m // p**k) * pow(ell // p**k, -1, p**prec) % p**prec
        if not is_unit_square(w, p):
            rows.append(PushforwardRow(m, "not a square unit", None, 0, None))
            continue
        if Q.n == 3 and square_part(m) > square_cap:
            rows.append(PushforwardRow(m, "square part above cap", None, 0, None))
            continue
        try:
            u = padic_sqrt(w, p, prec)
        except NotASquare:  # pragma: no cover - excluded above
            rows.append(PushforwardRow(m, "not a square unit", None, 0, None))
            continue
        pts = enumerate_lattice_points(Q, m)
        if len(pts) == 0:
            rows.append(PushforwardRow(m, "empty", u, 0, None))
            continue
        uinv = pow(u, -1, modr)
        red = (pts * uinv) % modr
        codes, cnt = np.unique(encode(red, modr), return_counts=True)
        emp = dict(zip(codes.tolist(), (cnt / len(pts)).tolist()))
        tcodes = encode(np.array(target), modr).tolist() if target else []
        unif = {c: 1.0 / len(target) for c in tcodes}
        keys = set(emp) | set(unif)
        tv = 0.5 * sum(abs(emp.get(c, 0.0) - unif.get(c, 0.0)) for c in keys)
        assert all(tuple(int(t) for t in row) in tset for row in red[:1000])
        rows.append(PushforwardRow(m, "ok", u, len(pts), tv))
    return rows


# ---------------------------------------------------------------------------
# orthogonal group mod p^r
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def orthogonal_group(Q: QuadFormZ, p: int, r: int, budget: int = GROUP_BUDGET) -> np.ndarray:
    """All T in GL_n(Z/p^r) with Q(T x) = Q(x) mod p^r, shape (k, n, n)."""
    n, mod = Q.n, p**r
    if mod ** (n * n) > budget:
        raise BudgetExceeded(f"{mod}^{n * n} matrices exceed budget {budget}")
    A = Q.gram
    half = np.diag(A) // 2
    found = []
    # columns of T are images of basis vectors: pick columns with the right Q value
    col = all_residues(n, mod)
    qv = Q.values(col) % mod
    cands = [col[qv == half[i] % mod] for i in range(n)]
    for combo in itertools.product(*[range(len(c)) for c in cands[:-1]]):
        cols = [cands[i][combo[i]] for i in range(n - 1)]
        ok = True
        for a in range(n - 1):
            for b in range(a + 1, n - 1):
                if (cols[a] @ A @ cols[b] - A[a, b]) % mod:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        last = cands[-1]
        good = np.ones(len(last), dtype=bool)
        for a in range(n - 1):
            good &= (last @ (A @ cols[a]) - A[a, n - 1]) % mod == 0
        for v in last[good]:
            T = np.column_stack(cols + [v])
            det = int(round(np.linalg.det(T)))
            if det % p:
                found.append(T)
    return np.array(found, dtype=np.int64).reshape(-1, n, n)


def orbit_bruteforce(Q: QuadFormZ, p: int, r: int, x: Residue) -> frozenset:
    """Orbit of x under the orthogonal group of Q mod p^r."""
    G = orthogonal_group(Q, p, r)
    mod = p**r
    imgs = (G @ np.asarray(x, dtype=np.int64)) % mod
    return frozenset(tuple(int(t) for t in row) for row in imgs)


def orbits(Q: QuadFormZ, p: int, r: int) -> List[frozenset]:
    """Partition of (Z/p^r)^n into orthogonal-group orbits."""
    seen = set()
    out = []
    for x in all_residues(Q.n, p**r):
        t = tuple(int(v) for v in x)
        if t in seen:
            continue
        orb = orbit_bruteforce(Q, p, r, t)
        seen |= orb
        out.append(orb)
    return out


def transitivity_flag(Q: QuadFormZ, ell: int, p: int, r: int) -> str:
    """Spot check of the transitivity assumption behind the uniform reference measure.

    "single-orbit" if the orthogonal group mod p^r moves one certified residue onto
    all of them (necessary, not sufficient, for transitivity over Z_p),
    "several-orbits" if it does not, "unchecked" when the group is too large to list.
    """
    res = reduced_sphere(Q, ell, p, r).residues
    if not res:
        return "unchecked"
    try:
        orb = orbit_bruteforce(Q, p, r, res[0])
    except BudgetExceeded:
        return "unchecked"
    return "single-orbit" if orb == frozenset(res) else "several-orbits"
