"""Regenerate the bundled classical modular polynomials Phi_l, l in {2,3,5,7}.

Phi_l(X, Y) = X^(l+1) + Y^(l+1) - X^l Y^l + sum_{a,b<=l} c_ab X^a Y^b with
c_ab = c_ba.  The unknowns are solved exactly from Phi_l(j(q), j(q^l)) = 0 as
Laurent series in q, with j = E4^3 / Delta computed in integer arithmetic.

    python tools/gen_modpoly.py [out_dir]
"""

import sys
from fractions import Fraction
from pathlib import Path


def sigma3(n):
    return sum(d**3 for d in range(1, n + 1) if n % d == 0)


def j_coefficients(N):
    """[c_-1, c_0, ..., c_{N-2}] of j(q) = sum c_n q^n."""
    e4 = [1] + [240 * sigma3(n) for n in range(1, N)]
    e4_3 = mul(mul(e4, e4, N), e4, N)
    # prod (1 - q^n)^24, then its inverse
    eta = [1] + [0] * (N - 1)
    for n in range(1, N):
        for _ in range(24):
            for k in range(N - 1, n - 1, -1):
                eta[k] -= eta[k - n]
    inv = [0] * N
    inv[0] = 1
    for k in range(1, N):
        inv[k] = -sum(eta[i] * inv[k - i] for i in range(1, k + 1))
    return mul(e4_3, inv, N)  # shifted by q^-1


def mul(a, b, N):
    out = [0] * N
    for i, x in enumerate(a[:N]):
        if x:
            for k, y in enumerate(b[: N - i]):
                out[i + k] += x * y
    return out


class Laurent:
    """Truncated Laurent series: coefficients from q^val up to q^top (inclusive)."""

    def __init__(self, val, coeffs, top):
        self.val, self.top = val, top
        self.c = coeffs[: max(0, top - val + 1)]

    def __mul__(self, other):
        val = self.val + other.val
        n = self.top - val + 1
        out = [0] * max(n, 0)
        for i, x in enumerate(self.c):
            if x and i < n:
                for k, y in enumerate(other.c[: n - i]):
                    out[i + k] += x * y
        return Laurent(val, out, self.top)

    def coeff(self, e):
        i = e - self.val
        return self.c[i] if 0 <= i < len(self.c) else 0


def solve_phi(l, top=12):
    lo = -l * (l + 1)
    # products lose accuracy by -valuation at each step; carry enough guard terms
    inner = top + 2 * (l + 1) ** 2
    N = inner + 4
    jc = j_coefficients(N)
    X = Laurent(-1, jc, inner)
    ycoef = [0] * (l * len(jc))
    for i, c in enumerate(jc):
        ycoef[l * i] = c
    Y = Laurent(-l, ycoef, inner)
    one = Laurent(0, [1], inner)
    xp, yp = [one], [one]
    for _ in range(l + 1):
        xp.append(xp[-1] * X)
        yp.append(yp[-1] * Y)
    unknowns = [(a, b) for a in range(l + 1) for b in range(a, l + 1) if (a, b) != (l, l)]
    cols = []
    for a, b in unknowns:
        s = xp[a] * yp[b]
        if a != b:
            s2 = xp[b] * yp[a]
            cols.append([s.coeff(e) + s2.coeff(e) for e in range(lo, top + 1)])
        else:
            cols.append([s.coeff(e) for e in range(lo, top + 1)])
    known = xp[l + 1] * one
    k2 = yp[l + 1] * one
    k3 = xp[l] * yp[l]
    rhs = [-(known.coeff(e) + k2.coeff(e) - k3.coeff(e)) for e in range(lo, top + 1)]
    rows = [[Fraction(col[i]) for col in cols] + [Fraction(rhs[i])] for i in range(len(rhs))]
    sol = gauss(rows, len(unknowns))
    coeffs = {}
    for (a, b), v in zip(unknowns, sol):
        assert v.denominator == 1, (l, a, b, v)
        if v:
            coeffs[(a, b)] = int(v)
    coeffs[(l + 1, 0)] = 1
    coeffs[(l, l)] = -1
    return coeffs


def gauss(rows, n):
    rows = [r[:] for r in rows]
    piv_rows = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            raise RuntimeError(f"underdetermined in column {c}")
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_rows.append(r)
        r += 1
    for i in range(r, len(rows)):
        assert rows[i][n] == 0, "inconsistent system"
    return [rows[i][n] for i in piv_rows]


def main(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for l in (2, 3, 5, 7):
        coeffs = solve_phi(l)
        lines = [f"ell={l}"]
        for (a, b), c in sorted(coeffs.items(), key=lambda t: (-t[0][0], -t[0][1])):
            lines.append(f"{a} {b} {c}")
        (out / f"modpoly_{l}.txt").write_text("\n".join(lines) + "\n")
        print(l, len(coeffs), "terms")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parents[1] / "src/cmlab/data")
