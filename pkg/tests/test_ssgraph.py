from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import Poly, symbols

from cmlab.arith import is_prime, sigma
from cmlab.ffield import field
from cmlab.ssgraph import (PrimeTooLarge, UnsupportedFactor, brandt_matrix,
                           deuring_polynomial, frobenius_matrix, modular_polynomial,
                           specialize_x, spectral_report, supersingular_set,
                           weighted_selfadjoint)

X, Y = symbols("X Y")
PRIMES = [q for q in range(2, 98) if is_prime(q)]
BRANDT_PRIMES = [11, 13, 23, 37]
LEVELS = [2, 3, 5, 7]


# -- F_{p^2} -----------------------------------------------------------------

@given(st.sampled_from([3, 5, 7, 11, 13]), st.integers(0, 168), st.integers(0, 168))
def test_field_axioms(p, u, v):
    F = field(p)
    x, y = F.elt(u, u // p), F.elt(v, v // p)
    assert F.mul(x, y) == F.mul(y, x)
    assert F.frob(F.mul(x, y)) == F.mul(F.frob(x), F.frob(y))
    assert F.frob(F.frob(x)) == x
    assert F.pow(x, p) == F.frob(x)
    if x != (0, 0):
        assert F.mul(x, F.inv(x)) == (1, 0)


def test_field_inverse_zero():
    with pytest.raises(ZeroDivisionError):
        field(7).inv((0, 0))


def test_root_multiplicity():
    F = field(5)
    f = F.poly_from_ints([-8, 12, -6, 1])  # (X - 2)^3
    assert F.root_multiplicity(f, (2, 0))[0] == 3
    assert F.root_multiplicity(f, (3, 0))[0] == 0
    with pytest.raises(ValueError):
        F.root_multiplicity([], (0, 0))


# -- supersingular set -------------------------------------------------------

def test_small_supersingular_sets():
    assert supersingular_set(2).points == (((0, 0), 24),)
    assert supersingular_set(3).points == (((0, 0), 12),)
    assert supersingular_set(7).points == (((6, 0), 4),)
    assert supersingular_set(11).points == (((0, 0), 6), ((1, 0), 4))
    assert len(supersingular_set(37)) == 3


@pytest.mark.parametrize("p", PRIMES)
def test_mass(p):
    ss = supersingular_set(p)
    assert ss.mass() == Fraction(p - 1, 24)
    assert sum(ss.eisenstein_exact()) == 1


@pytest.mark.parametrize("p", [q for q in PRIMES if q > 3])
def test_count_matches_class_number_formula(p):
    # number of supersingular classes is floor(p/12) + {0, 1, 1, 2} by p mod 12
    extra = {1: 0, 5: 1, 7: 1, 11: 2}[p % 12]
    assert len(supersingular_set(p)) == p // 12 + extra


def test_supersingular_errors():
    with pytest.raises(ValueError):
        supersingular_set(15)
    with pytest.raises(PrimeTooLarge):
        supersingular_set(100003)


def test_deuring_polynomial():
    # (p-1)/2 = 3 at p = 7: sum C(3,k)^2 x^k = 1 + 9x + 9x^2 + x^3
    assert deuring_polynomial(7) == [1, 2, 2, 1]


# -- modular polynomials -----------------------------------------------------

def test_phi2_at_zero():
    assert specialize_x(2, 0) == [-157464000000000, 8748000000, -162000, 1]
    assert sum(c * 54000**k for k, c in enumerate(specialize_x(2, 0))) == 0


@pytest.mark.parametrize("ell", LEVELS)
def test_modular_polynomial_symmetry_and_degree(ell):
    phi = modular_polynomial(ell)
    assert all(phi[(j, i)] == c for (i, j), c in phi.items())
    assert max(i for i, _ in phi) == ell + 1
    assert phi[(ell + 1, 0)] == 1


@pytest.mark.parametrize("ell", LEVELS)
def test_kronecker_congruence(ell):
    phi = modular_polynomial(ell)
    lhs = Poly(sum(c * X**i * Y**j for (i, j), c in phi.items()), X, Y, modulus=ell)
    rhs = Poly((X - Y**ell) * (X**ell - Y), X, Y, modulus=ell)
    assert lhs == rhs


# -- Brandt matrices ---------------------------------------------------------

def _sympy_brandt(p, ell):
    """Row s counts roots of Phi_ell(j_s, Y) over F_p via sympy factorisation."""
    ss = supersingular_set(p)
    js = [j for j, _ in ss.js]
    assert all(b == 0 for _, b in ss.js)
    B = np.zeros((len(js), len(js)), dtype=np.int64)
    for s, js_ in enumerate(js):
        poly = Poly(list(reversed(specialize_x(ell, js_))), Y, modulus=p)
        for fac, mult in poly.factor_list()[1]:
            if fac.degree() == 1:
                root = int(-fac.all_coeffs()[1] * pow(int(fac.all_coeffs()[0]), -1, p)) % p
                B[s, js.index(root)] += mult
    return B


@pytest.mark.parametrize("p", [11, 13, 17, 19, 23])
@pytest.mark.parametrize("ell", LEVELS)
def test_brandt_against_sympy_factorisation(p, ell):
    if ell == p:
        return
    assert (brandt_matrix(p, ell).entries == _sympy_brandt(p, ell)).all()


def test_brandt_examples():
    assert (brandt_matrix(11, 1).entries == np.eye(2)).all()
    assert brandt_matrix(11, 2).entries.tolist() == [[0, 3], [2, 1]]
    assert (brandt_matrix(11, 11).entries == 12 * np.eye(2)).all()
    assert brandt_matrix(37, 2).entries.tolist() == [[1, 1, 1], [1, 0, 2], [1, 2, 0]]
    with pytest.raises(ValueError):
        brandt_matrix(11, 0)
    with pytest.raises(UnsupportedFactor):
        brandt_matrix(11, 13)
    assert brandt_matrix(11, 22).experimental
    assert not brandt_matrix(11, 121).experimental and not brandt_matrix(11, 6).experimental


@pytest.mark.parametrize("p", BRANDT_PRIMES)
def test_brandt_structure(p):
    ss = supersingular_set(p)
    v = ss.eisenstein_exact()
    ells = [ell for ell in LEVELS if ell != p]
    for ell in ells:
        B = brandt_matrix(p, ell).entries
        assert brandt_matrix(p, ell).row_sums() == [sigma(ell)] * len(ss)
        assert weighted_selfadjoint(B, ss.auts)
        # v^ss is an eigenvector of B^T with eigenvalue sigma(ell)
        Bv = [sum(int(B[s, t]) * v[s] for s in range(len(ss))) for t in range(len(ss))]
        assert Bv == [sigma(ell) * x for x in v]
        # B(ell^2) = B(ell)^2 - ell I, B(ell^3) = B(ell) B(ell^2) - ell B(ell)
        I = np.eye(len(ss), dtype=np.int64)
        assert (brandt_matrix(p, ell**2).entries == B @ B - ell * I).all()
        assert (brandt_matrix(p, ell**3).entries == B @ brandt_matrix(p, ell**2).entries - ell * B).all()
        for other in ells:
            C = brandt_matrix(p, other).entries
            assert (B @ C == C @ B).all()
            if other != ell:
                assert (brandt_matrix(p, ell * other).entries == B @ C).all()


@pytest.mark.parametrize("p", BRANDT_PRIMES)
def test_frobenius(p):
    Fr = frobenius_matrix(p)
    n = len(supersingular_set(p))
    assert (Fr @ Fr == np.eye(n)).all()
    for ell in LEVELS:
        if ell != p:
            B = brandt_matrix(p, ell).entries
            assert (Fr @ B == B @ Fr).all()
    assert (brandt_matrix(p, p * p).entries == sigma(p * p) * np.eye(n)).all()


@pytest.mark.parametrize("p", BRANDT_PRIMES)
def test_spectrum(p):
    ells = [ell for ell in LEVELS if ell != p]
    rep = spectral_report(p, ells)
    assert rep.ramanujan_ok
    for ell in ells:
        assert abs(rep.eigenvalues[ell][rep.eisenstein_index] - sigma(ell)) < 1e-8
        assert (np.abs(rep.cusp_eigenvalues(ell)) <= 2 * np.sqrt(ell) + 1e-8).all()


def test_spectrum_known_eigenvalues():
    # p = 11: one cusp form with a_2 = -2; p = 37: a_2 in {-2, 0}; p = 23: a_2 = (-1 +- sqrt 5)/2
    assert sorted(np.round(spectral_report(11, [2]).cusp_eigenvalues(2), 8)) == [-2.0]
    assert sorted(np.round(spectral_report(37, [2]).cusp_eigenvalues(2), 8)) == [-2.0, 0.0]
    lam = sorted(spectral_report(23, [2]).cusp_eigenvalues(2))
    assert np.allclose(lam, [(-1 - 5**0.5) / 2, (-1 + 5**0.5) / 2])


def test_spectral_rejects_bad_level():
    with pytest.raises(UnsupportedFactor):
        spectral_report(11, [11])
    with pytest.raises(UnsupportedFactor):
        spectral_report(11, [13])
