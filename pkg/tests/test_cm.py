from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st
from sympy import Poly, symbols

from cmlab.cm import (MismatchedIdentity, NotSupersingular, degree_formula, frobenius_invariant,
                      genus_partition, genus_split, hilbert_class_poly, is_prime_discriminant,
                      j_invariant, p_power_prediction, reduction_vector, residual_report,
                      zhang_consistency, zhang_prediction)
from cmlab.padic_disc import (class_number, factor_discriminant, fundamental_discriminants,
                              is_discriminant, is_supersingular)
from cmlab.arith import kronecker
from cmlab.ssgraph import supersingular_set

X = symbols("X")


def test_j_invariant_special_values():
    assert abs(j_invariant(1j, 100) - 1728) < 1e-20
    rho = mp.mpc(-0.5, mp.sqrt(3) / 2)
    assert abs(j_invariant(rho, 100)) < 1e-15
    # e^(pi sqrt 163) is within 1e-12 of an integer
    with mp.workprec(200):
        j163 = j_invariant(mp.mpc(-0.5, mp.sqrt(163) / 2))
        assert int(mp.nint(j163.real)) == -640320**3


@given(st.floats(-0.5, 0.5), st.floats(0.9, 3.0))
@settings(max_examples=40, deadline=None)
def test_j_invariant_against_mpmath(x, y):
    tau = mp.mpc(x, y)
    ours = j_invariant(tau, 80)
    ref = 1728 * mp.kleinj(tau)
    assert abs(ours - ref) <= 1e-12 * max(1, abs(ref))


def test_hilbert_class_polys():
    assert hilbert_class_poly(-3) == [0, 1]
    assert hilbert_class_poly(-4) == [-1728, 1]
    assert hilbert_class_poly(-7) == [3375, 1]
    assert hilbert_class_poly(-8) == [-8000, 1]
    assert hilbert_class_poly(-15) == [-121287375, 191025, 1]
    assert hilbert_class_poly(-23) == [12771880859375, -5151296875, 3491750, 1]
    with pytest.raises(ValueError):
        hilbert_class_poly(-50003, cap=50000)


@pytest.mark.parametrize("D", [-20, -39, -47, -56, -71, -84, -199, -399, -1003, -4004])
def test_hilbert_class_poly_degree_and_monic(D):
    H = hilbert_class_poly(D)
    assert len(H) - 1 == class_number(D)
    assert H[-1] == 1


def test_hilbert_class_poly_roots_are_j_values():
    # the roots of H_{-15} are j((1 + sqrt -15)/2) and j((1 + sqrt -15)/4)
    H = hilbert_class_poly(-15)
    for tau in (mp.mpc(-0.5, mp.sqrt(15) / 2), mp.mpc(-0.25, mp.sqrt(15) / 4)):
        j = j_invariant(tau, 120)
        assert abs(sum(c * j**k for k, c in enumerate(H))) < 1e-10 * abs(j) ** 2


def _sympy_roots_mod(H, p):
    """Root multiplicities of H mod p via sympy factorisation (F_p-rational roots only)."""
    out = {}
    for fac, mult in Poly(list(reversed(H)), X, modulus=p).factor_list()[1]:
        if fac.degree() == 1:
            a, b = (int(c) for c in fac.all_coeffs())
            out[(-b * pow(a, -1, p)) % p] = out.get((-b * pow(a, -1, p)) % p, 0) + mult
    return out


def test_reduction_vector_examples():
    v = reduction_vector(-7, 7)
    assert v.entries == (1,) and supersingular_set(7).js == [(6, 0)]
    assert v.to_json() == {"p": 7, "D": -7, "vector": [1], "deg": 1}
    with pytest.raises(NotSupersingular):
        reduction_vector(-23, 2)


@pytest.mark.parametrize("p", [11, 13, 17, 19, 23])
def test_reduction_vector_against_sympy(p):
    ss = supersingular_set(p)
    for D in range(-3, -700, -1):
        if not is_discriminant(D) or not is_supersingular(D, p):
            continue
        v = reduction_vector(D, p)
        roots = _sympy_roots_mod(hilbert_class_poly(D), p)
        assert {j[0]: k for j, k in zip(ss.js, v.entries) if k} == roots
        assert v.degree == class_number(D)


def test_frobenius_invariant():
    assert frobenius_invariant((1, 2, 2), 37)
    assert not frobenius_invariant((1, 2, 3), 37)


def test_degree_formula_against_class_numbers():
    for d in fundamental_discriminants(300):
        for f in range(1, 13):
            assert degree_formula(d, f) == class_number(d * f * f)


@pytest.mark.parametrize("d,f,p", [(-7, 2, 5), (-7, 3, 5), (-4, 3, 7), (-3, 2, 5), (-8, 5, 7),
                                   (-23, 2, 5), (-15, 4, 7), (-20, 3, 11), (-4, 6, 11), (-43, 2, 7)])
def test_zhang_examples(d, f, p):
    rep = zhang_consistency(d, f, p)
    assert rep.ok, rep.details
    w = {-3: 3, -4: 2}.get(d, 1) if f == 1 else 1
    assert [Fraction(x, w) for x in reduction_vector(d * f * f, p).entries] == zhang_prediction(d, f, p)


def test_p_power_prediction_direct():
    # Lambda_{-7 * 25} mod 5 straight from H_{-175}
    pred = p_power_prediction(-7, 5, 1)
    assert pred == [Fraction(x) for x in reduction_vector(-175, 5).entries]
    with pytest.raises(ValueError):
        p_power_prediction(-175, 5, 1)


def test_zhang_hecke_route():
    rep = zhang_consistency(-23, 1, 7, rs=(1, 2, 3), cap=2000)
    assert rep.ok and rep.p_power_route[3] == "hecke"


def test_zhang_rejects():
    with pytest.raises(ValueError):
        zhang_consistency(-7, 5, 5)
    with pytest.raises(ValueError):
        zhang_consistency(-7, 11, 5)


def test_strict_mode_raises():
    # a cap that makes the direct route impossible raises ValueError, not a silent pass
    with pytest.raises(ValueError):
        zhang_consistency(-7, 2, 5, cap=20, strict=True)
    assert issubclass(MismatchedIdentity, AssertionError)


def test_residual_report():
    rep = residual_report(-7, 1, 7)
    assert rep.deviation == 0 and rep.vector == (1,)
    rep = residual_report(-4, 1, 11)
    assert rep.vector == (0, 1)
    assert rep.deviation == max(abs(Fraction(0) - Fraction(24, 10 * 6)), abs(1 - Fraction(24, 40)))
    with pytest.raises(ValueError):
        residual_report(-12, 1, 11)


def test_genus_examples():
    g = genus_partition(-15, 1, 3)
    assert (g.deg_plus, g.deg_minus) == (1, 1) and g.pstar == -3
    g = genus_partition(-7, 2, 7)
    assert (g.deg_plus, g.deg_minus) == (1, 0)
    g = genus_partition(-7, 3, 7)
    assert (g.deg_plus, g.deg_minus) == (0, 4) == (0, class_number(-63))
    with pytest.raises(ValueError):
        genus_partition(-7, 7, 7)
    with pytest.raises(ValueError):
        genus_partition(-7, 1, 5)
    assert genus_split(-15, 5)[0] == (1, -1)


@pytest.mark.parametrize("d,p", [(-7, 7), (-11, 11), (-19, 19), (-4, 2), (-8, 2)])
def test_prime_discriminant_split_one_sided(d, p):
    assert is_prime_discriminant(d)
    for f in range(1, 21):
        if f % p == 0:
            continue
        g = genus_partition(d, f, p)
        assert g.total == class_number(d * f * f)
        sign = kronecker(d, f)
        assert (g.deg_minus if sign == 1 else g.deg_plus) == 0


@pytest.mark.parametrize("d,p", [(-15, 3), (-15, 5), (-20, 5), (-24, 3), (-20, 2), (-84, 7)])
def test_composite_discriminant_split_even(d, p):
    assert not is_prime_discriminant(d)
    for f in range(1, 21):
        if f % p:
            g = genus_partition(d, f, p)
            assert g.deg_plus == g.deg_minus == class_number(d * f * f) // 2


def test_factor_roundtrip_used_by_cm():
    assert factor_discriminant(-175) == (-7, 5)
