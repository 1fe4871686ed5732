"""
Reducing CM points to the supersingular locus
=============================================

Compute Hilbert class polynomials, reduce their roots modulo p, and compare
with the prediction obtained from Hecke operators acting on the vector of
the fundamental order.
"""

from fractions import Fraction

from cmlab.cm import (hilbert_class_poly, reduction_vector, residual_report,
                      zhang_consistency, zhang_prediction)
from cmlab.padic_disc import fundamental_discriminants, is_supersingular, unit_weight

print("H_-23 =", hilbert_class_poly(-23))

p = 11
for d, f in ((-4, 1), (-4, 5), (-3, 2), (-15, 1), (-23, 3)):
    D = d * f * f
    v = reduction_vector(D, p)
    # the identity compares v / w, w the unit index of the order
    w = unit_weight(d, f)
    print(f"D = {D}: v / w = {[str(Fraction(x, w)) for x in v.entries]}, "
          f"predicted {[str(x) for x in zhang_prediction(d, f, p)]}")
    print("   all identities:", zhang_consistency(d, f, p).ok)

# the vector divided by the degree approaches the weights 24 / ((p - 1) #Aut)
ds = [d for d in fundamental_discriminants(3000) if is_supersingular(d, p)]
for d in ds[:3] + ds[len(ds) // 2: len(ds) // 2 + 2] + ds[-3:]:
    rep = residual_report(d, 1, p)
    print(f"d = {d:6d}  h = {rep.degree:3d}  deviation = {float(rep.deviation):.4f}")
