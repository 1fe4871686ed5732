"""
Supersingular j-invariants and Brandt matrices
==============================================

List the supersingular j-invariants in characteristic p, build the
ell-isogeny counting matrices from the modular polynomials and look at
their spectrum.
"""

import numpy as np

from cmlab.ssgraph import brandt_matrix, spectral_report, supersingular_set

p = 37
ss = supersingular_set(p)
print(f"p = {p}: {len(ss)} supersingular classes, mass {ss.mass()}")
for j, aut in ss.points:
    print("  j =", j, " #Aut =", aut)

# B(2): entry (s, t) counts 2-isogenies from E_s landing on E_t
B2 = brandt_matrix(p, 2).entries
print(B2)
print("row sums:", B2.sum(axis=1))

# B(4) = B(2)^2 - 2 I
print(np.array_equal(brandt_matrix(p, 4).entries, B2 @ B2 - 2 * np.eye(len(ss), dtype=int)))

# the Eisenstein eigenvalue is sigma(ell); the others sit inside [-2 sqrt ell, 2 sqrt ell]
rep = spectral_report(p, [2, 3, 5])
for ell in rep.ells:
    print(ell, np.round(np.sort(rep.eigenvalues[ell]), 6))
print("Ramanujan bound holds:", rep.ramanujan_ok, "max ratio", round(rep.max_ratio, 4))
