"""
Hecke dynamics on valuations
============================

On a supersingular disc, T_p acts on the valuation of the Hasse invariant
by a piecewise-affine correspondence.  Iterating it from the valuation of a
CM point produces exactly the CM points of larger p-power conductor.
"""

from fractions import Fraction

from cmlab.katz import cm_valuation, katz_consistency, tau

p = 5
x = Fraction(1, 12)
for m in range(4):
    print(f"tau_{m}([{x}]) =", tau(p, m, x))

for d in (-3, -8, -15):
    v = cm_valuation(d, p)
    print(f"d = {d}: v = {v}")
    print("   tau_1 =", tau(p, 1, v))
    print("   consistent up to p^3:", katz_consistency(d, 1, p, 3).ok)
