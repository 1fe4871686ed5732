"""
Genus characters split the CM divisor
=====================================

When p divides d, the supersingular disc at p splits into two halves
according to the genus character attached to p.  For a prime discriminant
one half is empty; otherwise both carry the same degree.
"""

from cmlab.arith import kronecker
from cmlab.cm import genus_partition

for d, p in ((-7, 7), (-8, 2), (-15, 3), (-84, 7)):
    print(f"d = {d}, p = {p}")
    for f in range(1, 9):
        if f % p:
            g = genus_partition(d, f, p)
            print(f"   f = {f}: deg+ = {g.deg_plus:3d}  deg- = {g.deg_minus:3d}  (d/f) = {kronecker(d, f):2d}")
