"""
Theta series at the cusps
=========================

The constant term of a twisted theta series at a cusp a/c is a Gauss-type
sum over lifts of each residue.  It is constant on orthogonal-group orbits,
so functions orthogonal to the constant have vanishing constant terms.
"""

import numpy as np

from cmlab.spheres import SUM_OF_THREE_SQUARES, orbits
from cmlab.theta import basis_complement, cusp_exponents, cusp_sum_table, finite_cusp_limit, level_N

Q = SUM_OF_THREE_SQUARES
p, r = 3, 1
print("level:", level_N(Q, p, r))
orbs = [sorted(o) for o in orbits(Q, p, r) if (0, 0, 0) not in o]
print("orbit sizes:", [len(o) for o in orbs])

for c in (1, 2, 3, 4, 6, 12):
    _, t = cusp_exponents(p, r, c)
    a = 1 if c > 1 else 0
    for o in orbs:
        E = cusp_sum_table(Q, p, r, t, a, c, o)
        lim = max(abs(finite_cusp_limit(Q, f, p, r, a, c)) for f in basis_complement(o))
        print(f"c = {c:2d} orbit {len(o):2d}: sum {np.round(E[0], 6)}  spread {np.ptp(np.abs(E)):.1e}  limit {lim:.1e}")
