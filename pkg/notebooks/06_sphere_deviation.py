"""
Equidistribution of lattice points mod p
========================================

Points on the sphere x^2 + y^2 + z^2 + w^2 = m, reduced mod 3, spread
evenly over the reduced 3-adic sphere.  The deviation from uniform shrinks
like m^(-kappa) relative to the number of points.

For this form the deviation vanishes exactly when m is even, or when a prime
2 mod 3 divides m to an odd power, so the interesting ladder is m = k^2
with k prime to 6.
"""

from cmlab.spheres import (SUM_OF_FOUR_SQUARES, deviation_report, enumerate_lattice_points,
                           reduced_sphere)
from cmlab.theta import variance_from_theta

Q = SUM_OF_FOUR_SQUARES
sigma = reduced_sphere(Q, 1, 3, 1).residues
print(len(sigma), "residues mod 3 lie on the reduced sphere of 1")

print("     m   #V_m    max dev     ratio")
for m in (4, 7, 55, 25, 49, 169, 1225, 5041, 9409):
    pts = enumerate_lattice_points(Q, m)
    rep = deviation_report(Q, m, 3, 1, sigma, pts)
    same = rep.variance == variance_from_theta(Q, sigma, 3, 1, m, pts)
    print(f"{m:6d} {rep.n_points:6d}  {float(rep.max_dev):.2e}  {rep.bound_ratio:8.4f}  {same}")
