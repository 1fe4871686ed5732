"""
Maximal orders and optimal embeddings
=====================================

For primes with one supersingular class the endomorphism ring is a single
maximal order.  Counting vectors of norm |d| in its Gross lattice counts
embeddings of the order of discriminant d.
"""

from cmlab.padic_disc import fundamental_discriminants, is_supersingular
from cmlab.quaternion import embedding_count_formula, gross_count, gross_lattice, maximal_order

p = 7
O = maximal_order(p)
print("basis of the order (1, i, j, k coordinates):")
for row in O.basis:
    print("  ", [str(x) for x in row])
print("discriminant:", O.discriminant())

gl = gross_lattice(O)
print("Gram matrix of the Gross lattice:\n", gl.gram, "\ndet:", gl.form.det)

print(" d   lattice count   class-number formula")
for d in fundamental_discriminants(120):
    if is_supersingular(d, p):
        print(f"{d:4d}  {gross_count(p, d):8d}  {embedding_count_formula(p, d)!s:>12}")
