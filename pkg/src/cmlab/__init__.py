"""Exact, desk-scale computations around supersingular reduction of CM points
and the distribution of integer points on quadratic spheres mod p^r."""

__version__ = "0.1.0"

from .arith import kronecker, hilbert_symbol, padic_sqrt, r_inverse
from .padic_disc import class_group, class_number, classify_padic, factor_discriminant
from .ssgraph import brandt_matrix, supersingular_set
from .cm import hilbert_class_poly, reduction_vector
from .spheres import QuadFormZ, enumerate_lattice_points, reduced_sphere

__all__ = [
    "kronecker", "hilbert_symbol", "padic_sqrt", "r_inverse",
    "class_group", "class_number", "classify_padic", "factor_discriminant",
    "brandt_matrix", "supersingular_set",
    "hilbert_class_poly", "reduction_vector",
    "QuadFormZ", "enumerate_lattice_points", "reduced_sphere",
]
