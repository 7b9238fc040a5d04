"""Sparse polynomial arithmetic over Q, Q(sqrt(-2)), F_p and C."""

from .domains import (CC, GF, QQ, QQ_R2, QR2, Domain, DomainMismatch, PrimeField,
                      ReductionError, convert_scalar, domain_from_name, sqrt_mod)
from .poly import (Exponents, InhomogeneousError, SparsePolynomial, grlex_key,
                   parse_polynomial, polynomial_ring)

__all__ = [
    "CC", "GF", "QQ", "QQ_R2", "QR2", "Domain", "DomainMismatch", "PrimeField",
    "ReductionError", "convert_scalar", "domain_from_name", "sqrt_mod",
    "Exponents", "InhomogeneousError", "SparsePolynomial", "grlex_key",
    "parse_polynomial", "polynomial_ring",
]
