from .field import FieldContext, FieldElement, Poly, descend, embed, get_field, poly_roots, sqrt
from .integers import crt, factor, four_squares, is_prime, kronecker, sqrt_mod_prime

__all__ = [
    "FieldContext", "FieldElement", "Poly", "descend", "embed", "get_field", "poly_roots", "sqrt",
    "crt", "factor", "four_squares", "is_prime", "kronecker", "sqrt_mod_prime",
]
