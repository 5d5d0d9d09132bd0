"""Prime factors of n^2 + 1 over Z[i], the curves y^2 = x^3 + 3x + 2n, and ABC-triple statistics."""

from .intarith import CapacityError, Factorization, factorize
from .bounds import BoundConstants, DomainError

__all__ = ["CapacityError", "Factorization", "factorize", "BoundConstants", "DomainError"]
__version__ = "0.1.0"
