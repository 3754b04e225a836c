"""Exact and certified tools for simultaneous rational approximation to
successive powers of a real number."""

from .errors import (ContractViolation, InputError, PrecisionError, SimApproxError)
from .interval import IntervalReal, Order, certified_compare
from .lattice import IntegerVector, Subspace
from .oracles import (AlgebraicOracle, ContinuedFractionOracle, DecimalOracle, RealOracle,
                      parse_oracle)
from .poly import IntPolynomial

__all__ = [
    "AlgebraicOracle", "ContinuedFractionOracle", "ContractViolation", "DecimalOracle",
    "InputError", "IntPolynomial", "IntegerVector", "IntervalReal", "Order", "PrecisionError",
    "RealOracle", "SimApproxError", "Subspace", "certified_compare", "parse_oracle",
]
