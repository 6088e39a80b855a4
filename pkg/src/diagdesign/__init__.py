"""Diagonal-unitary designs: exact design checks, closed-form distances and
Monte Carlo decay experiments on the symmetric subspace."""

__version__ = "0.1.0"

from .bitseq import BitString, BitTuple, BudgetExceeded, CanonicalClass, IndexSubset
from .exact_analysis import eta_exact, mixing_curve
from .moments import design_threshold, is_exact_design

__all__ = [
    "BitString",
    "BitTuple",
    "BudgetExceeded",
    "CanonicalClass",
    "IndexSubset",
    "design_threshold",
    "eta_exact",
    "is_exact_design",
    "mixing_curve",
]
