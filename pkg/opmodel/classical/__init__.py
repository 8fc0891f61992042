"""Finite classical models and the box-feasibility LP."""

from opmodel.classical.cmodel import ClassicalEffect, ClassicalState, FiniteOutcomeSpace, MarkovKernel
from opmodel.classical.simplex import FeasibilityResult, box_feasibility

__all__ = [
    "ClassicalEffect",
    "ClassicalState",
    "FeasibilityResult",
    "FiniteOutcomeSpace",
    "MarkovKernel",
    "box_feasibility",
]
