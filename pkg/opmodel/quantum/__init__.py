"""Quantum models: density operators, effects, POVMs, qubit Cayley vectors, valuations, Wigner tables."""

from opmodel.quantum.operators import DensityOperator, EffectOperator, Povm, pair, validate
from opmodel.quantum.qubit_cayley import BlochState, CayleyEffect, cayley_decompose, cayley_norm

__all__ = [
    "BlochState",
    "CayleyEffect",
    "DensityOperator",
    "EffectOperator",
    "Povm",
    "cayley_decompose",
    "cayley_norm",
    "pair",
    "validate",
]
