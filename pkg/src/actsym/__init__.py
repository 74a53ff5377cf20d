"""Branch and bound with activation handlers for sub-symmetries."""

from .engine import (Activation, BranchAndBound, NodeState, SolverConfig, SolveReport,
                     StaticOrbitope, solve)
from .model import (LinearConstraint, MixedBinaryProgram, Submatrix, VariableDecl, VarMatrix,
                    evaluate, validate)
from .orbitope import lex_cmp, propagate_orbitope

__version__ = "0.1.0"

__all__ = [
    "Activation", "BranchAndBound", "NodeState", "SolverConfig", "SolveReport",
    "StaticOrbitope", "solve", "LinearConstraint", "MixedBinaryProgram", "Submatrix",
    "VariableDecl", "VarMatrix", "evaluate", "validate", "lex_cmp", "propagate_orbitope",
]
