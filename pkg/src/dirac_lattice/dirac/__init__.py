"""Dirac-Bergmann analysis: constraints, classification, counting, brackets."""
from .analysis import (AlgebraTable, ClassifiedConstraints, DofReport, ExtendedSystem, algebra_closure,
                       analyze, classify, count_dof, dirac_bracket, dirac_bracket_matrix, dof_oracle,
                       extended_system, reducibility, total_hamiltonian)
from .core import (Constraint, InconsistentSystem, MultiplierSolution, NonIntegerDof, bracket_matrix,
                   canonical_hamiltonian, consistency_step, primary_constraints, run_algorithm,
                   stencil_matrix)

__all__ = [
    "AlgebraTable", "ClassifiedConstraints", "Constraint", "DofReport", "ExtendedSystem",
    "InconsistentSystem", "MultiplierSolution", "NonIntegerDof", "algebra_closure", "analyze",
    "bracket_matrix", "canonical_hamiltonian", "classify", "consistency_step", "count_dof",
    "dirac_bracket", "dirac_bracket_matrix", "dof_oracle", "extended_system", "primary_constraints",
    "reducibility", "run_algorithm", "stencil_matrix", "total_hamiltonian",
]
