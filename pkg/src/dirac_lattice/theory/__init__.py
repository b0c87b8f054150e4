"""Theory specifications, shipped instances, documents and field maps."""
from .io import ParseError, builtin_theory, dump_theory, dumps, load_theory, loads
from .maps import (DegenerateTetrad, b_from_connection, connection_from_b, metric_from_f,
                   metric_from_gradient)
from .spec import (FieldDescriptor, HamiltonianTerm, IndexRange, KineticTerm, NonFirstOrderLagrangian,
                   Ref, TheorySpec, ValidationError, maxwell_first_order, paper_g0_theory,
                   parse_stencil)

__all__ = [
    "DegenerateTetrad", "FieldDescriptor", "HamiltonianTerm", "IndexRange", "KineticTerm",
    "NonFirstOrderLagrangian", "ParseError", "Ref", "TheorySpec", "ValidationError",
    "b_from_connection", "builtin_theory", "connection_from_b", "dump_theory", "dumps",
    "load_theory", "loads", "maxwell_first_order", "metric_from_f", "metric_from_gradient",
    "paper_g0_theory", "parse_stencil",
]
