"""Exact Lie symmetry and singularity (Painleve/ARS) analysis for polynomial ODEs."""

from .expressions import (
    DiffPoly,
    OdeProblem,
    ParseError,
    format_poly,
    ode_problem,
    parse,
    parse_xy_poly,
    to_diff_poly,
)
from .lie import (
    ExtendedField,
    StructureTable,
    VectorField,
    check_contact_condition,
    classify_pair,
    is_symmetry,
    lie_bracket,
    prolong,
    span_contains,
    structure_constants,
    total_derivative,
)
from .linalg import ExactMatrix, nullspace, rank
from .painleve import (
    ARBITRARY,
    Branch,
    LeadingOrder,
    PainleveReport,
    PuiseuxSeries,
    Unresolved,
    dominant_exponents,
    expand_series,
    leading_coefficients,
    painleve_test,
    resonances,
)
from .poly import Poly, poly_substitute, rational_roots, sturm_root_count
from .solver import (
    Ansatz,
    DeterminingSystem,
    SymmetryBasis,
    determining_system,
    solve_point_symmetries,
)

__version__ = "0.1.0"

__all__ = [
    "ARBITRARY",
    "Ansatz",
    "Branch",
    "DeterminingSystem",
    "DiffPoly",
    "ExactMatrix",
    "ExtendedField",
    "LeadingOrder",
    "OdeProblem",
    "PainleveReport",
    "ParseError",
    "Poly",
    "PuiseuxSeries",
    "StructureTable",
    "SymmetryBasis",
    "Unresolved",
    "VectorField",
    "check_contact_condition",
    "classify_pair",
    "determining_system",
    "dominant_exponents",
    "expand_series",
    "format_poly",
    "is_symmetry",
    "leading_coefficients",
    "lie_bracket",
    "nullspace",
    "ode_problem",
    "painleve_test",
    "parse",
    "parse_xy_poly",
    "poly_substitute",
    "prolong",
    "rank",
    "rational_roots",
    "resonances",
    "solve_point_symmetries",
    "span_contains",
    "structure_constants",
    "sturm_root_count",
    "to_diff_poly",
    "total_derivative",
]
