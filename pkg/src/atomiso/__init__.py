"""atomiso: definable sets over countable atom structures.

Finite syntax for infinite sets: set-builder expressions whose elements are
atoms and tuples over a homogeneous atom structure (pure equality, the dense
linear order, or the circular order), with decision procedures for
membership and equality, orbit decompositions, least supports, definable
functions, and a search for definable isomorphisms between structures built
from such sets.
"""

from .algebra import (
    DefFunction,
    OrbitDescriptor,
    definable_subsets,
    fn_apply,
    fn_bijective,
    fn_check,
    fn_inverse,
    fn_validate,
    is_member,
    is_subset,
    least_support,
    orbit_decomposition,
    orbit_expression,
    set_equal,
    sets_disjoint,
)
from .compile import Compiler
from .engine import (
    FOUND,
    NOT_FOUND,
    NOT_FOUND_INCOMPLETE,
    Certificate,
    decide_definable_iso,
    eliminate_parameters,
    find_definable_map,
    naive_find_iso,
)
from .errors import (
    AtomisoError,
    BindingError,
    DensenessError,
    DomainError,
    EliminationError,
    ParseError,
    ResourceError,
    SupportError,
    ValidationError,
    ValuationError,
    VocabularyError,
)
from .exprs import (
    ATOMS,
    EMPTY,
    AtomParam,
    ETuple,
    EVar,
    Expr,
    SetComp,
    Union,
    act,
    expr_params,
    instantiate,
    union_of,
)
from .parser import parse, parse_formula, print_expr, print_formula
from .structures import (
    FamilySymbol,
    RelationSymbol,
    Structure,
    check_isomorphism,
    load_function,
    load_structure,
    save_structure,
    signatures_match,
    structure_from_dict,
    structure_to_dict,
    validate_structure,
)
from .theories import Backend, backend_names, get_backend

__version__ = "0.1.0"

__all__ = [
    "ATOMS",
    "AtomParam",
    "AtomisoError",
    "Backend",
    "BindingError",
    "Certificate",
    "Compiler",
    "DefFunction",
    "DensenessError",
    "DomainError",
    "EMPTY",
    "ETuple",
    "EVar",
    "EliminationError",
    "Expr",
    "FOUND",
    "FamilySymbol",
    "NOT_FOUND",
    "NOT_FOUND_INCOMPLETE",
    "OrbitDescriptor",
    "ParseError",
    "RelationSymbol",
    "ResourceError",
    "SetComp",
    "Structure",
    "SupportError",
    "Union",
    "ValidationError",
    "ValuationError",
    "VocabularyError",
    "act",
    "backend_names",
    "check_isomorphism",
    "decide_definable_iso",
    "definable_subsets",
    "eliminate_parameters",
    "expr_params",
    "find_definable_map",
    "fn_apply",
    "fn_bijective",
    "fn_check",
    "fn_inverse",
    "fn_validate",
    "get_backend",
    "instantiate",
    "is_member",
    "is_subset",
    "least_support",
    "load_function",
    "load_structure",
    "naive_find_iso",
    "orbit_decomposition",
    "orbit_expression",
    "parse",
    "parse_formula",
    "print_expr",
    "print_formula",
    "save_structure",
    "set_equal",
    "sets_disjoint",
    "signatures_match",
    "structure_from_dict",
    "structure_to_dict",
    "union_of",
    "validate_structure",
    "__version__",
]
