"""Normal-form engine for standardness-relativized arithmetic.

The package has three layers: a typed primitive-recursive term language
with a fueled evaluator (``typesys``), a formula layer with the
standardness predicate and the interpretation into forall-st/exists-st
normal forms (``formula``, ``sst``, ``herbrand``), and a finite-depth
executable harness for the tree and search-operator case studies
(``casestudies``).  Concrete syntax and the shipped formula corpus live in
``syntax`` and ``library``; ``cli`` is the batch front end.
"""

from .typesys import (
    Arrow,
    FiniteType,
    Nat,
    Seq,
    Term,
    TypingContext,
    Var,
    default_value,
    evaluate,
    type_check,
)
from .formula import (
    BinderTuple,
    Formula,
    alpha_equal,
    desugar_membership,
    expand_equality,
    is_internal,
    relativize_st,
    substitute,
)
from .syntax import parse_formula, parse_term, parse_type, print_formula, print_term, print_type
from .sst import (
    NameSupply,
    NormalForm,
    RewriteTrace,
    desugar_classical,
    fixed_point_check,
    shape_split,
    simplify,
    translate,
)
from .herbrand import (
    Obligation,
    collapse_witnesses,
    extraction_obligation,
    herbrandise_pointwise,
    implication_to_normal_form,
)

__all__ = [
    "Arrow",
    "BinderTuple",
    "FiniteType",
    "Formula",
    "NameSupply",
    "Nat",
    "NormalForm",
    "Obligation",
    "RewriteTrace",
    "Seq",
    "Term",
    "TypingContext",
    "Var",
    "alpha_equal",
    "collapse_witnesses",
    "default_value",
    "desugar_classical",
    "desugar_membership",
    "evaluate",
    "expand_equality",
    "extraction_obligation",
    "fixed_point_check",
    "herbrandise_pointwise",
    "implication_to_normal_form",
    "is_internal",
    "parse_formula",
    "parse_term",
    "parse_type",
    "print_formula",
    "print_term",
    "print_type",
    "relativize_st",
    "shape_split",
    "simplify",
    "substitute",
    "translate",
    "type_check",
]
