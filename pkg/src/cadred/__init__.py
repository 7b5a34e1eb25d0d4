"""Concrete cylindrical algebraic decompositions, their reductions and minimal CADs."""
from .algebra import ExtVal, evaluate, holds, normalize
from .cad import ConcreteCad, Family, SamplePlan, DEFAULT_PLAN, build_tree, check_cad_structure, make_cad
from .cadspec import format_cad, format_document, parse_cad, parse_document
from .errors import CadError, InputError
from .reduction import (
    Fails, Lifts, Unknown, apply_reduction, canonical_fingerprint, confluence_report,
    liftable, minimal, reduction_dag, transitive_reduction_check,
)
from .syntax import parse_expr, parse_pred, parse_value
from .tree import CadTree, TreeReduction, apply_tree_reduction, tree_reductions

__version__ = "0.1.0"
