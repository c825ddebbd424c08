"""Fibrations of finite simplicial sets: horn lifting, cocartesian edges,
flatness, categorical patterns and section spaces, decided by exhaustive
search up to a dimension bound."""

from .core import (
    Simplex,
    SimplicialMap,
    SimplicialSet,
    boundary,
    from_faces,
    from_vertex_sets,
    horn,
    identity_map,
    join,
    opposite,
    product,
    pullback,
    standard_simplex,
    validate,
)
from .lifting import FAILS, HOLDS, UNKNOWN, Verdict, has_rlp
from .category import FiniteCategory, Functor, nerve, poset_nerve
from .fibrations import (
    check_fibration,
    cocartesian_edges,
    is_cartesian_edge,
    is_cartesian_fibration,
    is_cocartesian_edge,
    is_cocartesian_fibration,
    is_isofibration,
    is_quasicategory,
)
from .constructions import (
    arrow_category,
    fun_complex,
    lax_pullback,
    relative_fun,
    right_kan_fibration,
    slice_over,
    slice_under,
    twisted_arrow,
)
from .homology import homology
from .contractible import Budgets, is_weakly_contractible
from .flatness import is_flat
from .patterns import (
    CategoricalPattern,
    MarkedMap,
    MarkedSimplicialSet,
    audit_cor_6_2_1,
    audit_theorem_6_2,
    check_cor_6_2_1,
    is_pattern_fibered,
)

__version__ = "0.1.0"
