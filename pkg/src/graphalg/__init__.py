"""graphalg: a workbench for graph monads, grammars, logic, and finite algebras."""

from .ranked import RankedAlphabet, RankedMap, make_alphabet, check_rank_preserving
from .hr import (
    SourcedHypergraph, CanonicalForm, unit, unit_label, relabel, map_labels,
    flatten, canonicalize, is_isomorphic, parallel_compose, empty_graph,
    add_isolated_source, forget_sources, enumerate_hypergraphs,
)

__all__ = [
    "RankedAlphabet", "RankedMap", "make_alphabet", "check_rank_preserving",
    "SourcedHypergraph", "CanonicalForm", "unit", "unit_label", "relabel",
    "map_labels", "flatten", "canonicalize", "is_isomorphic",
    "parallel_compose", "empty_graph", "add_isolated_source",
    "forget_sources", "enumerate_hypergraphs",
]
