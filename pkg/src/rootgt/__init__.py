"""Rooted double-pushout graph rewriting with relabelling."""

from .graph import (
    Graph,
    GraphError,
    LabelAlphabet,
    Morphism,
    are_isomorphic,
    find_isomorphism,
    is_morphism,
    is_subgraph,
    morphisms,
    validate_graph,
)
from .matching import Match, find_matches, find_matches_fast, satisfies_dangling
from .rewrite import apply, derive, invert_rule, invert_step, normal_forms, successors
from .rules import GTSystem, Rule
from .textio import ParseError, format_graph, format_rule, parse_graph, parse_rule, parse_rules

__version__ = "0.1.0"

__all__ = [
    "GTSystem",
    "Graph",
    "GraphError",
    "LabelAlphabet",
    "Match",
    "Morphism",
    "ParseError",
    "Rule",
    "apply",
    "are_isomorphic",
    "derive",
    "find_isomorphism",
    "find_matches",
    "find_matches_fast",
    "format_graph",
    "format_rule",
    "invert_rule",
    "invert_step",
    "is_morphism",
    "is_subgraph",
    "morphisms",
    "normal_forms",
    "parse_graph",
    "parse_rule",
    "parse_rules",
    "satisfies_dangling",
    "successors",
    "validate_graph",
]
