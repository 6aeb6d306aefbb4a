"""Possible worlds of probabilistic XML documents: decide and compute D(W)."""

from .algorithms import iso_classes, poss_unordered_single, prob_ordered_local
from .errors import (
    InvalidDocument,
    PreconditionViolated,
    PrxmlError,
    TooManyConfigurations,
    TooManyMatches,
    UnsupportedClass,
)
from .matches import (
    enumerate_matches,
    filter_matches_order,
    match_constraint_mie,
    prob_explicit_conditioned,
    prob_explicit_local,
    prob_explicit_mie,
)
from .model import PDocument, XDocument, classify, strip_probabilistic_leaves, validate
from .oracle import enumerate_worlds, trees_equal, world_probability_bf
from .serialization import parse_prxml, parse_xdoc, serialize_prxml, serialize_xdoc

__version__ = "0.1.0"

__all__ = [
    "iso_classes",
    "poss_unordered_single",
    "prob_ordered_local",
    "InvalidDocument",
    "PreconditionViolated",
    "PrxmlError",
    "TooManyConfigurations",
    "TooManyMatches",
    "UnsupportedClass",
    "enumerate_matches",
    "filter_matches_order",
    "match_constraint_mie",
    "prob_explicit_conditioned",
    "prob_explicit_local",
    "prob_explicit_mie",
    "PDocument",
    "XDocument",
    "classify",
    "strip_probabilistic_leaves",
    "validate",
    "enumerate_worlds",
    "trees_equal",
    "world_probability_bf",
    "parse_prxml",
    "parse_xdoc",
    "serialize_prxml",
    "serialize_xdoc",
]
