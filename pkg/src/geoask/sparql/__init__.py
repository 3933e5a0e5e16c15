"""Query AST, serializer, parser and evaluator for the emitted SPARQL subset."""

from .ast import (
    ASK,
    Aggregate,
    And,
    Comparison,
    Filter,
    FunctionCall,
    OrderKey,
    PropertyPath,
    Query,
    QueryInvariantError,
    ResultSet,
    SELECT,
    TriplePattern,
    Var,
    result_sets_equal,
    term_from_json,
    term_to_json,
    validate_query,
)
from .evaluate import EvalError, SpatialFunctions, evaluate
from .parse import SparqlSyntaxError, UnsupportedFeatureError, parse
from .serialize import serialize

__all__ = [
    "ASK",
    "Aggregate",
    "And",
    "Comparison",
    "EvalError",
    "Filter",
    "FunctionCall",
    "OrderKey",
    "PropertyPath",
    "Query",
    "QueryInvariantError",
    "ResultSet",
    "SELECT",
    "SpatialFunctions",
    "SparqlSyntaxError",
    "TriplePattern",
    "UnsupportedFeatureError",
    "Var",
    "evaluate",
    "parse",
    "result_sets_equal",
    "serialize",
    "term_from_json",
    "term_to_json",
    "validate_query",
]
