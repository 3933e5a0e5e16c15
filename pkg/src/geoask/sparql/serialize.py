"""Deterministic textual form of the query AST.

Standard prefixes (geo, geof, uom, xsd, rdf, rdfs) are predeclared: emitted
text uses them without PREFIX headers, everything else appears as <full-iri>.
"""

from __future__ import annotations

import re

from ..terms import RDF, Iri, Literal, XSD, shrink
from .ast import (
    ASK,
    Aggregate,
    And,
    Comparison,
    Filter,
    FunctionCall,
    PropertyPath,
    Query,
    TriplePattern,
    Var,
)

_INT_RE = re.compile(r"^-?\d+$")
_DEC_RE = re.compile(r"^-?\d+\.\d+$")


def term_text(term) -> str:
    if isinstance(term, Var):
        return str(term)
    if isinstance(term, Iri):
        return shrink(term)
    if isinstance(term, Literal):
        if term.lang is None:
            if term.datatype == XSD.integer and _INT_RE.match(term.lexical):
                return term.lexical
            if term.datatype == XSD.decimal and _DEC_RE.match(term.lexical):
                return term.lexical
        return _literal_text(term)
    raise TypeError(f"cannot serialize {term!r}")


def _literal_text(lit: Literal) -> str:
    base = '"%s"' % lit.lexical.replace("\\", "\\\\").replace('"', '\\"')
    if lit.lang:
        return base + "@" + lit.lang
    if lit.datatype is not None and lit.datatype != XSD.string:
        return base + "^^" + shrink(lit.datatype)
    return base


def predicate_text(pred) -> str:
    if isinstance(pred, PropertyPath):
        return "/".join(shrink(step) for step in pred.steps)
    if pred == RDF.type:
        return "a"
    return shrink(pred)


def expression_text(expr) -> str:
    if isinstance(expr, Comparison):
        return f"{operand_text(expr.left)} {expr.op} {operand_text(expr.right)}"
    if isinstance(expr, FunctionCall):
        return operand_text(expr)
    if isinstance(expr, And):
        return " && ".join(expression_text(op) for op in expr.operands)
    raise TypeError(f"cannot serialize expression {expr!r}")


def operand_text(op) -> str:
    if isinstance(op, FunctionCall):
        args = ", ".join(term_text(a) for a in op.args)
        return f"{shrink(op.function)}({args})"
    return term_text(op)


def projection_text(item) -> str:
    if isinstance(item, Aggregate):
        inner = ("DISTINCT " if item.distinct else "") + str(item.var)
        return f"({item.function}({inner}) AS {item.alias})"
    return str(item)


def _pattern_lines(where) -> list[str]:
    """One line per pattern, folding consecutive same-subject triples with ';'."""
    lines: list[str] = []
    i = 0
    while i < len(where):
        p = where[i]
        if isinstance(p, Filter):
            lines.append(f"FILTER({expression_text(p.expression)})")
            i += 1
            continue
        group = [p]
        while (
            i + len(group) < len(where)
            and isinstance(where[i + len(group)], TriplePattern)
            and where[i + len(group)].subject == p.subject
        ):
            group.append(where[i + len(group)])
        head = term_text(p.subject)
        parts = [f"{predicate_text(t.predicate)} {term_text(t.object)}" for t in group]
        lines.append(f"{head} " + " ; ".join(parts) + " .")
        i += len(group)
    return lines


def serialize(q: Query) -> str:
    lines = _pattern_lines(q.where)
    if q.form == ASK:
        if len(lines) <= 1:
            body = f" {lines[0]} " if lines else " "
            return "ASK WHERE {" + body + "}"
        return "ASK WHERE {\n  " + "\n  ".join(lines) + "\n}"
    head = "SELECT "
    if q.distinct:
        head += "DISTINCT "
    head += " ".join(projection_text(p) for p in q.projection)
    out = head + " WHERE {\n  " + "\n  ".join(lines) + "\n}" if lines else head + " WHERE { }"
    if q.group_by:
        out += "\nGROUP BY " + " ".join(str(v) for v in q.group_by)
    if q.order_by:
        keys = []
        for key in q.order_by:
            keys.append(str(key.expr) if key.ascending else f"DESC({key.expr})")
        out += "\nORDER BY " + " ".join(keys)
    if q.limit is not None:
        out += f"\nLIMIT {q.limit}"
    return out
