"""Query AST for the emitted SPARQL subset, plus result sets."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..terms import GeoAskError, Iri, Literal, Term

SELECT = "SELECT"
ASK = "ASK"


class QueryInvariantError(GeoAskError):
    pass


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self):
        return "?" + self.name


@dataclass(frozen=True)
class PropertyPath:
    """Two-step predicate path, e.g. geo:hasGeometry/geo:asWKT."""

    steps: tuple[Iri, Iri]


Node = Var | Iri | Literal


@dataclass(frozen=True)
class TriplePattern:
    subject: Node
    predicate: Iri | PropertyPath
    object: Node


@dataclass(frozen=True)
class FunctionCall:
    function: Iri
    args: tuple[Node, ...]


@dataclass(frozen=True)
class Comparison:
    op: str  # one of < > <= >= = ~
    left: Node | FunctionCall
    right: Node | FunctionCall


@dataclass(frozen=True)
class And:
    operands: tuple["Expression", ...]


Expression = Comparison | FunctionCall | And


@dataclass(frozen=True)
class Filter:
    expression: Expression


Pattern = TriplePattern | Filter


@dataclass(frozen=True)
class Aggregate:
    function: str  # COUNT only
    var: Var
    distinct: bool
    alias: Var


@dataclass(frozen=True)
class OrderKey:
    expr: Var
    ascending: bool


@dataclass(frozen=True)
class Query:
    form: str  # SELECT or ASK
    projection: tuple[Var | Aggregate, ...] = ()
    where: tuple[Pattern, ...] = ()
    distinct: bool = False
    group_by: tuple[Var, ...] = ()
    order_by: tuple[OrderKey, ...] = ()
    limit: int | None = None


def expression_vars(expr: Expression | Node) -> set[Var]:
    if isinstance(expr, Var):
        return {expr}
    if isinstance(expr, FunctionCall):
        return {a for a in expr.args if isinstance(a, Var)}
    if isinstance(expr, Comparison):
        return expression_vars(expr.left) | expression_vars(expr.right)
    if isinstance(expr, And):
        out: set[Var] = set()
        for op in expr.operands:
            out |= expression_vars(op)
        return out
    return set()


def pattern_vars(p: Pattern) -> set[Var]:
    if isinstance(p, TriplePattern):
        return {t for t in (p.subject, p.object) if isinstance(t, Var)}
    return expression_vars(p.expression)


def triple_bound_vars(where) -> set[Var]:
    out: set[Var] = set()
    for p in where:
        if isinstance(p, TriplePattern):
            out |= pattern_vars(p)
    return out


def validate_query(q: Query):
    """Check the structural invariants every emitted query must satisfy."""
    if q.form not in (SELECT, ASK):
        raise QueryInvariantError(f"unknown query form {q.form!r}")
    bound = triple_bound_vars(q.where)
    for p in q.where:
        if isinstance(p, Filter):
            loose = expression_vars(p.expression) - bound
            if loose:
                raise QueryInvariantError(
                    f"filter references unbound variables: {sorted(v.name for v in loose)}"
                )
    if q.form == ASK:
        return
    if not q.projection:
        raise QueryInvariantError("SELECT with empty projection")
    aggregates = [p for p in q.projection if isinstance(p, Aggregate)]
    plain = [p for p in q.projection if isinstance(p, Var)]
    if aggregates:
        missing = [v.name for v in plain if v not in q.group_by]
        if missing:
            raise QueryInvariantError(f"non-aggregate projection not covered by GROUP BY: {missing}")
        for agg in aggregates:
            if agg.var not in bound:
                raise QueryInvariantError(f"aggregate over unbound variable ?{agg.var.name}")
    for v in plain:
        if v not in bound:
            raise QueryInvariantError(f"projected variable ?{v.name} does not occur in WHERE")


def alpha_normalize(q: Query) -> Query:
    """Rename variables to v1, v2, ... in first-occurrence order.

    Two queries are equal modulo variable renaming iff their normal forms
    are structurally equal.
    """
    mapping: dict[str, str] = {}

    def rename(v: Var) -> Var:
        if v.name not in mapping:
            mapping[v.name] = f"v{len(mapping) + 1}"
        return Var(mapping[v.name])

    def rename_node(node):
        return rename(node) if isinstance(node, Var) else node

    def rename_expr(expr):
        if isinstance(expr, Comparison):
            return Comparison(expr.op, rename_expr(expr.left), rename_expr(expr.right))
        if isinstance(expr, FunctionCall):
            return FunctionCall(expr.function, tuple(rename_node(a) for a in expr.args))
        if isinstance(expr, And):
            return And(tuple(rename_expr(e) for e in expr.operands))
        return rename_node(expr)

    where = []
    for p in q.where:
        if isinstance(p, TriplePattern):
            where.append(TriplePattern(rename_node(p.subject), p.predicate, rename_node(p.object)))
        else:
            where.append(Filter(rename_expr(p.expression)))
    projection = []
    for item in q.projection:
        if isinstance(item, Aggregate):
            projection.append(Aggregate(item.function, rename(item.var), item.distinct, rename(item.alias)))
        else:
            projection.append(rename(item))
    return Query(
        q.form,
        projection=tuple(projection),
        where=tuple(where),
        distinct=q.distinct,
        group_by=tuple(rename(v) for v in q.group_by),
        order_by=tuple(OrderKey(rename(k.expr), k.ascending) for k in q.order_by),
        limit=q.limit,
    )


def queries_equal_modulo_renaming(a: Query, b: Query) -> bool:
    return alpha_normalize(a) == alpha_normalize(b)


@dataclass
class ResultSet:
    """SELECT rows or an ASK boolean; rows bind exactly the projected variables."""

    variables: list[str] = field(default_factory=list)
    rows: list[dict[str, Term]] = field(default_factory=list)
    boolean: bool | None = None

    def to_json(self) -> dict:
        if self.boolean is not None:
            return {"boolean": self.boolean}
        return {
            "vars": list(self.variables),
            "rows": [{k: term_to_json(v) for k, v in row.items()} for row in self.rows],
        }

    def to_tsv(self) -> str:
        if self.boolean is not None:
            return "boolean\n%s\n" % ("true" if self.boolean else "false")
        lines = ["\t".join("?" + v for v in self.variables)]
        for row in self.rows:
            lines.append("\t".join(term_tsv(row[v]) for v in self.variables))
        return "\n".join(lines) + "\n"

    def value_rows(self) -> list[tuple]:
        """Rows as value tuples in variable order (names not significant)."""
        return [tuple(canonical_term(row[v]) for v in self.variables) for row in self.rows]


def term_to_json(term: Term) -> dict:
    if isinstance(term, Iri):
        return {"type": "uri", "value": term.value}
    out = {"type": "literal", "value": term.lexical}
    if term.datatype is not None:
        out["datatype"] = term.datatype.value
    if term.lang:
        out["xml:lang"] = term.lang
    return out


def term_from_json(obj: dict) -> Term:
    if obj["type"] == "uri":
        return Iri(obj["value"])
    dt = Iri(obj["datatype"]) if obj.get("datatype") else None
    return Literal(obj["value"], dt, obj.get("xml:lang"))


def term_tsv(term: Term) -> str:
    return term.value if isinstance(term, Iri) else term.lexical


def canonical_term(term: Term) -> tuple:
    """Order- and equality-canonical view of a term (numerics by value)."""
    if isinstance(term, Iri):
        return ("iri", term.value)
    val = term.value()
    if isinstance(val, (int, float)) and not isinstance(val, bool):
        return ("num", float(val))
    return ("lit", term.lexical, term.lang or "")


def result_sets_equal(a: ResultSet, b: ResultSet) -> bool:
    """Exact-match protocol: ASK booleans equal, or row value-multisets equal.

    Variable names are not significant; rows compare as tuples of canonical
    term values in each result's own column order. Supersets fail.
    """
    if (a.boolean is None) != (b.boolean is None):
        return False
    if a.boolean is not None:
        return a.boolean == b.boolean
    if len(a.variables) != len(b.variables):
        return False
    return sorted(a.value_rows()) == sorted(b.value_rows())
