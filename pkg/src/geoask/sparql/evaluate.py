"""Mini evaluator: bag-semantics joins over the store with spatial filters."""

from __future__ import annotations

from datetime import datetime

from .. import geometry
from ..kg import TripleStore
from ..terms import GEOF, GeoAskError, Iri, Literal, RDF, Term, XSD
from .ast import (
    ASK,
    Aggregate,
    And,
    Comparison,
    Filter,
    FunctionCall,
    PropertyPath,
    Query,
    ResultSet,
    TriplePattern,
    Var,
    canonical_term,
    expression_vars,
)

APPROX_TOLERANCE = 0.1  # the "~" comparator: relative tolerance on numerics

_NUMERIC_TYPES = {XSD.integer, XSD.decimal, XSD.double, XSD.float, XSD.int, XSD.long}


class EvalError(GeoAskError):
    pass


class SpatialFunctions:
    """geof:* implementations over WKT literals, memoized per lexical pair."""

    def __init__(self):
        self._cache: dict[tuple, object] = {}

    def _geoms(self, wkt1: str, wkt2: str):
        return geometry.parse_wkt(wkt1), geometry.parse_wkt(wkt2)

    def within(self, wkt1: str, wkt2: str) -> bool:
        key = ("w", wkt1, wkt2)
        if key not in self._cache:
            self._cache[key] = geometry.sf_within(*self._geoms(wkt1, wkt2))
        return self._cache[key]

    def contains(self, wkt1: str, wkt2: str) -> bool:
        return self.within(wkt2, wkt1)

    def intersects(self, wkt1: str, wkt2: str) -> bool:
        key = ("i", *sorted((wkt1, wkt2)))
        if key not in self._cache:
            self._cache[key] = geometry.sf_intersects(*self._geoms(wkt1, wkt2))
        return self._cache[key]

    def distance(self, wkt1: str, wkt2: str) -> float:
        key = ("d", *sorted((wkt1, wkt2)))
        if key not in self._cache:
            self._cache[key] = geometry.distance_metres(*self._geoms(wkt1, wkt2))
        return self._cache[key]


def is_numeric(lit: Literal) -> bool:
    return lit.datatype in _NUMERIC_TYPES


def to_datetime(lexical: str) -> datetime | None:
    try:
        return datetime.fromisoformat(lexical.replace("Z", "+00:00"))
    except ValueError:
        return None


def _match_pattern(store: TripleStore, pattern: TriplePattern, binding: dict):
    """Yield extended bindings for one triple pattern under a partial binding."""

    def resolve(node):
        if isinstance(node, Var):
            return binding.get(node.name)
        return node

    subj = resolve(pattern.subject)
    obj = resolve(pattern.object)

    def extend(s_term, o_term):
        new = dict(binding)
        ok = True
        if isinstance(pattern.subject, Var):
            prev = new.get(pattern.subject.name)
            if prev is not None and prev != s_term:
                ok = False
            new[pattern.subject.name] = s_term
        if ok and isinstance(pattern.object, Var):
            prev = new.get(pattern.object.name)
            if prev is not None and prev != o_term:
                ok = False
            new[pattern.object.name] = o_term
        return new if ok else None

    if isinstance(pattern.predicate, PropertyPath):
        step1, step2 = pattern.predicate.steps
        if isinstance(subj, Iri):
            firsts = [(subj, mid) for mid in store.objects(subj, step1) if isinstance(mid, Iri)]
        elif subj is None:
            firsts = [(s, mid) for s, mid in store.by_predicate(step1) if isinstance(mid, Iri)]
        else:
            firsts = []
        for s_term, mid in firsts:
            for o_term in store.objects(mid, step2):
                if obj is not None and o_term != obj:
                    continue
                new = extend(s_term, o_term)
                if new is not None:
                    yield new
        return

    predicate = pattern.predicate
    if predicate == RDF.type and isinstance(obj, Iri) and obj in store.ontology.class_synonyms:
        classes = sorted(store.ontology.descendants(obj))
    else:
        classes = None

    subj_const = subj if isinstance(subj, Iri) else None
    if classes is not None:
        for cls in classes:
            for s_term, _, _ in store.match(subj_const, RDF.type, cls):
                new = extend(s_term, obj)
                if new is not None:
                    yield new
        return
    obj_const = obj if obj is not None else None
    for s_term, _, o_term in store.match(subj_const, predicate, obj_const):
        new = extend(s_term, o_term)
        if new is not None:
            yield new


def _operand_value(op, binding: dict, geo: SpatialFunctions):
    if isinstance(op, Var):
        if op.name not in binding:
            raise EvalError(f"unbound variable ?{op.name} in filter")
        return binding[op.name]
    if isinstance(op, FunctionCall):
        return _call(op, binding, geo)
    return op


def _wkt_arg(value) -> str | None:
    if isinstance(value, Literal):
        return value.lexical
    return None


def _call(call: FunctionCall, binding: dict, geo: SpatialFunctions):
    name = call.function
    # Unit IRIs (uom:metre) are grammar, not data: distances are metres.
    args = [_operand_value(a, binding, geo) for a in call.args if not isinstance(a, Iri)]
    if name == GEOF.distance:
        wkts = [_wkt_arg(v) for v in args[:2]]
        if None in wkts:
            return None
        return geo.distance(wkts[0], wkts[1])
    table = {GEOF.sfWithin: geo.within, GEOF.sfContains: geo.contains, GEOF.sfIntersects: geo.intersects}
    fn = table.get(name)
    if fn is None:
        raise EvalError(f"unknown function {name}")
    wkts = [_wkt_arg(v) for v in args[:2]]
    if None in wkts:
        return False
    return fn(wkts[0], wkts[1])


def _compare(left, right, op: str) -> bool:
    """SPARQL-like comparison; datatype mismatches are false, not errors."""
    if left is None or right is None:
        return False
    lnum = left if isinstance(left, (int, float)) else (left.value() if isinstance(left, Literal) and is_numeric(left) else None)
    rnum = right if isinstance(right, (int, float)) else (right.value() if isinstance(right, Literal) and is_numeric(right) else None)
    if lnum is not None and rnum is not None:
        if op == "~":
            if rnum == 0:
                return abs(lnum) <= 1e-9
            return abs(lnum - rnum) / abs(rnum) <= APPROX_TOLERANCE
        return {"<": lnum < rnum, ">": lnum > rnum, "<=": lnum <= rnum, ">=": lnum >= rnum, "=": lnum == rnum}[op]
    if isinstance(left, Literal) and isinstance(right, Literal):
        if left.datatype == XSD.dateTime and right.datatype == XSD.dateTime:
            ldt, rdt = to_datetime(left.lexical), to_datetime(right.lexical)
            if ldt is None or rdt is None:
                return False
            return {"<": ldt < rdt, ">": ldt > rdt, "<=": ldt <= rdt, ">=": ldt >= rdt, "=": ldt == rdt, "~": ldt == rdt}[op]
        if (left.datatype in (None, XSD.string)) and (right.datatype in (None, XSD.string)):
            if op == "=":
                return left.lexical == right.lexical
            return {"<": left.lexical < right.lexical, ">": left.lexical > right.lexical,
                    "<=": left.lexical <= right.lexical, ">=": left.lexical >= right.lexical,
                    "~": left.lexical == right.lexical}[op]
        return False
    if isinstance(left, Iri) and isinstance(right, Iri):
        return left == right if op == "=" else False
    return False


def _filter_true(expr, binding: dict, geo: SpatialFunctions) -> bool:
    if isinstance(expr, And):
        return all(_filter_true(op, binding, geo) for op in expr.operands)
    if isinstance(expr, FunctionCall):
        return bool(_call(expr, binding, geo))
    if isinstance(expr, Comparison):
        left = _operand_value(expr.left, binding, geo)
        right = _operand_value(expr.right, binding, geo)
        return _compare(left, right, expr.op)
    raise EvalError(f"cannot evaluate expression {expr!r}")


def _sort_key(term) -> tuple:
    if term is None:
        return ("", "")
    return canonical_term(term)


def evaluate(q: Query, store: TripleStore, geo: SpatialFunctions | None = None) -> ResultSet:
    """Execute the query; joins over shared variables, filters once bound."""
    geo = geo or SpatialFunctions()
    bindings: list[dict] = [{}]
    bound: set[str] = set()
    pending: list[Filter] = []
    for pattern in q.where:
        if isinstance(pattern, Filter):
            pending.append(pattern)
        else:
            nxt = []
            for b in bindings:
                nxt.extend(_match_pattern(store, pattern, b))
            bindings = nxt
            for v in (pattern.subject, pattern.object):
                if isinstance(v, Var):
                    bound.add(v.name)
        still = []
        for f in pending:
            needed = {v.name for v in expression_vars(f.expression)}
            if needed <= bound:
                bindings = [b for b in bindings if _filter_true(f.expression, b, geo)]
            else:
                still.append(f)
        pending = still
    for f in pending:
        needed = {v.name for v in expression_vars(f.expression)}
        missing = needed - bound
        raise EvalError(f"filter references unbound variables: {sorted(missing)}")

    if q.form == ASK:
        return ResultSet(boolean=bool(bindings))

    aggregates = [p for p in q.projection if isinstance(p, Aggregate)]
    if aggregates:
        groups: dict[tuple, list[dict]] = {}
        for b in bindings:
            key = tuple(_sort_key(b.get(v.name)) for v in q.group_by)
            groups.setdefault(key, []).append(b)
        rows = []
        for key in sorted(groups):
            members = groups[key]
            row: dict[str, Term] = {}
            for v in q.group_by:
                row[v.name] = members[0].get(v.name)
            for agg in aggregates:
                values = [m.get(agg.var.name) for m in members if m.get(agg.var.name) is not None]
                count = len(set(values)) if agg.distinct else len(values)
                row[agg.alias.name] = Literal(str(count), XSD.integer)
            rows.append(row)
        variables = [p.alias.name if isinstance(p, Aggregate) else p.name for p in q.projection]
        rows = [{v: row[v] for v in variables} for row in rows]
        rows.sort(key=lambda row: tuple(_sort_key(row[v]) for v in variables))
        for key in reversed(q.order_by):
            rows.sort(key=lambda row: _sort_key(row.get(key.expr.name)), reverse=not key.ascending)
    else:
        variables = [p.name for p in q.projection]
        # ORDER BY applies before projection so it may sort on non-projected vars
        bindings.sort(
            key=lambda b: tuple(_sort_key(b.get(v)) for v in sorted(b))
        )
        for key in reversed(q.order_by):
            bindings.sort(key=lambda b: _sort_key(b.get(key.expr.name)), reverse=not key.ascending)
        rows = []
        for b in bindings:
            try:
                rows.append({v: b[v] for v in variables})
            except KeyError as exc:
                raise EvalError(f"projected variable ?{exc.args[0]} unbound") from exc
        if not q.order_by:
            rows.sort(key=lambda row: tuple(_sort_key(row[v]) for v in variables))

    if q.distinct:
        seen = set()
        deduped = []
        for row in rows:
            key = tuple(_sort_key(row[v]) for v in variables)
            if key not in seen:
                seen.add(key)
                deduped.append(row)
        rows = deduped

    if q.limit is not None:
        rows = rows[: q.limit]
    return ResultSet(variables=variables, rows=rows)
