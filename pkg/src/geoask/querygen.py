"""WHERE-clause assembly, SELECT/ASK construction, and the materialized rewrite."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .annotate import (
    AnnotationSet,
    CONCEPT,
    COORDINATES,
    IMAGE,
    INSTANCE,
    Mention,
    NAME,
    NUMBER_COUNT,
    NUMBER_PROPERTY,
    PROPERTY,
    SpatialLink,
    _is_image_mention,
    default_property_for,
)
from .kg import Ontology
from .nlp import DepGraph, VERB
from .sparql.ast import (
    ASK,
    Aggregate,
    And,
    Comparison,
    Filter,
    FunctionCall,
    OrderKey,
    Pattern,
    PropertyPath,
    Query,
    SELECT,
    TriplePattern,
    Var,
    validate_query,
)
from .terms import GEO, GEOF, Iri, Literal, RDF, UOM, XSD

GEOMETRY_PATH = PropertyPath((GEO.hasGeometry, GEO.asWKT))
_YESNO_STARTERS = {"is", "are", "was", "were", "does", "do", "did", "has", "have", "can", "could"}
_WH = {"what", "which", "where", "who", "when", "how"}
_FUNCTION_TO_PREDICATE = {
    GEOF.sfWithin: GEO.sfWithin,
    GEOF.sfContains: GEO.sfContains,
    GEOF.sfIntersects: GEO.sfIntersects,
}


@dataclass
class WhereBlock:
    origin: str
    patterns: list[Pattern]
    introduced_variables: list[str] = field(default_factory=list)


def _num_literal(value: float) -> Literal:
    if float(value).is_integer():
        return Literal(str(int(value)), XSD.integer)
    return Literal(repr(float(value)), XSD.decimal)


def _subject_node(m: Mention):
    return Iri(m.target.value) if m.kind == INSTANCE else Var(m.variable)


def _wkt_var(m: Mention) -> Var:
    return Var(m.wkt_variable)


def _next_p_number(aset: AnnotationSet, extra: int = 0) -> int:
    used = [
        int(match.group(1))
        for m in aset.mentions
        if (match := re.match(r"p(\d+)$", m.variable))
    ]
    return (max(used) if used else 0) + 1 + extra


def _image_mention(aset: AnnotationSet) -> Mention | None:
    for m in aset.mentions:
        if m.kind == CONCEPT and _is_image_mention(m):
            return m
    for m in aset.mentions:
        if m.kind == INSTANCE and _is_image_mention(m):
            return m
    return None


def _find_property_by_synonym(ontology: Ontology, class_iri: Iri, word: str) -> Iri | None:
    for prop_iri, info in sorted(ontology.properties_of(class_iri).items()):
        if any(word in syn for syn in info.synonyms):
            return prop_iri
    return None


def _property_mention_for(
    aset: AnnotationSet, ontology: Ontology, owner: Mention, prop_iri: Iri, allocated: list[Mention]
) -> tuple[Mention, bool]:
    """Existing or freshly allocated property mention for (owner, property)."""
    for pm in aset.property_mentions():
        if pm.owner is owner and pm.target == prop_iri:
            return pm, False
    for pm in allocated:
        if pm.owner is owner and pm.target == prop_iri:
            return pm, False
    pm = Mention(
        PROPERTY,
        owner.span,
        prop_iri,
        variable=f"p{_next_p_number(aset, extra=len(allocated))}",
        owner=owner,
    )
    allocated.append(pm)
    return pm, True


def build_where(aset: AnnotationSet, ontology: Ontology) -> list[WhereBlock]:
    """Component blocks: geometry for instances, type+geometry for concepts,
    property triples, then every constraint as a FILTER."""
    blocks: list[WhereBlock] = []
    for m in sorted(aset.geo_mentions(), key=lambda m: m.span):
        if m.kind == INSTANCE:
            blocks.append(
                WhereBlock(
                    "instances",
                    [TriplePattern(Iri(m.target.value), GEOMETRY_PATH, _wkt_var(m))],
                    [m.wkt_variable],
                )
            )
        else:
            subject = Var(m.variable)
            blocks.append(
                WhereBlock(
                    "concepts",
                    [
                        TriplePattern(subject, RDF.type, Iri(m.target.value)),
                        TriplePattern(subject, GEOMETRY_PATH, _wkt_var(m)),
                    ],
                    [m.variable, m.wkt_variable],
                )
            )
    for pm in aset.property_mentions():
        blocks.append(
            WhereBlock(
                "properties",
                [TriplePattern(_subject_node(pm.owner), Iri(pm.target.value), Var(pm.variable))],
                [pm.variable],
            )
        )

    temporal_vars: list[Var] = []
    if aset.temporal:
        image = _image_mention(aset)
        if image is None:
            aset.note("temporal constraint present but no image mention to carry it; dropped")
        else:
            ts_prop = _find_property_by_synonym(ontology, image.class_iri, "timestamp")
            if ts_prop is None:
                aset.note("image class has no timestamp property; temporal constraint dropped")
            else:
                allocated: list[Mention] = []
                pm, fresh = _property_mention_for(aset, ontology, image, ts_prop, allocated)
                if fresh:
                    aset.mentions.append(pm)
                    blocks.append(
                        WhereBlock(
                            "temporal",
                            [TriplePattern(_subject_node(image), Iri(ts_prop.value), Var(pm.variable))],
                            [pm.variable],
                        )
                    )
                temporal_vars = [Var(pm.variable)] * len(aset.temporal)

    for link in aset.spatial_links:
        blocks.append(WhereBlock("spatial", [Filter(_spatial_expression(link))]))

    for c in aset.numeric:
        if isinstance(c.target, SpatialLink) or c.target is None:
            continue  # distance bounds live inside the spatial FILTER
        if isinstance(c.unit, str) and c.comparator == "=" and c.unit not in ("m", "%", None):
            value: Literal | None = Literal(c.unit)  # enum token constraint (VV/VH)
        else:
            value = _num_literal(c.value)
        blocks.append(
            WhereBlock(
                "numeric",
                [Filter(Comparison(c.comparator, Var(c.target.variable), value))],
            )
        )

    for t_var, constraint in zip(temporal_vars, aset.temporal):
        comparisons = []
        if constraint.start is not None:
            comparisons.append(Comparison(">=", t_var, Literal(constraint.start, XSD.dateTime)))
        if constraint.end is not None:
            comparisons.append(Comparison("<", t_var, Literal(constraint.end, XSD.dateTime)))
        if not comparisons:
            continue
        expr = comparisons[0] if len(comparisons) == 1 else And(tuple(comparisons))
        blocks.append(WhereBlock("temporal", [Filter(expr)]))
    return blocks


def _spatial_expression(link: SpatialLink):
    if link.function == GEOF.distance:
        comparator, metres = link.distance_constraint
        call = FunctionCall(
            GEOF.distance, (_wkt_var(link.arg1), _wkt_var(link.arg2), UOM.metre)
        )
        return Comparison(comparator, call, _num_literal(metres))
    return FunctionCall(link.function, (_wkt_var(link.arg1), _wkt_var(link.arg2)))


@dataclass
class ProjectionPlan:
    form: str
    projection: list
    group_by: list[Var] = field(default_factory=list)
    distinct: bool = False
    extra_blocks: list[WhereBlock] = field(default_factory=list)


def _is_yes_no(g: DepGraph) -> bool:
    first = g.tokens[0]
    if first.pos != VERB or first.surface.lower() not in _YESNO_STARTERS:
        return False
    return not any(t.surface.lower() in _WH for t in g.tokens)


def build_projection(aset: AnnotationSet, g: DepGraph, ontology: Ontology) -> ProjectionPlan:
    """SELECT/ASK clause from the return types via next-object search."""
    if _is_yes_no(g):
        return ProjectionPlan(ASK, [])
    concepts = [m for m in aset.mentions if m.kind == CONCEPT]
    instances = [m for m in aset.mentions if m.kind == INSTANCE]
    properties = aset.property_mentions()
    plan = ProjectionPlan(SELECT, [])
    allocated: list[Mention] = []
    for rtype in aset.return_types or [NAME]:
        if rtype == COORDINATES:
            target = next(iter(sorted(aset.geo_mentions(), key=lambda m: m.span)), None)
            if target is not None:
                plan.projection.append(_wkt_var(target))
                continue
        elif rtype == NUMBER_PROPERTY:
            explicit = [pm for pm in properties if not pm.implicit]
            target = explicit[0] if explicit else (properties[0] if properties else None)
            if target is not None:
                plan.projection.append(Var(target.variable))
                continue
        elif rtype == NUMBER_COUNT:
            count_target = next((m for m in concepts if m is not aset.group_by), None)
            if count_target is None and concepts:
                count_target = concepts[0]
            if count_target is not None:
                if aset.group_by is not None:
                    plan.projection.append(Var(aset.group_by.variable))
                    plan.group_by.append(Var(aset.group_by.variable))
                plan.projection.append(
                    Aggregate("COUNT", Var(count_target.variable), True, Var("cnt1"))
                )
                continue
        elif rtype == IMAGE:
            image = _image_mention(aset)
            if image is not None:
                plan.projection.append(Var(image.variable) if image.kind == CONCEPT else _wkt_var(image))
                link_prop = _find_property_by_synonym(ontology, image.class_iri, "link")
                if link_prop is not None and image.kind == CONCEPT:
                    pm, fresh = _property_mention_for(aset, ontology, image, link_prop, allocated)
                    plan.projection.append(Var(pm.variable))
                    if fresh:
                        plan.extra_blocks.append(
                            WhereBlock(
                                "projection",
                                [TriplePattern(_subject_node(image), Iri(link_prop.value), Var(pm.variable))],
                                [pm.variable],
                            )
                        )
                plan.distinct = True
                continue
        elif rtype == NAME:
            if concepts:
                plan.projection.append(Var(concepts[0].variable))
                plan.distinct = True
                continue
        # fallback: first mention variable, with a trace note
        fallback = next(iter(sorted(aset.mentions, key=lambda m: m.span)), None)
        if fallback is None:
            continue
        aset.note(f"return type {rtype} had no resolvable target; projecting {fallback.variable}")
        plan.projection.append(
            Var(fallback.variable) if fallback.kind != INSTANCE else _wkt_var(fallback)
        )
    for pm in allocated:
        aset.mentions.append(pm)
    if plan.projection and any(
        isinstance(p, Var) and (p.name.startswith("c") or p.name.startswith("iWKT"))
        for p in plan.projection
    ):
        if not any(isinstance(p, Aggregate) for p in plan.projection):
            plan.distinct = True
    # dedupe identical projection entries while preserving order
    seen = set()
    unique = []
    for p in plan.projection:
        key = p if not isinstance(p, Aggregate) else ("agg", p.var, p.alias)
        if key not in seen:
            seen.add(key)
            unique.append(p)
    plan.projection = unique
    return plan


def assemble(
    blocks: list[WhereBlock], plan: ProjectionPlan, aset: AnnotationSet, g: DepGraph, ontology: Ontology
) -> Query:
    """Merge blocks and clause plan into a complete, validated query."""
    order_by: list[OrderKey] = []
    extra = list(plan.extra_blocks)
    for mark in aset.comparatives:
        if mark.kind != "superlative":
            continue
        if mark.target.kind == PROPERTY:
            pm = mark.target
        else:
            pm = default_property_for(ontology, aset, g, mark.target)
            if pm is None:
                aset.note("superlative target has no default property; mark ignored")
                continue
            if not any(
                isinstance(p, TriplePattern) and p.object == Var(pm.variable)
                for b in blocks + extra
                for p in b.patterns
            ):
                extra.append(
                    WhereBlock(
                        "superlative",
                        [TriplePattern(_subject_node(pm.owner), Iri(pm.target.value), Var(pm.variable))],
                        [pm.variable],
                    )
                )
        order_by.append(OrderKey(Var(pm.variable), mark.direction == "min"))

    patterns: list[Pattern] = []
    triple_blocks = [b for b in blocks + extra if b.origin != "spatial" and b.origin != "numeric"]
    filter_blocks = [b for b in blocks if b.origin in ("spatial", "numeric")]
    for b in triple_blocks:
        patterns.extend(p for p in b.patterns if isinstance(p, TriplePattern))
    for b in triple_blocks:
        patterns.extend(p for p in b.patterns if isinstance(p, Filter))
    for b in filter_blocks:
        patterns.extend(b.patterns)

    limit = aset.limit
    if order_by:
        limit = 1
    query = Query(
        plan.form,
        projection=tuple(plan.projection),
        where=tuple(patterns),
        distinct=plan.distinct and plan.form == SELECT,
        group_by=tuple(plan.group_by),
        order_by=tuple(order_by),
        limit=limit,
    )
    validate_query(query)
    return query


def generate(aset: AnnotationSet, g: DepGraph, ontology: Ontology) -> Query:
    blocks = build_where(aset, ontology)
    plan = build_projection(aset, g, ontology)
    return assemble(blocks, plan, aset, g, ontology)


# -- materialized rewrite --------------------------------------------------------


def gost_rewrite(q: Query, materialized: set[Iri]) -> Query:
    """Swap topological FILTERs for materialized triple patterns when possible.

    Only geometry variables that trace back to a feature term through a
    hasGeometry/asWKT pattern are rewritten; distance filters never are.
    Geometry patterns left unreferenced afterwards are pruned.
    """
    if not materialized:
        return q
    geometry_sources: dict[str, object] = {}
    for p in q.where:
        if (
            isinstance(p, TriplePattern)
            and isinstance(p.predicate, PropertyPath)
            and p.predicate == GEOMETRY_PATH
            and isinstance(p.object, Var)
        ):
            geometry_sources[p.object.name] = p.subject

    rewritten: list[Pattern] = []
    changed = False
    for p in q.where:
        if isinstance(p, Filter) and isinstance(p.expression, FunctionCall):
            call = p.expression
            predicate = _FUNCTION_TO_PREDICATE.get(call.function)
            if predicate is not None and predicate in materialized and len(call.args) == 2:
                a, b = call.args
                if (
                    isinstance(a, Var)
                    and isinstance(b, Var)
                    and a.name in geometry_sources
                    and b.name in geometry_sources
                ):
                    rewritten.append(
                        TriplePattern(geometry_sources[a.name], predicate, geometry_sources[b.name])
                    )
                    changed = True
                    continue
        rewritten.append(p)
    if not changed:
        return q

    def used_vars(patterns: list[Pattern]) -> set[str]:
        used: set[str] = set()
        for p in patterns:
            if isinstance(p, TriplePattern):
                for t in (p.subject, p.object):
                    if isinstance(t, Var):
                        used.add(t.name)
            else:
                for v in _expr_vars(p.expression):
                    used.add(v)
        return used

    keep: list[Pattern] = []
    for i, p in enumerate(rewritten):
        if (
            isinstance(p, TriplePattern)
            and isinstance(p.predicate, PropertyPath)
            and p.predicate == GEOMETRY_PATH
            and isinstance(p.object, Var)
        ):
            others = rewritten[:i] + rewritten[i + 1 :]
            referenced = used_vars(others)
            referenced |= {v.name for v in q.group_by}
            referenced |= {k.expr.name for k in q.order_by}
            for item in q.projection:
                if isinstance(item, Var):
                    referenced.add(item.name)
                else:
                    referenced.add(item.var.name)
            if p.object.name not in referenced:
                continue
        keep.append(p)
    new_q = Query(
        q.form,
        projection=q.projection,
        where=tuple(keep),
        distinct=q.distinct,
        group_by=q.group_by,
        order_by=q.order_by,
        limit=q.limit,
    )
    validate_query(new_q)
    return new_q


def _expr_vars(expr) -> set[str]:
    from .sparql.ast import expression_vars

    return {v.name for v in expression_vars(expr)}
