"""Offline materialization of topological relations over all store geometries."""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import Geometry, parse_wkt, sf_intersects, sf_within
from .kg import TripleStore, serialize_triple
from .terms import GEO, Iri

TOPOLOGICAL_PREDICATES = (GEO.sfWithin, GEO.sfContains, GEO.sfIntersects)


@dataclass(frozen=True, order=True)
class MaterializedRelation:
    subject: Iri
    predicate: Iri
    object: Iri


def materialize(store: TripleStore, predicates: set[Iri] | None = None) -> set[MaterializedRelation]:
    """Exhaustive pairwise evaluation of the requested topological predicates.

    Within/contains pairs are emitted together so the duality invariant holds
    by construction. Self-pairs are included (within is reflexive).
    """
    if predicates is None:
        predicates = set(TOPOLOGICAL_PREDICATES)
    unknown = predicates - set(TOPOLOGICAL_PREDICATES)
    if unknown:
        raise ValueError(f"unsupported materialization predicates: {sorted(map(str, unknown))}")
    feats = store.geometry_features()
    geoms: dict[Iri, Geometry] = {f.iri: parse_wkt(f.geometry_wkt) for f in feats}
    out: set[MaterializedRelation] = set()
    want_within = GEO.sfWithin in predicates
    want_contains = GEO.sfContains in predicates
    want_intersects = GEO.sfIntersects in predicates
    for i, a in enumerate(feats):
        ga = geoms[a.iri]
        for b in feats[i:]:
            gb = geoms[b.iri]
            if want_intersects and sf_intersects(ga, gb):
                out.add(MaterializedRelation(a.iri, GEO.sfIntersects, b.iri))
                out.add(MaterializedRelation(b.iri, GEO.sfIntersects, a.iri))
            if want_within or want_contains:
                if sf_within(ga, gb):
                    if want_within:
                        out.add(MaterializedRelation(a.iri, GEO.sfWithin, b.iri))
                    if want_contains:
                        out.add(MaterializedRelation(b.iri, GEO.sfContains, a.iri))
                if a.iri != b.iri and sf_within(gb, ga):
                    if want_within:
                        out.add(MaterializedRelation(b.iri, GEO.sfWithin, a.iri))
                    if want_contains:
                        out.add(MaterializedRelation(a.iri, GEO.sfContains, b.iri))
    return out


def to_ntriples(relations: set[MaterializedRelation]) -> str:
    """Deterministic N-Triples text, sorted for byte-stable output."""
    lines = [serialize_triple(r.subject, r.predicate, r.object) for r in sorted(relations)]
    return "\n".join(lines) + ("\n" if lines else "")


def load_into(store: TripleStore, relations: set[MaterializedRelation]):
    for r in relations:
        store.add(r.subject, r.predicate, r.object)


def materialized_predicates(store: TripleStore) -> set[Iri]:
    """Topological predicates for which the store holds materialized triples."""
    return {p for p in TOPOLOGICAL_PREDICATES if store.by_predicate(p)}
