import random

from geoask import geometry as geo
from geoask.kg import TripleStore, parse_ntriples_line
from geoask.materialize import (
    MaterializedRelation,
    TOPOLOGICAL_PREDICATES,
    load_into,
    materialize,
    materialized_predicates,
    to_ntriples,
)
from geoask.terms import GEO, Iri, Literal, ONT, RDF, RDFS
from oracles import random_simple_polygon


def test_batch_equals_per_pair_oracle(store, materialized_relations):
    feats = store.geometry_features()
    geoms = {f.iri: geo.parse_wkt(f.geometry_wkt) for f in feats}
    expected = set()
    for a in feats:
        for b in feats:
            if geo.sf_within(geoms[a.iri], geoms[b.iri]):
                expected.add(MaterializedRelation(a.iri, GEO.sfWithin, b.iri))
                expected.add(MaterializedRelation(b.iri, GEO.sfContains, a.iri))
            if geo.sf_intersects(geoms[a.iri], geoms[b.iri]):
                expected.add(MaterializedRelation(a.iri, GEO.sfIntersects, b.iri))
    assert materialized_relations == expected


def test_duality_invariant(materialized_relations):
    within = {(r.subject, r.object) for r in materialized_relations if r.predicate == GEO.sfWithin}
    contains = {(r.object, r.subject) for r in materialized_relations if r.predicate == GEO.sfContains}
    assert within == contains


def test_symmetry_and_reflexivity(materialized_relations, store):
    intersects = {(r.subject, r.object) for r in materialized_relations if r.predicate == GEO.sfIntersects}
    assert {(b, a) for a, b in intersects} == intersects
    for f in store.geometry_features():
        assert (f.iri, f.iri) in intersects
        assert MaterializedRelation(f.iri, GEO.sfWithin, f.iri) in materialized_relations


def test_within_implies_intersects(materialized_relations):
    within = {(r.subject, r.object) for r in materialized_relations if r.predicate == GEO.sfWithin}
    intersects = {(r.subject, r.object) for r in materialized_relations if r.predicate == GEO.sfIntersects}
    assert within <= intersects


def test_known_fixture_containments(materialized_relations):
    from geoask.terms import RES

    within = {(r.subject.value.rsplit("/", 1)[-1], r.object.value.rsplit("/", 1)[-1])
              for r in materialized_relations if r.predicate == GEO.sfWithin}
    assert ("reno", "emilia_romagna") in within
    assert ("savio", "emilia_romagna") in within
    assert ("po", "emilia_romagna") not in within  # crosses the boundary
    assert ("athens", "attica") in within


def test_empty_predicate_set():
    store = TripleStore()
    assert materialize(store, set()) == set()


def test_serialization_idempotent(materialized_relations):
    a = to_ntriples(materialized_relations)
    b = to_ntriples(set(materialized_relations))
    assert a == b
    parsed = {parse_ntriples_line(line) for line in a.splitlines()}
    assert parsed == {(r.subject, r.predicate, r.object) for r in materialized_relations}


def test_load_into_and_detection(store, materialized_relations):
    fresh = TripleStore()
    for t in store.triples:
        fresh.add(*t)
    fresh.finalize()
    assert materialized_predicates(fresh) == set()
    load_into(fresh, materialized_relations)
    assert materialized_predicates(fresh) == set(TOPOLOGICAL_PREDICATES)


def _polygon_store(rings):
    store = TripleStore()
    store.add(ONT.Feature, RDF.type, RDFS.Class)
    store.add(ONT.Feature, RDFS.label, Literal("feature", None, "en"))
    for i, ring in enumerate(rings):
        iri = Iri(f"http://x.test/poly{i:04d}")
        store.add(iri, RDF.type, ONT.Feature)
        geom = Iri(f"http://x.test/poly{i:04d}/geom")
        store.add(iri, GEO.hasGeometry, geom)
        wkt = "POLYGON((" + ",".join(f"{x} {y}" for x, y in ring) + "))"
        store.add(geom, GEO.asWKT, Literal(wkt, GEO.term("wktLiteral")))
    store.finalize()
    return store


def test_invariants_on_random_polygons():
    rng = random.Random(31337)
    rings = [
        random_simple_polygon(rng, cx=rng.uniform(-3, 3), cy=rng.uniform(-3, 3), radius=rng.uniform(0.5, 3))
        for _ in range(40)
    ]
    store = _polygon_store(rings)
    rels = materialize(store)
    within = {(r.subject, r.object) for r in rels if r.predicate == GEO.sfWithin}
    contains = {(r.subject, r.object) for r in rels if r.predicate == GEO.sfContains}
    intersects = {(r.subject, r.object) for r in rels if r.predicate == GEO.sfIntersects}
    assert within == {(b, a) for a, b in contains}
    assert intersects == {(b, a) for a, b in intersects}
    assert within <= intersects
