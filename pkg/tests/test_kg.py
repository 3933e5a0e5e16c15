import pytest

from conftest import FIXTURES
from geoask.kg import (
    GeometryRefError,
    NTriplesError,
    OntologyError,
    load_kg,
    load_kg_dir,
    parse_ntriples_line,
    serialize_triple,
)
from geoask.terms import GEO, Iri, Literal, ONT, RDF, RDFS, RES, XSD


def test_fixture_store_shape(store):
    assert len(store.ontology.classes) >= 6
    assert len(store.features) >= 40


def test_lookup_emilia_romagna(store):
    top_iri, score = store.lookup_label("Emilia Romagna", 1)[0]
    assert top_iri == RES.emilia_romagna
    assert score == 1.0


def test_lookup_is_total_and_deterministic(store):
    a = store.lookup_label("harbour near the sea", 5)
    b = store.lookup_label("harbour near the sea", 5)
    assert a == b
    scores = [s for _, s in a]
    assert scores == sorted(scores, reverse=True)


def test_every_label_finds_its_owner(store):
    for iri, labels in store.labels.items():
        for text, _ in labels:
            hits = store.lookup_label(text, 5)
            assert hits, text
            assert hits[0][1] == 1.0
            top = [h for h, s in hits if s == 1.0]
            assert iri in top, f"{text} did not recover {iri}"


def test_lookup_empty_text(store):
    assert store.lookup_label("  --  ", 3) == []


def test_subclass_closure(store):
    images = store.features_of_class(ONT.Image)
    s2 = store.features_of_class(ONT.Sentinel2Image)
    assert set(f.iri for f in s2) <= set(f.iri for f in images)
    assert len(images) == 14
    features = store.features_of_class(ONT.Feature)
    assert len(features) == len(store.features)


def test_class_for_word_examples(store):
    onto = store.ontology
    assert onto.class_for_word("rivers")[0] == ONT.River
    assert onto.class_for_word("images")[0] == ONT.Image
    assert onto.class_for_word("xylophone") is None


def test_property_for_phrase_examples(store):
    onto = store.ontology
    assert onto.property_for_phrase(ONT.Image, "cloud coverage")[0] == ONT.cloudCover
    assert onto.property_for_phrase(ONT.Image, "snow coverage")[0] == ONT.snowCover
    assert onto.property_for_phrase(ONT.Sentinel2Image, "cloud coverage")[0] == ONT.cloudCover
    assert onto.property_for_phrase(ONT.River, "cloud coverage") is None
    with pytest.raises(OntologyError):
        onto.property_for_phrase(Iri("http://nope.test/Class"), "area")


def test_parse_ntriples_forms():
    s, p, o = parse_ntriples_line('<http://a.test/x> <http://a.test/p> "v\\"al"@en .')
    assert o == Literal('v"al', None, "en")
    s, p, o = parse_ntriples_line(
        '<http://a.test/x> <http://a.test/p> "5"^^<http://www.w3.org/2001/XMLSchema#integer> .'
    )
    assert o.value() == 5
    assert parse_ntriples_line("   # comment") is None
    assert parse_ntriples_line("") is None


def test_parse_error_carries_line_number(tmp_path):
    bad = tmp_path / "bad.nt"
    bad.write_text("<http://a.test/x> <http://a.test/p> .\n", encoding="utf-8")
    with pytest.raises(NTriplesError) as err:
        load_kg([bad])
    assert "bad.nt:1" in str(err.value)


def test_round_trip_serialization():
    line = '<http://a.test/x> <http://a.test/p> "tab\\there"^^<http://www.w3.org/2001/XMLSchema#string> .'
    s, p, o = parse_ntriples_line(line)
    assert parse_ntriples_line(serialize_triple(s, p, o)) == (s, p, o)


def test_empty_file_list_is_ontology_error():
    with pytest.raises(OntologyError):
        load_kg([])


def test_malformed_wkt_names_subject(tmp_path):
    nt = tmp_path / "kg.nt"
    nt.write_text(
        "\n".join(
            [
                f"{ONT.Feature.n3()} {RDF.type.n3()} {RDFS.Class.n3()} .",
                f'{ONT.Feature.n3()} {RDFS.label.n3()} "feature"@en .',
                f"{RES.bad.n3()} {RDF.type.n3()} {ONT.Feature.n3()} .",
                f"{RES.bad.n3()} {GEO.hasGeometry.n3()} {RES.bad_geom.n3()} .",
                f'{RES.bad_geom.n3()} {GEO.asWKT.n3()} "CIRCLE(0 0 1)"^^{GEO.term("wktLiteral").n3()} .',
            ]
        )
        + "\n",
        encoding="utf-8",
    )
    with pytest.raises(GeometryRefError) as err:
        load_kg([nt])
    assert "bad" in str(err.value)


def test_dangling_geometry_reference(tmp_path):
    nt = tmp_path / "kg.nt"
    nt.write_text(
        "\n".join(
            [
                f"{ONT.Feature.n3()} {RDF.type.n3()} {RDFS.Class.n3()} .",
                f'{ONT.Feature.n3()} {RDFS.label.n3()} "feature"@en .',
                f"{RES.bad.n3()} {RDF.type.n3()} {ONT.Feature.n3()} .",
                f"{RES.bad.n3()} {GEO.hasGeometry.n3()} {RES.nowhere.n3()} .",
            ]
        )
        + "\n",
        encoding="utf-8",
    )
    with pytest.raises(GeometryRefError):
        load_kg([nt])


def test_ontology_cycle_detected(tmp_path):
    nt = tmp_path / "kg.nt"
    nt.write_text(
        "\n".join(
            [
                f"{ONT.Feature.n3()} {RDF.type.n3()} {RDFS.Class.n3()} .",
                f'{ONT.Feature.n3()} {RDFS.label.n3()} "feature"@en .',
                f"{ONT.A.n3()} {RDFS.subClassOf.n3()} {ONT.B.n3()} .",
                f"{ONT.B.n3()} {RDFS.subClassOf.n3()} {ONT.A.n3()} .",
                f'{ONT.A.n3()} {RDFS.label.n3()} "a"@en .',
                f'{ONT.B.n3()} {RDFS.label.n3()} "b"@en .',
            ]
        )
        + "\n",
        encoding="utf-8",
    )
    with pytest.raises(OntologyError):
        load_kg([nt])


def test_label_index_consistent_with_triples(store):
    indexed = {text for _, text in store.label_index.texts()}
    feature_iris = set(store.features)
    triple_labels = {
        o.lexical
        for s, p, o in store.triples
        if p == RDFS.label and isinstance(o, Literal) and s in feature_iris
    }
    assert triple_labels == indexed


def test_load_kg_dir_missing():
    from geoask.terms import GeoAskError

    with pytest.raises(GeoAskError):
        load_kg_dir(FIXTURES / "not-there")
