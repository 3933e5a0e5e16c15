import random

import pytest

from geoask.sparql import (
    ASK,
    Aggregate,
    And,
    Comparison,
    EvalError,
    Filter,
    FunctionCall,
    OrderKey,
    PropertyPath,
    Query,
    QueryInvariantError,
    ResultSet,
    SELECT,
    SparqlSyntaxError,
    TriplePattern,
    UnsupportedFeatureError,
    Var,
    evaluate,
    parse,
    result_sets_equal,
    serialize,
    validate_query,
)
from geoask.sparql.ast import alpha_normalize, queries_equal_modulo_renaming
from geoask.terms import GEO, GEOF, Iri, Literal, ONT, RDF, UOM, XSD
from oracles import nested_loop_evaluate, random_store_and_query, result_to_canon, store_from_triples

RIVER = Iri(ONT.River.value)
PATH = PropertyPath((GEO.hasGeometry, GEO.asWKT))


def simple_ask():
    return Query(ASK, where=(TriplePattern(Iri("http://x.test/a"), RDF.type, RIVER),))


def test_ask_single_pattern_is_one_liner():
    text = serialize(simple_ask())
    assert text.startswith("ASK WHERE {") and "\n" not in text


def test_count_query_contains_group_by():
    q = Query(
        SELECT,
        projection=(Var("c2"), Aggregate("COUNT", Var("c1"), True, Var("cnt1"))),
        where=(
            TriplePattern(Var("c1"), RDF.type, RIVER),
            TriplePattern(Var("c2"), RDF.type, Iri(ONT.Region.value)),
        ),
        group_by=(Var("c2"),),
    )
    text = serialize(q)
    assert "GROUP BY ?c2" in text
    assert "COUNT(DISTINCT ?c1)" in text


def test_property_path_serialization():
    q = Query(
        SELECT,
        projection=(Var("w"),),
        where=(TriplePattern(Var("c"), PATH, Var("w")), TriplePattern(Var("c"), RDF.type, RIVER)),
        distinct=True,
    )
    assert "geo:hasGeometry/geo:asWKT" in serialize(q)


def test_round_trip_structural_equality():
    q = Query(
        SELECT,
        projection=(Var("c1"),),
        where=(
            TriplePattern(Var("c1"), RDF.type, RIVER),
            TriplePattern(Var("c1"), PATH, Var("w1")),
            TriplePattern(Iri("http://x.test/er"), PATH, Var("w2")),
            Filter(FunctionCall(GEOF.sfWithin, (Var("w1"), Var("w2")))),
            Filter(
                Comparison(
                    "<",
                    FunctionCall(GEOF.distance, (Var("w1"), Var("w2"), UOM.metre)),
                    Literal("2000", XSD.integer),
                )
            ),
            Filter(
                And(
                    (
                        Comparison(">=", Var("w1"), Literal("2021-01-01T00:00:00Z", XSD.dateTime)),
                        Comparison("<", Var("w1"), Literal("2021-02-01T00:00:00Z", XSD.dateTime)),
                    )
                )
            ),
        ),
        distinct=True,
        order_by=(OrderKey(Var("w1"), False),),
        limit=7,
    )
    assert parse(serialize(q)) == q


def test_round_trip_modulo_renaming():
    a = parse("SELECT DISTINCT ?x WHERE {\n  ?x a <http://x.test/C> .\n}")
    b = parse("SELECT DISTINCT ?y WHERE {\n  ?y a <http://x.test/C> .\n}")
    assert a != b
    assert queries_equal_modulo_renaming(a, b)
    assert alpha_normalize(a) == alpha_normalize(b)


def test_unsupported_keyword():
    with pytest.raises(UnsupportedFeatureError):
        parse("SELECT ?x WHERE { OPTIONAL { ?x a <http://x.test/C> } }")


def test_empty_query_is_syntax_error():
    with pytest.raises(SparqlSyntaxError):
        parse("")


def test_syntax_error_has_position():
    with pytest.raises(SparqlSyntaxError) as err:
        parse("SELECT ?x WHERE { ?x a } ")
    assert "offset" in str(err.value)


def test_parse_semicolon_groups():
    q = parse(
        "SELECT DISTINCT ?c WHERE {\n"
        "  ?c a <http://x.test/C> ; <http://x.test/p> ?v .\n"
        "}"
    )
    assert len(q.where) == 2


def test_validate_rejects_loose_filter():
    q = Query(
        SELECT,
        projection=(Var("x"),),
        where=(
            TriplePattern(Var("x"), RDF.type, RIVER),
            Filter(Comparison("<", Var("nope"), Literal("1", XSD.integer))),
        ),
    )
    with pytest.raises(QueryInvariantError):
        validate_query(q)


def test_validate_group_by_coverage():
    q = Query(
        SELECT,
        projection=(Var("a"), Aggregate("COUNT", Var("b"), False, Var("n"))),
        where=(TriplePattern(Var("a"), Iri("http://x.test/p"), Var("b")),),
        group_by=(),
    )
    with pytest.raises(QueryInvariantError):
        validate_query(q)


# -- evaluation ----------------------------------------------------------------


def _image_store():
    triples = [
        (Iri("http://x.test/i1"), RDF.type, Iri(ONT.Image.value)),
        (Iri("http://x.test/i2"), RDF.type, Iri(ONT.Image.value)),
        (Iri("http://x.test/i1"), Iri(ONT.cloudCover.value), Literal("5", XSD.decimal)),
        (Iri("http://x.test/i2"), Iri(ONT.cloudCover.value), Literal("50", XSD.decimal)),
    ]
    return store_from_triples(triples), triples


def test_filter_on_cloud_cover():
    store, _ = _image_store()
    q = Query(
        SELECT,
        projection=(Var("i"),),
        where=(
            TriplePattern(Var("i"), RDF.type, Iri(ONT.Image.value)),
            TriplePattern(Var("i"), Iri(ONT.cloudCover.value), Var("c")),
            Filter(Comparison("<", Var("c"), Literal("10", XSD.integer))),
        ),
    )
    result = evaluate(q, store)
    assert [row["i"].value for row in result.rows] == ["http://x.test/i1"]


def test_ask_empty_store():
    store = store_from_triples([])
    assert evaluate(simple_ask(), store).boolean is False


def test_unbound_filter_variable_errors():
    store, _ = _image_store()
    q = Query(
        ASK,
        where=(
            TriplePattern(Var("i"), RDF.type, Iri(ONT.Image.value)),
            Filter(Comparison("<", Var("ghost"), Literal("1", XSD.integer))),
        ),
    )
    with pytest.raises(EvalError):
        evaluate(q, store)


def test_distinct_idempotent(store):
    q = parse(
        "SELECT DISTINCT ?c WHERE {\n  ?c a <http://geoask.example/ontology#River> .\n}"
    )
    once = evaluate(q, store)
    twice = evaluate(q, store)
    assert once.rows == twice.rows
    assert len({tuple(sorted((k, str(v)) for k, v in r.items())) for r in once.rows}) == len(once.rows)


def test_count_rivers_per_region_matches_fixture(store):
    q = parse(
        "SELECT ?r (COUNT(DISTINCT ?c) AS ?n) WHERE {\n"
        "  ?c a <http://geoask.example/ontology#River> ; geo:hasGeometry/geo:asWKT ?cw .\n"
        "  ?r a <http://geoask.example/ontology#Region> ; geo:hasGeometry/geo:asWKT ?rw .\n"
        "  FILTER(geof:sfWithin(?cw, ?rw))\n"
        "}\nGROUP BY ?r"
    )
    result = evaluate(q, store)
    got = {row["r"].value.rsplit("/", 1)[-1]: int(row["n"].lexical) for row in result.rows}
    assert got == {"emilia_romagna": 2, "lombardy": 1, "attica": 1}


def test_property_path_evaluation(store):
    q = parse(
        "SELECT ?w WHERE {\n  <http://geoask.example/resource/rome> geo:hasGeometry/geo:asWKT ?w .\n}"
    )
    rows = evaluate(q, store).rows
    assert len(rows) == 1 and rows[0]["w"].lexical.startswith("POINT")


def test_subclass_closure_in_type_patterns(store):
    q = parse("SELECT DISTINCT ?i WHERE {\n  ?i a <http://geoask.example/ontology#Image> .\n}")
    assert len(evaluate(q, store).rows) == 14


def test_order_by_deterministic(store):
    q = parse(
        "SELECT ?c ?l WHERE {\n"
        "  ?c a <http://geoask.example/ontology#River> ; "
        "<http://geoask.example/ontology#length> ?l .\n}\nORDER BY DESC(?l)"
    )
    rows = evaluate(q, store).rows
    lengths = [float(r["l"].lexical) for r in rows]
    assert lengths == sorted(lengths, reverse=True)
    assert rows == evaluate(q, store).rows


def test_result_set_equality_protocol():
    a = ResultSet(variables=["x"], rows=[{"x": Literal("5", XSD.integer)}])
    b = ResultSet(variables=["y"], rows=[{"y": Literal("5.0", XSD.decimal)}])
    assert result_sets_equal(a, b)  # names insignificant, numerics by value
    c = ResultSet(variables=["y"], rows=[{"y": Literal("5", XSD.integer)}, {"y": Literal("6", XSD.integer)}])
    assert not result_sets_equal(a, c)  # supersets fail


def test_tsv_and_json_shapes():
    rs = ResultSet(variables=["x"], rows=[{"x": Iri("http://x.test/a")}])
    assert rs.to_json() == {"vars": ["x"], "rows": [{"x": {"type": "uri", "value": "http://x.test/a"}}]}
    assert rs.to_tsv() == "?x\nhttp://x.test/a\n"
    assert ResultSet(boolean=True).to_json() == {"boolean": True}


def test_evaluator_agrees_with_nested_loop_oracle():
    rng = random.Random(4242)
    for case in range(120):
        triples, q = random_store_and_query(rng)
        store = store_from_triples(triples)
        got = result_to_canon(evaluate(q, store))
        want = nested_loop_evaluate(q, triples)
        if "rows" in want:
            assert len(got["vars"]) == len(want["vars"]), f"case {case}"
            if q.order_by or q.limit is not None:
                assert got["rows"] == want["rows"], f"case {case}: {serialize(q)}"
            else:
                assert sorted(got["rows"]) == sorted(want["rows"]), f"case {case}: {serialize(q)}"
        else:
            assert got == want, f"case {case}: {serialize(q)}"
