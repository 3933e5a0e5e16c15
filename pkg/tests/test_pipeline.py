import pytest

from conftest import FIXTURES, RUNNING_EXAMPLE
from geoask.nlp import EmptyQuestionError
from geoask.pipeline import build_engine
from geoask.sparql import parse, result_sets_equal
from geoask.terms import RES


def test_running_example_answers(engine):
    resp = engine.ask(RUNNING_EXAMPLE)
    answers = {row["c1"].value for row in resp.answers.rows}
    assert answers == {RES.s2_01.value, RES.s2_08.value}


def test_sparql_field_parses(engine):
    resp = engine.ask(RUNNING_EXAMPLE)
    parse(resp.sparql)
    parse(resp.rewritten_sparql)


def test_answers_consistent_with_rewritten(materialized_engine):
    from geoask.sparql import evaluate

    resp = materialized_engine.ask(RUNNING_EXAMPLE)
    direct = evaluate(parse(resp.rewritten_sparql), materialized_engine.store, materialized_engine.geo)
    assert result_sets_equal(resp.answers, direct)


def test_no_execute_skips_answers(engine):
    resp = engine.ask(RUNNING_EXAMPLE, execute=False)
    assert resp.answers is None
    assert resp.sparql


def test_trace_togglable(engine):
    with_trace = engine.ask("Which rivers are in Attica?", include_trace=True)
    without = engine.ask("Which rivers are in Attica?", include_trace=False)
    assert with_trace.trace is not None and "annotations" in with_trace.trace
    assert without.trace is None


def test_timings_cover_stages(engine):
    resp = engine.ask("Which rivers are in Attica?")
    assert set(resp.timings) == {"parse", "annotate", "generate", "rewrite", "execute"}
    assert all(v >= 0 for v in resp.timings.values())


def test_empty_question_raises(engine):
    with pytest.raises(EmptyQuestionError):
        engine.ask("   ")


def test_engine_with_and_without_materialization_agree(engine, materialized_engine):
    for question in [
        RUNNING_EXAMPLE,
        "Which rivers are in the Emilia Romagna region?",
        "Is Athens in Attica?",
        "How many towns are there in each region?",
    ]:
        a = engine.ask(question)
        b = materialized_engine.ask(question)
        assert result_sets_equal(a.answers, b.answers), question
        assert a.sparql == b.sparql  # pre-rewrite text identical


def test_response_json_shape(engine):
    body = engine.ask("Which rivers are in Attica?").to_json()
    assert set(body) == {
        "question", "sparql", "rewrittenSparql", "answers", "returnTypes", "trace", "timings",
    }
    assert body["answers"]["vars"] == ["c1"]
