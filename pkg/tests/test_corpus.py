import json
import random

import pytest

from conftest import CORPUS
from geoask.corpus import CorpusError, evaluate_corpus, load_corpus, report_table, result_set_from_json
from geoask.sparql import ResultSet, result_sets_equal
from geoask.terms import Literal, XSD


def test_load_bundled_corpus():
    entries = load_corpus(CORPUS)
    assert len(entries) >= 60
    assert len({e.category for e in entries}) == 9
    assert all(e.gold_query or e.gold_answers for e in entries)


def test_corpus_missing_gold_rejected(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text(json.dumps({"id": "x", "category": "A", "question": "q"}) + "\n", encoding="utf-8")
    with pytest.raises(CorpusError):
        load_corpus(bad)


def test_corpus_invalid_json_rejected(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{not json}\n", encoding="utf-8")
    with pytest.raises(CorpusError):
        load_corpus(bad)


def test_empty_corpus_rejected(tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(CorpusError):
        load_corpus(empty)


def test_result_set_round_trip():
    rs = ResultSet(variables=["a"], rows=[{"a": Literal("7", XSD.integer)}])
    assert result_sets_equal(result_set_from_json(rs.to_json()), rs)
    assert result_set_from_json({"boolean": False}).boolean is False


def test_single_passing_entry_is_100(materialized_engine):
    entries = load_corpus(CORPUS)[:1]
    report = evaluate_corpus(materialized_engine, entries)
    assert report["accuracy"] == 100.0


def test_shuffled_corpus_identical_report(materialized_engine):
    subset = load_corpus(CORPUS)[:12]
    shuffled = subset[:]
    random.Random(5).shuffle(shuffled)
    assert [e.id for e in shuffled] != [e.id for e in subset]
    a = evaluate_corpus(materialized_engine, subset)
    b = evaluate_corpus(materialized_engine, shuffled)
    assert a == b


def test_report_table_format(materialized_engine):
    report = evaluate_corpus(materialized_engine, load_corpus(CORPUS)[:3])
    table = report_table(report)
    assert "ALL" in table and "Accuracy" in table
