import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import GOLD, RUNNING_EXAMPLE
from geoask.nlp import (
    ConlluError,
    DepGraph,
    EmptyQuestionError,
    Token,
    export_conllu,
    ingest_conllu,
    parse_dependencies,
    parse_question,
    tokenize_and_tag,
    tree_distance,
)
from oracles import bfs_distance


def test_tokenize_show_me_all_images():
    tokens = tokenize_and_tag("Show me all images")
    assert len(tokens) == 4
    assert tokens[3].surface == "images"
    assert tokens[3].pos == "NOUN"
    assert tokens[3].lemma == "image"


def test_num_unit_splitting():
    tokens = tokenize_and_tag("less than 2km")
    assert [(t.surface, t.pos) for t in tokens] == [
        ("less", "ADV"), ("than", "ADP"), ("2", "NUM"), ("km", "NOUN"),
    ]
    tokens = tokenize_and_tag("10%")
    assert [(t.surface, t.pos) for t in tokens] == [("10", "NUM"), ("%", "NOUN")]


def test_empty_question_raises():
    with pytest.raises(EmptyQuestionError):
        tokenize_and_tag("   ")


def test_spans_cover_non_whitespace():
    q = "Show me images of Athens"
    raw = q.encode("utf-8")
    tokens = tokenize_and_tag(q)
    covered = b"".join(raw[s:e] for t in tokens for s, e in [t.char_span])
    assert covered == raw.replace(b" ", b"")
    spans = [t.char_span for t in tokens]
    assert spans == sorted(spans)
    assert all(a[1] <= b[0] for a, b in zip(spans, spans[1:]))


def test_conj_and_edge():
    g = parse_question("towns and forests")
    labels = {(h, d): l for h, d, l in g.edges}
    assert labels[(0, 2)] == "conj:and"


def test_single_token_question():
    g = parse_question("rivers")
    assert g.root == 0
    assert g.edges == []


def test_preposition_attachment():
    g = parse_question("rivers in France")
    heads = {d: (h, l) for h, d, l in g.edges}
    assert heads[2] == (0, "nmod")  # France under rivers
    assert heads[1] == (2, "case")


def test_running_example_gold_conllu():
    text = (GOLD / "running_example.conllu").read_text(encoding="utf-8")
    g = ingest_conllu(text)
    assert len(g.tokens) == 32
    assert g.tokens[g.root].surface == "Show"
    labels = {(g.tokens[h].surface, g.tokens[d].surface): l for h, d, l in g.edges}
    assert labels[("towns", "forests")] == "conj:and"


def test_builtin_parse_matches_frozen_gold():
    text = (GOLD / "running_example.conllu").read_text(encoding="utf-8")
    gold = ingest_conllu(text)
    ours = parse_question(RUNNING_EXAMPLE)
    assert [t.surface for t in ours.tokens] == [t.surface for t in gold.tokens]
    assert sorted(ours.edges) == sorted(gold.edges)


def test_conllu_round_trip():
    text = (GOLD / "running_example.conllu").read_text(encoding="utf-8")
    canonical = export_conllu(ingest_conllu(text))
    assert export_conllu(ingest_conllu(canonical)) == canonical


def test_conllu_two_roots_error():
    text = "1\tA\t_\tNOUN\t_\t_\t0\troot\t_\t_\n2\tB\t_\tNOUN\t_\t_\t0\troot\t_\t_\n"
    with pytest.raises(ConlluError):
        ingest_conllu(text)


def test_conllu_malformed_line():
    with pytest.raises(ConlluError):
        ingest_conllu("1\tA\tNOUN\n")
    with pytest.raises(ConlluError):
        ingest_conllu("2\tA\t_\tNOUN\t_\t_\t0\troot\t_\t_\n")


def test_conllu_cycle_detected():
    text = "1\tA\t_\tNOUN\t_\t_\t2\tdep\t_\t_\n2\tB\t_\tNOUN\t_\t_\t1\tdep\t_\t_\n3\tC\t_\tNOUN\t_\t_\t0\troot\t_\t_\n"
    with pytest.raises(ConlluError):
        ingest_conllu(text)


def test_tree_distance_examples():
    g = parse_question(RUNNING_EXAMPLE)
    assert tree_distance(g, 5, 5) == 0
    heads = {d: h for h, d, _ in g.edges}
    some_dep = next(iter(heads))
    assert tree_distance(g, some_dep, heads[some_dep]) == 1
    with pytest.raises(IndexError):
        tree_distance(g, 0, 999)


def test_tree_distance_matches_bfs_oracle():
    g = parse_question(RUNNING_EXAMPLE)
    n = len(g.tokens)
    for i in range(n):
        for j in range(n):
            assert tree_distance(g, i, j) == bfs_distance(n, g.edges, i, j)


def test_tree_distance_is_metric():
    g = parse_question("Which rivers are in the Emilia Romagna region and near forests?")
    n = len(g.tokens)
    for i in range(n):
        assert tree_distance(g, i, i) == 0
        for j in range(n):
            assert tree_distance(g, i, j) == tree_distance(g, j, i)
            for k in range(0, n, 3):
                assert tree_distance(g, i, k) <= tree_distance(g, i, j) + tree_distance(g, j, k)


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=60))
def test_parser_invariants_fuzz(text):
    try:
        tokens = tokenize_and_tag(text)
    except EmptyQuestionError:
        return
    g = parse_dependencies(tokens)
    g.validate()  # one root, single heads, acyclic
    n = len(g.tokens)
    assert sum(1 for i in range(n) if i == g.root) == 1
    # connected: BFS reaches every token
    for i in range(n):
        bfs_distance(n, g.edges, g.root, i)


def test_parser_deterministic():
    a = parse_question(RUNNING_EXAMPLE)
    b = parse_question(RUNNING_EXAMPLE)
    assert a.edges == b.edges and a.root == b.root


def _random_tokens(rng):
    pos_choices = ["NOUN", "PROPN", "VERB", "ADJ", "ADV", "ADP", "NUM", "DET", "CONJ", "PUNCT", "OTHER"]
    tokens = []
    cursor = 0
    for i in range(rng.randint(1, 12)):
        surface = rng.choice(["alpha", "beta", "and", "in", "7", ",", "x"])
        tokens.append(Token(i, surface, surface.lower(), rng.choice(pos_choices), (cursor, cursor + len(surface))))
        cursor += len(surface) + 1
    return tokens


def test_parser_invariants_on_arbitrary_pos_sequences():
    rng = random.Random(99)
    for _ in range(300):
        tokens = _random_tokens(rng)
        g = parse_dependencies(tokens)
        g.validate()
