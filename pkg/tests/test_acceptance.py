"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Run `pytest tests/test_acceptance.py -v -s` for the per-criterion lines.
"""

import json
import random
import time

import pytest
from shapely import wkt as shapely_wkt

from conftest import CORPUS, FIXTURES, RUNNING_EXAMPLE
from geoask import geometry as geo
from geoask.corpus import evaluate_corpus, load_corpus
from geoask.kg import load_kg_dir
from geoask.materialize import MaterializedRelation, materialize, to_ntriples
from geoask.pipeline import build_engine
from geoask.sparql import (
    Filter,
    FunctionCall,
    PropertyPath,
    TriplePattern,
    evaluate,
    parse,
    result_sets_equal,
    serialize,
)
from geoask.terms import GEO, GEOF, RES
from oracles import (
    haversine_oracle,
    min_distance_oracle,
    nested_loop_evaluate,
    random_simple_polygon,
    random_store_and_query,
    result_to_canon,
    store_from_triples,
)


def report(name: str, ok: bool, detail: str = ""):
    line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print("\n" + line)
    assert ok, line


@pytest.fixture(scope="module")
def fresh_engine(tmp_path_factory):
    store = load_kg_dir(FIXTURES)
    relations = materialize(store)
    path = tmp_path_factory.mktemp("acc") / "materialized.nt"
    path.write_text(to_ntriples(relations), encoding="utf-8")
    return build_engine(FIXTURES, path)


# -- 1. running-example fidelity ------------------------------------------------


def _shapely_features(store):
    feats = {}
    for f in store.geometry_features():
        feats[f.iri.value.rsplit("/", 1)[-1]] = shapely_wkt.loads(f.geometry_wkt)
    return feats


def _paths(geom):
    if geom.geom_type == "Point":
        return [[(geom.x, geom.y)]]
    if geom.geom_type == "LineString":
        return [list(geom.coords)]
    return [list(geom.exterior.coords)] + [list(r.coords) for r in geom.interiors]


def _oracle_distance(ga, gb):
    if ga.intersects(gb):
        return 0.0
    return min_distance_oracle(_paths(ga), _paths(gb))


def test_running_example_fidelity(fresh_engine):
    t0 = time.perf_counter()
    resp = fresh_engine.ask(RUNNING_EXAMPLE)
    elapsed = time.perf_counter() - t0

    q = parse(resp.sparql)
    triples = [p for p in q.where if isinstance(p, TriplePattern)]
    filters = [p for p in q.where if isinstance(p, Filter)]
    text = resp.sparql

    checks = {}
    # (a) type + geometry blocks for River, Town, Forest
    ok = True
    for cls in ("River", "Town", "Forest"):
        typed = [
            p for p in triples
            if not isinstance(p.predicate, PropertyPath) and str(p.object).endswith(cls)
        ]
        ok = ok and len(typed) == 1
        if typed:
            subject = typed[0].subject
            ok = ok and any(
                p.subject == subject and isinstance(p.predicate, PropertyPath) for p in triples
            )
    checks["a:type+geometry blocks"] = ok
    # (b) instance geometry block for Emilia-Romagna
    checks["b:instance block"] = any(
        isinstance(p.predicate, PropertyPath) and getattr(p.subject, "value", "") == RES.emilia_romagna.value
        for p in triples
    )
    # (c) distance filter with uom:metre and < 2000
    checks["c:distance filter"] = "uom:metre) < 2000" in text
    # (d) sfWithin filters against the region
    within_filters = [
        p for p in filters
        if isinstance(p.expression, FunctionCall) and p.expression.function == GEOF.sfWithin
    ]
    checks["d:sfWithin filters"] = len(within_filters) >= 2 and "?iWKT1" in text
    # (e) cloud cover < 10
    checks["e:cloudCover filter"] = any(
        "cloudCover" in str(p) for p in triples
    ) and "< 10" in text
    # (f) timestamp window [2021-01-01, 2021-02-01)
    checks["f:timestamp filter"] = (
        '?p2 >= "2021-01-01T00:00:00Z"' in text and '?p2 < "2021-02-01T00:00:00Z"' in text
    )

    # end-to-end answers against the brute-force oracle
    store = fresh_engine.store
    feats = _shapely_features(store)
    towns_er = [s for s, c in _classes(store).items() if c == "Town" and feats[s].within(feats["emilia_romagna"])]
    forests_er = [s for s, c in _classes(store).items() if c == "Forest" and feats[s].within(feats["emilia_romagna"])]
    rivers = [s for s, c in _classes(store).items() if c == "River"]
    good_rivers = [
        r for r in rivers
        if any(_oracle_distance(feats[r], feats[t]) < 2000 for t in towns_er)
        and any(_oracle_distance(feats[r], feats[f]) < 2000 for f in forests_er)
    ]
    expected = set()
    for slug, cls in _classes(store).items():
        if cls not in ("Sentinel1Image", "Sentinel2Image"):
            continue
        props = _props(store, slug)
        if "cloudCover" not in props or float(props["cloudCover"]) >= 10:
            continue
        ts = props["hasTimestamp"]
        if not ("2021-01-01T00:00:00Z" <= ts < "2021-02-01T00:00:00Z"):
            continue
        if any(feats[slug].intersects(feats[r]) for r in good_rivers):
            expected.add(slug)
    got = {row["c1"].value.rsplit("/", 1)[-1] for row in resp.answers.rows}
    structural = sum(checks.values())
    ok = structural == 6 and got == expected and elapsed < 1.0
    report(
        "running-example fidelity",
        ok,
        f"structural {structural}/6, answers {sorted(got)} vs oracle {sorted(expected)}, {elapsed * 1000:.0f} ms",
    )


def _classes(store):
    return {
        f.iri.value.rsplit("/", 1)[-1]: f.class_iri.value.rsplit("#", 1)[-1]
        for f in store.features.values()
    }


def _props(store, slug):
    feat = store.features[RES.term(slug)]
    return {k.value.rsplit("#", 1)[-1]: v[0].lexical for k, v in feat.properties.items() if v}


# -- 2. gold corpus -----------------------------------------------------------------


def test_gold_corpus_accuracy(fresh_engine):
    entries = load_corpus(CORPUS)
    assert len(entries) >= 60
    assert len({e.category for e in entries}) == 9
    t0 = time.perf_counter()
    rep = evaluate_corpus(fresh_engine, entries)
    elapsed = time.perf_counter() - t0
    failures = [r for r in rep["entries"] if not r["passed"]]
    for r in failures:
        print(f"\n  corpus failure [{r['id']}] {r['question']}")
        print(f"    diff: {json.dumps(r.get('diff', r.get('error')), sort_keys=True)[:400]}")
    ok = rep["accuracy"] >= 90.0 and elapsed < 30.0
    report(
        "gold corpus exact match",
        ok,
        f"{rep['passed']}/{rep['total']} = {rep['accuracy']}% in {elapsed:.1f} s",
    )


# -- 3. rewrite equivalence ------------------------------------------------------------


def test_gost_equivalence(fresh_engine):
    entries = load_corpus(CORPUS)
    total = checked = 0
    for entry in entries:
        resp = fresh_engine.ask(entry.question, execute=False)
        original = parse(resp.sparql)
        rewritten = parse(resp.rewritten_sparql)
        if original == rewritten:
            continue
        total += 1
        before = evaluate(original, fresh_engine.store, fresh_engine.geo)
        after = evaluate(rewritten, fresh_engine.store, fresh_engine.geo)
        if result_sets_equal(before, after):
            checked += 1
        else:
            print(f"\n  rewrite mismatch on [{entry.id}] {entry.question}")
    ok = total > 0 and checked == total
    report("rewrite equivalence", ok, f"{checked}/{total} rewritable queries identical")


# -- 4. materializer -----------------------------------------------------------------


def test_materializer_against_per_pair_oracle(fresh_engine):
    store = load_kg_dir(FIXTURES)
    batch = materialize(store)
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
    ok = batch == expected
    report("materializer batch = per-pair", ok, f"{len(batch)} relations")


def test_materializer_invariants_on_random_polygons():
    rng = random.Random(20240)
    polygons = []
    for i in range(800):
        ring = random_simple_polygon(rng, cx=rng.uniform(-40, 40), cy=rng.uniform(-40, 40), radius=rng.uniform(0.3, 4))
        polygons.append(geo.parse_wkt("POLYGON((" + ",".join(f"{x} {y}" for x, y in ring) + "))"))
    # add nested pairs so that within=True cases are exercised
    for i in range(200):
        outer_ring = random_simple_polygon(rng, cx=rng.uniform(-40, 40), cy=rng.uniform(-40, 40), radius=3.0)
        cx = sum(x for x, _ in outer_ring[:-1]) / (len(outer_ring) - 1)
        cy = sum(y for _, y in outer_ring[:-1]) / (len(outer_ring) - 1)
        inner_ring = [(cx + (x - cx) * 0.2, cy + (y - cy) * 0.2) for x, y in outer_ring]
        polygons.append(geo.parse_wkt("POLYGON((" + ",".join(f"{x} {y}" for x, y in outer_ring) + "))"))
        polygons.append(geo.parse_wkt("POLYGON((" + ",".join(f"{x} {y}" for x, y in inner_ring) + "))"))
    assert len(polygons) >= 1000
    polygons = polygons[:1000]
    bad = 0
    within_seen = 0
    for i in range(1000):
        a = polygons[i]
        # odd indices in the nested block pair an inner ring with its outer
        b = polygons[i - 1] if i % 2 else polygons[(i * 7 + 3) % 1000]
        w_ab = geo.sf_within(a, b)
        within_seen += int(w_ab)
        if w_ab != geo.sf_contains(b, a):
            bad += 1
        if geo.sf_intersects(a, b) != geo.sf_intersects(b, a):
            bad += 1
        if w_ab and not geo.sf_intersects(a, b):
            bad += 1
    ok = bad == 0 and within_seen > 0
    report(
        "materializer invariants on 1000 random polygons",
        ok,
        f"{bad} violations, {within_seen} within-pairs exercised",
    )


# -- 5. geometry accuracy ---------------------------------------------------------------


def test_geometry_distance_accuracy():
    rng = random.Random(515)
    worst = 0.0
    for _ in range(100):
        lon1, lat1 = rng.uniform(-179, 179), rng.uniform(-85, 85)
        lon2, lat2 = rng.uniform(-179, 179), rng.uniform(-85, 85)
        got = geo.distance_metres(geo.point(lon1, lat1), geo.point(lon2, lat2))
        want = haversine_oracle(lon1, lat1, lon2, lat2)
        if want > 0:
            worst = max(worst, abs(got - want) / want)
    ok = worst < 0.005
    report("distance accuracy vs haversine oracle", ok, f"worst relative error {worst:.2e}")


def test_distance_intersection_coupling():
    rng = random.Random(616)
    bad = 0
    for _ in range(500):
        ring = random_simple_polygon(rng, cx=rng.uniform(-20, 20), cy=rng.uniform(-20, 20), radius=rng.uniform(0.5, 3))
        poly = geo.parse_wkt("POLYGON((" + ",".join(f"{x} {y}" for x, y in ring) + "))")
        p = geo.point(rng.uniform(-24, 24), rng.uniform(-24, 24))
        d = geo.distance_metres(p, poly)
        if (d <= 1e-6) != geo.sf_intersects(p, poly):
            bad += 1
    report("distance=0 iff intersects", bad == 0, f"{bad}/500 violations")


# -- 6. evaluator vs nested-loop oracle ------------------------------------------------------


def test_evaluator_oracle_equivalence():
    rng = random.Random(90210)
    mismatches = 0
    for case in range(200):
        triples, q = random_store_and_query(rng)
        store = store_from_triples(triples)
        got = result_to_canon(evaluate(q, store))
        want = nested_loop_evaluate(q, triples)
        if "rows" in want:
            if q.order_by or q.limit is not None:
                same = got["rows"] == want["rows"]
            else:
                same = sorted(got["rows"]) == sorted(want["rows"])
            same = same and len(got["vars"]) == len(want["vars"])
        else:
            same = got == want
        if not same:
            mismatches += 1
            print(f"\n  evaluator mismatch in case {case}: {serialize(q)}")
    report("evaluator = nested-loop oracle", mismatches == 0, f"{200 - mismatches}/200 cases")


# -- 7. determinism --------------------------------------------------------------------------


def test_corpus_determinism(tmp_path_factory):
    entries = load_corpus(CORPUS)
    blobs = []
    for _ in range(2):
        store = load_kg_dir(FIXTURES)
        relations = materialize(store)
        path = tmp_path_factory.mktemp("det") / "m.nt"
        path.write_text(to_ntriples(relations), encoding="utf-8")
        engine = build_engine(FIXTURES, path)
        rep = evaluate_corpus(engine, entries)
        blobs.append(json.dumps(rep, sort_keys=True).encode("utf-8"))
    ok = blobs[0] == blobs[1]
    report("byte-identical corpus reports and traces", ok, f"{len(blobs[0])} bytes")
