#!/usr/bin/env python3
"""Regenerate the gold corpus under data/corpus/questions.jsonl.

Every gold answer is computed here from the fixture files with independent
machinery: a local N-Triples reader, shapely for topological predicates, and
a from-scratch haversine/densification pass for distances. The engine under
test is never imported, so the corpus stays a genuine oracle.

Run from the repo root: python tools/build_corpus.py
"""

from __future__ import annotations

import json
import math
import re
from pathlib import Path

from shapely import wkt as shapely_wkt

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "data" / "fixtures"
OUT = REPO / "data" / "corpus" / "questions.jsonl"

ONT = "http://geoask.example/ontology#"
RES = "http://geoask.example/resource/"
XSD = "http://www.w3.org/2001/XMLSchema#"
GEO = "http://www.opengis.net/ont/geosparql#"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
SUBCLASS = "http://www.w3.org/2000/01/rdf-schema#subClassOf"

_TRIPLE = re.compile(r"^<([^>]+)> <([^>]+)> (.+) \.$")
_LIT = re.compile(r'^"(.*)"(?:\^\^<([^>]+)>|@([A-Za-z-]+))?$')

EARTH_RADIUS_M = 6371000.0


class Model:
    def __init__(self):
        self.types: dict[str, str] = {}
        self.parents: dict[str, str] = {}
        self.props: dict[str, dict[str, str]] = {}
        self.geom_node: dict[str, str] = {}
        self.wkt: dict[str, str] = {}

    def load(self):
        node_wkt = {}
        for path in sorted(FIXTURES.glob("*.nt")):
            for line in path.read_text(encoding="utf-8").splitlines():
                m = _TRIPLE.match(line.strip())
                if not m:
                    continue
                s, p, o = m.groups()
                if p == RDF_TYPE and o.startswith("<" + ONT):
                    if s.startswith(RES):
                        self.types[s[len(RES):]] = o[1 + len(ONT):-1]
                elif p == SUBCLASS:
                    self.parents[s[len(ONT):]] = o[1 + len(ONT):-1]
                elif p == GEO + "hasGeometry":
                    self.geom_node[s[len(RES):]] = o[1:-1]
                elif p == GEO + "asWKT":
                    node_wkt[s] = _LIT.match(o).group(1)
                elif p.startswith(ONT) and s.startswith(RES):
                    lit = _LIT.match(o)
                    if lit:
                        self.props.setdefault(s[len(RES):], {})[p[len(ONT):]] = lit.group(1)
        for slug, node in self.geom_node.items():
            self.wkt[slug] = node_wkt[node]
        self.geoms = {slug: shapely_wkt.loads(w) for slug, w in self.wkt.items()}
        return self

    def of_class(self, cls: str) -> list[str]:
        wanted = {cls}
        changed = True
        while changed:
            changed = False
            for child, parent in self.parents.items():
                if parent in wanted and child not in wanted:
                    wanted.add(child)
                    changed = True
        return sorted(s for s, c in self.types.items() if c in wanted)

    # -- geometry oracles (independent of the package) ------------------------

    def paths(self, slug: str):
        g = self.geoms[slug]
        if g.geom_type == "Point":
            return [[(g.x, g.y)]]
        if g.geom_type == "LineString":
            return [list(g.coords)]
        if g.geom_type == "Polygon":
            return [list(g.exterior.coords)] + [list(r.coords) for r in g.interiors]
        raise ValueError(g.geom_type)

    def within(self, a: str, b: str) -> bool:
        return self.geoms[a].within(self.geoms[b])

    def intersects(self, a: str, b: str) -> bool:
        return self.geoms[a].intersects(self.geoms[b])

    def distance_m(self, a: str, b: str) -> float:
        if self.intersects(a, b):
            return 0.0
        pa = _densify(self.paths(a))
        pb = _densify(self.paths(b))
        return min(_haversine(x1, y1, x2, y2) for x1, y1 in pa for x2, y2 in pb)


def _haversine(lon1, lat1, lon2, lat2):
    p1, p2 = math.radians(lat1), math.radians(lat2)
    a = (
        math.sin((p2 - p1) / 2) ** 2
        + math.cos(p1) * math.cos(p2) * math.sin(math.radians(lon2 - lon1) / 2) ** 2
    )
    return 2 * EARTH_RADIUS_M * math.atan2(math.sqrt(a), math.sqrt(1 - a))


def _densify(paths, step=0.01):
    pts = []
    for path in paths:
        if len(path) == 1:
            pts.append(path[0])
            continue
        for (x1, y1), (x2, y2) in zip(path, path[1:]):
            n = max(1, math.ceil(math.hypot(x2 - x1, y2 - y1) / step))
            for k in range(n):
                pts.append((x1 + (x2 - x1) * k / n, y1 + (y2 - y1) * k / n))
        pts.append(path[-1])
    return pts


# -- gold answer builders -------------------------------------------------------


def uri(slug):
    return {"type": "uri", "value": RES + slug}


def lit(value, datatype=None):
    out = {"type": "literal", "value": str(value)}
    if datatype:
        out["datatype"] = XSD + datatype
    return out


def entities(slugs):
    return {"vars": ["x"], "rows": [{"x": uri(s)} for s in sorted(slugs)]}


def images(model, slugs):
    rows = [{"image": uri(s), "link": lit(model.props[s]["hasLink"])} for s in sorted(slugs)]
    return {"vars": ["image", "link"], "rows": rows}


def number(value):
    return {"vars": ["v"], "rows": [{"v": lit(value, "decimal")}]}


def count(value):
    return {"vars": ["n"], "rows": [{"n": lit(value, "integer")}]}


def grouped_counts(pairs):
    rows = [{"g": uri(slug), "n": lit(n, "integer")} for slug, n in sorted(pairs)]
    return {"vars": ["g", "n"], "rows": rows}


def wkt_answer(model, slug):
    return {
        "vars": ["w"],
        "rows": [{"w": {"type": "literal", "value": model.wkt[slug], "datatype": GEO + "wktLiteral"}}],
    }


def boolean(b):
    return {"boolean": b}


def ts(slug, model):
    return model.props[slug]["hasTimestamp"]


def build_entries(m: Model) -> list[dict]:
    regions = m.of_class("Region")
    towns = m.of_class("Town")
    cities = m.of_class("City")
    rivers = m.of_class("River")
    forests = m.of_class("Forest")
    pois = m.of_class("PointOfInterest")
    ports = m.of_class("Port")
    all_images = m.of_class("Image")
    s2 = m.of_class("Sentinel2Image")
    s1 = m.of_class("Sentinel1Image")

    def in_region(slugs, region):
        return [s for s in slugs if m.within(s, region)]

    def img_with(pred):
        return [s for s in all_images if pred(s)]

    def cloud(s):
        return float(m.props[s].get("cloudCover", "nan"))

    def snow(s):
        return float(m.props[s].get("snowCover", "nan"))

    entries = []

    def add(id_, category, question, gold=None, gold_query=None):
        entry = {"id": id_, "category": category, "question": question}
        if gold is not None:
            entry["goldAnswers"] = gold
        if gold_query is not None:
            entry["goldQuery"] = gold_query
        entries.append(entry)

    # A: attribute lookup
    add("A1", "A", "What is the population of Rome?", number(m.props["rome"]["population"]))
    add("A2", "A", "What is the area of Attica?", number(m.props["attica"]["area"]))
    add("A3", "A", "What is the length of the river Po?", number(m.props["po"]["length"]))
    add("A4", "A", "What is the population of Imola?", number(m.props["imola"]["population"]))
    add("A5", "A", "How long is the river Savio?", number(m.props["savio"]["length"]))
    add("A6", "A", "What is the area of the Casentino Forest?", number(m.props["casentino_forest"]["area"]))
    add("A7", "A", "What is the snow coverage of S2-01?", number(m.props["s2_01"]["snowCover"]))

    # B: containment
    add("B1", "B", "Which rivers are in the Emilia Romagna region?", entities(in_region(rivers, "emilia_romagna")))
    add("B2", "B", "Which towns are in Attica?", entities(in_region(towns, "attica")))
    add("B3", "B", "Which cities are in Lombardy?", entities(in_region(cities, "lombardy")))
    add("B4", "B", "Which forests are in the Lombardy region?", entities(in_region(forests, "lombardy")))
    add("B5", "B", "List all ports in the Emilia Romagna region", entities(in_region(ports, "emilia_romagna")))
    add("B6", "B", "Which rivers are in Lombardy?", entities(in_region(rivers, "lombardy")))
    add("B7", "B", "Which points of interest are in Attica?", entities(in_region(pois, "attica")))
    add(
        "B8", "B", "Which forests are in Attica?",
        gold_query=(
            "SELECT DISTINCT ?f WHERE {\n"
            f"  ?f a <{ONT}Forest> ; geo:hasGeometry/geo:asWKT ?fw .\n"
            f"  <{RES}attica> geo:hasGeometry/geo:asWKT ?aw .\n"
            "  FILTER(geof:sfWithin(?fw, ?aw))\n}"
        ),
    )

    # C: distance
    add("C1", "C", "Which towns are less than 2 km away from the river Reno?",
        entities([t for t in towns if m.distance_m(t, "reno") < 2000]))
    add("C2", "C", "Which towns are within 5 km of the river Savio?",
        entities([t for t in towns if m.distance_m(t, "savio") <= 5000]))
    add("C3", "C", "Which points of interest are less than 2 km away from Athens?",
        entities([p for p in pois if m.distance_m(p, "athens") < 2000]))
    add("C4", "C", "Which points of interest are less than 2 km away from Rome?",
        entities([p for p in pois if m.distance_m(p, "rome") < 2000]))
    add("C5", "C", "Which cities are less than 5 km away from the river Ilissos?",
        entities([c for c in cities if m.distance_m(c, "ilissos") < 5000]))
    add("C6", "C", "Which towns are less than 7 km away from the Casentino Forest?",
        entities([t for t in towns if m.distance_m(t, "casentino_forest") < 7000]))
    add("C7", "C", "Which forests are less than 6 km away from Imola?",
        entities([f for f in forests if m.distance_m(f, "imola") < 6000]))

    # D: counts and GROUP BY
    add("D1", "D", "How many rivers are in the Emilia Romagna region?",
        count(len(in_region(rivers, "emilia_romagna"))))
    add("D2", "D", "How many towns are there in each region?",
        grouped_counts([(r, len(in_region(towns, r))) for r in regions if in_region(towns, r)]))
    add("D3", "D", "How many images of Athens are there?",
        count(len(img_with(lambda s: m.intersects(s, "athens")))))
    add("D4", "D", "How many forests are in Attica?", count(len(in_region(forests, "attica"))))
    add("D5", "D", "How many cities are there in each region?",
        grouped_counts([(r, len(in_region(cities, r))) for r in regions if in_region(cities, r)]))
    add("D6", "D", "How many points of interest are in the Lazio region?",
        count(len(in_region(pois, "lazio"))))
    add("D7", "D", "How many rivers are there per region?",
        grouped_counts([(r, len(in_region(rivers, r))) for r in regions if in_region(rivers, r)]))

    # E: superlatives and comparatives
    def longest(slugs):
        return max(slugs, key=lambda s: float(m.props[s]["length"]))

    add("E1", "E", "What is the longest river?", entities([longest(rivers)]))
    add("E2", "E", "What is the longest river in the Emilia Romagna region?",
        entities([longest(in_region(rivers, "emilia_romagna"))]))
    add("E3", "E", "Which is the largest region?",
        entities([max(regions, key=lambda s: float(m.props[s]["area"]))]))
    add("E4", "E", "Which city has the largest population?",
        entities([max(cities, key=lambda s: float(m.props[s]["population"]))]))
    add("E5", "E", "What is the largest forest in Attica?",
        entities([max(in_region(forests, "attica"), key=lambda s: float(m.props[s]["area"]))]))
    add("E6", "E", "Which is the smallest city?",
        entities([min(cities, key=lambda s: float(m.props[s]["area"]))]))
    add("E7", "E", "Which rivers are longer than 300 km?",
        entities([r for r in rivers if float(m.props[r]["length"]) > 300000]))

    # F: yes/no
    add("F1", "F", "Is Athens in Attica?", boolean(m.within("athens", "attica")))
    add("F2", "F", "Is Rome in Attica?", boolean(m.within("rome", "attica")))
    add("F3", "F", "Does the Emilia Romagna region contain the river Reno?",
        boolean(m.within("reno", "emilia_romagna")))
    add("F4", "F", "Is the river Po in the Emilia Romagna region?", boolean(m.within("po", "emilia_romagna")))
    add("F5", "F", "Does Attica contain the river Adda?", boolean(m.within("adda", "attica")))
    add("F6", "F", "Is Piraeus in Attica?", boolean(m.within("piraeus_port", "attica")))
    add("F7", "F", "Does the Adriatic Sea contain Bologna?", boolean(m.within("bologna", "adriatic_sea")))
    add(
        "F8", "F", "Is Rome in Lazio?",
        gold_query=(
            "ASK WHERE {\n"
            f"  <{RES}rome> geo:hasGeometry/geo:asWKT ?a .\n"
            f"  <{RES}lazio> geo:hasGeometry/geo:asWKT ?b .\n"
            "  FILTER(geof:sfWithin(?a, ?b))\n}"
        ),
    )

    # G: temporal
    def taken(slugs, start, end):
        out = []
        for s in slugs:
            t = ts(s, m)
            if (start is None or t >= start) and (end is None or t < end):
                out.append(s)
        return out

    add("G1", "G", "Show me images taken in January 2021",
        images(m, taken(all_images, "2021-01-01T00:00:00Z", "2021-02-01T00:00:00Z")))
    add("G2", "G", "Show me images taken in 2020",
        images(m, taken(all_images, "2020-01-01T00:00:00Z", "2021-01-01T00:00:00Z")))
    add("G3", "G", "Give me images taken before March 2021",
        images(m, taken(all_images, None, "2021-03-01T00:00:00Z")))
    add("G4", "G", "Show me images taken between January 2021 and June 2021",
        images(m, taken(all_images, "2021-01-01T00:00:00Z", "2021-07-01T00:00:00Z")))
    add("G5", "G", "Show me images taken after March 2021",
        images(m, taken(all_images, "2021-04-01T00:00:00Z", None)))
    add("G6", "G", "Show me Sentinel-2 images taken in January 2021",
        images(m, taken(s2, "2021-01-01T00:00:00Z", "2021-02-01T00:00:00Z")))
    add("G7", "G", "Show me images of Athens taken in summer 2021",
        images(m, taken([s for s in all_images if m.intersects(s, "athens")],
                        "2021-06-01T00:00:00Z", "2021-09-01T00:00:00Z")))

    # H: image requests
    add("H1", "H", "Show me images of Athens with VV polarization",
        images(m, [s for s in all_images if m.intersects(s, "athens") and m.props[s].get("polarization") == "VV"]))
    add("H2", "H", "Give me a hundred images of the river Po",
        images(m, img_with(lambda s: m.intersects(s, "po"))[:100]))
    add("H3", "H", "Show me Sentinel-2 images of the Emilia Romagna region",
        images(m, [s for s in s2 if m.intersects(s, "emilia_romagna")]))
    add("H4", "H", "Show me images with cloud coverage less than 5%",
        images(m, [s for s in all_images if "cloudCover" in m.props[s] and cloud(s) < 5]))
    add("H5", "H", "Show me images of the Prealpi Forest",
        images(m, img_with(lambda s: m.intersects(s, "prealpi_forest"))))
    add("H6", "H", "Show me radar images of Athens",
        images(m, [s for s in s1 if m.intersects(s, "athens")]))
    add("H7", "H", "Show me images of the Acropolis",
        images(m, img_with(lambda s: m.intersects(s, "acropolis"))))

    # I: conjunction distribution
    towns_er = in_region(towns, "emilia_romagna")
    forests_er = in_region(forests, "emilia_romagna")
    add("I1", "I", "Which rivers are less than 2 km away from towns and forests in the Emilia Romagna region?",
        entities([
            r for r in rivers
            if any(m.distance_m(r, t) < 2000 for t in towns_er)
            and any(m.distance_m(r, f) < 2000 for f in forests_er)
        ]))
    add("I2", "I", "Show me images of towns and forests in the Emilia Romagna region",
        images(m, [
            s for s in all_images
            if any(m.intersects(s, t) for t in towns_er)
            and any(m.intersects(s, f) for f in forests_er)
        ]))
    add("I3", "I", "Which images have less than 20% snow coverage and more than 10% cloud coverage?",
        images(m, [s for s in all_images if "snowCover" in m.props[s] and "cloudCover" in m.props[s]
                   and snow(s) < 20 and cloud(s) > 10]))
    add("I4", "I", "Which images have cloud coverage less than 10% and more than 2%?",
        images(m, [s for s in all_images if "cloudCover" in m.props[s] and 2 < cloud(s) < 10]))
    rivers_attica = in_region(rivers, "attica")
    forests_attica = in_region(forests, "attica")
    add("I5", "I", "Show me images of rivers and forests in the Attica region",
        images(m, [
            s for s in all_images
            if any(m.intersects(s, r) for r in rivers_attica)
            and any(m.intersects(s, f) for f in forests_attica)
        ]))
    add("I6", "I", "Show me images of the river Savio and the Panaro Forest",
        images(m, [s for s in all_images if m.intersects(s, "savio") and m.intersects(s, "panaro_forest")]))
    add("I7", "I", "Which images have snow coverage less than 20% and cloud coverage less than 10%?",
        images(m, [s for s in all_images if "snowCover" in m.props[s] and "cloudCover" in m.props[s]
                   and snow(s) < 20 and cloud(s) < 10]))
    return entries


def main():
    model = Model().load()
    entries = build_entries(model)
    assert len(entries) >= 60, len(entries)
    assert len({e["category"] for e in entries}) == 9
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w", encoding="utf-8") as fh:
        for entry in entries:
            fh.write(json.dumps(entry, ensure_ascii=False) + "\n")
    print(f"wrote {len(entries)} entries to {OUT}")


if __name__ == "__main__":
    main()
