#!/usr/bin/env python3
"""Regenerate the bundled fixture knowledge graph under data/fixtures/.

The fixture mirrors the production ontology shape at desk scale: a Feature
root with geo-entity and satellite-image subclasses, WKT geometries, and
image metadata. Run from the repo root: python tools/build_fixtures.py
"""

from pathlib import Path

ONT = "http://geoask.example/ontology#"
RES = "http://geoask.example/resource/"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
XSD = "http://www.w3.org/2001/XMLSchema#"
GEO = "http://www.opengis.net/ont/geosparql#"

OUT = Path(__file__).resolve().parent.parent / "data" / "fixtures"

CLASSES = [
    # (local name, parent local name, synonyms)
    ("Feature", None, ["feature"]),
    ("Region", "Feature", ["region"]),
    ("City", "Feature", ["city"]),
    ("Town", "Feature", ["town"]),
    ("Forest", "Feature", ["forest", "woodland"]),
    ("River", "Feature", ["river", "stream"]),
    ("Port", "Feature", ["port", "harbour", "harbor"]),
    ("PointOfInterest", "Feature", ["point of interest", "poi", "landmark"]),
    ("SeaSector", "Feature", ["sea sector", "sea"]),
    ("Image", "Feature", ["image", "satellite image", "picture"]),
    ("Sentinel1Image", "Image", ["sentinel-1 image", "sentinel 1 image", "radar image"]),
    ("Sentinel2Image", "Image", ["sentinel-2 image", "sentinel 2 image", "optical image"]),
]

PROPERTIES = [
    # (local name, domains, range, synonyms)
    ("cloudCover", ["Image"], "decimal", ["cloud coverage", "cloud cover", "cloudiness"]),
    ("snowCover", ["Image"], "decimal", ["snow coverage", "snow cover"]),
    ("polarization", ["Image"], "string", ["polarization", "polarisation"]),
    ("hasTimestamp", ["Image"], "dateTime", ["timestamp", "date", "acquisition date", "acquisition time"]),
    ("hasLink", ["Image"], "string", ["link", "download link", "url"]),
    ("length", ["River"], "decimal", ["length", "long"]),
    ("area", ["Region", "City", "Town", "Forest", "SeaSector"], "decimal", ["area", "size", "large", "big"]),
    ("population", ["Region", "City", "Town"], "decimal", ["population", "people", "inhabitants"]),
]

# (slug, class, [(label, lang)], WKT, {property: (value, datatype)})
REGIONS = [
    ("emilia_romagna", "Region", [("Emilia-Romagna", "en"), ("Emilia-Romagna", "it")],
     "POLYGON((9.0 44.0,12.5 44.0,12.5 45.0,9.0 45.0,9.0 44.0))",
     {"area": "22446", "population": "4460000"}),
    ("lombardy", "Region", [("Lombardy", "en"), ("Lombardia", "it")],
     "POLYGON((8.5 45.05,11.5 45.05,11.5 46.3,8.5 46.3,8.5 45.05))",
     {"area": "23844", "population": "10028000"}),
    ("lazio", "Region", [("Lazio", "en"), ("Latium", "en")],
     "POLYGON((11.6 41.2,13.5 41.2,13.5 42.6,11.6 42.6,11.6 41.2))",
     {"area": "17232", "population": "5755000"}),
    ("attica", "Region", [("Attica", "en"), ("Attiki", "el")],
     "POLYGON((23.2 37.6,24.2 37.6,24.2 38.4,23.2 38.4,23.2 37.6))",
     {"area": "3808", "population": "3790000"}),
    ("bologna", "City", [("Bologna", "en")], "POINT(11.34 44.49)",
     {"area": "141", "population": "388000"}),
    ("milan", "City", [("Milan", "en"), ("Milano", "it")], "POINT(9.19 45.47)",
     {"area": "181", "population": "1372000"}),
    ("rome", "City", [("Rome", "en"), ("Roma", "it")], "POINT(12.5 41.9)",
     {"area": "1285", "population": "2873000"}),
    ("athens", "City", [("Athens", "en"), ("Athína", "el")], "POINT(23.73 37.98)",
     {"area": "39", "population": "664000"}),
    ("imola", "Town", [("Imola", "en")], "POINT(11.71 44.35)",
     {"area": "205", "population": "69936"}),
    ("cesena", "Town", [("Cesena", "en")], "POINT(12.24 44.14)",
     {"area": "249", "population": "97210"}),
    ("faenza", "Town", [("Faenza", "en")], "POINT(11.88 44.29)",
     {"area": "216", "population": "58797"}),
    ("rovigo", "Town", [("Rovigo", "en")], "POINT(11.2 45.5)",
     {"area": "109", "population": "51378"}),
    ("marathon", "Town", [("Marathon", "en"), ("Marathonas", "el")], "POINT(23.96 38.15)",
     {"area": "97", "population": "33423"}),
    ("casentino_forest", "Forest", [("Casentino Forest", "en")],
     "POLYGON((11.55 44.15,11.75 44.15,11.75 44.3,11.55 44.3,11.55 44.15))", {"area": "368"}),
    ("panaro_forest", "Forest", [("Panaro Forest", "en")],
     "POLYGON((12.1 44.05,12.3 44.05,12.3 44.12,12.1 44.12,12.1 44.05))", {"area": "120"}),
    ("prealpi_forest", "Forest", [("Prealpi Forest", "en")],
     "POLYGON((9.0 45.8,9.4 45.8,9.4 46.1,9.0 46.1,9.0 45.8))", {"area": "290"}),
    ("parnitha_forest", "Forest", [("Parnitha Forest", "en")],
     "POLYGON((23.6 38.1,23.8 38.1,23.8 38.3,23.6 38.3,23.6 38.1))", {"area": "250"}),
    ("ravenna_port", "Port", [("Ravenna Port", "en")], "POINT(12.28 44.42)", {}),
    ("piraeus_port", "Port", [("Piraeus", "en"), ("Pireas", "el")], "POINT(23.65 37.94)", {}),
    ("colosseum", "PointOfInterest", [("Colosseum", "en"), ("Colosseo", "it")], "POINT(12.49 41.89)", {}),
    ("acropolis", "PointOfInterest", [("Acropolis", "en")], "POINT(23.726 37.971)", {}),
    ("adriatic_sea", "SeaSector", [("Adriatic Sea", "en")],
     "POLYGON((12.6 43.8,14.5 43.8,14.5 45.5,12.6 45.5,12.6 43.8))", {"area": "138600"}),
    ("aegean_sea", "SeaSector", [("Aegean Sea", "en")],
     "POLYGON((24.3 36.5,26.5 36.5,26.5 38.8,24.3 38.8,24.3 36.5))", {"area": "214000"}),
]

RIVERS = [
    ("po", [("Po", "en")], "LINESTRING(9.2 45.02,10.5 45.01,12.3 44.98)", "652000"),
    ("reno", [("Reno", "en")], "LINESTRING(11.0 44.1,11.3 44.3,11.7 44.34)", "212000"),
    ("savio", [("Savio", "en")], "LINESTRING(12.2 44.1,12.25 44.13,12.3 44.16)", "126000"),
    ("adda", [("Adda", "en")], "LINESTRING(9.3 45.7,9.5 45.4,9.9 45.15)", "313000"),
    ("ilissos", [("Ilissos", "en"), ("Ilisos", "el")], "LINESTRING(23.68 37.96,23.72 37.99)", "25000"),
    ("tagus", [("Tagus", "en"), ("Tajo", "es"), ("Tejo", "pt")],
     "LINESTRING(-3.5 40.0,-5.0 39.5,-8.0 39.2,-9.2 38.7)", "1007000"),
]

FOOTPRINTS = {
    "fp_savio": "POLYGON((12.0 44.0,12.55 44.0,12.55 44.4,12.0 44.4,12.0 44.0))",
    "fp_reno": "POLYGON((10.9 44.0,11.8 44.0,11.8 44.5,10.9 44.5,10.9 44.0))",
    "fp_attica": "POLYGON((23.5 37.8,24.0 37.8,24.0 38.2,23.5 38.2,23.5 37.8))",
    "fp_lombardy": "POLYGON((9.0 45.1,10.0 45.1,10.0 45.9,9.0 45.9,9.0 45.1))",
    "fp_po": "POLYGON((10.9 44.4,11.9 44.4,11.9 45.1,10.9 45.1,10.9 44.4))",
    "fp_lazio": "POLYGON((12.0 41.5,13.0 41.5,13.0 42.2,12.0 42.2,12.0 41.5))",
}

# (slug, class, footprint, timestamp, extra properties)
IMAGES = [
    ("s2_01", "Sentinel2Image", "fp_savio", "2021-01-15T10:00:00Z", {"cloudCover": "5", "snowCover": "10"}),
    ("s2_02", "Sentinel2Image", "fp_savio", "2021-01-20T10:05:00Z", {"cloudCover": "45", "snowCover": "25"}),
    ("s2_03", "Sentinel2Image", "fp_savio", "2020-06-10T09:50:00Z", {"cloudCover": "3", "snowCover": "0"}),
    ("s2_04", "Sentinel2Image", "fp_reno", "2021-01-12T10:10:00Z", {"cloudCover": "8", "snowCover": "15"}),
    ("s2_05", "Sentinel2Image", "fp_attica", "2021-07-01T09:00:00Z", {"cloudCover": "2", "snowCover": "0"}),
    ("s2_06", "Sentinel2Image", "fp_attica", "2022-03-05T09:10:00Z", {"cloudCover": "60", "snowCover": "5"}),
    ("s2_07", "Sentinel2Image", "fp_lombardy", "2021-02-14T10:20:00Z", {"cloudCover": "12", "snowCover": "12"}),
    ("s2_08", "Sentinel2Image", "fp_savio", "2021-01-28T10:02:00Z", {"cloudCover": "9", "snowCover": "18"}),
    ("s1_01", "Sentinel1Image", "fp_savio_s1", "2021-01-10T05:30:00Z", {"polarization": "VV"}),
    ("s1_02", "Sentinel1Image", "fp_savio_s1", "2020-11-02T05:30:00Z", {"polarization": "VH"}),
    ("s1_03", "Sentinel1Image", "fp_attica", "2021-05-06T04:55:00Z", {"polarization": "VV"}),
    ("s1_04", "Sentinel1Image", "fp_lazio", "2022-01-17T05:20:00Z", {"polarization": "VV"}),
    ("s1_05", "Sentinel1Image", "fp_attica", "2021-08-21T04:50:00Z", {"polarization": "VH"}),
    ("s1_06", "Sentinel1Image", "fp_po", "2021-03-03T05:15:00Z", {"polarization": "VV"}),
]
FOOTPRINTS["fp_savio_s1"] = "POLYGON((11.5 44.0,12.5 44.0,12.5 44.6,11.5 44.6,11.5 44.0))"

PROP_RANGE = {name: rng for name, _, rng, _ in PROPERTIES}


def iri(ns, local):
    return f"<{ns}{local}>"


def lit(value, datatype=None, lang=None):
    if lang:
        return f'"{value}"@{lang}'
    if datatype:
        return f'"{value}"^^<{XSD}{datatype}>'
    return f'"{value}"'


def emit_feature(lines, slug, cls, labels, wkt, props):
    subject = iri(RES, slug)
    lines.append(f"{subject} {iri(RDF, 'type')} {iri(ONT, cls)} .")
    for text, lang in labels:
        lines.append(f"{subject} {iri(RDFS, 'label')} {lit(text, lang=lang)} .")
    geom = iri(RES, slug + "_geom")
    lines.append(f"{subject} {iri(GEO, 'hasGeometry')} {geom} .")
    lines.append(f'{geom} {iri(GEO, "asWKT")} "{wkt}"^^<{GEO}wktLiteral> .')
    for prop, value in sorted(props.items()):
        rng = PROP_RANGE[prop]
        lines.append(f"{subject} {iri(ONT, prop)} {lit(value, datatype=rng)} .")


def main():
    OUT.mkdir(parents=True, exist_ok=True)

    lines = []
    for name, parent, synonyms in CLASSES:
        subject = iri(ONT, name)
        lines.append(f"{subject} {iri(RDF, 'type')} {iri(RDFS, 'Class')} .")
        if parent:
            lines.append(f"{subject} {iri(RDFS, 'subClassOf')} {iri(ONT, parent)} .")
        for syn in synonyms:
            lines.append(f"{subject} {iri(RDFS, 'label')} {lit(syn, lang='en')} .")
    for name, domains, rng, synonyms in PROPERTIES:
        subject = iri(ONT, name)
        lines.append(f"{subject} {iri(RDF, 'type')} {iri(RDF, 'Property')} .")
        for domain in domains:
            lines.append(f"{subject} {iri(RDFS, 'domain')} {iri(ONT, domain)} .")
        lines.append(f"{subject} {iri(RDFS, 'range')} <{XSD}{rng}> .")
        for syn in synonyms:
            lines.append(f"{subject} {iri(RDFS, 'label')} {lit(syn, lang='en')} .")
    (OUT / "ontology.nt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    lines = []
    for slug, cls, labels, wkt, props in REGIONS:
        emit_feature(lines, slug, cls, labels, wkt, props)
    (OUT / "regions.nt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    lines = []
    for slug, labels, wkt, length in RIVERS:
        emit_feature(lines, slug, "River", labels, wkt, {"length": length})
    (OUT / "rivers.nt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    lines = []
    for slug, cls, fp, ts, props in IMAGES:
        all_props = dict(props)
        all_props["hasTimestamp"] = ts
        all_props["hasLink"] = f"https://data.geoask.example/{slug}.tiff"
        emit_feature(lines, slug, cls, [(slug.upper().replace("_", "-"), None)], FOOTPRINTS[fp], all_props)
    (OUT / "images.nt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main()
