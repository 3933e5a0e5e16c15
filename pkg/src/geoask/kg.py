"""Feature-centric knowledge graph: N-Triples loading, ontology, label index."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .strings import INSTANCE_THRESHOLD, SYNONYM_THRESHOLD, NGramIndex, lemma_phrase, normalize, similarity
from .terms import GEO, ONT, RDF, RDFS, WKT_LITERAL, GeoAskError, Iri, Literal, Term, unescape_literal

FEATURE_CLASS = ONT.Feature


class NTriplesError(GeoAskError):
    """Malformed N-Triples input; carries file and line number."""

    def __init__(self, message: str, path: str = "<string>", line: int = 0):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class OntologyError(GeoAskError):
    pass


class GeometryRefError(GeoAskError):
    pass


_IRI = r"<([^<>\s]+)>"
_LITERAL = r'"((?:[^"\\]|\\.)*)"(?:\^\^<([^<>\s]+)>|@([A-Za-z][A-Za-z0-9-]*))?'
_TRIPLE_RE = re.compile(rf"^{_IRI}\s+{_IRI}\s+(?:{_IRI}|{_LITERAL})\s*\.\s*$")


def parse_ntriples_line(line: str, path: str = "<string>", lineno: int = 0) -> tuple[Iri, Iri, Term] | None:
    """Parse one line of the N-Triples subset; None for blank/comment lines."""
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    m = _TRIPLE_RE.match(stripped)
    if not m:
        raise NTriplesError(f"malformed triple: {stripped[:80]!r}", path, lineno)
    s, p, o_iri, o_lex, o_dt, o_lang = m.groups()
    subject, predicate = Iri(s), Iri(p)
    if o_iri is not None:
        return subject, predicate, Iri(o_iri)
    lit = Literal(unescape_literal(o_lex), Iri(o_dt) if o_dt else None, o_lang)
    return subject, predicate, lit


def serialize_triple(s: Iri, p: Iri, o: Term) -> str:
    return f"{s.n3()} {p.n3()} {o.n3()} ."


@dataclass
class Feature:
    iri: Iri
    class_iri: Iri
    labels: list[tuple[str, str | None]] = field(default_factory=list)
    geometry_wkt: str | None = None
    properties: dict[Iri, list[Literal]] = field(default_factory=dict)


@dataclass
class PropertyInfo:
    iri: Iri
    synonyms: list[str]
    range: Iri | None = None


class Ontology:
    """Class hierarchy rooted at the Feature class plus per-class property schema."""

    def __init__(self):
        self.class_synonyms: dict[Iri, list[str]] = {}
        self.parent: dict[Iri, Iri] = {}
        self.properties: dict[Iri, dict[Iri, PropertyInfo]] = {}
        self._class_index: NGramIndex | None = None

    @property
    def classes(self) -> set[Iri]:
        return set(self.class_synonyms)

    def add_class(self, iri: Iri, synonyms: list[str], parent: Iri | None = None):
        self.class_synonyms.setdefault(iri, []).extend(synonyms)
        if parent is not None:
            self.parent[iri] = parent
        self._class_index = None

    def add_property(self, class_iri: Iri, prop: PropertyInfo):
        self.properties.setdefault(class_iri, {})[prop.iri] = prop

    def validate(self):
        if not self.class_synonyms:
            raise OntologyError("empty ontology: no classes declared")
        if FEATURE_CLASS not in self.class_synonyms:
            raise OntologyError(f"ontology root {FEATURE_CLASS} missing")
        for cls in self.class_synonyms:
            seen = {cls}
            cur = cls
            while cur in self.parent:
                cur = self.parent[cur]
                if cur in seen:
                    raise OntologyError(f"subclass cycle through {cur}")
                seen.add(cur)
            if cur != FEATURE_CLASS:
                raise OntologyError(f"class {cls} does not reach the Feature root")
        for cls, syns in self.class_synonyms.items():
            if cls != FEATURE_CLASS and not syns:
                raise OntologyError(f"class {cls} has no synonyms")

    def ancestors(self, cls: Iri) -> list[Iri]:
        out = []
        cur = cls
        while cur in self.parent:
            cur = self.parent[cur]
            out.append(cur)
        return out

    def descendants(self, cls: Iri) -> set[Iri]:
        out = {cls}
        changed = True
        while changed:
            changed = False
            for child, parent in self.parent.items():
                if parent in out and child not in out:
                    out.add(child)
                    changed = True
        return out

    def is_subclass(self, cls: Iri, ancestor: Iri) -> bool:
        return cls == ancestor or ancestor in self.ancestors(cls)

    def class_for_word(self, word: str) -> tuple[Iri, float] | None:
        """Best class by synonym trigram similarity at the synonym threshold."""
        if not word:
            return None
        target = lemma_phrase(word)
        if not target:
            return None
        best: tuple[float, Iri] | None = None
        for cls, syns in sorted(self.class_synonyms.items()):
            for syn in syns:
                score = similarity(target, lemma_phrase(syn))
                if score >= SYNONYM_THRESHOLD and (best is None or score > best[0]):
                    best = (score, cls)
        if best is None:
            return None
        return best[1], best[0]

    def properties_of(self, class_iri: Iri) -> dict[Iri, PropertyInfo]:
        """Own properties merged with inherited ones."""
        if class_iri not in self.class_synonyms:
            raise OntologyError(f"unknown class {class_iri}")
        merged: dict[Iri, PropertyInfo] = {}
        for cls in [class_iri, *self.ancestors(class_iri)]:
            for iri, info in self.properties.get(cls, {}).items():
                merged.setdefault(iri, info)
        return merged

    def property_for_phrase(self, class_iri: Iri, phrase: str) -> tuple[Iri, float] | None:
        target = lemma_phrase(phrase)
        if not target:
            return None
        best: tuple[float, Iri] | None = None
        for iri, info in sorted(self.properties_of(class_iri).items()):
            for syn in info.synonyms:
                score = similarity(target, lemma_phrase(syn))
                if score >= SYNONYM_THRESHOLD and (best is None or score > best[0]):
                    best = (score, iri)
        if best is None:
            return None
        return best[1], best[0]


class TripleStore:
    """Immutable-after-load triple set with label index and feature views."""

    def __init__(self):
        self.triples: set[tuple[Iri, Iri, Term]] = set()
        self._spo: dict[Iri, dict[Iri, list[Term]]] = {}
        self._po: dict[Iri, list[tuple[Iri, Term]]] = {}
        self.ontology = Ontology()
        self.features: dict[Iri, Feature] = {}
        self.label_index = NGramIndex()
        self.labels: dict[Iri, list[tuple[str, str | None]]] = {}

    def add(self, s: Iri, p: Iri, o: Term):
        if (s, p, o) in self.triples:
            return
        self.triples.add((s, p, o))
        self._spo.setdefault(s, {}).setdefault(p, []).append(o)
        self._po.setdefault(p, []).append((s, o))

    def objects(self, s: Iri, p: Iri) -> list[Term]:
        return self._spo.get(s, {}).get(p, [])

    def by_predicate(self, p: Iri) -> list[tuple[Iri, Term]]:
        return self._po.get(p, [])

    def match(self, s: Iri | None, p: Iri | None, o: Term | None):
        """All triples matching the given constants (None = wildcard)."""
        if s is not None and p is not None:
            for obj in self.objects(s, p):
                if o is None or obj == o:
                    yield (s, p, obj)
            return
        if p is not None:
            for subj, obj in self.by_predicate(p):
                if (s is None or subj == s) and (o is None or obj == o):
                    yield (subj, p, obj)
            return
        for triple in self.triples:
            if (s is None or triple[0] == s) and (o is None or triple[2] == o):
                yield triple

    # -- label lookup ------------------------------------------------------

    def lookup_label(self, text: str, k: int = 5) -> list[tuple[Iri, float]]:
        """Top-k resources by trigram similarity over all labels.

        Scores are non-increasing; ties break on IRI order. Empty result for
        text that normalizes to nothing.
        """
        if not normalize(text):
            return []
        return [
            (iri, score)
            for iri, score in self.label_index.search(text, k, threshold=0.0)
        ]

    # -- loading -----------------------------------------------------------

    def _register_label(self, iri: Iri, text: str, lang: str | None):
        self.labels.setdefault(iri, []).append((text, lang))
        self.label_index.add(iri, text)

    def finalize(self):
        """Build the ontology, feature views and label index; validate everything."""
        subclass_of = RDFS.subClassOf
        declared_classes = {s for s, _, o in self.match(None, RDF.type, RDFS.Class)}
        for s, _, o in self.match(None, subclass_of, None):
            declared_classes.add(s)
            if isinstance(o, Iri):
                declared_classes.add(o)
        for cls in sorted(declared_classes):
            syns = [o.lexical for o in self.objects(cls, RDFS.label) if isinstance(o, Literal)]
            parents = [o for o in self.objects(cls, subclass_of) if isinstance(o, Iri)]
            self.ontology.add_class(cls, syns, parents[0] if parents else None)
        for prop, _, _ in self.match(None, RDF.type, RDF.Property):
            syns = [o.lexical for o in self.objects(prop, RDFS.label) if isinstance(o, Literal)]
            ranges = [o for o in self.objects(prop, RDFS.range) if isinstance(o, Iri)]
            domains = [o for o in self.objects(prop, RDFS.domain) if isinstance(o, Iri)]
            for domain in domains:
                self.ontology.add_property(
                    domain, PropertyInfo(prop, syns, ranges[0] if ranges else None)
                )
        self.ontology.validate()

        schema_props = {RDF.type, RDFS.label, RDFS.subClassOf, RDFS.domain, RDFS.range, GEO.hasGeometry, GEO.asWKT}
        for subject, _, cls in sorted(self.match(None, RDF.type, None), key=lambda t: (t[0], str(t[2]))):
            if not isinstance(cls, Iri) or cls not in self.ontology.class_synonyms:
                continue
            if cls == FEATURE_CLASS or FEATURE_CLASS in self.ontology.ancestors(cls):
                feat = Feature(subject, cls)
                for text, lng in [
                    (o.lexical, o.lang) for o in self.objects(subject, RDFS.label) if isinstance(o, Literal)
                ]:
                    feat.labels.append((text, lng))
                    self._register_label(subject, text, lng)
                feat.geometry_wkt = self._resolve_geometry(subject)
                for pred, objs in self._spo.get(subject, {}).items():
                    if pred in schema_props:
                        continue
                    feat.properties[pred] = [o for o in objs if isinstance(o, Literal)]
                self.features[subject] = feat

        from .geometry import WktError, parse_wkt  # local import: geometry has no kg dependency

        for feat in self.features.values():
            if feat.geometry_wkt is not None:
                try:
                    parse_wkt(feat.geometry_wkt)
                except WktError as exc:
                    raise GeometryRefError(f"feature {feat.iri}: bad WKT: {exc}") from exc

    def _resolve_geometry(self, subject: Iri) -> str | None:
        geom_nodes = [o for o in self.objects(subject, GEO.hasGeometry) if isinstance(o, Iri)]
        if not geom_nodes:
            return None
        wkts = [o for o in self.objects(geom_nodes[0], GEO.asWKT) if isinstance(o, Literal)]
        if not wkts:
            raise GeometryRefError(f"feature {subject}: geometry node {geom_nodes[0]} has no WKT literal")
        return wkts[0].lexical

    def features_of_class(self, cls: Iri) -> list[Feature]:
        wanted = self.ontology.descendants(cls)
        return sorted(
            (f for f in self.features.values() if f.class_iri in wanted),
            key=lambda f: f.iri,
        )

    def geometry_features(self) -> list[Feature]:
        return sorted(
            (f for f in self.features.values() if f.geometry_wkt is not None),
            key=lambda f: f.iri,
        )


def preferred_label(feature: Feature) -> str:
    """English label when present, else the first label, else the IRI tail."""
    for text, lang in feature.labels:
        if lang == "en":
            return text
    if feature.labels:
        return feature.labels[0][0]
    return feature.iri.value.rsplit("/", 1)[-1]


def load_kg(paths: list[str | Path]) -> TripleStore:
    """Load N-Triples files into a validated store.

    Raises NTriplesError (with file/line), OntologyError (cycles, missing
    root, empty input) or GeometryRefError (dangling or unparseable WKT).
    """
    store = TripleStore()
    if not paths:
        raise OntologyError("no input files: ontology is empty")
    for path in paths:
        path = Path(path)
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                parsed = parse_ntriples_line(line, str(path), lineno)
                if parsed is not None:
                    store.add(*parsed)
    store.finalize()
    return store


def load_kg_dir(directory: str | Path) -> TripleStore:
    """Load every .nt file in a directory (sorted for determinism)."""
    directory = Path(directory)
    if not directory.is_dir():
        raise GeoAskError(f"knowledge-graph directory not found: {directory}")
    return load_kg(sorted(directory.glob("*.nt")))
