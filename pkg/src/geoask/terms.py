"""RDF terms and the namespace table shared by the store and the query layer."""

from __future__ import annotations

from dataclasses import dataclass


class GeoAskError(Exception):
    """Base class for all errors raised by this package."""


@dataclass(frozen=True, order=True)
class Iri:
    value: str

    def __post_init__(self):
        if not self.value or any(c.isspace() for c in self.value):
            raise ValueError(f"invalid IRI: {self.value!r}")

    def __str__(self):
        return self.value

    def n3(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True, order=True)
class Literal:
    lexical: str
    datatype: Iri | None = None
    lang: str | None = None

    def __post_init__(self):
        # xsd:string is the implicit datatype of plain literals; canonicalize
        # so "x" and "x"^^xsd:string are one term.
        if self.datatype is not None and self.datatype.value == "http://www.w3.org/2001/XMLSchema#string":
            object.__setattr__(self, "datatype", None)

    def n3(self) -> str:
        out = '"%s"' % escape_literal(self.lexical)
        if self.lang:
            return out + "@" + self.lang
        if self.datatype is not None and self.datatype != XSD.string:
            return out + "^^" + self.datatype.n3()
        return out

    def value(self):
        """Parsed Python value: float/int for numerics, str otherwise."""
        if self.datatype in (XSD.integer, XSD.int, XSD.long):
            return int(self.lexical)
        if self.datatype in (XSD.decimal, XSD.double, XSD.float):
            return float(self.lexical)
        if self.datatype == XSD.boolean:
            return self.lexical == "true"
        return self.lexical


Term = Iri | Literal


def escape_literal(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


def unescape_literal(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            mapped = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}.get(nxt)
            if mapped is not None:
                out.append(mapped)
                i += 2
                continue
            if nxt == "u" and i + 6 <= len(text):
                out.append(chr(int(text[i + 2 : i + 6], 16)))
                i += 6
                continue
        out.append(c)
        i += 1
    return "".join(out)


class _Namespace:
    def __init__(self, base: str):
        self._base = base

    def __getattr__(self, name: str) -> Iri:
        return Iri(self._base + name)

    def term(self, name: str) -> Iri:
        return Iri(self._base + name)

    @property
    def base(self) -> str:
        return self._base


RDF = _Namespace("http://www.w3.org/1999/02/22-rdf-syntax-ns#")
RDFS = _Namespace("http://www.w3.org/2000/01/rdf-schema#")
XSD = _Namespace("http://www.w3.org/2001/XMLSchema#")
GEO = _Namespace("http://www.opengis.net/ont/geosparql#")
GEOF = _Namespace("http://www.opengis.net/def/function/geosparql/")
UOM = _Namespace("http://www.opengis.net/def/uom/OGC/1.0/")
ONT = _Namespace("http://geoask.example/ontology#")
RES = _Namespace("http://geoask.example/resource/")

# Prefixes are predeclared: query text uses them without PREFIX headers.
PREFIXES: dict[str, str] = {
    "rdf": RDF.base,
    "rdfs": RDFS.base,
    "xsd": XSD.base,
    "geo": GEO.base,
    "geof": GEOF.base,
    "uom": UOM.base,
}

WKT_LITERAL = GEO.term("wktLiteral")


def shrink(iri: Iri) -> str:
    """Prefixed form when a predeclared prefix applies, else <full-iri>."""
    for prefix, base in PREFIXES.items():
        if iri.value.startswith(base):
            local = iri.value[len(base) :]
            if local and all(c.isalnum() or c in "_-." for c in local):
                return f"{prefix}:{local}"
    return iri.n3()


def expand(prefixed: str) -> Iri | None:
    """Resolve a prefix:local name against the predeclared table."""
    if ":" not in prefixed:
        return None
    prefix, local = prefixed.split(":", 1)
    base = PREFIXES.get(prefix)
    if base is None:
        return None
    return Iri(base + local)
