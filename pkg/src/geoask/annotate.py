"""The identifier/solver cascade: from a dependency graph to an annotation set.

Component order mirrors the engine pipeline: instances, concepts,
consolidation, properties, comparatives, spatial relations, numerics,
conjunctions, temporal, return types. Every step is deterministic; anything
dropped or guessed lands in the trace notes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .kg import Ontology, TripleStore
from .nlp import (
    ADJ,
    ADP,
    CONJ,
    DET,
    DepGraph,
    MONTHS,
    NOUN,
    NUM,
    PROPN,
    SEASONS,
    Token,
    UNIT_TOKENS,
    VERB,
    is_year,
    numeric_value,
    tree_distance,
)
from .strings import INSTANCE_THRESHOLD
from .terms import GEOF, Iri

INSTANCE, CONCEPT, PROPERTY = "Instance", "Concept", "Property"

NAME, COORDINATES, NUMBER_PROPERTY, NUMBER_COUNT, IMAGE = (
    "Name", "Coordinates", "NumberProperty", "NumberCount", "Image",
)

# Keyword dictionary for topological relations (lowercased surfaces).
WITHIN_WORDS = {"in", "within", "inside"}
CONTAINS_WORDS = {"contain", "contains", "containing"}
INTERSECTS_WORDS = {"cross", "crosses", "crossing", "intersect", "intersects",
                    "intersecting", "overlapping", "overlaps", "near"}
IMAGE_LINK_WORDS = {"of", "with"}  # containment only when an image takes part

COMPARATIVE_BASES = {
    "large": "max", "big": "max", "long": "max", "high": "max", "great": "max",
    "late": "max", "new": "max", "deep": "max", "wide": "max", "populous": "max",
    "small": "min", "short": "min", "low": "min", "few": "min", "old": "min",
    "early": "min",
}
SUPERLATIVE_WORDS = {
    "largest": "max", "biggest": "max", "longest": "max", "highest": "max",
    "greatest": "max", "latest": "max", "newest": "max", "deepest": "max",
    "widest": "max", "most": "max", "smallest": "min", "shortest": "min",
    "lowest": "min", "fewest": "min", "oldest": "min", "earliest": "min", "least": "min",
}
COMPARATIVE_WORDS = {
    "larger": "max", "bigger": "max", "longer": "max", "higher": "max",
    "greater": "max", "later": "max", "newer": "max", "deeper": "max",
    "wider": "max", "more": "max", "smaller": "min", "shorter": "min",
    "lower": "min", "fewer": "min", "older": "min", "earlier": "min", "less": "min",
}

# Size-default property synonyms per class family, used for superlatives and
# comparative-adjective constraints ("longest river", "longer than 300 km").
DEFAULT_PROPERTY_PHRASE = {
    "River": "length",
    "Region": "area", "City": "area", "Town": "area", "Forest": "area", "SeaSector": "area",
    "Image": "timestamp", "Sentinel1Image": "timestamp", "Sentinel2Image": "timestamp",
}

_ENUM_TOKEN_RE = re.compile(r"^[A-Z]{2,4}$")


@dataclass(frozen=True)
class AttachmentScore:
    tree_distance: int
    word_distance: int

    @property
    def score(self) -> float:
        return self.tree_distance + self.word_distance / 100


def attachment_score(g: DepGraph, i: int, j: int) -> AttachmentScore:
    """The tree-plus-word closeness used by every attachment heuristic."""
    return AttachmentScore(tree_distance(g, i, j), abs(i - j))


@dataclass
class Mention:
    kind: str
    span: tuple[int, int]
    target: Iri  # resource IRI (Instance), class IRI (Concept), property IRI (Property)
    variable: str  # iWKT{n} / c{n} / p{n}
    score: float = 1.0
    class_iri: Iri | None = None  # feature class for instances, = target for concepts
    owner: "Mention | None" = None  # property mentions only
    implicit: bool = False  # allocated from a default-property table, not question text
    mention_id: str = ""

    @property
    def anchor(self) -> int:
        return self.span[1]

    @property
    def wkt_variable(self) -> str | None:
        if self.kind == INSTANCE:
            return self.variable
        if self.kind == CONCEPT:
            return "cWKT" + self.variable[1:]
        return None

    def covers(self, index: int) -> bool:
        return self.span[0] <= index <= self.span[1]


@dataclass
class SpatialLink:
    function: Iri
    arg1: Mention
    arg2: Mention
    anchor: int  # relation keyword token
    distance_constraint: tuple[str, float] | None = None  # (comparator, metres)


@dataclass
class NumericConstraint:
    value: float
    unit: str | None
    comparator: str
    target: Mention | SpatialLink | None
    source_token: int


@dataclass
class TemporalConstraint:
    start: str | None  # ISO-8601 UTC instant, inclusive; None = open
    end: str | None  # exclusive; None = open
    span: tuple[int, int] = (0, 0)


@dataclass
class ComparativeMark:
    kind: str  # comparative | superlative
    direction: str  # max | min
    target: Mention
    token: int


@dataclass
class AnnotationSet:
    mentions: list[Mention] = field(default_factory=list)
    spatial_links: list[SpatialLink] = field(default_factory=list)
    numeric: list[NumericConstraint] = field(default_factory=list)
    temporal: list[TemporalConstraint] = field(default_factory=list)
    comparatives: list[ComparativeMark] = field(default_factory=list)
    return_types: list[str] = field(default_factory=list)
    group_by: Mention | None = None
    limit: int | None = None
    notes: list[str] = field(default_factory=list)

    def note(self, text: str):
        self.notes.append(text)

    def geo_mentions(self) -> list[Mention]:
        return [m for m in self.mentions if m.kind in (INSTANCE, CONCEPT)]

    def property_mentions(self) -> list[Mention]:
        return [m for m in self.mentions if m.kind == PROPERTY]

    def to_json(self) -> dict:
        ids = {id(m): m.mention_id for m in self.mentions}

        def ref(obj):
            if obj is None:
                return None
            if isinstance(obj, Mention):
                return ids.get(id(obj), obj.mention_id)
            if isinstance(obj, SpatialLink):
                return f"link@{obj.anchor}"
            return str(obj)

        return {
            "mentions": [
                {
                    "id": m.mention_id,
                    "kind": m.kind,
                    "span": list(m.span),
                    "target": str(m.target),
                    "variable": m.variable,
                    "class": str(m.class_iri) if m.class_iri else None,
                    "owner": ref(m.owner),
                    "score": round(m.score, 4),
                }
                for m in self.mentions
            ],
            "spatialLinks": [
                {
                    "function": str(l.function),
                    "arg1": ref(l.arg1),
                    "arg2": ref(l.arg2),
                    "anchor": l.anchor,
                    "distanceConstraint": (
                        {"comparator": l.distance_constraint[0], "metres": l.distance_constraint[1]}
                        if l.distance_constraint
                        else None
                    ),
                }
                for l in self.spatial_links
            ],
            "numeric": [
                {
                    "value": c.value,
                    "unit": c.unit,
                    "comparator": c.comparator,
                    "target": ref(c.target),
                    "token": c.source_token,
                }
                for c in self.numeric
            ],
            "temporal": [{"start": t.start, "end": t.end, "span": list(t.span)} for t in self.temporal],
            "comparatives": [
                {"kind": c.kind, "direction": c.direction, "target": ref(c.target), "token": c.token}
                for c in self.comparatives
            ],
            "returnTypes": list(self.return_types),
            "groupBy": ref(self.group_by),
            "limit": self.limit,
            "notes": list(self.notes),
        }


# -- instances und concepts --------------------------------------------------


def identify_instances(g: DepGraph, store: TripleStore, aset: AnnotationSet) -> list[Mention]:
    """Link maximal PROPN runs to KG resources via the label index."""
    mentions = []
    tokens = g.tokens
    i = 0
    while i < len(tokens):
        if tokens[i].pos != PROPN:
            i += 1
            continue
        j = i
        while j + 1 < len(tokens) and tokens[j + 1].pos == PROPN:
            j += 1
        text = " ".join(t.surface for t in tokens[i : j + 1])
        hits = store.lookup_label(text, k=3)
        if hits and hits[0][1] >= INSTANCE_THRESHOLD:
            iri, score = hits[0]
            feature = store.features.get(iri)
            mention = Mention(
                INSTANCE,
                (i, j),
                iri,
                variable=f"iWKT{sum(1 for m in mentions) + 1}",
                score=score,
                class_iri=feature.class_iri if feature else None,
            )
            mentions.append(mention)
        else:
            aset.note(f"instance candidate {text!r} has no KG match above threshold; dropped")
        i = j + 1
    aset.mentions.extend(mentions)
    return mentions


def _concept_windows(tokens: list[Token], occupied: set[int]):
    n = len(tokens)
    for length in (3, 2, 1):
        for start in range(0, n - length + 1):
            idxs = range(start, start + length)
            if any(k in occupied for k in idxs):
                continue
            window = [tokens[k] for k in idxs]
            ok = all(t.pos in (NOUN, PROPN, ADJ) for t in window)
            if not ok and length == 3:
                ok = (
                    window[0].pos in (NOUN, PROPN)
                    and window[1].lemma == "of"
                    and window[2].pos in (NOUN, PROPN)
                )
            if ok:
                yield (start, start + length - 1, window)


def identify_concepts(g: DepGraph, ontology: Ontology, aset: AnnotationSet) -> list[Mention]:
    """Map noun phrases outside instance spans to ontology classes."""
    occupied = {k for m in aset.mentions for k in range(m.span[0], m.span[1] + 1)}
    taken: set[int] = set()
    found: list[tuple[int, int, Iri, float]] = []
    for start, end, window in _concept_windows(g.tokens, occupied):
        if any(k in taken for k in range(start, end + 1)):
            continue
        phrase = " ".join(t.surface for t in window)
        hit = ontology.class_for_word(phrase)
        if hit is None:
            continue
        found.append((start, end, hit[0], hit[1]))
        taken.update(range(start, end + 1))
    mentions = []
    for start, end, cls, score in sorted(found):
        mentions.append(
            Mention(
                CONCEPT,
                (start, end),
                cls,
                variable=f"c{len([m for m in aset.mentions if m.kind == CONCEPT]) + len(mentions) + 1}",
                score=score,
                class_iri=cls,
            )
        )
    aset.mentions.extend(mentions)
    aset.mentions.sort(key=lambda m: m.span)
    return mentions


def consolidate(aset: AnnotationSet) -> list[Mention]:
    """Merge concepts directly adjacent to an instance into that instance."""
    changed = True
    while changed:
        changed = False
        instances = [m for m in aset.mentions if m.kind == INSTANCE]
        for concept in [m for m in aset.mentions if m.kind == CONCEPT]:
            for inst in instances:
                if concept.span[1] + 1 == inst.span[0] or inst.span[1] + 1 == concept.span[0]:
                    inst.span = (min(inst.span[0], concept.span[0]), max(inst.span[1], concept.span[1]))
                    aset.mentions.remove(concept)
                    aset.note(
                        f"concept {concept.variable} consolidated into instance {inst.variable}; variable retired"
                    )
                    changed = True
                    break
            if changed:
                break
    aset.mentions.sort(key=lambda m: m.span)
    return aset.mentions


# -- properties and comparatives ----------------------------------------------


def _next_property_number(aset: AnnotationSet) -> int:
    return len(aset.property_mentions()) + 1


def identify_properties(g: DepGraph, ontology: Ontology, aset: AnnotationSet) -> list[Mention]:
    """Match property phrases per mention class; closest mention wins conflicts."""
    occupied = {k for m in aset.mentions for k in range(m.span[0], m.span[1] + 1)}
    owners = aset.geo_mentions()
    taken: set[int] = set()
    created = []
    windows = sorted(
        _concept_windows(g.tokens, occupied), key=lambda w: (-(w[1] - w[0]), w[0])
    )
    for start, end, window in windows:
        if any(k in taken for k in range(start, end + 1)):
            continue
        phrase = " ".join(t.surface for t in window)
        candidates = []
        for owner in owners:
            if owner.class_iri is None:
                continue
            hit = ontology.property_for_phrase(owner.class_iri, phrase)
            if hit is not None:
                candidates.append((owner, hit[0], hit[1]))
        if not candidates:
            continue
        best_score = max(c[2] for c in candidates)
        contenders = [c for c in candidates if c[2] == best_score]
        if len(contenders) > 1:
            contenders.sort(
                key=lambda c: (attachment_score(g, end, c[0].anchor).score, c[0].span[0])
            )
        owner, prop, score = contenders[0]
        mention = Mention(
            PROPERTY,
            (start, end),
            prop,
            variable=f"p{_next_property_number(aset)}",
            score=score,
            owner=owner,
        )
        aset.mentions.append(mention)
        created.append(mention)
        taken.update(range(start, end + 1))
    aset.mentions.sort(key=lambda m: m.span)
    return created


def default_property_for(ontology: Ontology, aset: AnnotationSet, g: DepGraph, mention: Mention) -> Mention | None:
    """Find or create the size-default property mention for a geo mention."""
    cls = mention.class_iri
    if cls is None:
        return None
    phrase = None
    for candidate in [cls] + ontology.ancestors(cls):
        local = candidate.value.rsplit("#", 1)[-1]
        if local in DEFAULT_PROPERTY_PHRASE:
            phrase = DEFAULT_PROPERTY_PHRASE[local]
            break
    if phrase is None:
        return None
    hit = ontology.property_for_phrase(cls, phrase)
    if hit is None:
        return None
    for pm in aset.property_mentions():
        if pm.owner is mention and pm.target == hit[0]:
            return pm
    pm = Mention(
        PROPERTY,
        mention.span,
        hit[0],
        variable=f"p{_next_property_number(aset)}",
        score=hit[1],
        owner=mention,
        implicit=True,
    )
    aset.mentions.append(pm)
    return pm


def identify_comparatives(g: DepGraph, ontology: Ontology, aset: AnnotationSet) -> list[ComparativeMark]:
    """Mark superlative/comparative words, attached by the closeness heuristic."""
    marks = []
    tokens = g.tokens
    for t in tokens:
        word = t.surface.lower()
        kind = direction = None
        if word in SUPERLATIVE_WORDS:
            kind, direction = "superlative", SUPERLATIVE_WORDS[word]
        elif word in COMPARATIVE_WORDS:
            kind, direction = "comparative", COMPARATIVE_WORDS[word]
        elif t.pos == ADJ and word.endswith("est") and word[:-3] in COMPARATIVE_BASES:
            kind, direction = "superlative", COMPARATIVE_BASES[word[:-3]]
        elif t.pos == ADJ and word.endswith("er") and word[:-2] in COMPARATIVE_BASES:
            kind, direction = "comparative", COMPARATIVE_BASES[word[:-2]]
        if kind is None:
            continue
        nxt = tokens[t.index + 1] if t.index + 1 < len(tokens) else None
        if word in ("more", "less", "most", "least") and nxt is not None and (
            nxt.lemma == "than" or nxt.pos == NUM
        ):
            continue  # comparator phrase, the numeric solver owns it
        candidates = [m for m in aset.mentions if m.kind in (CONCEPT, INSTANCE, PROPERTY)]
        if not candidates:
            continue
        target = min(
            candidates,
            key=lambda m: (attachment_score(g, t.index, m.anchor).score, m.span[0]),
        )
        marks.append(ComparativeMark(kind, direction, target, t.index))
    aset.comparatives.extend(marks)
    return marks


# -- temporal ------------------------------------------------------------------


def _month_interval(year: int, month: int) -> tuple[str, str]:
    nxt_y, nxt_m = (year + 1, 1) if month == 12 else (year, month + 1)
    return (f"{year:04d}-{month:02d}-01T00:00:00Z", f"{nxt_y:04d}-{nxt_m:02d}-01T00:00:00Z")


def _year_interval(year: int) -> tuple[str, str]:
    return (f"{year:04d}-01-01T00:00:00Z", f"{year + 1:04d}-01-01T00:00:00Z")


def _season_interval(year: int, season: str) -> tuple[str, str]:
    start_m, end_m = SEASONS[season]
    end_year = year + 1 if end_m < start_m else year
    return (f"{year:04d}-{start_m:02d}-01T00:00:00Z", f"{end_year:04d}-{end_m:02d}-01T00:00:00Z")


def temporal_units(tokens: list[Token]) -> list[tuple[int, int, str, str]]:
    """Minimal date units: (first, last, startInstant, endInstant)."""
    units = []
    used: set[int] = set()
    n = len(tokens)
    for i, t in enumerate(tokens):
        if i in used:
            continue
        low = t.surface.lower()
        if low in MONTHS:
            day = None
            if i > 0 and tokens[i - 1].pos == NUM:
                value = numeric_value(tokens[i - 1])
                if value and 1 <= value <= 31 and not is_year(tokens[i - 1]):
                    day = int(value)
            if i + 1 < n and is_year(tokens[i + 1]):
                year = int(tokens[i + 1].surface)
                if day is not None:
                    month = MONTHS[low]
                    nxt = f"{year:04d}-{month:02d}-{day + 1:02d}T00:00:00Z" if day < 28 else None
                    start = f"{year:04d}-{month:02d}-{day:02d}T00:00:00Z"
                    end = nxt or _month_interval(year, month)[1]
                    units.append((i - 1, i + 1, start, end))
                    used.update((i - 1, i, i + 1))
                else:
                    start, end = _month_interval(year, MONTHS[low])
                    units.append((i, i + 1, start, end))
                    used.update((i, i + 1))
        elif low in SEASONS and i + 1 < n and is_year(tokens[i + 1]):
            start, end = _season_interval(int(tokens[i + 1].surface), low)
            units.append((i, i + 1, start, end))
            used.update((i, i + 1))
        elif is_year(t):
            prev = tokens[i - 1].surface.lower() if i > 0 else ""
            if prev in ("in", "during", "before", "after", "since", "between", "and", "year", "of"):
                start, end = _year_interval(int(t.surface))
                units.append((i, i, start, end))
                used.add(i)
    return sorted(units)


def temporal_token_spans(tokens: list[Token]) -> set[int]:
    spans: set[int] = set()
    for first, last, _, _ in temporal_units(tokens):
        spans.update(range(first, last + 1))
        if first > 0 and tokens[first - 1].surface.lower() in (
            "in", "during", "on", "before", "after", "since", "between", "and",
        ):
            spans.add(first - 1)
    return spans


def identify_temporal(g: DepGraph, aset: AnnotationSet) -> list[TemporalConstraint]:
    """Rule-based date recognition emitting half-open UTC intervals."""
    tokens = g.tokens
    units = temporal_units(tokens)
    constraints: list[TemporalConstraint] = []
    consumed: set[int] = set()
    # "between X and Y" joins two units into one interval
    for i, t in enumerate(tokens):
        if t.surface.lower() != "between":
            continue
        following = [u for u in units if u[0] > i]
        if len(following) >= 2:
            a, b = following[0], following[1]
            and_between = any(
                tokens[k].surface.lower() == "and" for k in range(a[1] + 1, b[0])
            )
            if and_between and a[2] <= b[2]:
                constraints.append(TemporalConstraint(a[2], b[3], (i, b[1])))
                consumed.update(range(a[0], a[1] + 1))
                consumed.update(range(b[0], b[1] + 1))
    for first, last, start, end in units:
        if first in consumed:
            continue
        prev = tokens[first - 1].surface.lower() if first > 0 else ""
        if prev == "before":
            constraints.append(TemporalConstraint(None, start, (first - 1, last)))
        elif prev == "after":
            constraints.append(TemporalConstraint(end, None, (first - 1, last)))
        elif prev == "since":
            constraints.append(TemporalConstraint(start, None, (first - 1, last)))
        else:
            constraints.append(TemporalConstraint(start, end, (first, last)))
    constraints.sort(key=lambda c: c.span)
    aset.temporal.extend(constraints)
    return constraints


# -- spatial relations ---------------------------------------------------------


def _is_image_mention(m: Mention) -> bool:
    return m.class_iri is not None and m.class_iri.value.rsplit("#", 1)[-1] in (
        "Image", "Sentinel1Image", "Sentinel2Image",
    )


def _pick_argument(g: DepGraph, anchor: int, candidates: list[Mention]) -> Mention | None:
    if not candidates:
        return None
    return min(candidates, key=lambda m: (attachment_score(g, anchor, m.anchor).score, m.span[0]))


def identify_spatial_relations(g: DepGraph, aset: AnnotationSet) -> list[SpatialLink]:
    """Map relation keywords to geof functions and pick their two arguments."""
    tokens = g.tokens
    geo = aset.geo_mentions()
    temporal_tokens = temporal_token_spans(tokens)
    links: list[SpatialLink] = []
    consumed: set[int] = set()

    def args_for(anchor: int) -> tuple[Mention | None, Mention | None]:
        left = _pick_argument(g, anchor, [m for m in geo if m.anchor < anchor])
        right = _pick_argument(g, anchor, [m for m in geo if m.span[0] > anchor])
        return left, right

    def add(function: Iri, anchor: int, keyword: str):
        left, right = args_for(anchor)
        if left is None or right is None:
            aset.note(f"relation {keyword!r} at token {anchor} dropped: needs two arguments")
            return
        if function in (GEOF.sfWithin, GEOF.sfContains) and (
            _is_image_mention(left) or _is_image_mention(right)
        ):
            # image linkage: a containment with an image becomes footprint overlap
            image, other = (left, right) if _is_image_mention(left) else (right, left)
            links.append(SpatialLink(GEOF.sfIntersects, image, other, anchor))
            return
        links.append(SpatialLink(function, left, right, anchor))

    for t in tokens:
        i = t.index
        if i in consumed or i in temporal_tokens:
            continue
        word = t.surface.lower()
        if word == "away" and i + 1 < len(tokens) and tokens[i + 1].surface.lower() == "from":
            left, right = args_for(i + 1)
            if left is None or right is None:
                aset.note(f"relation 'away from' at token {i} dropped: needs two arguments")
            else:
                links.append(SpatialLink(GEOF.distance, left, right, i + 1))
            consumed.update((i, i + 1))
            continue
        if word == "within" and i + 1 < len(tokens):
            # "within 5 km of X" is a distance bound, not containment
            k = i + 1
            if tokens[k].pos == DET and k + 1 < len(tokens):
                k += 1
            if tokens[k].pos == NUM and k + 1 < len(tokens) and tokens[k + 1].lemma in UNIT_TOKENS:
                of_idx = next(
                    (j for j in range(k + 1, min(k + 4, len(tokens))) if tokens[j].surface.lower() == "of"),
                    None,
                )
                left, right = args_for(i)
                if left is None or right is None:
                    aset.note(f"relation 'within ... of' at token {i} dropped: needs two arguments")
                else:
                    links.append(SpatialLink(GEOF.distance, left, right, i))
                consumed.add(i)
                if of_idx is not None:
                    consumed.add(of_idx)
                continue
        if word in WITHIN_WORDS:
            add(GEOF.sfWithin, i, word)
        elif word in CONTAINS_WORDS:
            add(GEOF.sfContains, i, word)
        elif word in INTERSECTS_WORDS:
            add(GEOF.sfIntersects, i, word)
        elif word in IMAGE_LINK_WORDS:
            left, right = args_for(i)
            if left is not None and right is not None and (
                _is_image_mention(left) or _is_image_mention(right)
            ):
                image, other = (left, right) if _is_image_mention(left) else (right, left)
                if not _is_image_mention(other):
                    links.append(SpatialLink(GEOF.sfIntersects, image, other, i))
    aset.spatial_links.extend(links)
    return links


# -- numerics -------------------------------------------------------------------


def _comparator_before(tokens: list[Token], num_idx: int) -> tuple[str | None, str | None]:
    """(comparator, flavor) from the phrase before a number; flavor marks
    comparative-adjective phrasings that target default properties."""
    prev = tokens[num_idx - 1] if num_idx > 0 else None
    prev2 = tokens[num_idx - 2] if num_idx > 1 else None
    if prev is None:
        return None, None
    p1 = prev.surface.lower()
    if p1 == "than" and prev2 is not None:
        p2 = prev2.surface.lower()
        if p2 in ("less", "fewer", "under", "below"):
            return "<", None
        if p2 in ("more", "greater", "over", "above"):
            return ">", None
        if p2 in COMPARATIVE_WORDS:
            return (">" if COMPARATIVE_WORDS[p2] == "max" else "<"), "comparative"
        if prev2.pos == ADJ and p2.endswith("er") and p2[:-2] in COMPARATIVE_BASES:
            return (">" if COMPARATIVE_BASES[p2[:-2]] == "max" else "<"), "comparative"
    if p1 in ("under", "below"):
        return "<", None
    if p1 in ("over", "above"):
        return ">", None
    if p1 == "exactly":
        return "=", None
    if p1 in ("about", "around", "approximately"):
        return "~", None
    if p1 == "least" and prev2 is not None and prev2.surface.lower() == "at":
        return ">=", None
    if p1 == "most" and prev2 is not None and prev2.surface.lower() == "at":
        return "<=", None
    if p1 == "within":
        return "<=", None
    if p1 == "within" or (prev2 is not None and prev2.surface.lower() == "within" and prev.pos == DET):
        return "<=", None
    return None, None


def solve_numerics(g: DepGraph, ontology: Ontology, aset: AnnotationSet) -> AnnotationSet:
    """Turn numbers plus comparator phrases into constraints on the closest target."""
    tokens = g.tokens
    temporal_tokens = temporal_token_spans(tokens)
    distance_links = [l for l in aset.spatial_links if l.function == GEOF.distance]
    numeric_props = [m for m in aset.property_mentions()]

    for t in tokens:
        if t.pos != NUM or t.index in temporal_tokens:
            continue
        value = numeric_value(t)
        if value is None:
            continue
        unit = None
        if t.index + 1 < len(tokens) and tokens[t.index + 1].lemma in UNIT_TOKENS:
            unit = UNIT_TOKENS[tokens[t.index + 1].lemma]
        comparator, flavor = _comparator_before(tokens, t.index)
        metres = value * 1000 if unit == "km" else value
        norm_unit = "m" if unit == "km" else unit

        if comparator is None and unit is None:
            # bare counts ("a hundred images") become the result limit
            nxt = tokens[t.index + 1] if t.index + 1 < len(tokens) else None
            if nxt is not None and any(
                m.kind == CONCEPT and m.covers(nxt.index) for m in aset.mentions
            ):
                aset.limit = int(value)
                aset.note(f"count word {t.surface!r} routed to query LIMIT {int(value)}")
                continue

        if flavor == "comparative":
            # "longer than 300 km": constrain the default property of the
            # comparative's own concept
            mark = next((c for c in aset.comparatives if c.kind == "comparative"), None)
            owner = None
            if mark is not None and mark.target.kind in (CONCEPT, INSTANCE):
                owner = mark.target
            else:
                owner = _pick_argument(g, t.index, aset.geo_mentions())
            pm = default_property_for(ontology, aset, g, owner) if owner else None
            if pm is None:
                aset.note(f"number {t.surface} at token {t.index} has no attachable target; dropped")
                continue
            aset.numeric.append(NumericConstraint(metres, norm_unit, comparator, pm, t.index))
            continue

        candidates: list[tuple[float, str, object]] = []
        if unit in ("km", "m"):
            for link in distance_links:
                candidates.append((attachment_score(g, t.index, link.anchor).score, "link", link))
        elif unit == "%":
            for pm in numeric_props:
                candidates.append((attachment_score(g, t.index, pm.anchor).score, "prop", pm))
        else:
            for link in distance_links:
                candidates.append((attachment_score(g, t.index, link.anchor).score, "link", link))
            for pm in numeric_props:
                candidates.append((attachment_score(g, t.index, pm.anchor).score, "prop", pm))
        if not candidates:
            aset.note(f"number {t.surface} at token {t.index} has no attachable target; dropped")
            continue
        candidates.sort(key=lambda c: c[0])
        _, kind, target = candidates[0]
        comp = comparator or "="
        if kind == "link":
            link = target
            if link.distance_constraint is None:
                link.distance_constraint = (comp, metres)
            aset.numeric.append(NumericConstraint(metres, norm_unit, comp, link, t.index))
        else:
            aset.numeric.append(NumericConstraint(value, norm_unit, comp, target, t.index))

    # enum-valued tokens (VV/VH) next to a string property become equality filters
    for t in tokens:
        if not _ENUM_TOKEN_RE.match(t.surface):
            continue
        nearby = [
            pm
            for pm in aset.property_mentions()
            if abs(pm.span[0] - t.index) <= 2 or abs(pm.anchor - t.index) <= 2
        ]
        string_props = [pm for pm in nearby if _property_is_string(ontology, pm)]
        if string_props:
            pm = min(string_props, key=lambda m: abs(m.anchor - t.index))
            aset.numeric.append(NumericConstraint(0.0, t.surface, "=", pm, t.index))
    return aset


def _property_is_string(ontology: Ontology, pm: Mention) -> bool:
    if pm.owner is None or pm.owner.class_iri is None:
        return False
    try:
        info = ontology.properties_of(pm.owner.class_iri).get(pm.target)
    except Exception:
        return False
    return info is not None and info.range is not None and info.range.value.endswith("string")


# -- conjunctions ----------------------------------------------------------------


def _link_key(link: SpatialLink):
    return (link.function, id(link.arg1), id(link.arg2), link.distance_constraint)


def solve_conjunctions(g: DepGraph, aset: AnnotationSet) -> AnnotationSet:
    """Distribute information across conj edges; strictly additive."""
    temporal_tokens = temporal_token_spans(g.tokens)
    conj_edges = [
        (head, dep)
        for head, dep, label in g.edges
        if label.startswith("conj") and head not in temporal_tokens and dep not in temporal_tokens
    ]

    def geo_at(idx: int) -> Mention | None:
        for m in aset.geo_mentions():
            if m.covers(idx):
                return m
        return None

    def constraint_at(idx: int) -> NumericConstraint | None:
        for c in aset.numeric:
            if c.source_token == idx or (
                idx > 0 and c.source_token == idx - 1
            ):  # unit token right after the number
                return c
        return None

    def property_at(idx: int) -> Mention | None:
        for m in aset.property_mentions():
            if m.covers(idx):
                return m
        return None

    for head, dep in conj_edges:
        a_geo, b_geo = geo_at(head), geo_at(dep)
        if a_geo is not None and b_geo is not None and a_geo is not b_geo:
            existing = {_link_key(l) for l in aset.spatial_links}
            added = []
            for link in list(aset.spatial_links):
                for source, clone_to in ((a_geo, b_geo), (b_geo, a_geo)):
                    if link.arg1 is source and link.arg2 is not clone_to:
                        candidate = SpatialLink(
                            link.function, clone_to, link.arg2, link.anchor, link.distance_constraint
                        )
                    elif link.arg2 is source and link.arg1 is not clone_to:
                        candidate = SpatialLink(
                            link.function, link.arg1, clone_to, link.anchor, link.distance_constraint
                        )
                    else:
                        continue
                    if _link_key(candidate) not in existing:
                        existing.add(_link_key(candidate))
                        added.append(candidate)
            if added:
                aset.spatial_links.extend(added)
                aset.note(
                    f"conjunction {g.tokens[head].surface}/{g.tokens[dep].surface}: "
                    f"cloned {len(added)} spatial link(s)"
                )
            continue
        a_num, b_num = constraint_at(head), constraint_at(dep)
        if a_num is not None and b_num is not None and a_num is not b_num:
            if a_num.target is None and b_num.target is not None:
                a_num.target = b_num.target
                aset.note("number-to-number conjunction: shared target distributed")
            elif b_num.target is None and a_num.target is not None:
                b_num.target = a_num.target
                aset.note("number-to-number conjunction: shared target distributed")
            else:
                aset.note("number-to-number conjunction observed; constraints already targeted")
            continue
        num, prop = (a_num, property_at(dep)) if a_num is not None else (b_num, property_at(head))
        if num is not None and prop is not None:
            if num.target is None:
                num.target = prop
                aset.note("number-to-property conjunction: constraint attached to conjoined property")
            continue
        if a_geo is not None or b_geo is not None or a_num is not None or b_num is not None:
            aset.note(
                f"conjunction at tokens {head}/{dep} has unsupported endpoint kinds; ignored"
            )
    return aset


def validate_annotations(aset: AnnotationSet) -> AnnotationSet:
    """Referential integrity: drop danglers, enforce link invariants."""
    mention_ids = {id(m) for m in aset.mentions}
    for i, m in enumerate(aset.mentions):
        m.mention_id = f"m{i + 1}"
    kept_links = []
    for link in aset.spatial_links:
        if id(link.arg1) not in mention_ids or id(link.arg2) not in mention_ids:
            aset.note("spatial link referencing a retired mention dropped")
            continue
        if link.function == GEOF.distance and link.distance_constraint is None:
            aset.note("distance relation without a numeric bound dropped")
            continue
        kept_links.append(link)
    aset.spatial_links = kept_links
    live_links = set(map(id, kept_links))
    kept_numeric = []
    for c in aset.numeric:
        if c.target is None:
            aset.note(f"numeric constraint at token {c.source_token} remained unattached; dropped")
            continue
        if isinstance(c.target, SpatialLink) and id(c.target) not in live_links:
            continue
        if isinstance(c.target, Mention) and id(c.target) not in mention_ids:
            aset.note("numeric constraint referencing a retired mention dropped")
            continue
        kept_numeric.append(c)
    aset.numeric = kept_numeric
    aset.comparatives = [c for c in aset.comparatives if id(c.target) in mention_ids]
    return aset


# -- return types -----------------------------------------------------------------


class HeuristicReturnTypes:
    """The fallback return-type table; any classifier with .classify can replace it."""

    def classify(self, g: DepGraph, aset: AnnotationSet) -> list[str]:
        tokens = g.tokens
        lowers = [t.surface.lower() for t in tokens]
        for i, low in enumerate(lowers):
            if low == "how" and i + 1 < len(lowers) and lowers[i + 1] == "many":
                return [NUMBER_COUNT]
        if "where" in lowers:
            return [COORDINATES]
        if "how" in lowers:
            idx = lowers.index("how")
            if idx + 1 < len(tokens) and tokens[idx + 1].pos == ADJ:
                return [NUMBER_PROPERTY]
        # "what/which is the <property> ..." asks for the property value itself
        if lowers[0] in ("what", "which") and len(lowers) > 2 and lowers[1] in ("is", "are"):
            window = range(2, min(6, len(tokens)))
            if any(
                pm.span[0] in window
                for pm in aset.property_mentions()
                if not pm.implicit
            ):
                return [NUMBER_PROPERTY]
        if any(m.kind == CONCEPT and _is_image_mention(m) for m in aset.mentions):
            return [IMAGE]
        return [NAME]


def identify_return_type(
    g: DepGraph, aset: AnnotationSet, classifier=None
) -> list[str]:
    classifier = classifier or HeuristicReturnTypes()
    types = classifier.classify(g, aset) or [NAME]
    aset.return_types = list(types)
    return aset.return_types


def detect_group_by(g: DepGraph, aset: AnnotationSet):
    """'per X' / 'in each X' marks X as the grouping concept for counts.

    Grouping without any relation tying the counted concept to the group
    ("rivers per region") gets an implicit containment link.
    """
    tokens = g.tokens
    for t in tokens:
        if t.surface.lower() in ("per", "each", "every"):
            for m in aset.mentions:
                if m.kind == CONCEPT and m.span[0] > t.index and m.span[0] - t.index <= 2:
                    aset.group_by = m
                    break
            if aset.group_by is not None:
                break
    group = aset.group_by
    if group is None:
        return
    linked = any(group in (l.arg1, l.arg2) for l in aset.spatial_links)
    if not linked:
        counted = next(
            (m for m in aset.mentions if m.kind == CONCEPT and m is not group), None
        )
        if counted is not None:
            aset.spatial_links.append(
                SpatialLink(GEOF.sfWithin, counted, group, group.anchor)
            )
            aset.note(
                f"grouping by {group.variable} without an explicit relation; "
                f"implicit containment {counted.variable} within {group.variable} added"
            )


def annotate_question(g: DepGraph, store: TripleStore, classifier=None) -> AnnotationSet:
    """Run the full identifier cascade over a parsed question."""
    aset = AnnotationSet()
    ontology = store.ontology
    identify_instances(g, store, aset)
    identify_concepts(g, ontology, aset)
    consolidate(aset)
    identify_properties(g, ontology, aset)
    identify_comparatives(g, ontology, aset)
    identify_spatial_relations(g, aset)
    solve_numerics(g, ontology, aset)
    solve_conjunctions(g, aset)
    identify_temporal(g, aset)
    detect_group_by(g, aset)
    validate_annotations(aset)
    identify_return_type(g, aset, classifier)
    return aset
