"""Tokenization, POS tagging and the built-in heuristic dependency parser.

The parser is a deterministic rule cascade tuned for the question grammar of
this domain (imperatives, noun phrases, prepositional attachment,
coordination). CoNLL-U ingestion lets any external parser replace it.
The dependency label inventory is documented in docs/dependencies.md.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .strings import lemma as noun_lemma
from .terms import GeoAskError

NOUN, PROPN, VERB, ADJ, ADV, ADP, NUM, DET, CONJ, PUNCT, OTHER = (
    "NOUN", "PROPN", "VERB", "ADJ", "ADV", "ADP", "NUM", "DET", "CONJ", "PUNCT", "OTHER",
)


class EmptyQuestionError(GeoAskError):
    pass


class ConlluError(GeoAskError):
    pass


@dataclass(frozen=True)
class Token:
    index: int
    surface: str
    lemma: str
    pos: str
    char_span: tuple[int, int]  # UTF-8 byte offsets into the question


@dataclass
class DepGraph:
    tokens: list[Token]
    edges: list[tuple[int, int, str]]  # (head, dependent, label)
    root: int

    def head_of(self, i: int) -> int | None:
        for head, dep, _ in self.edges:
            if dep == i:
                return head
        return None

    def label_of(self, i: int) -> str | None:
        for _, dep, label in self.edges:
            if dep == i:
                return label
        return None

    def children(self, i: int) -> list[int]:
        return [dep for head, dep, _ in self.edges if head == i]

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {t.index: [] for t in self.tokens}
        for head, dep, _ in self.edges:
            adj[head].append(dep)
            adj[dep].append(head)
        return adj

    def validate(self):
        n = len(self.tokens)
        if not (0 <= self.root < n):
            raise ConlluError(f"root index {self.root} out of range")
        heads: dict[int, int] = {}
        for head, dep, _ in self.edges:
            if dep in heads:
                raise ConlluError(f"token {dep} has multiple heads")
            if not (0 <= head < n and 0 <= dep < n):
                raise ConlluError("edge index out of range")
            heads[dep] = head
        if self.root in heads:
            raise ConlluError("root token has a head")
        if len(heads) != n - 1:
            missing = [i for i in range(n) if i != self.root and i not in heads]
            raise ConlluError(f"tokens without a head: {missing}")
        for start in range(n):
            seen, cur = set(), start
            while cur != self.root:
                if cur in seen:
                    raise ConlluError(f"cycle through token {cur}")
                seen.add(cur)
                cur = heads[cur]


# -- lexicons ----------------------------------------------------------------

DETERMINERS = {"the", "a", "an", "all", "every", "each", "this", "that", "these", "those", "some", "any", "no"}
ADPOSITIONS = {
    "in", "of", "on", "at", "from", "with", "within", "near", "by", "to", "between",
    "before", "after", "during", "under", "over", "above", "below", "across",
    "along", "around", "inside", "outside", "than", "per", "through",
}
CONJUNCTIONS = {"and", "or"}
PRONOUNS = {"me", "us", "it", "them", "i", "we", "you", "they", "there"}
WH_WORDS = {"what", "which", "where", "who", "when", "how", "whose"}
VERBS = {
    "show", "give", "list", "find", "display", "return", "get", "fetch", "retrieve",
    "count", "tell", "name", "is", "are", "was", "were", "be", "been", "do", "does",
    "did", "have", "has", "had", "can", "could", "taken", "located", "situated",
    "captured", "acquired", "having", "cross", "crosses", "crossing", "contain",
    "contains", "containing", "intersect", "intersects", "intersecting", "flow",
    "flows", "exist", "exists",
}
ADVERBS = {"less", "more", "most", "least", "very", "away", "not", "exactly", "about", "around", "approximately"}
ADJECTIVES = {
    "large", "largest", "larger", "small", "smallest", "smaller", "long", "longest",
    "longer", "short", "shortest", "shorter", "big", "biggest", "bigger", "high",
    "highest", "higher", "low", "lowest", "lower", "many", "few", "fewest", "populous",
    "deep", "deepest", "wide", "widest", "late", "latest", "recent", "new", "newest",
    "old", "oldest", "optical",
}
MONTHS = {
    "january": 1, "february": 2, "march": 3, "april": 4, "may": 5, "june": 6,
    "july": 7, "august": 8, "september": 9, "october": 10, "november": 11, "december": 12,
}
SEASONS = {"spring": (3, 6), "summer": (6, 9), "autumn": (9, 12), "fall": (9, 12), "winter": (12, 3)}
NUMBER_WORDS = {
    "zero": 0, "one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6,
    "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11, "twelve": 12,
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50, "sixty": 60,
    "seventy": 70, "eighty": 80, "ninety": 90, "hundred": 100, "thousand": 1000,
}
UNIT_TOKENS = {
    "km": "km", "kilometre": "km", "kilometres": "km", "kilometer": "km", "kilometers": "km",
    "m": "m", "metre": "m", "metres": "m", "meter": "m", "meters": "m",
    "%": "%", "percent": "%",
}

_DIGITS_RE = re.compile(r"^\d+(?:\.\d+)?$")
_YEAR_RE = re.compile(r"^(19|20)\d\d$")
_TOKEN_RE = re.compile(r"\d+(?:\.\d+)?|[A-Za-z][A-Za-z0-9\-]*|%|[^\sA-Za-z0-9]")


def numeric_value(token: Token) -> float | None:
    if _DIGITS_RE.match(token.surface):
        return float(token.surface)
    return NUMBER_WORDS.get(token.surface.lower())


def is_year(token: Token) -> bool:
    return bool(_YEAR_RE.match(token.surface))


def _tag(surface: str, position: int) -> str:
    low = surface.lower()
    if all(not c.isalnum() for c in surface) and surface != "%":
        return PUNCT
    if _DIGITS_RE.match(surface) or low in NUMBER_WORDS:
        return NUM
    if low in UNIT_TOKENS or low in MONTHS or low in SEASONS:
        return NOUN
    if low in DETERMINERS:
        return DET
    if low in CONJUNCTIONS:
        return CONJ
    if low in ADPOSITIONS:
        return ADP
    if low in PRONOUNS or low in WH_WORDS:
        return OTHER
    if low in VERBS:
        return VERB
    if low in ADVERBS or (low.endswith("ly") and len(low) > 3):
        return ADV
    if low in ADJECTIVES:
        return ADJ
    if position > 0 and surface[0].isupper():
        return PROPN
    if surface.isupper() and len(surface) >= 2:
        return PROPN
    return NOUN


def tokenize_and_tag(question: str) -> list[Token]:
    """Tokens covering all non-whitespace text; '2km'/'10%' split NUM + unit."""
    if not question or not question.strip():
        raise EmptyQuestionError("question is empty")
    tokens: list[Token] = []
    byte_of = [len(question[:i].encode("utf-8")) for i in range(len(question) + 1)]
    for m in _TOKEN_RE.finditer(question):
        surface = m.group()
        index = len(tokens)
        pos = _tag(surface, index)
        if pos in (NOUN, PROPN):
            lem = noun_lemma(surface)
        else:
            lem = surface.lower()
        tokens.append(Token(index, surface, lem, pos, (byte_of[m.start()], byte_of[m.end()])))
    if not tokens:
        raise EmptyQuestionError("question has no tokens")
    return tokens


# -- heuristic parser --------------------------------------------------------

_NOMINAL = (NOUN, PROPN)
_RUN_POS = (DET, ADJ, NUM, NOUN, PROPN)


def _np_runs(tokens: list[Token]) -> list[tuple[int, int, int]]:
    """Maximal (start, end, head) runs of DET/ADJ/NUM/NOUN/PROPN with a nominal head."""
    runs = []
    i = 0
    n = len(tokens)
    while i < n:
        if tokens[i].pos in _RUN_POS:
            j = i
            while j + 1 < n and tokens[j + 1].pos in _RUN_POS:
                j += 1
            nominals = [k for k in range(i, j + 1) if tokens[k].pos in _NOMINAL]
            if nominals:
                runs.append((i, j, nominals[-1]))
            i = j + 1
        else:
            i += 1
    return runs


def parse_dependencies(tokens: list[Token]) -> DepGraph:
    """Deterministic rule-cascade parse; always yields a valid single-root tree."""
    n = len(tokens)
    heads: list[int | None] = [None] * n
    labels: list[str] = ["dep"] * n

    verb_idx = [t.index for t in tokens if t.pos == VERB]
    nominal_idx = [t.index for t in tokens if t.pos in _NOMINAL]
    root = verb_idx[0] if verb_idx else (nominal_idx[0] if nominal_idx else 0)

    runs = _np_runs(tokens)
    run_heads = [h for _, _, h in runs]
    run_of = {}
    for start, end, head in runs:
        for k in range(start, end + 1):
            run_of[k] = (start, end, head)

    def set_head(dep: int, head: int, label: str):
        if dep != head and heads[dep] is None and dep != root:
            heads[dep] = head
            labels[dep] = label

    # intra-run structure: modifiers lean on the next nominal, nominals compound
    # onto the run head
    for start, end, head in runs:
        for k in range(start, end + 1):
            if k == head:
                continue
            tok = tokens[k]
            if tok.pos == DET:
                set_head(k, head, "det")
            elif tok.pos in (ADJ, NUM):
                nxt = next((m for m in range(k + 1, end + 1) if tokens[m].pos in _NOMINAL), head)
                set_head(k, nxt, "amod" if tok.pos == ADJ else "nummod")
            elif tok.pos in _NOMINAL:
                set_head(k, head, "compound")

    # adpositions attach their following noun phrase to the preceding head
    for t in tokens:
        if t.pos != ADP:
            continue
        nxt_head = next((h for s, _, h in runs if s > t.index), None)
        if nxt_head is None:
            prev = next((h for h in reversed(run_heads) if h < t.index), root)
            set_head(t.index, prev, "case")
            continue
        between = range(t.index + 1, run_of[nxt_head][0])
        if any(tokens[k].pos not in (ADV, ADP, DET) for k in between):
            prev = next((h for h in reversed(run_heads) if h < t.index), root)
            set_head(t.index, prev, "case")
            continue
        set_head(t.index, nxt_head, "case")
        anchor = next(
            (i for i in range(t.index - 1, -1, -1) if tokens[i].pos == VERB or i in run_heads),
            None,
        )
        if anchor is not None and heads[nxt_head] is None:
            set_head(nxt_head, anchor, "nmod")

    # coordination: X and Y => conj edge from X to Y
    for t in tokens:
        if t.pos != CONJ:
            continue
        left = next((h for h in reversed(run_heads) if h < t.index), None)
        right = next((h for h in run_heads if h > t.index), None)
        if left is not None and right is not None:
            set_head(right, left, f"conj:{t.lemma}")
            set_head(t.index, right, "cc")
        elif left is not None:
            set_head(t.index, left, "cc")

    # leftovers: verbs under nouns (participles), adverbs forward, rest to root
    for t in tokens:
        i = t.index
        if heads[i] is not None or i == root:
            continue
        if t.pos == VERB:
            prev_nom = next((k for k in range(i - 1, -1, -1) if tokens[k].pos in _NOMINAL), None)
            set_head(i, prev_nom if prev_nom is not None else root, "acl" if prev_nom is not None else "dep")
        elif t.pos == ADV:
            nxt = next((k for k in range(i + 1, min(i + 4, n)) if tokens[k].pos in (NUM, ADJ, VERB)), None)
            if nxt is not None:
                set_head(i, nxt, "advmod")
            else:
                prev = next((h for h in reversed(run_heads) if h < i), root)
                set_head(i, prev, "advmod")
        elif t.pos == PUNCT:
            set_head(i, root, "punct")
        elif t.pos == OTHER:
            prev_verb = next((k for k in range(i - 1, max(i - 2, -1), -1) if tokens[k].pos == VERB), None)
            set_head(i, prev_verb if prev_verb is not None else root, "obj" if prev_verb is not None else "dep")
        elif t.pos in _NOMINAL:
            prev_verb = next((k for k in range(i - 1, -1, -1) if tokens[k].pos == VERB), None)
            if prev_verb is not None:
                set_head(i, prev_verb, "obj")
            else:
                prev_head = next((h for h in reversed(run_heads) if h < i), None)
                if prev_head is not None:
                    set_head(i, prev_head, "nmod")
                else:
                    set_head(i, root, "nsubj" if i < root else "dep")
        else:
            set_head(i, root, "dep")

    for i in range(n):
        if i != root and heads[i] is None:
            heads[i] = root

    # cycle fixup keeps the invariants for arbitrary input
    for start in range(n):
        seen = set()
        cur = start
        while cur != root and heads[cur] is not None:
            if cur in seen:
                heads[cur] = root
                labels[cur] = "dep"
                break
            seen.add(cur)
            cur = heads[cur]

    edges = [(heads[i], i, labels[i]) for i in range(n) if i != root]
    graph = DepGraph(list(tokens), edges, root)
    graph.validate()
    return graph


def parse_question(question: str) -> DepGraph:
    return parse_dependencies(tokenize_and_tag(question))


def tree_distance(g: DepGraph, i: int, j: int) -> int:
    """Edges on the undirected tree path between tokens i and j."""
    n = len(g.tokens)
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"token index out of range: {i}, {j}")
    if i == j:
        return 0
    adj = g.adjacency()
    frontier = [i]
    dist = {i: 0}
    while frontier:
        nxt = []
        for node in frontier:
            for nb in adj[node]:
                if nb not in dist:
                    dist[nb] = dist[node] + 1
                    if nb == j:
                        return dist[nb]
                    nxt.append(nb)
        frontier = nxt
    raise GeoAskError(f"tokens {i} and {j} are not connected")


# -- CoNLL-U -----------------------------------------------------------------

_UPOS_MAP = {
    "NOUN": NOUN, "PROPN": PROPN, "VERB": VERB, "AUX": VERB, "ADJ": ADJ, "ADV": ADV,
    "ADP": ADP, "NUM": NUM, "DET": DET, "CCONJ": CONJ, "SCONJ": ADP, "PUNCT": PUNCT,
    "PRON": OTHER, "PART": ADP, "SYM": NOUN, "INTJ": OTHER, "X": OTHER,
}
_COARSE_TO_UPOS = {NOUN: "NOUN", PROPN: "PROPN", VERB: "VERB", ADJ: "ADJ", ADV: "ADV",
                   ADP: "ADP", NUM: "NUM", DET: "DET", CONJ: "CCONJ", PUNCT: "PUNCT", OTHER: "X"}


def ingest_conllu(text: str) -> DepGraph:
    """Build a DepGraph from one CoNLL-U sentence; strict about well-formedness."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluError(f"line {lineno}: expected 10 tab-separated columns, got {len(cols)}")
        if "-" in cols[0] or "." in cols[0]:
            raise ConlluError(f"line {lineno}: range/empty-node ids are not supported")
        try:
            idx = int(cols[0])
            head = int(cols[6])
        except ValueError as exc:
            raise ConlluError(f"line {lineno}: non-numeric ID or HEAD") from exc
        rows.append((lineno, idx, cols, head))
    if not rows:
        raise ConlluError("no token lines")
    for pos_in_list, (lineno, idx, _, _) in enumerate(rows, start=1):
        if idx != pos_in_list:
            raise ConlluError(f"line {lineno}: token ids must be 1..n without gaps")
    tokens: list[Token] = []
    byte_cursor = 0
    roots = []
    edges = []
    for _, idx, cols, head in rows:
        surface = cols[1]
        lemma = cols[2] if cols[2] != "_" else surface.lower()
        pos = _UPOS_MAP.get(cols[3], OTHER)
        start = byte_cursor
        end = start + len(surface.encode("utf-8"))
        byte_cursor = end + 1
        tokens.append(Token(idx - 1, surface, lemma, pos, (start, end)))
        if head == 0:
            roots.append(idx - 1)
        else:
            edges.append((head - 1, idx - 1, cols[7] if cols[7] != "_" else "dep"))
    if len(roots) != 1:
        raise ConlluError(f"expected exactly one root, found {len(roots)}")
    graph = DepGraph(tokens, edges, roots[0])
    graph.validate()
    return graph


def export_conllu(g: DepGraph) -> str:
    """Canonical 10-column CoNLL-U text for the graph."""
    head_of = {dep: (head, label) for head, dep, label in g.edges}
    lines = []
    for t in g.tokens:
        head, label = head_of.get(t.index, (None, "root"))
        lines.append(
            "\t".join(
                [
                    str(t.index + 1),
                    t.surface,
                    t.lemma,
                    _COARSE_TO_UPOS.get(t.pos, "X"),
                    "_",
                    "_",
                    str(head + 1 if head is not None else 0),
                    label,
                    "_",
                    "_",
                ]
            )
        )
    return "\n".join(lines) + "\n"
