"""Text normalization and character-trigram similarity used for all KG lookups."""

from __future__ import annotations

import re
import unicodedata
from collections import defaultdict

NGRAM_ORDER = 3
INSTANCE_THRESHOLD = 0.45
SYNONYM_THRESHOLD = 0.6

_PUNCT = re.compile(r"[-_/,.'’]+")
_WS = re.compile(r"\s+")


def normalize(text: str) -> str:
    """Lowercase, fold diacritics, map separator punctuation to space, collapse whitespace."""
    text = unicodedata.normalize("NFD", text.lower())
    text = "".join(c for c in text if not unicodedata.combining(c))
    text = _PUNCT.sub(" ", text)
    return _WS.sub(" ", text).strip()


def lemma(word: str) -> str:
    """Singular form via a small English plural-stripping table."""
    w = word.lower()
    if len(w) > 3 and w.endswith("ies"):
        return w[:-3] + "y"
    if len(w) > 3 and w.endswith(("ses", "xes", "zes", "ches", "shes")):
        return w[:-2]
    if len(w) > 2 and w.endswith("s") and not w.endswith("ss"):
        return w[:-1]
    return w


def lemma_phrase(phrase: str) -> str:
    return " ".join(lemma(w) for w in normalize(phrase).split())


def trigrams(text: str) -> frozenset[str]:
    """Trigram set of the normalized text, padded with boundary markers."""
    pad = "#" * (NGRAM_ORDER - 1)
    padded = pad + normalize(text) + pad
    return frozenset(padded[i : i + NGRAM_ORDER] for i in range(len(padded) - NGRAM_ORDER + 1))


def similarity(a: str, b: str) -> float:
    """Jaccard coefficient over character trigrams of the normalized strings."""
    ga, gb = trigrams(a), trigrams(b)
    if not ga or not gb:
        return 0.0
    inter = len(ga & gb)
    if inter == 0:
        return 0.0
    return inter / (len(ga) + len(gb) - inter)


class NGramIndex:
    """Inverted trigram index over a set of labelled entries.

    Entries are (key, text) pairs; `search` returns ranked (key, score) with
    deterministic ordering (score descending, then key ascending).
    """

    def __init__(self):
        self._entries: list[tuple[object, str, frozenset[str]]] = []
        self._by_gram: dict[str, set[int]] = defaultdict(set)

    def add(self, key, text: str):
        grams = trigrams(text)
        idx = len(self._entries)
        self._entries.append((key, text, grams))
        for g in grams:
            self._by_gram[g].add(idx)

    def __len__(self):
        return len(self._entries)

    def texts(self):
        return [(key, text) for key, text, _ in self._entries]

    def search(self, text: str, k: int, threshold: float = 0.0) -> list[tuple[object, float]]:
        grams = trigrams(text)
        candidates: set[int] = set()
        for g in grams:
            candidates |= self._by_gram.get(g, set())
        best: dict[object, float] = {}
        for idx in candidates:
            key, _, entry_grams = self._entries[idx]
            inter = len(grams & entry_grams)
            if inter == 0:
                continue
            score = inter / (len(grams) + len(entry_grams) - inter)
            if score >= threshold and score > best.get(key, -1.0):
                best[key] = score
        ranked = sorted(best.items(), key=lambda kv: (-kv[1], str(kv[0])))
        return ranked[:k]
