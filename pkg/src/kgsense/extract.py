"""Tokenisation, lexicon-based POS tagging and central-entity detection.

A "central entity" is a noun token of the input sentence; for each one we
gather its highest-ranked knowledge-graph extension candidates. Tagging is
a plain lexicon lookup (word TAB tag file) with an ``UNK`` fallback, which
keeps the stage deterministic and dependency-free. Pre-tagged input in a
CoNLL-like layout (one ``surface TAB tag`` per line, blank line between
sentences) is accepted as an alternative front end.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from collections.abc import Iterator, Sequence

from .embeddings import EmbeddingStore
from .graph import KnowledgeGraph, top_k_extensions

UNKNOWN_TAG = "UNK"

_PUNCT = set(string.punctuation)

# nouns whose surface looks plural but is not, or resists the suffix rules
_PLURAL_UNCHANGED = {"series", "species", "news"}
_PLURAL_IRREGULAR = {"buses": "bus", "gases": "gas", "lenses": "lens"}


@dataclass(frozen=True)
class TaggedToken:
    """A surface token with its POS tag and lookup form.

    ``start``/``end`` are character offsets into the sentence the token
    came from, used later to splice annotations into the original text.
    """

    surface: str
    tag: str
    normalized: str
    start: int = -1
    end: int = -1

    @property
    def is_noun(self) -> bool:
        return self.tag.startswith("NN")


@dataclass
class CentralEntity:
    """A noun occurrence plus its ranked extension candidates (at most k)."""

    position: int
    normalized: str
    candidates: list[str] = field(default_factory=list)


def tokenize(text: str) -> list[tuple[str, int, int]]:
    """Split on whitespace, then detach leading/trailing punctuation.

    Returns (surface, start, end) triples; offsets index into ``text``.
    """
    tokens: list[tuple[str, int, int]] = []
    pos = 0
    for chunk in text.split():
        start = text.index(chunk, pos)
        pos = start + len(chunk)
        lo, hi = 0, len(chunk)
        leading: list[tuple[str, int, int]] = []
        trailing: list[tuple[str, int, int]] = []
        while lo < hi and chunk[lo] in _PUNCT:
            leading.append((chunk[lo], start + lo, start + lo + 1))
            lo += 1
        while hi > lo and chunk[hi - 1] in _PUNCT:
            trailing.append((chunk[hi - 1], start + hi - 1, start + hi))
            hi -= 1
        tokens.extend(leading)
        if hi > lo:
            tokens.append((chunk[lo:hi], start + lo, start + hi))
        tokens.extend(reversed(trailing))
    return tokens


def singularize(word: str) -> str:
    """Crude plural stripping: cities->city, apples->apple, markets->market."""
    if word in _PLURAL_UNCHANGED:
        return word
    if word in _PLURAL_IRREGULAR:
        return _PLURAL_IRREGULAR[word]
    if word.endswith("ies") and len(word) > 3:
        return word[:-3] + "y"
    if word.endswith(("sses", "xes", "zes", "ches", "shes")):
        return word[:-2]
    if word.endswith(("ss", "us", "is")):
        return word
    if word.endswith("s") and len(word) > 1:
        return word[:-1]
    return word


def normalize_token(surface: str, tag: str) -> str:
    """Lowercase; nouns additionally get their plural suffix stripped."""
    lowered = surface.lower()
    if tag.startswith("NN"):
        return singularize(lowered)
    return lowered


def load_lexicon(path: str) -> dict[str, str]:
    """Load a ``word TAB tag`` lexicon; later lines win on duplicates."""
    lexicon: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.rstrip("\n")
            if not stripped.strip():
                continue
            fields = stripped.split("\t")
            if len(fields) != 2 or not fields[0] or not fields[1]:
                raise ValueError(f"{path}: line {lineno}: expected 'word TAB tag'")
            lexicon[fields[0]] = fields[1]
    return lexicon


def tag_tokens(
    tokens: Sequence[str] | Sequence[tuple[str, int, int]],
    lexicon: dict[str, str],
) -> list[TaggedToken]:
    """Tag each token by lexicon lookup on its lowercased form, else UNK."""
    tagged: list[TaggedToken] = []
    for item in tokens:
        if isinstance(item, str):
            surface, start, end = item, -1, -1
        else:
            surface, start, end = item
        tag = lexicon.get(surface.lower(), UNKNOWN_TAG)
        tagged.append(TaggedToken(surface, tag, normalize_token(surface, tag), start, end))
    return tagged


def detect_entities(tagged: Sequence[TaggedToken]) -> list[int]:
    """Positions of noun tokens, left to right; every occurrence counts."""
    return [i for i, tok in enumerate(tagged) if tok.is_noun]


def extract(
    sentence: str,
    lexicon: dict[str, str],
    graph: KnowledgeGraph,
    store: EmbeddingStore,
    top_k: int = 3,
) -> tuple[list[TaggedToken], list[CentralEntity]]:
    """Tokenise + tag a sentence and collect extension candidates per noun.

    Entities whose candidate list comes back empty are retained; they pass
    through the rest of the pipeline unannotated.
    """
    tagged = tag_tokens(tokenize(sentence), lexicon)
    entities = [
        CentralEntity(
            position=i,
            normalized=tagged[i].normalized,
            candidates=top_k_extensions(graph, store, tagged[i].normalized, k=top_k),
        )
        for i in detect_entities(tagged)
    ]
    return tagged, entities


def read_pretagged(path: str) -> Iterator[list[tuple[str, str]]]:
    """Yield sentences from a pre-tagged file (surface TAB tag per line)."""
    sentence: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.rstrip("\n")
            if not stripped.strip():
                if sentence:
                    yield sentence
                    sentence = []
                continue
            fields = stripped.split("\t")
            if len(fields) != 2 or not fields[0] or not fields[1]:
                raise ValueError(f"{path}: line {lineno}: expected 'surface TAB tag'")
            sentence.append((fields[0], fields[1]))
    if sentence:
        yield sentence


def tagged_from_pairs(pairs: Sequence[tuple[str, str]]) -> tuple[str, list[TaggedToken]]:
    """Turn (surface, tag) pairs into tokens over a space-joined sentence."""
    text = " ".join(surface for surface, _ in pairs)
    tagged: list[TaggedToken] = []
    offset = 0
    for surface, tag in pairs:
        tagged.append(
            TaggedToken(surface, tag, normalize_token(surface, tag), offset, offset + len(surface))
        )
        offset += len(surface) + 1
    return text, tagged
