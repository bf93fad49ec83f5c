"""Pick one extension per entity against the sentence average vector and
fuse it into the sentence as a parenthesised note.

The chosen extension is the candidate whose vector has maximal cosine to
the average of all in-vocabulary sentence token vectors. Fusion inserts
`` (extension)`` right after the annotated token and changes nothing else,
so stripping the notes recovers the original text byte-exactly.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from collections.abc import Sequence

import numpy as np

from .embeddings import EmbeddingStore, cosine
from .extract import CentralEntity, TaggedToken, extract, tagged_from_pairs
from .graph import KnowledgeGraph, top_k_extensions

# a fused note: one space, an open paren, a bare token, a close paren
NOTE_RE = re.compile(r" \(([^()\s]+)\)")


@dataclass(frozen=True)
class SenseSelection:
    """Outcome of disambiguating one entity; ``chosen`` may be None."""

    entity: CentralEntity
    chosen: str | None
    score: float | None


@dataclass(frozen=True)
class EnrichedSentence:
    tokens: tuple[str, ...]
    annotations: dict[int, str]
    rendered: str


def select_extension(
    entity: CentralEntity, v_avg: np.ndarray, store: EmbeddingStore
) -> SenseSelection:
    """Argmax-cosine candidate against the sentence average vector.

    Candidates missing from the store are skipped; exact score ties go to
    the lexicographically smaller word. No candidates -> chosen is None.
    """
    best: tuple[float, str] | None = None
    for candidate in entity.candidates:
        vec = store.lookup(candidate)
        if vec is None or not vec.any():
            continue
        key = (-cosine(vec, v_avg), candidate)
        if best is None or key < best:
            best = key
    if best is None:
        return SenseSelection(entity, None, None)
    return SenseSelection(entity, best[1], -best[0])


def fuse(
    text: str, tagged: Sequence[TaggedToken], selections: Sequence[SenseSelection]
) -> EnrichedSentence:
    """Insert `` (chosen)`` after each selected entity's token in ``text``."""
    annotations: dict[int, str] = {}
    for sel in selections:
        if sel.chosen is None:
            continue
        pos = sel.entity.position
        if pos < 0 or pos >= len(tagged):
            raise ValueError(f"selection position {pos} out of range")
        if pos in annotations:
            raise ValueError(f"duplicate selection position {pos}")
        annotations[pos] = sel.chosen
    pieces: list[str] = []
    cursor = 0
    for pos in sorted(annotations):
        end = tagged[pos].end
        if end < 0:
            raise ValueError("tokens carry no offsets; cannot splice annotations")
        pieces.append(text[cursor:end])
        pieces.append(f" ({annotations[pos]})")
        cursor = end
    pieces.append(text[cursor:])
    return EnrichedSentence(
        tokens=tuple(tok.surface for tok in tagged),
        annotations=annotations,
        rendered="".join(pieces),
    )


def strip_notes(text: str) -> str:
    """Remove every `` (extension)`` note insertion."""
    return NOTE_RE.sub("", text)


class Enricher:
    """Sentence enrichment pipeline over loaded resources.

    Stateless per call; safe to share across threads. ``min_score`` is an
    optional floor below which a selection is dropped.
    """

    def __init__(
        self,
        store: EmbeddingStore,
        graph: KnowledgeGraph,
        lexicon: dict[str, str],
        top_k: int = 3,
        min_score: float | None = None,
    ):
        self.store = store
        self.graph = graph
        self.lexicon = lexicon
        self.top_k = top_k
        self.min_score = min_score

    def enrich(self, sentence: str) -> EnrichedSentence:
        tagged, entities = extract(
            sentence, self.lexicon, self.graph, self.store, top_k=self.top_k
        )
        return self._annotate(sentence, tagged, entities)

    def enrich_pretagged(self, pairs: Sequence[tuple[str, str]]) -> EnrichedSentence:
        """Enrich a sentence given externally supplied (surface, tag) pairs."""
        text, tagged = tagged_from_pairs(pairs)
        entities = [
            CentralEntity(
                position=i,
                normalized=tok.normalized,
                candidates=top_k_extensions(self.graph, self.store, tok.normalized, k=self.top_k),
            )
            for i, tok in enumerate(tagged)
            if tok.is_noun
        ]
        return self._annotate(text, tagged, entities)

    def enrich_batch(self, sentences: Sequence[str], workers: int = 1) -> list[EnrichedSentence]:
        """Enrich many sentences; output order always equals input order."""
        if workers <= 1 or len(sentences) <= 1:
            return [self.enrich(s) for s in sentences]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(self.enrich, sentences))

    def _annotate(
        self,
        text: str,
        tagged: Sequence[TaggedToken],
        entities: Sequence[CentralEntity],
    ) -> EnrichedSentence:
        entities = self._without_noted(text, tagged, entities)
        selections: list[SenseSelection] = []
        if entities:
            normalized = [tok.normalized for tok in tagged]
            try:
                v_avg = self.store.average_vector(normalized)
            except ValueError:
                v_avg = None  # fully out-of-vocabulary sentence
            if v_avg is not None:
                for entity in entities:
                    sel = select_extension(entity, v_avg, self.store)
                    if sel.chosen is None:
                        continue
                    if self.min_score is not None and sel.score < self.min_score:
                        continue
                    selections.append(sel)
        return fuse(text, tagged, selections)

    @staticmethod
    def _without_noted(
        text: str,
        tagged: Sequence[TaggedToken],
        entities: Sequence[CentralEntity],
    ) -> list[CentralEntity]:
        """Drop entities inside an existing note or already carrying one."""
        spans = [(m.start(), m.end()) for m in NOTE_RE.finditer(text)]
        if not spans:
            return list(entities)
        kept = []
        for entity in entities:
            tok = tagged[entity.position]
            inside = any(s <= tok.start and tok.end <= e for s, e in spans)
            annotated = any(s == tok.end for s, e in spans)
            if not inside and not annotated:
                kept.append(entity)
        return kept
