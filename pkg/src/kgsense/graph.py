"""Triple store over a knowledge graph with one-hop neighbour queries.

Triples come from TSV files (``subject TAB predicate TAB object``); the
neighbourhood of an entity is undirected (subject and object positions
both count) and never contains the entity itself. Only first-hop
neighbours are ever traversed.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections.abc import Iterable

from .embeddings import EmbeddingStore, cosine


@dataclass(frozen=True)
class Triple:
    subject: str
    predicate: str
    object: str

    def __post_init__(self):
        if not (self.subject and self.predicate and self.object):
            raise ValueError("triple fields must be nonempty")


class KnowledgeGraph:
    """Immutable triple collection with a precomputed adjacency map."""

    def __init__(self, triples: Iterable[Triple]):
        self._triples: tuple[Triple, ...] = tuple(triples)
        adjacency: dict[str, set[str]] = {}
        for t in self._triples:
            if t.subject != t.object:
                adjacency.setdefault(t.subject, set()).add(t.object)
                adjacency.setdefault(t.object, set()).add(t.subject)
        self._adjacency = {e: frozenset(ns) for e, ns in adjacency.items()}

    @property
    def triples(self) -> tuple[Triple, ...]:
        return self._triples

    @property
    def entities(self) -> frozenset[str]:
        return frozenset(self._adjacency)

    def one_hop_neighbors(self, entity: str) -> frozenset[str]:
        """All entities one edge away from ``entity``; empty if unknown."""
        return self._adjacency.get(entity, frozenset())


def _normalize_entity(name: str) -> str:
    # multi-word KG entities are matched against single tokens
    return name.replace(" ", "_")


def load_triples(path: str) -> KnowledgeGraph:
    """Load a TSV triple file; ``#`` lines are comments, blank lines skipped."""
    triples: list[Triple] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.rstrip("\n")
            if not stripped.strip() or stripped.startswith("#"):
                continue
            fields = stripped.split("\t")
            if len(fields) != 3:
                raise ValueError(
                    f"{path}: line {lineno}: expected 3 tab-separated fields, got {len(fields)}"
                )
            subject, predicate, obj = fields
            triples.append(
                Triple(_normalize_entity(subject), predicate, _normalize_entity(obj))
            )
    return KnowledgeGraph(triples)


def top_k_extensions(
    graph: KnowledgeGraph, store: EmbeddingStore, entity: str, k: int = 3
) -> list[str]:
    """The k one-hop neighbours of ``entity`` most similar to it.

    Neighbours missing from the embedding store are ignored; candidates are
    ranked by cosine to the entity's own vector, descending, with equal
    scores broken lexicographically. Returns [] when the entity itself has
    no vector or nothing qualifies.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    entity_vec = store.lookup(entity)
    if entity_vec is None or not entity_vec.any():
        return []
    scored: list[tuple[float, str]] = []
    for neighbor in graph.one_hop_neighbors(entity):
        if neighbor == entity:
            continue
        vec = store.lookup(neighbor)
        if vec is None or not vec.any():
            continue
        scored.append((-cosine(vec, entity_vec), neighbor))
    scored.sort()
    return [w for _, w in scored[:k]]
