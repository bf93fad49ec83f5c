"""Word vector store: loading, cosine similarity, sentence averages and
nearest-neighbour queries.

Vectors live in a plain text format, one record per line:

    word v1 v2 ... vd

single-space separated, UTF-8, no header. All arithmetic is float64.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence

import numpy as np


class EmbeddingStore:
    """Immutable word -> vector table with a fixed dimension.

    Lookups are case-sensitive exact matches; a missing word is reported
    as ``None``, never as a default vector.
    """

    def __init__(self, entries: Mapping[str, Sequence[float]]):
        if not entries:
            raise ValueError("embedding store needs at least one entry")
        self._entries: dict[str, np.ndarray] = {}
        dimension = None
        for word, vec in entries.items():
            arr = np.asarray(vec, dtype=np.float64)
            if arr.ndim != 1:
                raise ValueError(f"vector for {word!r} is not one-dimensional")
            if dimension is None:
                dimension = arr.shape[0]
            elif arr.shape[0] != dimension:
                raise ValueError(
                    f"vector for {word!r} has {arr.shape[0]} components, expected {dimension}"
                )
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"vector for {word!r} has non-finite components")
            self._entries[word] = arr
        self._dimension: int = int(dimension)
        self._words: list[str] = list(self._entries)
        self._matrix = np.stack([self._entries[w] for w in self._words])
        self._norms = np.linalg.norm(self._matrix, axis=1)

    @property
    def dimension(self) -> int:
        return self._dimension

    @property
    def words(self) -> list[str]:
        return list(self._words)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, word: str) -> bool:
        return word in self._entries

    def lookup(self, word: str) -> np.ndarray | None:
        """Return the stored vector for ``word``, or None if absent."""
        vec = self._entries.get(word)
        return None if vec is None else vec.copy()

    def scaled(self, factor: float) -> "EmbeddingStore":
        """A new store with every vector multiplied by ``factor``."""
        return EmbeddingStore({w: v * factor for w, v in self._entries.items()})

    def average_vector(self, tokens: Sequence[str]) -> np.ndarray:
        """Component-wise mean of the vectors of the tokens found in the store.

        Tokens absent from the store are skipped; the divisor is the number
        of found tokens. Raises if no token is found at all.
        """
        if not tokens:
            raise ValueError("cannot average an empty token sequence")
        found = [self._entries[t] for t in tokens if t in self._entries]
        if not found:
            raise ValueError("no token of the sequence is in the store")
        return np.sum(found, axis=0) / len(found)

    def nearest_neighbors(
        self, query: Sequence[float], k: int, exclude: Iterable[str] = ()
    ) -> list[str]:
        """The k stored words with highest cosine to ``query``, descending.

        Words in ``exclude`` and zero-norm entries are ineligible. Equal
        cosines are broken by lexicographic word order.
        """
        if k < 1:
            raise ValueError("k must be at least 1")
        q = np.asarray(query, dtype=np.float64)
        if q.shape != (self._dimension,):
            raise ValueError(f"query has shape {q.shape}, expected ({self._dimension},)")
        qnorm = np.linalg.norm(q)
        if qnorm == 0.0:
            raise ValueError("query vector has zero norm")
        excluded = set(exclude)
        sims = self._matrix @ q
        ranked: list[tuple[float, str]] = []
        for i, word in enumerate(self._words):
            if word in excluded or self._norms[i] == 0.0:
                continue
            c = sims[i] / (self._norms[i] * qnorm)
            ranked.append((-min(1.0, max(-1.0, c)), word))
        if len(ranked) < k:
            raise ValueError(f"store has only {len(ranked)} eligible words, need {k}")
        ranked.sort()
        return [word for _, word in ranked[:k]]


def load_embeddings(path: str) -> EmbeddingStore:
    """Load a text embedding file; on duplicate words the last line wins."""
    entries: dict[str, np.ndarray] = {}
    dimension = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.rstrip("\n").split(" ")
            if len(fields) < 2 or not fields[0]:
                raise ValueError(f"{path}: line {lineno}: expected 'word v1 ... vd'")
            word = fields[0]
            try:
                vec = np.array([float(x) for x in fields[1:]], dtype=np.float64)
            except ValueError:
                raise ValueError(
                    f"{path}: line {lineno}: non-numeric vector component"
                ) from None
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"{path}: line {lineno}: non-finite vector component")
            if dimension is None:
                dimension = vec.shape[0]
            elif vec.shape[0] != dimension:
                raise ValueError(
                    f"{path}: line {lineno}: dimension {vec.shape[0]} != {dimension}"
                )
            entries[word] = vec
    if not entries:
        raise ValueError(f"{path}: empty embedding file")
    return EmbeddingStore(entries)


def cosine(a: Sequence[float], b: Sequence[float]) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1]."""
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape:
        raise ValueError(f"length mismatch: {va.shape} vs {vb.shape}")
    na = np.linalg.norm(va)
    nb = np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine undefined for a zero-norm vector")
    return float(min(1.0, max(-1.0, float(va @ vb) / (na * nb))))
