"""Word analogy accuracy (additive offset) and Spearman word similarity.

Analogy questions "a is to b like c is to d" are answered by the word
nearest in cosine to ``vec(b) - vec(a) + vec(c)``, excluding a, b and c.
Question tokens are lowercased before store lookup; questions with any
out-of-vocabulary slot are skipped and excluded from the denominators.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections.abc import Sequence

import numpy as np

from .embeddings import EmbeddingStore, cosine


@dataclass(frozen=True)
class AnalogyQuestion:
    a: str
    b: str
    c: str
    d: str
    category: str
    is_semantic: bool


@dataclass(frozen=True)
class SimilarityPair:
    w1: str
    w2: str
    gold: float


@dataclass(frozen=True)
class AnalogyScores:
    semantic: float | None
    syntactic: float | None
    average: float | None
    answered: int
    skipped: int


def load_analogies(path: str) -> list[AnalogyQuestion]:
    """Question file: ``: category`` headers, then 4-token question lines.

    Categories whose name starts with ``gram`` are syntactic, the rest
    semantic.
    """
    questions: list[AnalogyQuestion] = []
    category = ""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith(":"):
                category = stripped[1:].strip()
                continue
            tokens = stripped.split()
            if len(tokens) != 4:
                raise ValueError(
                    f"{path}: line {lineno}: expected 4 tokens, got {len(tokens)}"
                )
            questions.append(
                AnalogyQuestion(*tokens, category=category,
                                is_semantic=not category.startswith("gram"))
            )
    return questions


def answer_analogy(
    question: AnalogyQuestion, store: EmbeddingStore
) -> str | None:
    """Predicted d-word, or None when any slot is out of vocabulary."""
    a, b, c = question.a.lower(), question.b.lower(), question.c.lower()
    d = question.d.lower()
    vecs = [store.lookup(w) for w in (a, b, c)]
    if any(v is None for v in vecs) or d not in store:
        return None
    target = vecs[1] - vecs[0] + vecs[2]
    if not target.any():
        return ""  # degenerate offset, counted as answered but never correct
    return store.nearest_neighbors(target, k=1, exclude={a, b, c})[0]


def analogy_accuracy(
    questions: Sequence[AnalogyQuestion], store: EmbeddingStore
) -> AnalogyScores:
    """Percent correct per question family; average of the two families."""
    correct = {True: 0, False: 0}
    answered = {True: 0, False: 0}
    skipped = 0
    for question in questions:
        prediction = answer_analogy(question, store)
        if prediction is None:
            skipped += 1
            continue
        answered[question.is_semantic] += 1
        if prediction == question.d.lower():
            correct[question.is_semantic] += 1

    def pct(sem: bool) -> float | None:
        return 100.0 * correct[sem] / answered[sem] if answered[sem] else None

    semantic, syntactic = pct(True), pct(False)
    average = (
        (semantic + syntactic) / 2.0
        if semantic is not None and syntactic is not None
        else None
    )
    return AnalogyScores(semantic, syntactic, average,
                         answered[True] + answered[False], skipped)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the mean of their positions."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman_rho(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Pearson correlation of average-tie rank vectors."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape:
        raise ValueError(f"length mismatch: {xs.shape} vs {ys.shape}")
    if xs.size < 2:
        raise ValueError("need at least 2 observations")
    rx = _average_ranks(xs)
    ry = _average_ranks(ys)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    denom = np.sqrt((dx @ dx) * (dy @ dy))
    if denom == 0.0:
        raise ValueError("rank variance is zero; rho undefined")
    return float((dx @ dy) / denom)


def load_similarity(path: str) -> list[SimilarityPair]:
    """TSV word-pair file: ``w1 TAB w2 TAB score``."""
    pairs: list[SimilarityPair] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.rstrip("\n")
            if not stripped.strip():
                continue
            fields = stripped.split("\t")
            if len(fields) != 3:
                raise ValueError(
                    f"{path}: line {lineno}: expected 'w1 TAB w2 TAB score'"
                )
            try:
                gold = float(fields[2])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric score") from None
            pairs.append(SimilarityPair(fields[0], fields[1], gold))
    return pairs


def similarity_eval(
    pairs: Sequence[SimilarityPair], store: EmbeddingStore
) -> tuple[float, int]:
    """Spearman rho between gold scores and cosine, over covered pairs."""
    golds: list[float] = []
    cosines: list[float] = []
    for pair in pairs:
        v1 = store.lookup(pair.w1.lower())
        v2 = store.lookup(pair.w2.lower())
        if v1 is None or v2 is None:
            continue
        golds.append(pair.gold)
        cosines.append(cosine(v1, v2))
    if len(golds) < 2:
        raise ValueError(f"only {len(golds)} pairs covered; need at least 2")
    return spearman_rho(golds, cosines), len(golds)
