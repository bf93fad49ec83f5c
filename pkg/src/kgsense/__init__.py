"""Knowledge-graph sense annotation for sentences, plus a small
bidirectional language model for comparing enriched and raw corpora."""

from .embeddings import EmbeddingStore, cosine, load_embeddings
from .enrich import EnrichedSentence, Enricher, SenseSelection, fuse, select_extension, strip_notes
from .extract import CentralEntity, TaggedToken, detect_entities, extract, load_lexicon, tag_tokens, tokenize
from .graph import KnowledgeGraph, Triple, load_triples, top_k_extensions
from .lm import LmConfig, LmParameters, TrainTrace, bilstm_encode, conv1d_reduce, train
from .evaluate import AnalogyQuestion, SimilarityPair, analogy_accuracy, similarity_eval, spearman_rho

__all__ = [
    "EmbeddingStore", "cosine", "load_embeddings",
    "EnrichedSentence", "Enricher", "SenseSelection", "fuse", "select_extension", "strip_notes",
    "CentralEntity", "TaggedToken", "detect_entities", "extract", "load_lexicon", "tag_tokens", "tokenize",
    "KnowledgeGraph", "Triple", "load_triples", "top_k_extensions",
    "LmConfig", "LmParameters", "TrainTrace", "bilstm_encode", "conv1d_reduce", "train",
    "AnalogyQuestion", "SimilarityPair", "analogy_accuracy", "similarity_eval", "spearman_rho",
]

__version__ = "0.1.0"
