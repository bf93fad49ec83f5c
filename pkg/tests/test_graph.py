import itertools

import numpy as np
import pytest

from kgsense.embeddings import EmbeddingStore, cosine
from kgsense.graph import KnowledgeGraph, Triple, load_triples, top_k_extensions


def write_kg(tmp_path, text, name="kg.tsv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestLoadTriples:
    def test_adjacency_from_outgoing_edges(self, tmp_path):
        g = load_triples(write_kg(tmp_path, "apple\ttype\tfruit\napple\trelated\ttree\n"))
        assert g.one_hop_neighbors("apple") == {"fruit", "tree"}

    def test_undirected_neighborhood(self, tmp_path):
        g = load_triples(write_kg(
            tmp_path, "apple\ttype\tfruit\nfruit\tbroader\tfood\n"))
        assert g.one_hop_neighbors("fruit") >= {"apple", "food"}

    def test_malformed_line_names_line(self, tmp_path):
        with pytest.raises(ValueError, match="line 2"):
            load_triples(write_kg(tmp_path, "a\tb\tc\na\tb\n"))

    def test_comments_and_blank_lines_skipped(self, tmp_path):
        g = load_triples(write_kg(tmp_path, "# comment\n\na\tr\tb\n"))
        assert g.one_hop_neighbors("a") == {"b"}

    def test_multiword_entities_normalized(self, tmp_path):
        g = load_triples(write_kg(tmp_path, "apple pie\tmade_from\tapple\n"))
        assert g.one_hop_neighbors("apple_pie") == {"apple"}
        assert g.one_hop_neighbors("apple") == {"apple_pie"}

    def test_order_insensitive(self, tmp_path):
        lines = ["a\tr\tb", "b\tr\tc", "c\tr\ta", "a\ts\td"]
        graphs = [
            load_triples(write_kg(tmp_path, "\n".join(perm) + "\n", name=f"kg{i}.tsv"))
            for i, perm in enumerate(itertools.permutations(lines))
        ]
        for g in graphs[1:]:
            for entity in ("a", "b", "c", "d"):
                assert g.one_hop_neighbors(entity) == graphs[0].one_hop_neighbors(entity)

    def test_empty_triple_field_rejected(self):
        with pytest.raises(ValueError, match="nonempty"):
            Triple("a", "", "b")


class TestOneHopNeighbors:
    def test_fixture_apple_has_fruit(self, kg):
        assert "fruit" in kg.one_hop_neighbors("apple")

    def test_unknown_entity_empty(self, kg):
        assert kg.one_hop_neighbors("qwerty") == frozenset()

    def test_chain_is_one_hop_only(self):
        g = KnowledgeGraph([Triple("a", "r", "b"), Triple("b", "r", "c")])
        assert g.one_hop_neighbors("a") == {"b"}

    def test_no_self_extension(self):
        g = KnowledgeGraph([Triple("a", "r", "a"), Triple("a", "r", "b")])
        assert g.one_hop_neighbors("a") == {"b"}


@pytest.fixture()
def paper_style_fixture():
    """apple with 4 in-store neighbours; device ranks 4th by cosine."""
    store = EmbeddingStore({
        "apple":   [0.0, 1.0, 0.0],
        "tree":    [0.0, 0.95, 0.2],
        "culture": [0.0, 0.80, 0.35],
        "fruit":   [0.6, 0.70, 0.0],
        "device":  [0.3, 0.40, 0.8],
    })
    graph = KnowledgeGraph([
        Triple("apple", "r", "tree"),
        Triple("apple", "r", "culture"),
        Triple("apple", "r", "fruit"),
        Triple("apple", "r", "device"),
    ])
    return graph, store


def brute_force_extensions(graph, store, entity, k):
    entity_vec = store.lookup(entity)
    if entity_vec is None:
        return []
    scored = []
    for n in graph.one_hop_neighbors(entity):
        vec = store.lookup(n)
        if vec is None or n == entity:
            continue
        scored.append((-cosine(vec, entity_vec), n))
    scored.sort()
    return [w for _, w in scored[:k]]


class TestTopKExtensions:
    def test_paper_dt_apple(self, paper_style_fixture):
        graph, store = paper_style_fixture
        result = top_k_extensions(graph, store, "apple", k=3)
        assert result == brute_force_extensions(graph, store, "apple", 3)
        assert result == ["tree", "culture", "fruit"]
        ranked4 = brute_force_extensions(graph, store, "apple", 4)
        assert ranked4[3] == "device"

    def test_fixture_dt_apple(self, kg, store):
        assert top_k_extensions(kg, store, "apple", k=3) == ["tree", "culture", "fruit"]

    def test_no_neighbors(self, paper_style_fixture):
        graph, store = paper_style_fixture
        assert top_k_extensions(graph, store, "fridge", k=3) == []

    def test_k1_is_argmax(self, paper_style_fixture):
        graph, store = paper_style_fixture
        assert (top_k_extensions(graph, store, "apple", k=1)
                == brute_force_extensions(graph, store, "apple", 1))

    def test_oov_entity_empty(self, paper_style_fixture):
        graph, _ = paper_style_fixture
        store = EmbeddingStore({"tree": [1.0, 0.0]})
        assert top_k_extensions(graph, store, "apple", k=3) == []

    def test_oov_neighbors_filtered(self):
        graph = KnowledgeGraph([Triple("a", "r", "b"), Triple("a", "r", "c")])
        store = EmbeddingStore({"a": [1, 0], "b": [1, 1]})
        assert top_k_extensions(graph, store, "a", k=3) == ["b"]

    def test_invalid_k(self, kg, store):
        with pytest.raises(ValueError):
            top_k_extensions(kg, store, "apple", k=0)

    def test_random_graphs_candidates_are_one_hop_members(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(3, 10))
            words = [f"n{i}" for i in range(n)]
            triples = [
                Triple(words[i], "r", words[j])
                for i in range(n) for j in range(n)
                if i != j and rng.random() < 0.3
            ]
            graph = KnowledgeGraph(triples)
            store = EmbeddingStore(
                {w: rng.normal(size=4) for w in words if rng.random() < 0.8}
                or {words[0]: rng.normal(size=4)}
            )
            for entity in words:
                for k in (1, 2, 3):
                    result = top_k_extensions(graph, store, entity, k=k)
                    assert len(result) <= k
                    assert result == brute_force_extensions(graph, store, entity, k)
                    entity_vec = store.lookup(entity)
                    scores = [cosine(store.lookup(c), entity_vec) for c in result]
                    assert scores == sorted(scores, reverse=True)
                    for c in result:
                        assert c in graph.one_hop_neighbors(entity)
                        assert c != entity
                        assert c in store
