import numpy as np
import pytest

from kgsense.embeddings import EmbeddingStore, cosine, load_embeddings


def write(tmp_path, text, name="emb.txt"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestLoadEmbeddings:
    def test_two_lines(self, tmp_path):
        store = load_embeddings(write(tmp_path, "a 1 0\nb 0 1\n"))
        assert store.dimension == 2
        assert len(store) == 2
        assert np.array_equal(store.lookup("a"), [1.0, 0.0])
        assert np.array_equal(store.lookup("b"), [0.0, 1.0])

    def test_duplicate_last_wins(self, tmp_path):
        store = load_embeddings(write(tmp_path, "a 1 0\na 0 1\n"))
        assert np.array_equal(store.lookup("a"), [0.0, 1.0])
        assert len(store) == 1

    def test_dimension_mismatch_names_line(self, tmp_path):
        with pytest.raises(ValueError, match="line 2"):
            load_embeddings(write(tmp_path, "a 1 0\nb 1 2 3\n"))

    def test_non_numeric_component(self, tmp_path):
        with pytest.raises(ValueError, match="line 1"):
            load_embeddings(write(tmp_path, "a 1 x\n"))

    def test_non_finite_component(self, tmp_path):
        with pytest.raises(ValueError, match="line 1"):
            load_embeddings(write(tmp_path, "a 1 nan\n"))

    def test_empty_file(self, tmp_path):
        with pytest.raises(ValueError, match="empty"):
            load_embeddings(write(tmp_path, ""))

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_embeddings(str(tmp_path / "nope.txt"))

    def test_roundtrip_bit_identical(self, tmp_path):
        rng = np.random.default_rng(5)
        lines = []
        expected = {}
        for i in range(50):
            vec = rng.normal(size=4)
            word = f"w{i}"
            lines.append(word + " " + " ".join(repr(float(v)) for v in vec))
            expected[word] = vec
        store = load_embeddings(write(tmp_path, "\n".join(lines) + "\n"))
        for word, vec in expected.items():
            got = store.lookup(word)
            assert got.tolist() == vec.tolist()


class TestLookup:
    def test_identity(self):
        store = EmbeddingStore({"a": [1, 0]})
        assert np.array_equal(store.lookup("a"), [1.0, 0.0])

    def test_absent(self):
        store = EmbeddingStore({"a": [1, 0]})
        assert store.lookup("z") is None

    def test_case_sensitive(self):
        store = EmbeddingStore({"a": [1, 0]})
        assert store.lookup("A") is None


class TestCosine:
    def test_identity(self):
        assert cosine([1, 0], [1, 0]) == 1.0

    def test_orthogonal(self):
        assert cosine([1, 0], [0, 1]) == 0.0

    def test_analytic(self):
        assert cosine([1, 1], [1, 0]) == pytest.approx(np.sqrt(2) / 2, abs=1e-15)

    def test_zero_norm_raises(self):
        with pytest.raises(ValueError, match="zero-norm"):
            cosine([0, 0], [1, 0])

    def test_length_mismatch_raises(self):
        with pytest.raises(ValueError, match="mismatch"):
            cosine([1, 0, 0], [1, 0])

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            a = rng.normal(size=6)
            b = rng.normal(size=6)
            assert cosine(a, b) == cosine(b, a)

    def test_scale_invariance(self):
        rng = np.random.default_rng(1)
        for s in (1e-3, 0.5, 7.0, 1e4):
            a = rng.normal(size=5)
            b = rng.normal(size=5)
            assert cosine(s * a, b) == pytest.approx(cosine(a, b), abs=1e-12)

    def test_clamped(self):
        rng = np.random.default_rng(2)
        for _ in range(500):
            a = rng.normal(size=3)
            assert -1.0 <= cosine(a, a * rng.uniform(0.1, 10)) <= 1.0


class TestAverageVector:
    def test_mean_of_two(self):
        store = EmbeddingStore({"a": [1, 0], "b": [0, 1]})
        assert np.array_equal(store.average_vector(["a", "b"]), [0.5, 0.5])

    def test_repeats(self):
        store = EmbeddingStore({"a": [1, 0], "b": [0, 1]})
        assert np.array_equal(store.average_vector(["a", "a"]), [1.0, 0.0])

    def test_oov_skipped(self):
        # mean over the found subset only: divisor is 2, not 3
        store = EmbeddingStore({"a": [1, 0], "b": [0, 1]})
        assert np.array_equal(store.average_vector(["a", "zzz", "b"]), [0.5, 0.5])

    def test_single_token_exact(self):
        vec = [0.123456789012345678, -3.5e-7, 2.0]
        store = EmbeddingStore({"a": vec})
        got = store.average_vector(["a"])
        assert got.tolist() == store.lookup("a").tolist()

    def test_empty_sequence(self):
        store = EmbeddingStore({"a": [1, 0]})
        with pytest.raises(ValueError):
            store.average_vector([])

    def test_all_oov(self):
        store = EmbeddingStore({"a": [1, 0]})
        with pytest.raises(ValueError, match="no token"):
            store.average_vector(["x", "y"])


def brute_force_neighbors(store, query, k, exclude=()):
    query = np.asarray(query, dtype=float)
    scored = []
    for word in store.words:
        if word in exclude:
            continue
        scored.append((-cosine(store.lookup(word), query), word))
    scored.sort()
    return [w for _, w in scored[:k]]


class TestNearestNeighbors:
    def test_basic(self):
        store = EmbeddingStore({"a": [1, 0], "b": [0, 1]})
        assert store.nearest_neighbors([1, 0], k=1) == ["a"]

    def test_exclusion(self):
        store = EmbeddingStore({"a": [1, 0], "b": [0, 1]})
        assert store.nearest_neighbors([1, 0], k=1, exclude={"a"}) == ["b"]

    def test_five_vector_fixture_matches_oracle(self):
        store = EmbeddingStore({
            "p": [1.0, 0.2], "q": [0.5, 0.9], "r": [-1.0, 0.1],
            "s": [0.7, 0.7], "t": [0.0, 1.0],
        })
        query = [0.9, 0.5]
        assert store.nearest_neighbors(query, k=3) == brute_force_neighbors(store, query, 3)

    def test_tie_lexicographic(self):
        store = EmbeddingStore({"zed": [1, 0], "abe": [2, 0], "mid": [0, 1]})
        assert store.nearest_neighbors([1, 0], k=2) == ["abe", "zed"]

    def test_too_few_eligible(self):
        store = EmbeddingStore({"a": [1, 0], "b": [0, 1]})
        with pytest.raises(ValueError, match="eligible"):
            store.nearest_neighbors([1, 0], k=2, exclude={"a"})

    def test_random_store_matches_full_sort_oracle(self):
        rng = np.random.default_rng(42)
        entries = {f"w{i:04d}": rng.normal(size=8) for i in range(1000)}
        store = EmbeddingStore(entries)
        for _ in range(5):
            query = rng.normal(size=8)
            exclude = set(rng.choice(sorted(entries), size=10, replace=False))
            assert (store.nearest_neighbors(query, k=7, exclude=exclude)
                    == brute_force_neighbors(store, query, 7, exclude))

    def test_zero_query_raises(self):
        store = EmbeddingStore({"a": [1, 0]})
        with pytest.raises(ValueError, match="zero"):
            store.nearest_neighbors([0, 0], k=1)
