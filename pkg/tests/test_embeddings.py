import numpy as np
import pytest

from semcarto import (
    DataError,
    EmbeddingMatrix,
    NumericError,
    UsageError,
    Vocabulary,
    cosine_similarity,
    load_embeddings,
    nearest_neighbors,
    nearest_to_vector,
    save_embeddings,
    vector_arithmetic,
)
from semcarto.embeddings import (
    parse_signed_terms,
    read_embedding_cache,
    write_embedding_cache,
)


class TestLoad:
    def test_two_line_file(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("a 1 0\nb 0 1\n")
        emb = load_embeddings(path)
        assert len(emb) == 2 and emb.dim == 2
        assert emb.vocab.id("a") == 0 and emb.vocab.id("b") == 1

    def test_header_accepted_when_consistent(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("2 3\na 1 0 0\nb 0 1 0\n")
        emb = load_embeddings(path)
        assert len(emb) == 2 and emb.dim == 3

    def test_header_disagreement_rejected(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("3 3\na 1 0 0\nb 0 1 0\n")
        with pytest.raises(DataError, match="header"):
            load_embeddings(path)

    def test_duplicate_term_rejected(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("a 1 0\na 0 1\n")
        with pytest.raises(DataError, match="duplicate"):
            load_embeddings(path)

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("a 1 0\nb 0 1 1\n")
        with pytest.raises(DataError, match="dimensions"):
            load_embeddings(path)

    def test_malformed_float_rejected(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("a 1 0\nb x 1\n")
        with pytest.raises(DataError, match="malformed float"):
            load_embeddings(path)

    def test_zero_row_rejected(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("a 1 0\nb 0 0\n")
        with pytest.raises(DataError, match="all-zero"):
            load_embeddings(path)

    def test_expected_dim_enforced(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("a 1 0\nb 0 1\n")
        with pytest.raises(DataError, match="expected 300"):
            load_embeddings(path, expected_dim=300)

    def test_text_roundtrip_exact(self, tmp_path, rng):
        emb = EmbeddingMatrix(Vocabulary(["x", "y", "z"]), rng.normal(size=(3, 5)))
        save_embeddings(emb, tmp_path / "e.txt")
        loaded = load_embeddings(tmp_path / "e.txt")
        np.testing.assert_array_equal(loaded.vectors, emb.vectors)

    def test_binary_cache_roundtrip(self, tmp_path, rng):
        emb = EmbeddingMatrix(Vocabulary(["x", "y", "z"]), rng.normal(size=(3, 5)))
        write_embedding_cache(emb, tmp_path / "e.semb")
        loaded = read_embedding_cache(tmp_path / "e.semb")
        assert loaded.vocab == emb.vocab
        np.testing.assert_allclose(loaded.vectors, emb.vectors, atol=1e-6)
        # the loader auto-detects the cache by its magic bytes
        auto = load_embeddings(tmp_path / "e.semb")
        np.testing.assert_array_equal(auto.vectors, loaded.vectors)


class TestCosine:
    def test_self_similarity_is_one(self, rng):
        v = rng.normal(size=7)
        assert cosine_similarity(v, v) == 1.0

    def test_orthogonal_is_zero(self):
        assert cosine_similarity(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_symmetry_and_bounds(self, rng):
        for _ in range(200):
            u, v = rng.normal(size=6), rng.normal(size=6)
            c = cosine_similarity(u, v)
            assert c == cosine_similarity(v, u)
            assert -1.0 <= c <= 1.0

    def test_positive_scaling_invariance(self, rng):
        for _ in range(100):
            u, v = rng.normal(size=5), rng.normal(size=5)
            alpha = float(rng.uniform(0.01, 100))
            assert abs(cosine_similarity(alpha * u, v) - cosine_similarity(u, v)) < 1e-12

    def test_zero_vector_errors(self):
        with pytest.raises(NumericError, match="zero vector"):
            cosine_similarity(np.zeros(3), np.ones(3))

    def test_dimension_mismatch_errors(self):
        with pytest.raises(DataError, match="mismatch"):
            cosine_similarity(np.ones(3), np.ones(4))


class TestNearestNeighbors:
    def test_three_point_geometry(self, plane_embedding):
        # "northeast" is the analytically closest non-self term to "east"
        top = nearest_neighbors("east", 1, plane_embedding, exclude={"east"})
        assert top[0][0] == "northeast"
        assert top[0][1] == pytest.approx(np.cos(np.pi / 4))

    def test_k_larger_than_vocab(self, plane_embedding):
        got = nearest_neighbors("east", 99, plane_embedding, exclude={"east"})
        assert len(got) == 3

    def test_descending_order_with_id_tiebreak(self):
        emb = EmbeddingMatrix(
            Vocabulary(["q", "twin1", "twin2", "far"]),
            [[1.0, 0.0], [0.0, 1.0], [0.0, 2.0], [-1.0, 0.0]],
        )
        got = nearest_neighbors("q", 3, emb, exclude={"q"})
        assert [t for t, _ in got] == ["twin1", "twin2", "far"]

    def test_unknown_term_errors(self, plane_embedding):
        with pytest.raises(DataError, match="unknown term"):
            nearest_neighbors("nope", 1, plane_embedding)

    def test_k_validated(self, plane_embedding):
        with pytest.raises(UsageError):
            nearest_neighbors("east", 0, plane_embedding)

    def test_ranking_invariant_under_global_rescaling(self, rng):
        vectors = rng.normal(size=(30, 6))
        terms = [f"w{i}" for i in range(30)]
        a = EmbeddingMatrix(Vocabulary(terms), vectors)
        b = EmbeddingMatrix(Vocabulary(terms), 7.25 * vectors)
        for term in ("w0", "w7", "w19"):
            ra = [t for t, _ in nearest_neighbors(term, 10, a, exclude={term})]
            rb = [t for t, _ in nearest_neighbors(term, 10, b, exclude={term})]
            assert ra == rb

    def test_brute_force_oracle_agreement(self, rng):
        vectors = rng.normal(size=(50, 8))
        terms = [f"w{i}" for i in range(50)]
        emb = EmbeddingMatrix(Vocabulary(terms), vectors)
        query = "w13"
        sims = sorted(
            (
                (-np.dot(vectors[13], vectors[i]) / (np.linalg.norm(vectors[13]) * np.linalg.norm(vectors[i])), i)
                for i in range(50)
                if i != 13
            ),
        )
        expected = [terms[i] for _, i in sims[:5]]
        got = [t for t, _ in nearest_neighbors(query, 5, emb, exclude={query})]
        assert got == expected


class TestVectorArithmetic:
    def test_plus_minus_same_term_is_zero(self, plane_embedding):
        out = vector_arithmetic([("east", +1), ("east", -1)], plane_embedding)
        np.testing.assert_array_equal(out, np.zeros(2))

    def test_single_term_identity(self, plane_embedding):
        out = vector_arithmetic([("north", +1)], plane_embedding)
        np.testing.assert_array_equal(out, plane_embedding.vector("north"))

    def test_analogy_on_constructed_space(self):
        # queen = king - man + woman by construction: royal + female axes
        emb = EmbeddingMatrix(
            Vocabulary(["king", "man", "woman", "queen", "noise"]),
            [
                [1.0, 1.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [1.0, 0.0, 1.0],
                [-1.0, -1.0, -1.0],
            ],
        )
        target = vector_arithmetic([("king", +1), ("man", -1), ("woman", +1)], emb)
        got = nearest_to_vector(target, 1, emb, exclude={"king", "man", "woman"})
        assert got[0][0] == "queen"

    def test_unknown_term_errors(self, plane_embedding):
        with pytest.raises(DataError, match="unknown term"):
            vector_arithmetic([("nope", +1)], plane_embedding)

    def test_parse_signed_terms(self):
        assert parse_signed_terms("king,-man,+woman") == [("king", 1), ("man", -1), ("woman", 1)]
        with pytest.raises(UsageError):
            parse_signed_terms(",")


class TestAppendRow:
    def test_existing_rows_untouched(self, plane_embedding):
        before = plane_embedding.vectors.copy()
        extended = plane_embedding.with_appended_row("extra", [3.0, 4.0])
        np.testing.assert_array_equal(plane_embedding.vectors, before)
        np.testing.assert_array_equal(extended.vectors[:-1], before)
        assert extended.vocab.id("extra") == len(plane_embedding)

    def test_duplicate_term_rejected(self, plane_embedding):
        with pytest.raises(DataError, match="already present"):
            plane_embedding.with_appended_row("east", [1.0, 1.0])
