import numpy as np
import pytest

from semcarto import DataError, UsageError, build_tcm, cosine_similarity, train_svd_embeddings
from semcarto.training import ppmi_matrix


class TestBuildTcm:
    def test_window_one(self):
        tcm = build_tcm([["a", "b", "c"]], window=1)
        m = tcm.matrix.toarray()
        ia, ib, ic = (tcm.vocab.id(t) for t in "abc")
        assert m[ia, ib] == 1 and m[ib, ia] == 1
        assert m[ib, ic] == 1 and m[ic, ib] == 1
        assert m[ia, ic] == 0

    def test_window_two_adds_skip_pair(self):
        tcm = build_tcm([["a", "b", "c"]], window=2)
        m = tcm.matrix.toarray()
        assert m[tcm.vocab.id("a"), tcm.vocab.id("c")] == 1

    def test_inverse_distance_weighting(self):
        tcm = build_tcm([["a", "b", "c"]], window=2, weighting="inverse-distance")
        m = tcm.matrix.toarray()
        assert m[tcm.vocab.id("a"), tcm.vocab.id("c")] == pytest.approx(0.5)
        assert m[tcm.vocab.id("a"), tcm.vocab.id("b")] == pytest.approx(1.0)

    def test_document_boundaries_not_crossed(self):
        tcm = build_tcm([["a", "b"], ["c", "d"]], window=5)
        m = tcm.matrix.toarray()
        assert m[tcm.vocab.id("b"), tcm.vocab.id("c")] == 0

    def test_symmetric_zero_diagonal(self, rng):
        streams = [[f"w{rng.integers(0, 8)}" for _ in range(20)] for _ in range(5)]
        tcm = build_tcm(streams, window=3)
        m = tcm.matrix
        assert abs(m - m.T).nnz == 0
        assert not m.diagonal().any()

    def test_window_validated(self):
        with pytest.raises(UsageError):
            build_tcm([["a", "b"]], window=0)


class TestPpmi:
    def test_hand_computed_entries(self):
        # one doc "a b", window 1: count(a,b)=1 both ways, totals 2
        tcm = build_tcm([["a", "b"]], window=1)
        ppmi = ppmi_matrix(tcm).toarray()
        # PMI = log(1 * 2 / (1 * 1)) = log 2
        expected = np.log(2.0)
        ia, ib = tcm.vocab.id("a"), tcm.vocab.id("b")
        assert ppmi[ia, ib] == pytest.approx(expected)
        assert ppmi[ia, ia] == 0.0

    def test_shift_subtracts_and_clips(self):
        tcm = build_tcm([["a", "b"]], window=1)
        shifted = ppmi_matrix(tcm, shift=np.log(2.0) + 1.0).toarray()
        assert np.all(shifted == 0.0)

    def test_isolated_term_errors(self):
        tcm = build_tcm([["a", "b"], ["c"]], window=1)
        with pytest.raises(DataError, match="never co-occurs"):
            ppmi_matrix(tcm)


def two_cluster_streams():
    """Two topic clusters whose terms never co-occur across clusters."""
    a_docs = [["apple", "pear", "plum", "apple"], ["pear", "plum", "apple"]] * 3
    b_docs = [["bolt", "nut", "wrench", "bolt"], ["nut", "wrench", "bolt"]] * 3
    return a_docs + b_docs


class TestTrainSvd:
    def test_disjoint_clusters_separate(self):
        tcm = build_tcm(two_cluster_streams(), window=3)
        emb = train_svd_embeddings(tcm, d=2)
        cluster_a = ["apple", "pear", "plum"]
        cluster_b = ["bolt", "nut", "wrench"]
        within = [
            cosine_similarity(emb.vector(x), emb.vector(y))
            for group in (cluster_a, cluster_b)
            for x in group
            for y in group
            if x < y
        ]
        across = [
            cosine_similarity(emb.vector(x), emb.vector(y)) for x in cluster_a for y in cluster_b
        ]
        assert min(within) > max(across)

    def test_full_rank_boundary_zero_truncation_error(self):
        # duplicate co-occurrence rows force rank(PPMI) <= V-1, so keeping
        # V-1 singular values reconstructs the matrix exactly
        streams = [["a", "c"], ["b", "c"], ["a", "c"], ["b", "c"]]
        tcm = build_tcm(streams, window=1)
        ppmi = ppmi_matrix(tcm).toarray()
        v = ppmi.shape[0]
        singular_values = np.linalg.svd(ppmi, compute_uv=False)
        assert singular_values[-1] == pytest.approx(0.0, abs=1e-12)
        emb = train_svd_embeddings(tcm, d=v - 1)
        assert emb.vectors.shape == (v, v - 1)

    def test_deterministic_bit_identical(self):
        tcm1 = build_tcm(two_cluster_streams(), window=2)
        tcm2 = build_tcm(two_cluster_streams(), window=2)
        emb1 = train_svd_embeddings(tcm1, d=3)
        emb2 = train_svd_embeddings(tcm2, d=3)
        np.testing.assert_array_equal(emb1.vectors, emb2.vectors)

    def test_cosines_invariant_under_column_resigning(self):
        tcm = build_tcm(two_cluster_streams(), window=2)
        emb = train_svd_embeddings(tcm, d=3)
        flipped = emb.vectors * np.array([1.0, -1.0, 1.0])
        terms = list(emb.vocab.terms)
        for x in terms[:3]:
            for y in terms[3:]:
                a = cosine_similarity(emb.vector(x), emb.vector(y))
                b = cosine_similarity(
                    flipped[emb.vocab.id(x)], flipped[emb.vocab.id(y)]
                )
                assert a == pytest.approx(b, abs=1e-15)

    def test_sign_convention_largest_entry_positive(self):
        tcm = build_tcm(two_cluster_streams(), window=2)
        emb = train_svd_embeddings(tcm, d=3)
        # recover U columns up to positive scaling: check canonical signs
        u = emb.vectors / np.linalg.norm(emb.vectors, axis=0)
        idx = np.argmax(np.abs(u), axis=0)
        assert np.all(u[idx, np.arange(u.shape[1])] > 0)

    def test_dimension_range_validated(self):
        tcm = build_tcm([["a", "b", "c"]], window=2)
        with pytest.raises(UsageError, match="out of range"):
            train_svd_embeddings(tcm, d=1)
        with pytest.raises(UsageError, match="out of range"):
            train_svd_embeddings(tcm, d=3)
