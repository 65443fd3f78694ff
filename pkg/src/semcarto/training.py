"""Local embedding training: windowed co-occurrence counts, PPMI, truncated SVD."""

from __future__ import annotations

from typing import Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg

from .embeddings import EmbeddingMatrix
from .errors import DataError, UsageError
from .vocab import Vocabulary

_DENSE_SVD_MAX = 4096


class TermContextMatrix:
    """Symmetric nonnegative co-occurrence weights with zero diagonal."""

    def __init__(self, vocab: Vocabulary, matrix: sp.spmatrix, window: int, weighting: str):
        matrix = sp.csr_matrix(matrix, dtype=np.float64)
        if matrix.shape != (len(vocab), len(vocab)):
            raise DataError("co-occurrence matrix must be square over the vocabulary")
        if matrix.nnz and matrix.data.min() < 0:
            raise DataError("co-occurrence weights must be nonnegative")
        if abs(matrix - matrix.T).nnz != 0:
            raise DataError("co-occurrence matrix must be symmetric")
        if matrix.diagonal().any():
            raise DataError("co-occurrence matrix must have a zero diagonal")
        self.vocab = vocab
        self.matrix = matrix
        self.window = window
        self.weighting = weighting


def build_tcm(
    token_streams: Sequence[Sequence[str]],
    window: int = 5,
    weighting: str = "uniform",
) -> TermContextMatrix:
    """Count co-occurrences within +/-window per document.

    Pairs never cross document boundaries; same-term pairs are skipped
    (zero diagonal). "inverse-distance" weighs a pair at offset k by 1/k.
    """
    if window < 1:
        raise UsageError("window must be at least 1")
    if weighting not in ("uniform", "inverse-distance"):
        raise UsageError(f"unknown weighting {weighting!r}")
    vocab = Vocabulary.from_sorted(t for stream in token_streams for t in stream)
    if len(vocab) == 0:
        raise DataError("empty corpus")
    weights: dict[tuple[int, int], float] = {}
    for stream in token_streams:
        ids = [vocab.id(t) for t in stream]
        n = len(ids)
        for pos in range(n):
            for off in range(1, window + 1):
                if pos + off >= n:
                    break
                i, j = ids[pos], ids[pos + off]
                if i == j:
                    continue
                if i > j:
                    i, j = j, i
                w = 1.0 if weighting == "uniform" else 1.0 / off
                weights[(i, j)] = weights.get((i, j), 0.0) + w
    if weights:
        pairs = np.array(list(weights.keys()), dtype=np.int64)
        vals = np.array(list(weights.values()), dtype=np.float64)
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        data = np.concatenate([vals, vals])
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        data = np.zeros(0, dtype=np.float64)
    matrix = sp.coo_matrix((data, (rows, cols)), shape=(len(vocab), len(vocab)))
    return TermContextMatrix(vocab, matrix, window, weighting)


def ppmi_matrix(tcm: TermContextMatrix, shift: float = 0.0) -> sp.csr_matrix:
    """Positive pointwise mutual information: max(PMI - shift, 0) entrywise."""
    if shift < 0:
        raise UsageError("ppmi shift must be nonnegative")
    counts = tcm.matrix.tocoo()
    total = counts.data.sum()
    if total == 0:
        raise DataError("co-occurrence matrix is all zero")
    row_sums = np.asarray(tcm.matrix.sum(axis=1)).ravel()
    if np.any(row_sums == 0):
        bad = tcm.vocab.term(int(np.flatnonzero(row_sums == 0)[0]))
        raise DataError(f"term never co-occurs: {bad!r}")
    pmi = np.log(counts.data * total / (row_sums[counts.row] * row_sums[counts.col]))
    data = np.maximum(pmi - shift, 0.0)
    out = sp.coo_matrix((data, (counts.row, counts.col)), shape=counts.shape)
    out = out.tocsr()
    out.eliminate_zeros()
    return out


def _canonical_signs(u: np.ndarray) -> np.ndarray:
    """Orient each column so its largest-magnitude entry is positive."""
    idx = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[idx, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs


def train_svd_embeddings(
    tcm: TermContextMatrix, d: int, ppmi_shift: float = 0.0, label: str = "svd"
) -> EmbeddingMatrix:
    """PPMI -> truncated SVD rank d -> vectors U * Sigma^0.5, signs canonicalized."""
    v = len(tcm.vocab)
    if not (2 <= d <= v - 1):
        raise UsageError(f"dimension d={d} out of range [2, {v - 1}]")
    ppmi = ppmi_matrix(tcm, ppmi_shift)
    row_mass = np.asarray(abs(ppmi).sum(axis=1)).ravel()
    if np.any(row_mass == 0):
        bad = tcm.vocab.term(int(np.flatnonzero(row_mass == 0)[0]))
        raise DataError(f"term {bad!r} has no positive PMI entries; raise counts or lower the shift")
    if v <= _DENSE_SVD_MAX:
        u, s, _ = np.linalg.svd(ppmi.toarray(), full_matrices=False)
        u, s = u[:, :d], s[:d]
    else:
        v0 = np.full(v, 1.0 / np.sqrt(v))
        u, s, _ = scipy.sparse.linalg.svds(ppmi, k=d, v0=v0)
        order = np.argsort(-s)
        u, s = u[:, order], s[order]
    u = _canonical_signs(u)
    vectors = u * np.sqrt(s)
    return EmbeddingMatrix(tcm.vocab, vectors, label)
