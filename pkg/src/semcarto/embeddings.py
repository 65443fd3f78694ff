"""Embedding matrices and the geometric primitives built on them.

The text format is one term plus its coordinates per line, whitespace
separated, with an optional "V d" header; term ids follow file order.
A little-endian binary cache can be written for speed, but the text
form stays authoritative.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, NumericError, UsageError
from .vocab import Vocabulary

CACHE_MAGIC = b"SEMCEMB1"


class EmbeddingMatrix:
    """Dense term-by-dimension matrix with its vocabulary."""

    def __init__(self, vocab: Vocabulary, vectors: np.ndarray, label: str = ""):
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(vocab):
            raise DataError(
                f"vector block {vectors.shape} does not match vocabulary of {len(vocab)} terms"
            )
        if vectors.shape[1] < 2:
            raise DataError("embedding dimensionality must be at least 2")
        if not np.all(np.isfinite(vectors)):
            raise DataError("embedding contains non-finite values")
        norms = np.linalg.norm(vectors, axis=1)
        if np.any(norms == 0.0):
            bad = vocab.term(int(np.flatnonzero(norms == 0.0)[0]))
            raise DataError(f"all-zero vector for term {bad!r}")
        self.vocab = vocab
        self.vectors = vectors
        self.label = label
        self._norms = norms

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def vector(self, term: str) -> np.ndarray:
        return self.vectors[self.vocab.id(term)]

    def norms(self) -> np.ndarray:
        return self._norms

    def with_appended_row(self, term: str, vector: np.ndarray, label: str | None = None) -> "EmbeddingMatrix":
        """New matrix with one extra row; existing rows and ids are untouched."""
        if term in self.vocab:
            raise DataError(f"term {term!r} already present")
        vector = np.asarray(vector, dtype=np.float64).reshape(1, -1)
        if vector.shape[1] != self.dim:
            raise DataError("appended row has wrong dimensionality")
        vocab = Vocabulary(list(self.vocab.terms) + [term])
        vectors = np.vstack([self.vectors, vector])
        return EmbeddingMatrix(vocab, vectors, label if label is not None else self.label)


def load_embeddings(
    path: str | Path, expected_dim: int | None = None, label: str | None = None
) -> EmbeddingMatrix:
    """Load text-format vectors (or a binary cache, detected by magic bytes)."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"embedding file not found: {path}")
    with open(path, "rb") as fh:
        if fh.read(len(CACHE_MAGIC)) == CACHE_MAGIC:
            emb = read_embedding_cache(path, label=label)
            if expected_dim is not None and emb.dim != expected_dim:
                raise DataError(f"expected {expected_dim} dimensions, file has {emb.dim}")
            return emb

    terms: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    header: tuple[int, int] | None = None
    dim: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\n").split(" ")
            parts = [p for p in parts if p]
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2:
                try:
                    header = (int(parts[0]), int(parts[1]))
                    continue
                except ValueError:
                    pass  # two-column line that is not a header; parse as a row
            term = parts[0]
            if term in seen:
                raise DataError(f"{path}:{lineno}: duplicate term {term!r}")
            seen.add(term)
            try:
                vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
            except ValueError:
                raise DataError(f"{path}:{lineno}: malformed float") from None
            if not np.all(np.isfinite(vec)):
                raise DataError(f"{path}:{lineno}: malformed float (non-finite)")
            if dim is None:
                dim = len(vec)
                if dim < 2:
                    raise DataError(f"{path}:{lineno}: need at least 2 dimensions")
            elif len(vec) != dim:
                raise DataError(f"{path}:{lineno}: expected {dim} dimensions, got {len(vec)}")
            terms.append(term)
            rows.append(vec)
    if not rows:
        raise DataError(f"no vectors in {path}")
    if header is not None and (header[0] != len(rows) or header[1] != dim):
        raise DataError(
            f"header declares {header[0]} x {header[1]} but file has {len(rows)} x {dim}"
        )
    if expected_dim is not None and dim != expected_dim:
        raise DataError(f"expected {expected_dim} dimensions, file has {dim}")
    return EmbeddingMatrix(Vocabulary(terms), np.vstack(rows), label if label is not None else path.stem)


def save_embeddings(emb: EmbeddingMatrix, path: str | Path, header: bool = False) -> None:
    """Write the authoritative text format (full float precision)."""
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"{len(emb)} {emb.dim}\n")
        for term, row in zip(emb.vocab.terms, emb.vectors):
            fh.write(term + " " + " ".join(repr(float(x)) for x in row) + "\n")


def write_embedding_cache(emb: EmbeddingMatrix, path: str | Path) -> None:
    """Binary cache: magic, V, d, vocab block, row-major little-endian float32."""
    vocab_block = "\n".join(emb.vocab.terms).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<QQQ", len(emb), emb.dim, len(vocab_block)))
        fh.write(vocab_block)
        fh.write(emb.vectors.astype("<f4").tobytes(order="C"))


def read_embedding_cache(path: str | Path, label: str | None = None) -> EmbeddingMatrix:
    path = Path(path)
    raw = path.read_bytes()
    if raw[: len(CACHE_MAGIC)] != CACHE_MAGIC:
        raise DataError(f"{path}: not an embedding cache")
    off = len(CACHE_MAGIC)
    v, d, nbytes = struct.unpack_from("<QQQ", raw, off)
    off += struct.calcsize("<QQQ")
    terms = raw[off : off + nbytes].decode("utf-8").split("\n") if nbytes else []
    off += nbytes
    expected = v * d * 4
    if len(raw) - off != expected or len(terms) != v:
        raise DataError(f"{path}: truncated or inconsistent cache")
    vectors = np.frombuffer(raw, dtype="<f4", count=v * d, offset=off).reshape(v, d)
    return EmbeddingMatrix(Vocabulary(terms), vectors.astype(np.float64), label or path.stem)


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine of two nonzero vectors, clamped to [-1, 1] against rounding."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DataError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise NumericError("cosine of a zero vector is undefined")
    if np.array_equal(u, v):
        return 1.0
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def nearest_to_vector(
    query: np.ndarray,
    k: int,
    emb: EmbeddingMatrix,
    exclude: Iterable[str] = (),
) -> list[tuple[str, float]]:
    """Top-k terms by cosine to an arbitrary query vector.

    Descending similarity, ties broken by term id; excluded terms absent.
    """
    if k < 1:
        raise UsageError("k must be at least 1")
    query = np.asarray(query, dtype=np.float64)
    if query.shape != (emb.dim,):
        raise DataError(f"query vector has shape {query.shape}, embedding dim is {emb.dim}")
    qn = np.linalg.norm(query)
    if qn == 0.0:
        raise NumericError("cosine of a zero vector is undefined")
    sims = (emb.vectors @ query) / (emb.norms() * qn)
    np.clip(sims, -1.0, 1.0, out=sims)
    mask = np.ones(len(emb), dtype=bool)
    for term in exclude:
        idx = emb.vocab.get(term)
        if idx is not None:
            mask[idx] = False
    candidates = np.flatnonzero(mask)
    order = np.lexsort((candidates, -sims[candidates]))
    top = candidates[order[:k]]
    return [(emb.vocab.term(int(i)), float(sims[i])) for i in top]


def nearest_neighbors(
    term: str,
    k: int,
    emb: EmbeddingMatrix,
    exclude: Iterable[str] = (),
) -> list[tuple[str, float]]:
    """Top-k cosine neighbors of a vocabulary term."""
    return nearest_to_vector(emb.vector(term), k, emb, exclude=exclude)


def vector_arithmetic(expr: Sequence[tuple[str, int]], emb: EmbeddingMatrix) -> np.ndarray:
    """Signed sum of term vectors, e.g. [("king", +1), ("man", -1), ("woman", +1)]."""
    if not expr:
        raise UsageError("empty expression")
    out = np.zeros(emb.dim, dtype=np.float64)
    for term, sign in expr:
        if sign not in (1, -1):
            raise UsageError(f"sign must be +1 or -1, got {sign!r}")
        out += sign * emb.vector(term)
    return out


def parse_signed_terms(spec: str) -> list[tuple[str, int]]:
    """Parse "king,-man,+woman" into signed-term tuples (default sign +)."""
    expr: list[tuple[str, int]] = []
    for raw in spec.split(","):
        raw = raw.strip()
        if not raw:
            continue
        if raw.startswith("-"):
            expr.append((raw[1:], -1))
        elif raw.startswith("+"):
            expr.append((raw[1:], +1))
        else:
            expr.append((raw, +1))
    if not expr:
        raise UsageError("empty term expression")
    return expr
