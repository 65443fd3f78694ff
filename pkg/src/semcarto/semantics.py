"""Semantic directions and centroids: cultural dimensions as unit vectors.

A direction is the normalized mean of pole_a - pole_b differences over a
set of juxtaposed term pairs; a centroid is the plain mean of a term set.
Out-of-vocabulary entries are skipped and reported, never imputed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .embeddings import EmbeddingMatrix, cosine_similarity
from .errors import DataError, NumericError

_DEGENERATE_NORM = 1e-10

BUNDLED_PAIR_SETS = {
    "affluence": "pairs_affluence.csv",
    "race": "pairs_race.csv",
    "morality": "pairs_morality.csv",
    "immigration": "pairs_immigration_citizenship.csv",
}


@dataclass(frozen=True)
class TermPairSet:
    """Ordered (pole_a, pole_b) term pairs with pole labels."""

    pairs: tuple[tuple[str, str], ...]
    label_a: str
    label_b: str

    def __post_init__(self) -> None:
        if not self.pairs:
            raise DataError("pair set is empty")
        for a, b in self.pairs:
            if a == b:
                raise DataError(f"pair with identical terms: {a!r}")

    def reversed(self) -> "TermPairSet":
        return TermPairSet(tuple((b, a) for a, b in self.pairs), self.label_b, self.label_a)


def read_pair_set(path: str | Path) -> TermPairSet:
    """Pair-set CSV: header row names the poles, rows are pole_a,pole_b terms."""
    rows = list(csv.reader(Path(path).read_text("utf-8").splitlines()))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if len(rows) < 2:
        raise DataError(f"{path}: need a header row and at least one pair")
    header = rows[0]
    if len(header) != 2:
        raise DataError(f"{path}: header must name exactly two poles")
    pairs = []
    for r in rows[1:]:
        if len(r) != 2:
            raise DataError(f"{path}: malformed pair row {r!r}")
        pairs.append((r[0].strip(), r[1].strip()))
    return TermPairSet(tuple(pairs), header[0].strip(), header[1].strip())


def bundled_pair_set(name: str) -> TermPairSet:
    if name not in BUNDLED_PAIR_SETS:
        raise DataError(f"no bundled pair set named {name!r}; have {sorted(BUNDLED_PAIR_SETS)}")
    text = resources.files("semcarto.data").joinpath(BUNDLED_PAIR_SETS[name]).read_text("utf-8")
    rows = [r for r in csv.reader(text.splitlines()) if r]
    pairs = tuple((a.strip(), b.strip()) for a, b in rows[1:])
    return TermPairSet(pairs, rows[0][0].strip(), rows[0][1].strip())


@dataclass(frozen=True)
class SemanticDirection:
    """Unit vector pointing toward pole_a; positive projections mean pole_a."""

    vector: np.ndarray
    source_pairs: tuple[tuple[str, str], ...]
    skipped: tuple[tuple[str, str], ...]
    label_a: str
    label_b: str


@dataclass(frozen=True)
class SemanticCentroid:
    vector: np.ndarray
    members: tuple[str, ...]
    skipped: tuple[str, ...]


def build_direction(
    pairs: TermPairSet,
    emb: EmbeddingMatrix,
    pre_normalize: bool = False,
    normalize_pairs: bool = False,
) -> SemanticDirection:
    """Average pole_a - pole_b differences, then normalize to unit length.

    ``pre_normalize`` length-normalizes term vectors before subtracting;
    ``normalize_pairs`` normalizes each difference before averaging.
    """
    used: list[tuple[str, str]] = []
    skipped: list[tuple[str, str]] = []
    diffs: list[np.ndarray] = []
    for a, b in pairs.pairs:
        if a not in emb.vocab or b not in emb.vocab:
            skipped.append((a, b))
            continue
        va, vb = emb.vector(a), emb.vector(b)
        if pre_normalize:
            va = va / np.linalg.norm(va)
            vb = vb / np.linalg.norm(vb)
        diff = va - vb
        if normalize_pairs:
            norm = np.linalg.norm(diff)
            if norm < _DEGENERATE_NORM:
                raise NumericError(f"degenerate pair difference for ({a!r}, {b!r})")
            diff = diff / norm
        used.append((a, b))
        diffs.append(diff)
    if not used:
        raise DataError("all pairs out of vocabulary")
    mean = np.mean(diffs, axis=0)
    norm = np.linalg.norm(mean)
    if norm < _DEGENERATE_NORM:
        raise NumericError("degenerate direction (averaged differences cancel)")
    return SemanticDirection(mean / norm, tuple(used), tuple(skipped), pairs.label_a, pairs.label_b)


def build_centroid(terms: Sequence[str], emb: EmbeddingMatrix) -> SemanticCentroid:
    """Unweighted mean of member vectors; OOV terms skipped and reported."""
    members = [t for t in terms if t in emb.vocab]
    skipped = tuple(t for t in terms if t not in emb.vocab)
    if not members:
        raise DataError("all terms out of vocabulary")
    mean = np.mean([emb.vector(t) for t in members], axis=0)
    if np.linalg.norm(mean) < _DEGENERATE_NORM:
        raise NumericError("degenerate centroid")
    return SemanticCentroid(mean, tuple(members), skipped)


def project_term(term: str, direction: SemanticDirection, emb: EmbeddingMatrix) -> float:
    """Cosine between a term vector and the direction; positive = pole_a."""
    return cosine_similarity(emb.vector(term), direction.vector)


def save_direction(direction: SemanticDirection, path: str | Path) -> None:
    """Store as a one-row text embedding so downstream tools can reuse it."""
    token = f"{direction.label_a}__vs__{direction.label_b}"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(token + " " + " ".join(repr(float(x)) for x in direction.vector) + "\n")


def load_direction(path: str | Path) -> SemanticDirection:
    from .embeddings import load_embeddings

    emb = load_embeddings(path)
    if len(emb) != 1:
        raise DataError(f"{path}: direction file must hold exactly one vector")
    token = emb.vocab.term(0)
    label_a, _, label_b = token.partition("__vs__")
    vec = emb.vectors[0]
    norm = np.linalg.norm(vec)
    if norm < _DEGENERATE_NORM:
        raise NumericError(f"{path}: degenerate direction vector")
    return SemanticDirection(vec / norm, (), (), label_a or token, label_b or "")
