"""Concept engagement scoring: transport distance to a concept pseudo-document.

A concept is a term, a compound term set, a semantic centroid, or one pole
of a semantic direction. Raw closeness is the negated transport distance
from each document to the pseudo-document; standardized scores are z-scores
over the scored corpus.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .embeddings import EmbeddingMatrix
from .errors import DataError, NumericError, UsageError
from .semantics import SemanticCentroid, SemanticDirection
from .text_pipeline import DocumentTermMatrix
from .transport import (
    DocDistribution,
    build_doc_distributions,
    exact_wmd,
    lc_rwmd_batch,
    rwmd,
)

CONCEPT_KINDS = ("term", "compound", "centroid", "direction-pole")


@dataclass(frozen=True)
class ConceptSpec:
    """What the pseudo-document should carry."""

    label: str
    kind: str
    terms: tuple[str, ...] = ()
    centroid: Optional[SemanticCentroid] = None
    direction: Optional[SemanticDirection] = None
    pole: int = +1

    def __post_init__(self) -> None:
        if self.kind not in CONCEPT_KINDS:
            raise UsageError(f"unknown concept kind {self.kind!r}; have {CONCEPT_KINDS}")
        if self.kind in ("term", "compound") and not self.terms:
            raise DataError(f"concept {self.label!r}: no terms given")
        if self.kind == "term" and len(self.terms) != 1:
            raise DataError(f"concept {self.label!r}: kind 'term' takes exactly one term")
        if self.kind == "centroid" and self.centroid is None:
            raise DataError(f"concept {self.label!r}: no centroid given")
        if self.kind == "direction-pole":
            if self.direction is None:
                raise DataError(f"concept {self.label!r}: no direction given")
            if self.pole not in (+1, -1):
                raise UsageError(f"concept {self.label!r}: pole must be +1 or -1")


def _synthetic_token(emb: EmbeddingMatrix, label: str) -> str:
    token = f"__concept__{label}"
    suffix = 0
    while token in emb.vocab:
        suffix += 1
        token = f"__concept__{label}~{suffix}"
    return token


def make_pseudo_doc(
    spec: ConceptSpec, emb: EmbeddingMatrix
) -> tuple[DocDistribution, EmbeddingMatrix, list[str]]:
    """Build the concept's distribution, extending the embedding if needed.

    Term and compound concepts weigh their (in-vocabulary) terms uniformly.
    Centroid and direction-pole concepts append one synthetic row and
    reference it with a singleton distribution; original rows are untouched.
    Returns (distribution, embedding to score against, skipped terms).
    """
    if spec.kind in ("term", "compound"):
        seen: list[str] = []
        for t in spec.terms:
            if t not in seen:
                seen.append(t)
        ids = [emb.vocab.id(t) for t in seen if t in emb.vocab]
        skipped = [t for t in seen if t not in emb.vocab]
        if not ids:
            raise DataError(f"concept {spec.label!r}: no payload term in vocabulary")
        weights = np.full(len(ids), 1.0 / len(ids))
        dist = DocDistribution(f"concept:{spec.label}", np.array(ids, dtype=np.int64), weights)
        return dist, emb, skipped
    if spec.kind == "centroid":
        vector = spec.centroid.vector
    else:
        vector = spec.pole * spec.direction.vector
    token = _synthetic_token(emb, spec.label)
    extended = emb.with_appended_row(token, vector)
    dist = DocDistribution(
        f"concept:{spec.label}",
        np.array([extended.vocab.id(token)], dtype=np.int64),
        np.array([1.0]),
    )
    return dist, extended, []


@dataclass
class EngagementSeries:
    """Per-document closeness to one concept, raw and standardized."""

    concept_label: str
    doc_ids: list[str]
    dates: list[Optional[datetime.date]]
    raw: np.ndarray
    standardized: np.ndarray
    skipped_docs: list[str] = field(default_factory=list)
    dropped_terms: list[str] = field(default_factory=list)


def cmd_scores(
    dtm: DocumentTermMatrix,
    spec: ConceptSpec,
    emb: EmbeddingMatrix,
    method: str = "lc-rwmd",
    ground: str = "euclidean",
    threads: int = 1,
) -> EngagementSeries:
    """Score every nonempty document's engagement with the concept.

    Higher scores mean more engagement. lc-rwmd uses the document-to-pseudo
    sided relaxation, which is exact whenever the pseudo-document is a
    singleton. Empty documents are skipped and reported.
    """
    pseudo, scoring_emb, _ = make_pseudo_doc(spec, emb)
    dists, skipped, dropped = build_doc_distributions(dtm, scoring_emb)
    scored = [(m.id, m.date, d) for m, d in zip(dtm.doc_meta, dists) if d is not None]
    if not scored:
        raise DataError("all documents are empty")
    docs = [d for _, _, d in scored]
    if method == "exact":
        distances = np.array([exact_wmd(d, pseudo, scoring_emb, ground=ground) for d in docs])
    elif method == "rwmd":
        distances = np.array([rwmd(d, pseudo, scoring_emb, ground=ground) for d in docs])
    elif method == "lc-rwmd":
        result = lc_rwmd_batch(docs, [pseudo], scoring_emb, ground=ground, sided="to-corpus", threads=threads)
        distances = result.values[:, 0]
    else:
        raise UsageError(f"unknown scoring method {method!r}")
    raw = -distances
    sd = float(raw.std())
    if sd == 0.0:
        raise NumericError("zero-variance engagement scores; standardization undefined")
    standardized = (raw - raw.mean()) / sd
    return EngagementSeries(
        concept_label=spec.label,
        doc_ids=[i for i, _, _ in scored],
        dates=[dt for _, dt, _ in scored],
        raw=raw,
        standardized=standardized,
        skipped_docs=skipped,
        dropped_terms=dropped,
    )


@dataclass(frozen=True)
class BucketRow:
    bucket: str
    mean: float
    delta: Optional[float]
    n_docs: int


def _bucket_key(date: datetime.date, bucket: str) -> str:
    if bucket == "month":
        return f"{date.year:04d}-{date.month:02d}"
    if bucket == "year":
        return f"{date.year:04d}"
    if bucket == "decade":
        return f"{date.year // 10 * 10:04d}s"
    raise UsageError(f"unknown bucket {bucket!r}")


def aggregate_series(series: EngagementSeries, bucket: str, deltas: bool = True) -> list[BucketRow]:
    """Per-bucket means of standardized scores, with optional deltas.

    The delta of the first emitted bucket is None; later deltas compare to
    the previous emitted bucket.
    """
    if any(d is None for d in series.dates):
        missing = [i for i, d in zip(series.doc_ids, series.dates) if d is None]
        raise DataError(f"missing dates for documents: {missing[:5]}")
    groups: dict[str, list[float]] = {}
    for date, score in zip(series.dates, series.standardized):
        groups.setdefault(_bucket_key(date, bucket), []).append(float(score))
    rows: list[BucketRow] = []
    prev: Optional[float] = None
    for key in sorted(groups):
        mean = float(np.mean(groups[key]))
        delta = (mean - prev) if (deltas and prev is not None) else None
        rows.append(BucketRow(key, mean, delta, len(groups[key])))
        prev = mean
    return rows
