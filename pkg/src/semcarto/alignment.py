"""Orthogonal Procrustes alignment of independently trained embedding spaces.

Anchor rows are mean-centered when fitting the rotation (and optional
uniform scale), but the applied map is x -> s * x @ R with no translation,
so every within-space angle (hence cosine) is preserved exactly up to
floating-point noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .embeddings import EmbeddingMatrix, cosine_similarity
from .errors import DataError, NumericError, UsageError


@dataclass(frozen=True)
class ProcrustesFit:
    rotation: np.ndarray
    scale: float
    residual: float
    anchor_size: int


@dataclass
class AlignedSpaceSet:
    """Embedding spaces mapped into a common frame."""

    spaces: list[EmbeddingMatrix]
    anchor: frozenset[str]
    reference_index: int
    fits: list[Optional[ProcrustesFit]] = field(default_factory=list)


def _anchor_terms(
    source: EmbeddingMatrix, target: EmbeddingMatrix, anchor: Iterable[str] | None
) -> list[str]:
    shared = set(source.vocab.terms) & set(target.vocab.terms)
    if not shared:
        raise DataError("disjoint vocabularies")
    if anchor is None:
        return sorted(shared)
    requested = set(anchor)
    return sorted(requested & shared)


def fit_procrustes(
    source: EmbeddingMatrix,
    target: EmbeddingMatrix,
    anchor: Iterable[str] | None = None,
    scale: bool = False,
) -> tuple[ProcrustesFit, list[str]]:
    """Fit the orthogonal (optionally scaled) map over anchor rows.

    Returns the fit and the anchor terms actually used.
    """
    if source.dim != target.dim:
        raise DataError(f"dimension mismatch: {source.dim} vs {target.dim}")
    terms = _anchor_terms(source, target, anchor)
    d = source.dim
    if len(terms) < d + 1:
        raise DataError(f"anchor too small: {len(terms)} terms for dimension {d} (need >= {d + 1})")
    a = np.array([source.vector(t) for t in terms])
    b = np.array([target.vector(t) for t in terms])
    a_c = a - a.mean(axis=0)
    b_c = b - b.mean(axis=0)
    if np.linalg.matrix_rank(a_c) < d or np.linalg.matrix_rank(b_c) < d:
        raise NumericError("rank-deficient anchor")
    m = a_c.T @ b_c
    u, s, vt = np.linalg.svd(m)
    rotation = u @ vt
    s_factor = float(s.sum() / (a_c**2).sum()) if scale else 1.0
    residual = float(np.linalg.norm(s_factor * (a_c @ rotation) - b_c))
    return ProcrustesFit(rotation, s_factor, residual, len(terms)), terms


def procrustes_align(
    source: EmbeddingMatrix,
    target: EmbeddingMatrix,
    anchor: Iterable[str] | None = None,
    scale: bool = False,
) -> EmbeddingMatrix:
    """Map ``source`` onto ``target``'s frame; within-source cosines unchanged."""
    fit, _ = fit_procrustes(source, target, anchor=anchor, scale=scale)
    aligned = fit.scale * (source.vectors @ fit.rotation)
    return EmbeddingMatrix(source.vocab, aligned, source.label)


def chain_align(
    spaces: Sequence[EmbeddingMatrix],
    mode: str = "to-first",
    anchor: Iterable[str] | None = None,
    scale: bool = False,
) -> AlignedSpaceSet:
    """Align every space into a common frame (reference = first space).

    "to-first" maps each space directly onto the first; "to-previous" maps
    each space onto its already-aligned predecessor.
    """
    if mode not in ("to-first", "to-previous"):
        raise UsageError(f"unknown alignment mode {mode!r}")
    if len(spaces) < 2:
        raise UsageError("need at least two spaces to align")
    dims = {s.dim for s in spaces}
    if len(dims) != 1:
        raise DataError(f"spaces have mixed dimensionality: {sorted(dims)}")
    shared = set(spaces[0].vocab.terms)
    for s in spaces[1:]:
        shared &= set(s.vocab.terms)
    if not shared:
        raise DataError("no shared anchor vocabulary across spaces")
    anchor_terms = frozenset(shared if anchor is None else set(anchor) & shared)
    aligned: list[EmbeddingMatrix] = [spaces[0]]
    fits: list[Optional[ProcrustesFit]] = [None]
    for i, space in enumerate(spaces[1:], start=1):
        target = aligned[0] if mode == "to-first" else aligned[i - 1]
        try:
            fit, _ = fit_procrustes(space, target, anchor=anchor_terms, scale=scale)
        except (DataError, NumericError) as exc:
            raise type(exc)(f"aligning space {i} ({space.label!r}) to its reference: {exc}") from None
        aligned.append(EmbeddingMatrix(space.vocab, fit.scale * (space.vectors @ fit.rotation), space.label))
        fits.append(fit)
    return AlignedSpaceSet(aligned, anchor_terms, 0, fits)


@dataclass
class DriftSeries:
    """Per-space cosine rows for one focal term against probe terms.

    Missing term/probe entries are NaN; ``missing`` lists (space_label, term).
    """

    term: str
    probes: list[str]
    space_labels: list[str]
    values: np.ndarray
    missing: list[tuple[str, str]]


def term_drift(term: str, spaces: AlignedSpaceSet | Sequence[EmbeddingMatrix], probes: Sequence[str]) -> DriftSeries:
    """Cosine of ``term`` against each probe, computed within each space."""
    space_list = spaces.spaces if isinstance(spaces, AlignedSpaceSet) else list(spaces)
    if not probes:
        raise UsageError("need at least one probe term")
    values = np.full((len(space_list), len(probes)), np.nan)
    missing: list[tuple[str, str]] = []
    term_found = False
    for i, space in enumerate(space_list):
        if term not in space.vocab:
            missing.append((space.label, term))
            continue
        term_found = True
        tv = space.vector(term)
        for j, probe in enumerate(probes):
            if probe not in space.vocab:
                missing.append((space.label, probe))
                continue
            values[i, j] = cosine_similarity(tv, space.vector(probe))
    if not term_found:
        raise DataError(f"term {term!r} absent from every space")
    return DriftSeries(term, list(probes), [s.label for s in space_list], values, missing)
