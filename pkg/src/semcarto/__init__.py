"""Semantic cartography toolkit.

Preprocess corpora into document-term matrices, load or train embedding
spaces, align spaces across corpus subsets, extract semantic directions
and centroids, and measure term drift, document similarity (transport
family), and document-concept engagement.
"""

from .alignment import AlignedSpaceSet, DriftSeries, chain_align, procrustes_align, term_drift
from .cmd_engine import ConceptSpec, EngagementSeries, aggregate_series, cmd_scores, make_pseudo_doc
from .embeddings import (
    EmbeddingMatrix,
    cosine_similarity,
    load_embeddings,
    nearest_neighbors,
    nearest_to_vector,
    save_embeddings,
    vector_arithmetic,
)
from .errors import DataError, NumericError, SemcartoError, UsageError
from .semantics import (
    SemanticCentroid,
    SemanticDirection,
    TermPairSet,
    build_centroid,
    build_direction,
    bundled_pair_set,
    project_term,
    read_pair_set,
)
from .text_pipeline import (
    DocumentTermMatrix,
    DocMeta,
    NormalizationConfig,
    RawDocument,
    build_dtm,
    intersect_vocabularies,
    load_dtm,
    normalize_text,
    prune_sparse_terms,
    save_dtm,
)
from .training import TermContextMatrix, build_tcm, train_svd_embeddings
from .transport import (
    DistanceMatrixResult,
    DocDistribution,
    build_doc_distributions,
    distance_to_similarity,
    exact_wmd,
    lc_rwmd_batch,
    pairwise_distance_matrix,
    rwmd,
    wcd,
)
from .vocab import Vocabulary

__version__ = "0.1.0"

__all__ = [
    "AlignedSpaceSet",
    "ConceptSpec",
    "DataError",
    "DistanceMatrixResult",
    "DocDistribution",
    "DocMeta",
    "DocumentTermMatrix",
    "DriftSeries",
    "EmbeddingMatrix",
    "EngagementSeries",
    "NormalizationConfig",
    "NumericError",
    "RawDocument",
    "SemanticCentroid",
    "SemanticDirection",
    "SemcartoError",
    "TermContextMatrix",
    "TermPairSet",
    "UsageError",
    "Vocabulary",
    "aggregate_series",
    "build_centroid",
    "build_direction",
    "build_doc_distributions",
    "build_dtm",
    "build_tcm",
    "bundled_pair_set",
    "chain_align",
    "cmd_scores",
    "cosine_similarity",
    "distance_to_similarity",
    "exact_wmd",
    "intersect_vocabularies",
    "lc_rwmd_batch",
    "load_dtm",
    "load_embeddings",
    "make_pseudo_doc",
    "nearest_neighbors",
    "nearest_to_vector",
    "normalize_text",
    "pairwise_distance_matrix",
    "procrustes_align",
    "project_term",
    "prune_sparse_terms",
    "read_pair_set",
    "rwmd",
    "save_dtm",
    "save_embeddings",
    "term_drift",
    "train_svd_embeddings",
    "vector_arithmetic",
    "wcd",
]
