"""Corpus preprocessing: normalization, document-term matrices, pruning.

The normalization order is a contract, not a convenience: HTML/URL and
non-ASCII stripping, contraction expansion, punctuation removal,
ordinal-to-word, numeral-to-word, whitespace collapse, lowercasing,
stopword removal. Tokenization is whitespace splitting after all of it.
"""

from __future__ import annotations

import csv
import datetime
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import DataError, UsageError
from .numwords import cardinal_words, ordinal_words
from .vocab import Vocabulary

_HTML_TAG_RE = re.compile(r"<[^>]*>")
_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_NON_ASCII_RE = re.compile(r"[^\x00-\x7f]+")
_PUNCT_RE = re.compile(r"[!\"#$%&'()*+,\-./:;<=>?@\[\\\]^_`{|}~]")
_ORDINAL_RE = re.compile(r"\b(\d+)(st|nd|rd|th)\b", re.IGNORECASE)
_NUMERAL_RE = re.compile(r"\d+")
_WS_RE = re.compile(r"\s+")


def default_stopwords() -> frozenset[str]:
    """Bundled Snowball English stop list; injected data, swappable per run."""
    text = resources.files("semcarto.data").joinpath("stopwords_snowball.txt").read_text("utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


def default_contractions() -> dict[str, str]:
    text = resources.files("semcarto.data").joinpath("contractions.csv").read_text("utf-8")
    rows = list(csv.reader(text.splitlines()))
    return {k: v for k, v in rows[1:]}


def load_stopwords(path: str | Path) -> frozenset[str]:
    lines = Path(path).read_text("utf-8").splitlines()
    return frozenset(line.strip() for line in lines if line.strip())


@dataclass(frozen=True)
class RawDocument:
    """One input document; ``text`` may be empty (flagged later, never dropped)."""

    id: str
    text: str
    date: datetime.date | None = None
    source: str | None = None
    group: str | None = None


@dataclass(frozen=True)
class DocMeta:
    id: str
    date: datetime.date | None = None
    source: str | None = None
    group: str | None = None


@dataclass
class NormalizationConfig:
    strip_non_ascii: bool = True
    strip_urls_html: bool = True
    contraction_map: Mapping[str, str] = field(default_factory=default_contractions)
    ordinal_to_word: bool = True
    numeral_to_word: bool = True
    lowercase: bool = True
    stopword_list: frozenset[str] = field(default_factory=default_stopwords)
    sparsity_threshold: float = 0.999

    def __post_init__(self) -> None:
        for key in self.contraction_map:
            if key != key.lower():
                raise DataError(f"contraction keys must be lowercase: {key!r}")
        if not (0.0 < self.sparsity_threshold <= 1.0):
            raise UsageError("sparsity_threshold must be in (0, 1]")
        self.stopword_list = frozenset(self.stopword_list)

    def _contraction_re(self) -> re.Pattern[str] | None:
        if not self.contraction_map:
            return None
        cached = getattr(self, "_contraction_cache", None)
        if cached is not None and cached[0] is self.contraction_map:
            return cached[1]
        keys = sorted(self.contraction_map, key=len, reverse=True)
        compiled = re.compile(
            r"\b(?:" + "|".join(re.escape(k) for k in keys) + r")\b", re.IGNORECASE
        )
        self._contraction_cache = (self.contraction_map, compiled)
        return compiled


def normalize_text(doc: RawDocument | str, cfg: NormalizationConfig) -> list[str]:
    """Apply the pinned normalization order and return the token list."""
    text = doc.text if isinstance(doc, RawDocument) else doc
    if cfg.strip_urls_html:
        text = _HTML_TAG_RE.sub(" ", text)
        text = _URL_RE.sub(" ", text)
    if cfg.strip_non_ascii:
        text = _NON_ASCII_RE.sub("", text)
    contraction_re = cfg._contraction_re()
    if contraction_re is not None:
        text = contraction_re.sub(lambda m: cfg.contraction_map[m.group(0).lower()], text)
    text = _PUNCT_RE.sub("", text)
    if cfg.ordinal_to_word:
        text = _ORDINAL_RE.sub(lambda m: " " + " ".join(ordinal_words(int(m.group(1)))) + " ", text)
    if cfg.numeral_to_word:
        text = _NUMERAL_RE.sub(lambda m: " " + " ".join(cardinal_words(int(m.group(0)))) + " ", text)
    text = _WS_RE.sub(" ", text).strip()
    if cfg.lowercase:
        text = text.lower()
    tokens = text.split()
    if cfg.stopword_list:
        tokens = [t for t in tokens if t not in cfg.stopword_list]
    return tokens


class DocumentTermMatrix:
    """Sparse raw counts of retained terms per document, plus metadata.

    Rows follow ``doc_meta`` order; columns follow ``vocab`` ids. Counts are
    positive integers; a document emptied by pruning keeps its (zero) row.
    """

    def __init__(self, vocab: Vocabulary, matrix: sp.spmatrix, doc_meta: Sequence[DocMeta]):
        matrix = sp.csr_matrix(matrix, dtype=np.int64)
        if matrix.shape != (len(doc_meta), len(vocab)):
            raise DataError(
                f"matrix shape {matrix.shape} does not match "
                f"{len(doc_meta)} docs x {len(vocab)} terms"
            )
        matrix.eliminate_zeros()
        if matrix.nnz and matrix.data.min() < 1:
            raise DataError("counts must be positive integers")
        self.vocab = vocab
        self.matrix = matrix
        self.doc_meta = list(doc_meta)

    @property
    def n_docs(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_terms(self) -> int:
        return self.matrix.shape[1]

    @property
    def total_count(self) -> int:
        return int(self.matrix.sum())

    def doc_ids(self) -> list[str]:
        return [m.id for m in self.doc_meta]

    def empty_doc_ids(self) -> list[str]:
        row_sums = np.asarray(self.matrix.sum(axis=1)).ravel()
        return [m.id for m, s in zip(self.doc_meta, row_sums) if s == 0]

    def row_counts(self, row: int) -> dict[str, int]:
        sl = self.matrix.getrow(row).tocoo()
        return {self.vocab.term(j): int(v) for j, v in zip(sl.col, sl.data)}


def build_dtm(
    token_lists: Sequence[Sequence[str]],
    doc_meta: Sequence[DocMeta] | None = None,
) -> DocumentTermMatrix:
    """Count token multiplicities into a DTM; vocab = all occurring terms."""
    if not token_lists:
        raise DataError("empty corpus")
    if doc_meta is None:
        doc_meta = [DocMeta(id=f"d{i}") for i in range(len(token_lists))]
    if len(doc_meta) != len(token_lists):
        raise DataError("metadata length does not match document count")
    if all(len(toks) == 0 for toks in token_lists):
        raise DataError("empty corpus")
    vocab = Vocabulary.from_sorted(t for toks in token_lists for t in toks)
    rows: list[int] = []
    cols: list[int] = []
    vals: list[int] = []
    for i, toks in enumerate(token_lists):
        counts: dict[str, int] = {}
        for t in toks:
            counts[t] = counts.get(t, 0) + 1
        for t, c in counts.items():
            rows.append(i)
            cols.append(vocab.id(t))
            vals.append(c)
    matrix = sp.coo_matrix((vals, (rows, cols)), shape=(len(token_lists), len(vocab)))
    return DocumentTermMatrix(vocab, matrix, doc_meta)


def prune_sparse_terms(dtm: DocumentTermMatrix, threshold: float) -> DocumentTermMatrix:
    """Drop terms absent in at least ``threshold`` of documents.

    A term is removed iff (docs not containing it) / (total docs) >= threshold.
    Documents may become empty; they are retained (and flagged downstream).
    """
    if not (0.0 < threshold <= 1.0):
        raise UsageError("sparsity threshold must be in (0, 1]")
    n_docs = dtm.n_docs
    doc_freq = np.asarray((dtm.matrix > 0).sum(axis=0)).ravel()
    absent_frac = (n_docs - doc_freq) / n_docs
    keep = absent_frac < threshold
    kept_terms = [t for t, k in zip(dtm.vocab.terms, keep) if k]
    new_vocab = Vocabulary(kept_terms)
    new_matrix = dtm.matrix[:, np.flatnonzero(keep)]
    return DocumentTermMatrix(new_vocab, new_matrix, dtm.doc_meta)


def intersect_vocabularies(
    a: DocumentTermMatrix, b: DocumentTermMatrix
) -> tuple[DocumentTermMatrix, DocumentTermMatrix]:
    """Restrict both DTMs to their shared vocabulary (identical term ids)."""
    shared = sorted(set(a.vocab.terms) & set(b.vocab.terms))
    if not shared:
        raise DataError("disjoint vocabularies")
    vocab = Vocabulary(shared)
    a_cols = np.array([a.vocab.id(t) for t in shared])
    b_cols = np.array([b.vocab.id(t) for t in shared])
    return (
        DocumentTermMatrix(vocab, a.matrix[:, a_cols], a.doc_meta),
        DocumentTermMatrix(vocab, b.matrix[:, b_cols], b.doc_meta),
    )


def parse_date(value: str | None) -> datetime.date | None:
    """Accept YYYY, YYYY-MM, or YYYY-MM-DD; empty means no date."""
    if value is None:
        return None
    value = value.strip()
    if not value:
        return None
    parts = value.split("-")
    try:
        if len(parts) == 1:
            return datetime.date(int(parts[0]), 1, 1)
        if len(parts) == 2:
            return datetime.date(int(parts[0]), int(parts[1]), 1)
        return datetime.date.fromisoformat(value)
    except ValueError as exc:
        raise DataError(f"bad date {value!r}: {exc}") from None


def read_corpus_jsonl(path: str | Path) -> list[RawDocument]:
    """Newline-delimited JSON records with fields id, text, date?, source?, group?."""
    docs: list[RawDocument] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: bad JSON record: {exc}") from None
            if "id" not in rec or "text" not in rec:
                raise DataError(f"{path}:{lineno}: record needs 'id' and 'text'")
            doc_id = str(rec["id"])
            if doc_id in seen:
                raise DataError(f"{path}:{lineno}: duplicate document id {doc_id!r}")
            seen.add(doc_id)
            docs.append(
                RawDocument(
                    id=doc_id,
                    text=str(rec["text"]),
                    date=parse_date(rec.get("date")),
                    source=rec.get("source"),
                    group=rec.get("group"),
                )
            )
    if not docs:
        raise DataError(f"no records in {path}")
    return docs


def read_corpus_dir(directory: str | Path, meta_path: str | Path) -> list[RawDocument]:
    """Directory of <id>.txt files described by a metadata CSV (id,date,source,group)."""
    directory = Path(directory)
    docs: list[RawDocument] = []
    seen: set[str] = set()
    with open(meta_path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "id" not in reader.fieldnames:
            raise DataError(f"{meta_path}: metadata CSV needs an 'id' column")
        for rec in reader:
            doc_id = rec["id"]
            if doc_id in seen:
                raise DataError(f"{meta_path}: duplicate document id {doc_id!r}")
            seen.add(doc_id)
            text_path = directory / f"{doc_id}.txt"
            if not text_path.is_file():
                raise DataError(f"missing document file {text_path}")
            docs.append(
                RawDocument(
                    id=doc_id,
                    text=text_path.read_text("utf-8"),
                    date=parse_date(rec.get("date")),
                    source=rec.get("source") or None,
                    group=rec.get("group") or None,
                )
            )
    if not docs:
        raise DataError(f"no documents listed in {meta_path}")
    return docs


def corpus_to_dtm(docs: Sequence[RawDocument], cfg: NormalizationConfig) -> DocumentTermMatrix:
    token_lists = [normalize_text(d, cfg) for d in docs]
    meta = [DocMeta(id=d.id, date=d.date, source=d.source, group=d.group) for d in docs]
    return build_dtm(token_lists, meta)


def save_tokens(doc_ids: Sequence[str], token_lists: Sequence[Sequence[str]], path: str | Path) -> None:
    """One document per line: id, a tab, then space-joined tokens."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc_id, toks in zip(doc_ids, token_lists):
            fh.write(doc_id + "\t" + " ".join(toks) + "\n")


def load_tokens(path: str | Path) -> tuple[list[str], list[list[str]]]:
    ids: list[str] = []
    token_lists: list[list[str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            doc_id, sep, rest = line.partition("\t")
            if not sep:
                raise DataError(f"{path}:{lineno}: expected '<id>\\t<tokens>'")
            ids.append(doc_id)
            token_lists.append(rest.split())
    if not ids:
        raise DataError(f"no documents in {path}")
    return ids, token_lists


def save_dtm(dtm: DocumentTermMatrix, prefix: str | Path) -> None:
    """Write <prefix>.mtx (Matrix Market), <prefix>.vocab.txt, <prefix>.meta.csv."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    scipy.io.mmwrite(str(prefix) + ".mtx", dtm.matrix.tocoo(), field="integer")
    with open(str(prefix) + ".vocab.txt", "w", encoding="utf-8") as fh:
        for term in dtm.vocab.terms:
            fh.write(term + "\n")
    with open(str(prefix) + ".meta.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "date", "source", "group"])
        for m in dtm.doc_meta:
            writer.writerow([m.id, m.date.isoformat() if m.date else "", m.source or "", m.group or ""])


def load_dtm(prefix: str | Path) -> DocumentTermMatrix:
    prefix = str(prefix)
    for suffix in (".mtx", ".vocab.txt", ".meta.csv"):
        if not Path(prefix + suffix).is_file():
            raise DataError(f"missing DTM file {prefix + suffix}")
    matrix = sp.csr_matrix(scipy.io.mmread(prefix + ".mtx"), dtype=np.int64)
    terms = [line for line in Path(prefix + ".vocab.txt").read_text("utf-8").splitlines()]
    vocab = Vocabulary(terms)
    meta: list[DocMeta] = []
    with open(prefix + ".meta.csv", encoding="utf-8", newline="") as fh:
        for rec in csv.DictReader(fh):
            meta.append(
                DocMeta(
                    id=rec["id"],
                    date=parse_date(rec.get("date")),
                    source=rec.get("source") or None,
                    group=rec.get("group") or None,
                )
            )
    return DocumentTermMatrix(vocab, matrix, meta)
