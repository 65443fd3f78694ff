"""The ``semcarto`` command line: one subcommand per workflow step.

Every subcommand writes schema-versioned CSV. Figure-style pipelines are
compositions of subcommands (see REPLICATION.md); there is no hidden
mega-command. Exit codes: 0 success, 2 usage, 3 data error, 4 numeric.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .alignment import chain_align, term_drift
from .cmd_engine import ConceptSpec, aggregate_series, cmd_scores
from .csvio import write_csv
from .embeddings import (
    EmbeddingMatrix,
    cosine_similarity,
    load_embeddings,
    nearest_neighbors,
    save_embeddings,
)
from .errors import DataError, SemcartoError, UsageError
from .semantics import (
    build_direction,
    bundled_pair_set,
    load_direction,
    project_term,
    read_pair_set,
    save_direction,
)
from .text_pipeline import (
    NormalizationConfig,
    build_dtm,
    DocMeta,
    intersect_vocabularies,
    load_dtm,
    load_stopwords,
    load_tokens,
    normalize_text,
    prune_sparse_terms,
    read_corpus_dir,
    read_corpus_jsonl,
    save_dtm,
    save_tokens,
)
from .training import build_tcm, train_svd_embeddings
from .transport import (
    DEFAULT_EXACT_CAP,
    build_doc_distributions,
    distance_to_similarity,
    pairwise_distance_matrix,
)

SUBCOMMANDS = (
    "preprocess",
    "intersect",
    "train",
    "align",
    "drift",
    "direction",
    "project",
    "cosine",
    "neighbors",
    "info",
    "docdist",
    "cmd",
)

# Hard defaults applied after explicit flags and config-file values.
DEFAULTS: dict[str, dict[str, object]] = {
    "preprocess": {"sparsity": 0.999, "out": "-"},
    "intersect": {"out": "-"},
    "train": {"window": 5, "weighting": "uniform", "dim": 300, "ppmi_shift": 0.0, "label": "local-svd", "out": "-"},
    "align": {"mode": "to-first", "scale": False, "out": "-"},
    "drift": {"no_align": False, "mode": "to-first", "scale": False, "out": "-"},
    "direction": {"pre_normalize": False, "normalize_pairs": False, "out": "-"},
    "project": {"out": "-"},
    "cosine": {"out": "-"},
    "neighbors": {"k": 10, "exclude": "", "out": "-"},
    "info": {"out": "-"},
    "docdist": {
        "method": "lc-rwmd",
        "ground": "euclidean",
        "sided": "symmetric",
        "similarity": "none",
        "weights": "nbow",
        "cap": DEFAULT_EXACT_CAP,
        "threads": 1,
        "out": "-",
    },
    "cmd": {"method": "lc-rwmd", "ground": "euclidean", "no_deltas": False, "threads": 1, "pole": "a", "out": "-"},
}

REQUIRED: dict[str, tuple[str, ...]] = {
    "preprocess": (),
    "intersect": ("a", "b", "out_a", "out_b"),
    "train": ("tokens", "emb_out"),
    "align": ("emb",),
    "drift": ("emb", "term", "probes"),
    "direction": ("emb", "vec_out"),
    "project": ("emb", "direction", "terms"),
    "cosine": ("emb", "a", "b"),
    "neighbors": ("emb", "term"),
    "info": ("emb",),
    "docdist": ("queries", "corpus", "emb"),
    "cmd": ("dtm", "emb"),
}


# Input paths validated at parse time (outputs are never checked).
INPUT_FILES: dict[str, tuple[str, ...]] = {
    "preprocess": ("input", "meta", "stopwords"),
    "intersect": (),
    "train": ("tokens",),
    "align": ("anchor",),
    "drift": ("anchor",),
    "direction": ("pairs", "emb"),
    "project": ("emb", "direction"),
    "cosine": ("emb",),
    "neighbors": ("emb",),
    "info": ("emb",),
    "docdist": ("emb",),
    "cmd": ("emb", "concepts", "direction"),
}
INPUT_DIRS: dict[str, tuple[str, ...]] = {"preprocess": ("input_dir",)}
INPUT_FILE_LISTS: dict[str, tuple[str, ...]] = {"align": ("emb",), "drift": ("emb",)}
INPUT_DTM_PREFIXES: dict[str, tuple[str, ...]] = {
    "intersect": ("a", "b"),
    "docdist": ("queries", "corpus"),
    "cmd": ("dtm",),
}


@dataclass
class RunConfig:
    subcommand: str
    options: argparse.Namespace


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="semcarto",
        description="Cultural cartography over word embeddings: preprocessing, "
        "training, alignment, semantic directions, and transport distances.",
    )
    parser.add_argument("--version", action="version", version=f"semcarto {__version__}")
    subs = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    table: dict[str, argparse.ArgumentParser] = {}

    def sub(name: str, help_text: str) -> argparse.ArgumentParser:
        p = subs.add_parser(name, help=help_text)
        p.add_argument("--config", help="key = value file; explicit flags override it")
        p.add_argument("--out", help="output CSV path ('-' for stdout)")
        table[name] = p
        return p

    p = sub("preprocess", "normalize a corpus and build a pruned document-term matrix")
    p.add_argument("--input", help="newline-delimited JSON corpus (id, text, date, source, group)")
    p.add_argument("--input-dir", help="directory of <id>.txt files")
    p.add_argument("--meta", help="metadata CSV (id,date,source,group) for --input-dir")
    p.add_argument("--sparsity", type=float, help="sparse-term threshold in (0,1], default 0.999")
    p.add_argument("--stopwords", help="override the bundled stop list (one term per line)")
    p.add_argument("--dtm-out", help="prefix for .mtx/.vocab.txt/.meta.csv outputs")
    p.add_argument("--tokens-out", help="write normalized token streams for `train`")

    p = sub("intersect", "restrict two DTMs to their shared vocabulary")
    p.add_argument("--a", help="first DTM prefix")
    p.add_argument("--b", help="second DTM prefix")
    p.add_argument("--out-a", help="output prefix for the first DTM")
    p.add_argument("--out-b", help="output prefix for the second DTM")

    p = sub("train", "train local embeddings (PPMI + truncated SVD) from token streams")
    p.add_argument("--tokens", help="token file from `preprocess --tokens-out`")
    p.add_argument("--window", type=int, help="co-occurrence window, default 5")
    p.add_argument("--weighting", choices=["uniform", "inverse-distance"])
    p.add_argument("--dim", type=int, help="embedding dimensionality, default 300")
    p.add_argument("--ppmi-shift", type=float, help="PPMI shift, default 0")
    p.add_argument("--label", help="provenance label for the trained space")
    p.add_argument("--emb-out", help="output embedding text file")

    p = sub("align", "align embedding spaces with orthogonal Procrustes")
    p.add_argument("--emb", nargs="+", help="two or more embedding files (first = reference)")
    p.add_argument("--mode", choices=["to-first", "to-previous"])
    p.add_argument("--scale", action="store_true", default=None, help="fit a uniform scale factor")
    p.add_argument("--anchor", help="anchor term file (one per line); default = shared vocabulary")
    p.add_argument("--aligned-dir", help="directory for aligned embedding text files")

    p = sub("drift", "per-space cosine of a focal term against probe terms")
    p.add_argument("--emb", nargs="+", help="embedding files, one per space (e.g. per decade)")
    p.add_argument("--term", help="focal term")
    p.add_argument("--probes", help="comma-separated probe terms")
    p.add_argument("--no-align", action="store_true", default=None, help="treat inputs as pre-aligned")
    p.add_argument("--mode", choices=["to-first", "to-previous"])
    p.add_argument("--scale", action="store_true", default=None)
    p.add_argument("--anchor", help="anchor term file for alignment")

    p = sub("direction", "build a semantic direction from juxtaposed term pairs")
    p.add_argument("--pairs", help="pair CSV: header names the poles, rows are pole_a,pole_b")
    p.add_argument("--bundled", help="bundled pair set: affluence, race, morality, immigration")
    p.add_argument("--emb", help="embedding file")
    p.add_argument("--pre-normalize", action="store_true", default=None)
    p.add_argument("--normalize-pairs", action="store_true", default=None)
    p.add_argument("--vec-out", help="output direction vector file")

    p = sub("project", "project terms onto a semantic direction")
    p.add_argument("--emb", help="embedding file")
    p.add_argument("--direction", help="direction vector file from `direction --vec-out`")
    p.add_argument("--terms", help="comma-separated terms")

    p = sub("cosine", "cosine similarity between two terms")
    p.add_argument("--emb", help="embedding file")
    p.add_argument("--a", help="first term")
    p.add_argument("--b", help="second term")

    p = sub("neighbors", "nearest neighbors of a term by cosine")
    p.add_argument("--emb", help="embedding file")
    p.add_argument("--term", help="query term")
    p.add_argument("--k", type=int, help="number of neighbors, default 10")
    p.add_argument("--exclude", help="comma-separated terms to exclude")

    p = sub("info", "vocabulary size and dimensionality of an embedding file")
    p.add_argument("--emb", help="embedding file")

    p = sub("docdist", "document-to-document distance or similarity matrix")
    p.add_argument("--queries", help="query DTM prefix")
    p.add_argument("--corpus", help="corpus DTM prefix")
    p.add_argument("--emb", help="embedding file")
    p.add_argument("--method", choices=["emd", "rwmd", "lc-rwmd", "wcd"])
    p.add_argument("--ground", choices=["euclidean", "cosine"])
    p.add_argument("--sided", choices=["to-corpus", "to-query", "symmetric"])
    p.add_argument("--similarity", choices=["none", "negate-zscore", "inverse"])
    p.add_argument("--weights", choices=["nbow", "raw"])
    p.add_argument("--cap", type=int, help="exact-solver support cap")
    p.add_argument("--threads", type=int, help="worker cap for batch kernels")
    p.add_argument("--group-rows", help="aggregate rows by metadata keys (source,group,year,month,decade)")
    p.add_argument("--group-cols", help="aggregate columns by metadata keys")

    p = sub("cmd", "per-document engagement with a focal concept")
    p.add_argument("--dtm", help="DTM prefix")
    p.add_argument("--emb", help="embedding file")
    p.add_argument("--concept", help="term or compound, e.g. immigration or immigration+crime")
    p.add_argument("--concepts", help="concept CSV (label,kind,payload,pole)")
    p.add_argument("--centroid", help="comma-separated terms averaged into a centroid concept")
    p.add_argument("--direction", help="direction vector file for a direction-pole concept")
    p.add_argument("--pole", choices=["a", "b"], help="which pole of --direction, default a")
    p.add_argument("--method", choices=["exact", "rwmd", "lc-rwmd"])
    p.add_argument("--ground", choices=["euclidean", "cosine"])
    p.add_argument("--threads", type=int)
    p.add_argument("--bucket", choices=["month", "year", "decade"])
    p.add_argument("--bucket-out", help="bucketed means CSV (requires --bucket)")
    p.add_argument("--no-deltas", action="store_true", default=None, help="omit bucket deltas")

    return parser, table


def _load_config_file(path: str) -> dict[str, str]:
    cfg_path = Path(path)
    if not cfg_path.is_file():
        raise DataError(f"config file not found: {path}")
    values: dict[str, str] = {}
    for lineno, line in enumerate(cfg_path.read_text("utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        values[key.strip()] = value.strip()
    return values


def _convert_config_value(action: argparse.Action, key: str, raw: str):
    if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
        lowered = raw.lower()
        if lowered in ("true", "1", "yes"):
            return True
        if lowered in ("false", "0", "no"):
            return False
        raise UsageError(f"config key {key!r} expects a boolean, got {raw!r}")
    if action.nargs in ("+", "*"):
        return raw.split()
    value = action.type(raw) if action.type is not None else raw
    if action.choices is not None and value not in action.choices:
        raise UsageError(f"config key {key!r}: {raw!r} not in {sorted(action.choices)}")
    return value


def parse_invocation(argv: list[str]) -> RunConfig:
    """Parse argv into a resolved RunConfig (flags > config file > defaults)."""
    parser, table = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand is None:
        parser.error("a subcommand is required")
    name = args.subcommand
    actions = {a.dest: a for a in table[name]._actions if a.dest != "help"}
    if args.config is not None:
        for key, raw in _load_config_file(args.config).items():
            dest = key.replace("-", "_")
            if dest not in actions or dest == "config":
                raise UsageError(f"unknown config key {key!r} for subcommand {name!r}")
            if getattr(args, dest) is None:
                setattr(args, dest, _convert_config_value(actions[dest], key, raw))
    for dest, value in DEFAULTS.get(name, {}).items():
        if getattr(args, dest) is None:
            setattr(args, dest, value)
    for dest in REQUIRED[name]:
        if getattr(args, dest) is None:
            flag = "--" + dest.replace("_", "-")
            raise UsageError(f"missing required flag {flag} for subcommand {name!r}")
    _validate_input_paths(name, args)
    return RunConfig(name, args)


def _validate_input_paths(name: str, args: argparse.Namespace) -> None:
    flag = lambda dest: "--" + dest.replace("_", "-")
    for dest in INPUT_FILES.get(name, ()):
        value = getattr(args, dest, None)
        if value is not None and not Path(value).is_file():
            raise DataError(f"{flag(dest)}: file not found: {value}")
    for dest in INPUT_DIRS.get(name, ()):
        value = getattr(args, dest, None)
        if value is not None and not Path(value).is_dir():
            raise DataError(f"{flag(dest)}: directory not found: {value}")
    for dest in INPUT_FILE_LISTS.get(name, ()):
        for value in getattr(args, dest, None) or ():
            if not Path(value).is_file():
                raise DataError(f"{flag(dest)}: file not found: {value}")
    for dest in INPUT_DTM_PREFIXES.get(name, ()):
        value = getattr(args, dest, None)
        if value is None:
            continue
        for suffix in (".mtx", ".vocab.txt", ".meta.csv"):
            if not Path(value + suffix).is_file():
                raise DataError(f"{flag(dest)}: missing DTM file {value + suffix}")


def _require_file(path: str, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise DataError(f"{what} not found: {path}")
    return p


def _split_terms(spec: str) -> list[str]:
    terms = [t.strip() for t in spec.split(",") if t.strip()]
    if not terms:
        raise UsageError("empty term list")
    return terms


# ---------------------------------------------------------------------------
# subcommand handlers


def _run_preprocess(opts) -> None:
    if (opts.input is None) == (opts.input_dir is None):
        raise UsageError("give exactly one of --input or --input-dir")
    if opts.input is not None:
        docs = read_corpus_jsonl(_require_file(opts.input, "corpus"))
    else:
        if opts.meta is None:
            raise UsageError("--input-dir needs --meta")
        docs = read_corpus_dir(opts.input_dir, _require_file(opts.meta, "metadata CSV"))
    cfg_kwargs = {"sparsity_threshold": opts.sparsity}
    if opts.stopwords is not None:
        cfg_kwargs["stopword_list"] = load_stopwords(_require_file(opts.stopwords, "stop list"))
    cfg = NormalizationConfig(**cfg_kwargs)
    token_lists = [normalize_text(d, cfg) for d in docs]
    meta = [DocMeta(d.id, d.date, d.source, d.group) for d in docs]
    dtm = build_dtm(token_lists, meta)
    dtm = prune_sparse_terms(dtm, cfg.sparsity_threshold)
    if opts.tokens_out is not None:
        save_tokens([d.id for d in docs], token_lists, opts.tokens_out)
    if opts.dtm_out is not None:
        save_dtm(dtm, opts.dtm_out)
    empties = set(dtm.empty_doc_ids())
    counts = dtm.matrix
    rows = []
    for i, (doc, toks) in enumerate(zip(docs, token_lists)):
        n_terms = counts.indptr[i + 1] - counts.indptr[i]
        rows.append([doc.id, len(toks), int(n_terms), doc.id in empties])
    write_csv(opts.out, ["doc_id", "n_tokens", "n_terms", "empty"], rows)


def _run_intersect(opts) -> None:
    a = load_dtm(opts.a)
    b = load_dtm(opts.b)
    ia, ib = intersect_vocabularies(a, b)
    save_dtm(ia, opts.out_a)
    save_dtm(ib, opts.out_b)
    rows = [
        ["a", a.n_docs, a.n_terms, ia.n_terms, a.total_count, ia.total_count],
        ["b", b.n_docs, b.n_terms, ib.n_terms, b.total_count, ib.total_count],
    ]
    write_csv(
        opts.out,
        ["side", "docs", "terms_before", "terms_after", "tokens_before", "tokens_after"],
        rows,
    )


def _run_train(opts) -> None:
    _, token_lists = load_tokens(_require_file(opts.tokens, "token file"))
    tcm = build_tcm(token_lists, window=opts.window, weighting=opts.weighting)
    emb = train_svd_embeddings(tcm, d=opts.dim, ppmi_shift=opts.ppmi_shift, label=opts.label)
    save_embeddings(emb, opts.emb_out)
    mass = np.asarray(tcm.matrix.sum(axis=1)).ravel()
    norms = emb.norms()
    rows = [
        [term, float(mass[i]), float(norms[i])]
        for i, term in enumerate(emb.vocab.terms)
    ]
    write_csv(opts.out, ["term", "cooccurrence_mass", "vector_norm"], rows)


def _load_spaces(paths) -> list[EmbeddingMatrix]:
    return [load_embeddings(_require_file(p, "embedding file")) for p in paths]


def _read_anchor(path: str | None) -> list[str] | None:
    if path is None:
        return None
    lines = _require_file(path, "anchor file").read_text("utf-8").splitlines()
    return [ln.strip() for ln in lines if ln.strip()]


def _run_align(opts) -> None:
    if len(opts.emb) < 2:
        raise UsageError("--emb needs at least two embedding files")
    spaces = _load_spaces(opts.emb)
    aligned = chain_align(spaces, mode=opts.mode, anchor=_read_anchor(opts.anchor), scale=opts.scale)
    if opts.aligned_dir is not None:
        out_dir = Path(opts.aligned_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for path, space in zip(opts.emb, aligned.spaces):
            save_embeddings(space, out_dir / (Path(path).stem + ".aligned.txt"))
    rows = []
    for i, (space, fit) in enumerate(zip(aligned.spaces, aligned.fits)):
        if fit is None:
            rows.append([i, space.label, len(aligned.anchor), 0.0, 1.0])
        else:
            rows.append([i, space.label, fit.anchor_size, fit.residual, fit.scale])
    write_csv(opts.out, ["space", "label", "anchor_size", "frobenius_residual", "scale"], rows)


def _run_drift(opts) -> None:
    spaces = _load_spaces(opts.emb)
    probes = _split_terms(opts.probes)
    if opts.no_align or len(spaces) == 1:
        series = term_drift(opts.term, spaces, probes)
    else:
        aligned = chain_align(spaces, mode=opts.mode, anchor=_read_anchor(opts.anchor), scale=opts.scale)
        series = term_drift(opts.term, aligned, probes)
    rows = []
    for i, label in enumerate(series.space_labels):
        for j, probe in enumerate(series.probes):
            value = series.values[i, j]
            rows.append([i, label, series.term, probe, None if np.isnan(value) else float(value)])
    write_csv(opts.out, ["space", "label", "term", "probe", "cosine"], rows)


def _run_direction(opts) -> None:
    if (opts.pairs is None) == (opts.bundled is None):
        raise UsageError("give exactly one of --pairs or --bundled")
    pairs = (
        read_pair_set(_require_file(opts.pairs, "pair CSV"))
        if opts.pairs is not None
        else bundled_pair_set(opts.bundled)
    )
    emb = load_embeddings(_require_file(opts.emb, "embedding file"))
    direction = build_direction(
        pairs, emb, pre_normalize=opts.pre_normalize, normalize_pairs=opts.normalize_pairs
    )
    save_direction(direction, opts.vec_out)
    rows = [[a, b, True] for a, b in direction.source_pairs]
    rows += [[a, b, False] for a, b in direction.skipped]
    write_csv(opts.out, ["pole_a", "pole_b", "used"], rows)


def _run_project(opts) -> None:
    emb = load_embeddings(_require_file(opts.emb, "embedding file"))
    direction = load_direction(_require_file(opts.direction, "direction file"))
    rows = [
        [term, project_term(term, direction, emb), direction.label_a, direction.label_b]
        for term in _split_terms(opts.terms)
    ]
    write_csv(opts.out, ["term", "projection", "pole_a", "pole_b"], rows)


def _run_cosine(opts) -> None:
    emb = load_embeddings(_require_file(opts.emb, "embedding file"))
    value = cosine_similarity(emb.vector(opts.a), emb.vector(opts.b))
    write_csv(opts.out, ["term_a", "term_b", "cosine"], [[opts.a, opts.b, value]])


def _run_neighbors(opts) -> None:
    emb = load_embeddings(_require_file(opts.emb, "embedding file"))
    exclude = [t.strip() for t in opts.exclude.split(",") if t.strip()]
    got = nearest_neighbors(opts.term, opts.k, emb, exclude=exclude)
    rows = [[rank + 1, term, sim] for rank, (term, sim) in enumerate(got)]
    write_csv(opts.out, ["rank", "term", "similarity"], rows)


def _run_info(opts) -> None:
    emb = load_embeddings(_require_file(opts.emb, "embedding file"))
    write_csv(opts.out, ["terms", "dimensions", "label"], [[len(emb), emb.dim, emb.label]])


def _meta_group_key(meta: DocMeta, keys: list[str]) -> str:
    from .cmd_engine import _bucket_key

    parts = []
    for key in keys:
        if key == "source":
            parts.append(meta.source or "")
        elif key == "group":
            parts.append(meta.group or "")
        elif key in ("year", "month", "decade"):
            if meta.date is None:
                raise DataError(f"document {meta.id!r} has no date; cannot group by {key}")
            parts.append(_bucket_key(meta.date, key))
        else:
            raise UsageError(f"unknown group key {key!r}; use source, group, year, month, decade")
    return "/".join(parts)


def _run_docdist(opts) -> None:
    queries = load_dtm(opts.queries)
    corpus = load_dtm(opts.corpus)
    emb = load_embeddings(_require_file(opts.emb, "embedding file"))
    normalize = opts.weights == "nbow"
    q_dists, q_skipped, _ = build_doc_distributions(queries, emb, normalize=normalize)
    c_dists, c_skipped, _ = build_doc_distributions(corpus, emb, normalize=normalize)
    for label, skipped in (("query", q_skipped), ("corpus", c_skipped)):
        if skipped:
            print(
                f"semcarto docdist: skipped {len(skipped)} empty {label} document(s)",
                file=sys.stderr,
            )
    result = pairwise_distance_matrix(
        q_dists,
        c_dists,
        emb,
        method=opts.method,
        ground=opts.ground,
        sided=opts.sided,
        support_cap=opts.cap,
        threads=opts.threads,
    )
    if opts.similarity != "none":
        result = distance_to_similarity(result, opts.similarity)
    header = ["row_id", "col_id", "value", "method", "ground_metric"]
    if opts.group_rows is None and opts.group_cols is None:
        rows = [
            [rid, cid, result.values[i, j], result.method, result.ground_metric]
            for i, rid in enumerate(result.row_ids)
            for j, cid in enumerate(result.col_ids)
        ]
        write_csv(opts.out, header, rows)
        return
    row_keys_spec = _split_terms(opts.group_rows) if opts.group_rows else []
    col_keys_spec = _split_terms(opts.group_cols) if opts.group_cols else []
    q_meta = {m.id: m for m in queries.doc_meta}
    c_meta = {m.id: m for m in corpus.doc_meta}
    groups: dict[tuple[str, str], list[float]] = {}
    for i, rid in enumerate(result.row_ids):
        rkey = _meta_group_key(q_meta[rid], row_keys_spec) if row_keys_spec else rid
        for j, cid in enumerate(result.col_ids):
            ckey = _meta_group_key(c_meta[cid], col_keys_spec) if col_keys_spec else cid
            groups.setdefault((rkey, ckey), []).append(float(result.values[i, j]))
    rows = [
        [rkey, ckey, float(np.mean(vals)), len(vals), result.method, result.ground_metric]
        for (rkey, ckey), vals in sorted(groups.items())
    ]
    write_csv(
        opts.out,
        ["row_key", "col_key", "mean_value", "n_pairs", "method", "ground_metric"],
        rows,
    )


def _concepts_from_options(opts):
    """Collect concept requests; centroid payloads resolve once the embedding loads."""
    pending: list = []
    if opts.concept is not None:
        terms = tuple(t.strip() for t in opts.concept.split("+") if t.strip())
        kind = "term" if len(terms) == 1 else "compound"
        pending.append(ConceptSpec(opts.concept, kind, terms=terms))
    if opts.centroid is not None:
        pending.append(("centroid", f"centroid:{opts.centroid}", _split_terms(opts.centroid)))
    if opts.direction is not None:
        direction = load_direction(_require_file(opts.direction, "direction file"))
        pole = +1 if opts.pole == "a" else -1
        pole_label = direction.label_a if pole == +1 else direction.label_b
        pending.append(
            ConceptSpec(f"{pole_label}-pole", "direction-pole", direction=direction, pole=pole)
        )
    if opts.concepts is not None:
        from .csvio import read_csv

        header, rows = read_csv(_require_file(opts.concepts, "concept CSV"))
        expected = ["label", "kind", "payload", "pole"]
        if [h.strip() for h in header[: len(expected)]] != expected:
            raise DataError(f"concept CSV must have columns {expected}, got {header}")
        for row in rows:
            label, kind, payload = row[0], row[1], row[2]
            pole_cell = row[3] if len(row) > 3 else ""
            if kind in ("term", "compound"):
                terms = tuple(t.strip() for t in payload.split(";") if t.strip())
                pending.append(ConceptSpec(label, kind, terms=terms))
            elif kind == "centroid":
                terms = [t.strip() for t in payload.split(";") if t.strip()]
                pending.append(("centroid", label, terms))
            elif kind == "direction-pole":
                direction = load_direction(_require_file(payload, "direction file"))
                pole = -1 if pole_cell.strip() in ("b", "-", "-1") else +1
                pending.append(ConceptSpec(label, kind, direction=direction, pole=pole))
            else:
                raise DataError(f"concept {label!r}: unknown kind {kind!r}")
    if not pending:
        raise UsageError("give one of --concept, --concepts, --centroid, or --direction")
    return pending


def _resolve_concept(spec, emb: EmbeddingMatrix) -> ConceptSpec:
    if isinstance(spec, ConceptSpec):
        return spec
    from .semantics import build_centroid

    _, label, terms = spec
    return ConceptSpec(label, "centroid", centroid=build_centroid(terms, emb))


def _run_cmd(opts) -> None:
    dtm = load_dtm(opts.dtm)
    emb = load_embeddings(_require_file(opts.emb, "embedding file"))
    raw_specs = _concepts_from_options(opts)
    score_rows = []
    bucket_rows = []
    for raw_spec in raw_specs:
        spec = _resolve_concept(raw_spec, emb)
        series = cmd_scores(
            dtm, spec, emb, method=opts.method, ground=opts.ground, threads=opts.threads
        )
        if series.skipped_docs:
            print(
                f"semcarto cmd: skipped {len(series.skipped_docs)} empty document(s) "
                f"for concept {spec.label!r}",
                file=sys.stderr,
            )
        for i, doc_id in enumerate(series.doc_ids):
            score_rows.append(
                [doc_id, series.dates[i], series.raw[i], series.standardized[i], spec.label]
            )
        if opts.bucket is not None:
            for row in aggregate_series(series, opts.bucket, deltas=not opts.no_deltas):
                bucket_rows.append([row.bucket, row.mean, row.delta, row.n_docs, spec.label])
    write_csv(opts.out, ["doc_id", "date", "raw", "standardized", "concept_label"], score_rows)
    if opts.bucket is not None:
        if opts.bucket_out is None:
            raise UsageError("--bucket needs --bucket-out")
        write_csv(
            opts.bucket_out,
            ["bucket", "mean", "delta", "n_docs", "concept_label"],
            bucket_rows,
        )


HANDLERS = {
    "preprocess": _run_preprocess,
    "intersect": _run_intersect,
    "train": _run_train,
    "align": _run_align,
    "drift": _run_drift,
    "direction": _run_direction,
    "project": _run_project,
    "cosine": _run_cosine,
    "neighbors": _run_neighbors,
    "info": _run_info,
    "docdist": _run_docdist,
    "cmd": _run_cmd,
}


def run(config: RunConfig) -> int:
    HANDLERS[config.subcommand](config.options)
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    subcommand = None
    try:
        config = parse_invocation(argv)
        subcommand = config.subcommand
        return run(config)
    except SemcartoError as exc:
        line = json.dumps(
            {"error": str(exc), "code": exc.code, "subcommand": subcommand}, ensure_ascii=False
        )
        print(line, file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
