/**
 * Scripting bindings for the semcarto toolkit.
 *
 * Every function shells out to the `semcarto` CLI and parses its
 * schema-versioned CSV, so results are identical to the CLI's by
 * construction and no numeric logic lives on this side. Handles are
 * frozen value objects pointing at files the CLI understands.
 */

import { existsSync } from "node:fs";
import { join } from "node:path";

import { SemcartoError } from "./errors.js";
import { asNumber, readCsvFile, runCli, runForCsv, scratchDir } from "./runner.js";

export { SemcartoError } from "./errors.js";
export type { SemcartoErrorCode } from "./errors.js";

export interface EmbeddingHandle {
  readonly kind: "embedding";
  readonly path: string;
  readonly terms: number;
  readonly dimensions: number;
  readonly label: string;
}

export interface DtmHandle {
  readonly kind: "dtm";
  readonly prefix: string;
}

export interface DirectionHandle {
  readonly kind: "direction";
  readonly vecPath: string;
  readonly labelA: string;
  readonly labelB: string;
  readonly pairsUsed: ReadonlyArray<readonly [string, string]>;
  readonly pairsSkipped: ReadonlyArray<readonly [string, string]>;
}

export interface Neighbor {
  readonly term: string;
  readonly similarity: number;
}

/** Row-major dense matrix in the host language's standard numeric buffer. */
export interface DistanceMatrix {
  readonly rowIds: ReadonlyArray<string>;
  readonly colIds: ReadonlyArray<string>;
  readonly values: Float64Array;
  readonly nRows: number;
  readonly nCols: number;
  readonly method: string;
  readonly groundMetric: string;
}

export interface EngagementRow {
  readonly docId: string;
  readonly date: string | null;
  readonly raw: number;
  readonly standardized: number;
  readonly conceptLabel: string;
}

export interface LcRwmdOptions {
  ground?: "euclidean" | "cosine";
  sided?: "to-corpus" | "to-query" | "symmetric";
  similarity?: "none" | "negate-zscore" | "inverse";
}

export interface CmdOptions {
  method?: "exact" | "rwmd" | "lc-rwmd";
  ground?: "euclidean" | "cosine";
}

export type ConceptRequest =
  | { kind: "term"; term: string }
  | { kind: "compound"; terms: string[] }
  | { kind: "centroid"; terms: string[] }
  | { kind: "direction-pole"; direction: DirectionHandle; pole: "a" | "b" };

/** Validate an embedding file via the CLI and wrap it in a frozen handle. */
export function loadEmbeddings(path: string): EmbeddingHandle {
  const { rows } = runForCsv(["info", "--emb", path]);
  const [terms, dimensions, label] = rows[0];
  return Object.freeze({
    kind: "embedding" as const,
    path,
    terms: asNumber(terms, "terms"),
    dimensions: asNumber(dimensions, "dimensions"),
    label,
  });
}

/** Wrap an existing DTM prefix (.mtx/.vocab.txt/.meta.csv) in a handle. */
export function loadDtm(prefix: string): DtmHandle {
  for (const suffix of [".mtx", ".vocab.txt", ".meta.csv"]) {
    if (!existsSync(prefix + suffix)) {
      throw new SemcartoError(`missing DTM file ${prefix + suffix}`, 3);
    }
  }
  return Object.freeze({ kind: "dtm" as const, prefix });
}

export function cosineSimilarity(emb: EmbeddingHandle, termA: string, termB: string): number {
  const { rows } = runForCsv(["cosine", "--emb", emb.path, "--a", termA, "--b", termB]);
  return asNumber(rows[0][2], "cosine");
}

export function nearestNeighbors(
  emb: EmbeddingHandle,
  term: string,
  k: number,
  exclude: string[] = [],
): Neighbor[] {
  const args = ["neighbors", "--emb", emb.path, "--term", term, "--k", String(k)];
  if (exclude.length > 0) {
    args.push("--exclude", exclude.join(","));
  }
  const { rows } = runForCsv(args);
  return rows.map((r) =>
    Object.freeze({ term: r[1], similarity: asNumber(r[2], "similarity") }),
  );
}

export interface BuildDirectionOptions {
  preNormalize?: boolean;
  normalizePairs?: boolean;
  /** Where to store the direction vector; defaults to a scratch file. */
  vecOut?: string;
}

export function buildDirection(
  emb: EmbeddingHandle,
  pairsCsvPath: string,
  options: BuildDirectionOptions = {},
): DirectionHandle {
  const vecOut = options.vecOut ?? join(scratchDir(), "direction.vec");
  const args = ["direction", "--pairs", pairsCsvPath, "--emb", emb.path, "--vec-out", vecOut];
  if (options.preNormalize) args.push("--pre-normalize");
  if (options.normalizePairs) args.push("--normalize-pairs");
  const { rows } = runForCsv(args);
  const used = rows.filter((r) => r[2] === "true").map((r) => [r[0], r[1]] as const);
  const skipped = rows.filter((r) => r[2] === "false").map((r) => [r[0], r[1]] as const);
  // the vec file stores "<labelA>__vs__<labelB>" as its token
  const token = readCsvFile(pairsCsvPath).header;
  return Object.freeze({
    kind: "direction" as const,
    vecPath: vecOut,
    labelA: token[0],
    labelB: token[1],
    pairsUsed: Object.freeze(used),
    pairsSkipped: Object.freeze(skipped),
  });
}

export function projectTerm(
  emb: EmbeddingHandle,
  direction: DirectionHandle,
  term: string,
): number {
  const { rows } = runForCsv([
    "project",
    "--emb",
    emb.path,
    "--direction",
    direction.vecPath,
    "--terms",
    term,
  ]);
  return asNumber(rows[0][1], "projection");
}

export function lcRwmdBatch(
  queries: DtmHandle,
  corpus: DtmHandle,
  emb: EmbeddingHandle,
  options: LcRwmdOptions = {},
): DistanceMatrix {
  const args = [
    "docdist",
    "--queries",
    queries.prefix,
    "--corpus",
    corpus.prefix,
    "--emb",
    emb.path,
    "--method",
    "lc-rwmd",
  ];
  if (options.ground) args.push("--ground", options.ground);
  if (options.sided) args.push("--sided", options.sided);
  if (options.similarity && options.similarity !== "none") {
    args.push("--similarity", options.similarity);
  }
  const { rows } = runForCsv(args);
  const rowIds: string[] = [];
  const colIds: string[] = [];
  const rowIndex = new Map<string, number>();
  const colIndex = new Map<string, number>();
  for (const r of rows) {
    if (!rowIndex.has(r[0])) {
      rowIndex.set(r[0], rowIds.length);
      rowIds.push(r[0]);
    }
    if (!colIndex.has(r[1])) {
      colIndex.set(r[1], colIds.length);
      colIds.push(r[1]);
    }
  }
  const values = new Float64Array(rowIds.length * colIds.length);
  let method = "lc-rwmd";
  let ground = "euclidean";
  for (const r of rows) {
    values[rowIndex.get(r[0])! * colIds.length + colIndex.get(r[1])!] = asNumber(r[2], "value");
    method = r[3];
    ground = r[4];
  }
  return Object.freeze({
    rowIds: Object.freeze(rowIds),
    colIds: Object.freeze(colIds),
    values,
    nRows: rowIds.length,
    nCols: colIds.length,
    method,
    groundMetric: ground,
  });
}

function conceptArgs(concept: string | ConceptRequest): string[] {
  if (typeof concept === "string") {
    return ["--concept", concept];
  }
  switch (concept.kind) {
    case "term":
      return ["--concept", concept.term];
    case "compound":
      return ["--concept", concept.terms.join("+")];
    case "centroid":
      return ["--centroid", concept.terms.join(",")];
    case "direction-pole":
      return ["--direction", concept.direction.vecPath, "--pole", concept.pole];
  }
}

export function cmdScores(
  dtm: DtmHandle,
  emb: EmbeddingHandle,
  concept: string | ConceptRequest,
  options: CmdOptions = {},
): EngagementRow[] {
  const args = ["cmd", "--dtm", dtm.prefix, "--emb", emb.path, ...conceptArgs(concept)];
  if (options.method) args.push("--method", options.method);
  if (options.ground) args.push("--ground", options.ground);
  const { rows } = runForCsv(args);
  return rows.map((r) =>
    Object.freeze({
      docId: r[0],
      date: r[1] === "" ? null : r[1],
      raw: asNumber(r[2], "raw"),
      standardized: asNumber(r[3], "standardized"),
      conceptLabel: r[4],
    }),
  );
}

export { runCli, readCsvFile } from "./runner.js";
