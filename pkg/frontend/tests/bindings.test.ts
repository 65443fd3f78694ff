import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { beforeAll, describe, expect, it } from "vitest";

import {
  buildDirection,
  cmdScores,
  cosineSimilarity,
  lcRwmdBatch,
  loadDtm,
  loadEmbeddings,
  nearestNeighbors,
  projectTerm,
  readCsvFile,
  runCli,
  SemcartoError,
  type DirectionHandle,
  type DtmHandle,
  type EmbeddingHandle,
} from "../src/index.js";

const EMB_TEXT = `immigration 1.0 0.1 0.0
immigrant 0.9 0.2 0.1
crime 0.8 0.3 0.0
schools 0.2 0.9 0.1
rock 0.0 0.1 0.9
music 0.1 0.0 0.8
welcome 0.2 0.7 0.3
policy 0.5 0.5 0.1
`;

const ORTHO_TEXT = `a 1 0
b 0 1
`;

const CORPUS = [
  '{"id": "n1", "text": "immigration crime crime policy", "date": "2016-10-01", "source": "fox", "group": "right"}',
  '{"id": "n2", "text": "schools welcome immigrant", "date": "2016-11-15", "source": "nyt", "group": "left"}',
  '{"id": "n3", "text": "rock music rock", "date": "2017-01-05", "source": "nyt", "group": "left"}',
  '{"id": "n4", "text": "immigration policy schools", "date": "2017-02-10", "source": "fox", "group": "right"}',
  '{"id": "n5", "text": "music welcome", "date": "2017-03-01", "source": "nyt", "group": "left"}',
].join("\n");

const PAIRS = `immigrant,citizen
immigration,schools
crime,welcome
opulent,skint
`;

let dir: string;
let emb: EmbeddingHandle;
let ortho: EmbeddingHandle;
let dtm: DtmHandle;
let direction: DirectionHandle;

beforeAll(() => {
  dir = mkdtempSync(join(tmpdir(), "semcarto-bindings-"));
  writeFileSync(join(dir, "emb.txt"), EMB_TEXT);
  writeFileSync(join(dir, "ortho.txt"), ORTHO_TEXT);
  writeFileSync(join(dir, "corpus.jsonl"), CORPUS + "\n");
  writeFileSync(join(dir, "pairs.csv"), PAIRS);
  runCli([
    "preprocess",
    "--input",
    join(dir, "corpus.jsonl"),
    "--dtm-out",
    join(dir, "news"),
    "--out",
    join(dir, "prep.csv"),
  ]);
  emb = loadEmbeddings(join(dir, "emb.txt"));
  ortho = loadEmbeddings(join(dir, "ortho.txt"));
  dtm = loadDtm(join(dir, "news"));
  direction = buildDirection(emb, join(dir, "pairs.csv"), {
    vecOut: join(dir, "direction.vec"),
  });
});

describe("handles", () => {
  it("loadEmbeddings reports vocabulary and dimensionality", () => {
    expect(emb.terms).toBe(8);
    expect(emb.dimensions).toBe(3);
  });

  it("handles are frozen", () => {
    expect(Object.isFrozen(emb)).toBe(true);
    expect(Object.isFrozen(dtm)).toBe(true);
    expect(Object.isFrozen(direction)).toBe(true);
  });

  it("missing DTM files raise code 3", () => {
    try {
      loadDtm(join(dir, "nonexistent"));
      expect.unreachable("should have thrown");
    } catch (err) {
      expect(err).toBeInstanceOf(SemcartoError);
      expect((err as SemcartoError).code).toBe(3);
    }
  });
});

describe("cosineSimilarity", () => {
  it("orthogonal two-term fixture gives exactly 0", () => {
    expect(cosineSimilarity(ortho, "a", "b")).toBe(0.0);
  });

  it("self-similarity is exactly 1", () => {
    expect(cosineSimilarity(emb, "crime", "crime")).toBe(1.0);
  });

  it("matches the CLI CSV within 1e-12", () => {
    runCli([
      "cosine",
      "--emb",
      join(dir, "emb.txt"),
      "--a",
      "immigration",
      "--b",
      "crime",
      "--out",
      join(dir, "cos.csv"),
    ]);
    const cliValue = Number(readCsvFile(join(dir, "cos.csv")).rows[0][2]);
    expect(Math.abs(cosineSimilarity(emb, "immigration", "crime") - cliValue)).toBeLessThan(1e-12);
  });

  it("unknown term raises the primary taxonomy code 3", () => {
    try {
      cosineSimilarity(emb, "nope", "crime");
      expect.unreachable("should have thrown");
    } catch (err) {
      expect(err).toBeInstanceOf(SemcartoError);
      expect((err as SemcartoError).code).toBe(3);
      expect((err as SemcartoError).subcommand).toBe("cosine");
    }
  });
});

describe("nearestNeighbors", () => {
  it("matches the CLI CSV within 1e-12", () => {
    runCli([
      "neighbors",
      "--emb",
      join(dir, "emb.txt"),
      "--term",
      "immigration",
      "--k",
      "3",
      "--exclude",
      "immigration",
      "--out",
      join(dir, "nn.csv"),
    ]);
    const cliRows = readCsvFile(join(dir, "nn.csv")).rows;
    const got = nearestNeighbors(emb, "immigration", 3, ["immigration"]);
    expect(got.map((n) => n.term)).toEqual(cliRows.map((r) => r[1]));
    got.forEach((n, i) => {
      expect(Math.abs(n.similarity - Number(cliRows[i][2]))).toBeLessThan(1e-12);
    });
  });

  it("excluded terms never appear", () => {
    const got = nearestNeighbors(emb, "immigration", 10, ["immigration", "crime"]);
    expect(got.map((n) => n.term)).not.toContain("immigration");
    expect(got.map((n) => n.term)).not.toContain("crime");
  });
});

describe("buildDirection / projectTerm", () => {
  it("reports used and skipped pairs", () => {
    expect(direction.pairsUsed).toEqual([
      ["immigration", "schools"],
      ["crime", "welcome"],
    ]);
    expect(direction.pairsSkipped).toEqual([["opulent", "skint"]]);
    expect(direction.labelA).toBe("immigrant");
    expect(direction.labelB).toBe("citizen");
  });

  it("projection matches the CLI CSV within 1e-12", () => {
    runCli([
      "project",
      "--emb",
      join(dir, "emb.txt"),
      "--direction",
      join(dir, "direction.vec"),
      "--terms",
      "immigration,rock",
      "--out",
      join(dir, "proj.csv"),
    ]);
    const cliRows = readCsvFile(join(dir, "proj.csv")).rows;
    expect(Math.abs(projectTerm(emb, direction, "immigration") - Number(cliRows[0][1]))).toBeLessThan(1e-12);
    expect(Math.abs(projectTerm(emb, direction, "rock") - Number(cliRows[1][1]))).toBeLessThan(1e-12);
  });
});

describe("lcRwmdBatch", () => {
  it("5x5 self-batch equals the CLI CSV within 1e-12", () => {
    runCli([
      "docdist",
      "--queries",
      join(dir, "news"),
      "--corpus",
      join(dir, "news"),
      "--emb",
      join(dir, "emb.txt"),
      "--method",
      "lc-rwmd",
      "--out",
      join(dir, "dd.csv"),
    ]);
    const cliRows = readCsvFile(join(dir, "dd.csv")).rows;
    const matrix = lcRwmdBatch(dtm, dtm, emb);
    expect(matrix.nRows).toBe(5);
    expect(matrix.nCols).toBe(5);
    expect(matrix.values).toBeInstanceOf(Float64Array);
    for (const row of cliRows) {
      const i = matrix.rowIds.indexOf(row[0]);
      const j = matrix.colIds.indexOf(row[1]);
      expect(Math.abs(matrix.values[i * matrix.nCols + j] - Number(row[2]))).toBeLessThan(1e-12);
    }
  });

  it("diagonal of a self-batch is zero", () => {
    const matrix = lcRwmdBatch(dtm, dtm, emb);
    for (let i = 0; i < matrix.nRows; i++) {
      expect(matrix.values[i * matrix.nCols + i]).toBe(0.0);
    }
  });

  it("similarity mode flows through", () => {
    const matrix = lcRwmdBatch(dtm, dtm, emb, { similarity: "inverse" });
    for (let i = 0; i < matrix.nRows; i++) {
      expect(matrix.values[i * matrix.nCols + i]).toBe(1.0);
    }
  });
});

describe("cmdScores", () => {
  it("matches the CLI CSV within 1e-12", () => {
    runCli([
      "cmd",
      "--dtm",
      join(dir, "news"),
      "--emb",
      join(dir, "emb.txt"),
      "--concept",
      "immigration",
      "--out",
      join(dir, "cmd.csv"),
    ]);
    const cliRows = readCsvFile(join(dir, "cmd.csv")).rows;
    const rows = cmdScores(dtm, emb, "immigration");
    expect(rows.length).toBe(cliRows.length);
    rows.forEach((row, i) => {
      expect(row.docId).toBe(cliRows[i][0]);
      expect(Math.abs(row.raw - Number(cliRows[i][2]))).toBeLessThan(1e-12);
      expect(Math.abs(row.standardized - Number(cliRows[i][3]))).toBeLessThan(1e-12);
    });
  });

  it("supports compound, centroid, and direction-pole concepts", () => {
    const compound = cmdScores(dtm, emb, { kind: "compound", terms: ["immigration", "crime"] });
    expect(compound[0].conceptLabel).toBe("immigration+crime");
    const centroid = cmdScores(dtm, emb, { kind: "centroid", terms: ["immigration", "crime"] });
    expect(centroid.length).toBe(5);
    const pole = cmdScores(dtm, emb, { kind: "direction-pole", direction, pole: "a" });
    expect(pole[0].conceptLabel).toBe("immigrant-pole");
  });

  it("an empty concept payload carries the primary data-error code 3", () => {
    try {
      cmdScores(dtm, emb, { kind: "compound", terms: [] });
      expect.unreachable("should have thrown");
    } catch (err) {
      expect(err).toBeInstanceOf(SemcartoError);
      expect((err as SemcartoError).code).toBe(3);
    }
  });

  it("usage errors carry code 2", () => {
    try {
      runCli(["cmd", "--dtm", join(dir, "news"), "--out", join(dir, "x.csv")]);
      expect.unreachable("should have thrown");
    } catch (err) {
      expect(err).toBeInstanceOf(SemcartoError);
      expect((err as SemcartoError).code).toBe(2);
      expect((err as SemcartoError).message).toContain("--emb");
    }
  });
});
