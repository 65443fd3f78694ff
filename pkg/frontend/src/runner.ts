import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import Papa from "papaparse";

import { SemcartoError, SemcartoErrorCode } from "./errors.js";

/** Override with SEMCARTO_BIN when the CLI is not on PATH. */
export function cliBinary(): string {
  return process.env.SEMCARTO_BIN ?? "semcarto";
}

export interface CliResult {
  stdout: string;
  stderr: string;
}

/**
 * Run one semcarto subcommand; nonzero exits become SemcartoError carrying
 * the CLI's machine-parsable error payload.
 */
export function runCli(args: string[]): CliResult {
  const proc = spawnSync(cliBinary(), args, {
    encoding: "utf-8",
    maxBuffer: 1 << 28,
  });
  if (proc.error) {
    throw new SemcartoError(`failed to launch ${cliBinary()}: ${proc.error.message}`, 3);
  }
  if (proc.status !== 0) {
    const line = (proc.stderr ?? "").trim().split("\n").pop() ?? "";
    try {
      const payload = JSON.parse(line) as {
        error: string;
        code: number;
        subcommand: string | null;
      };
      throw new SemcartoError(payload.error, payload.code as SemcartoErrorCode, payload.subcommand);
    } catch (err) {
      if (err instanceof SemcartoError) throw err;
      // argparse usage errors print plain text, not JSON
      throw new SemcartoError(line || `semcarto exited with ${proc.status}`, 2);
    }
  }
  return { stdout: proc.stdout ?? "", stderr: proc.stderr ?? "" };
}

/** Parse schema-versioned CSV text into header + string rows. */
export function parseCsv(text: string): { header: string[]; rows: string[][] } {
  const body = text
    .split("\n")
    .filter((line) => !line.startsWith("#"))
    .join("\n");
  const parsed = Papa.parse<string[]>(body.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new SemcartoError(`bad CSV from CLI: ${parsed.errors[0].message}`, 3);
  }
  const rows = parsed.data;
  if (rows.length === 0) {
    return { header: [], rows: [] };
  }
  return { header: rows[0], rows: rows.slice(1) };
}

export function readCsvFile(path: string): { header: string[]; rows: string[][] } {
  return parseCsv(readFileSync(path, "utf-8"));
}

/** Run a subcommand that writes its CSV to stdout and parse it. */
export function runForCsv(args: string[]): { header: string[]; rows: string[][] } {
  const result = runCli([...args, "--out", "-"]);
  return parseCsv(result.stdout);
}

export function scratchDir(): string {
  return mkdtempSync(join(tmpdir(), "semcarto-"));
}

export function asNumber(cell: string, what: string): number {
  const value = Number(cell);
  if (cell === "" || Number.isNaN(value)) {
    throw new SemcartoError(`expected a number for ${what}, got ${JSON.stringify(cell)}`, 3);
  }
  return value;
}
