/**
 * Error taxonomy mirrored from the CLI's exit codes:
 * 2 usage, 3 data error, 4 numeric degeneracy.
 */
export type SemcartoErrorCode = 2 | 3 | 4;

export class SemcartoError extends Error {
  readonly code: SemcartoErrorCode;
  readonly subcommand: string | null;

  constructor(message: string, code: SemcartoErrorCode, subcommand: string | null = null) {
    super(message);
    this.name = "SemcartoError";
    this.code = code;
    this.subcommand = subcommand;
  }
}
