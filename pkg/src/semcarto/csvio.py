"""Schema-versioned CSV output: UTF-8, RFC-4180, deterministic formatting."""

from __future__ import annotations

import csv
import datetime
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SCHEMA_COMMENT = "# semcarto-schema=1"


def format_cell(value) -> str:
    """repr-based float formatting keeps reruns byte-identical."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if np.isnan(value):
            return ""
        return repr(value)
    if isinstance(value, (np.integer, int)):
        return str(int(value))
    if isinstance(value, datetime.date):
        return value.isoformat()
    return str(value)


@contextmanager
def _open_out(path: str | Path):
    if str(path) == "-":
        yield sys.stdout
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with _open_out(path) as fh:
        fh.write(SCHEMA_COMMENT + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])


def read_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    """Read back a schema-versioned CSV (comment lines skipped)."""
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    if not rows:
        return [], []
    return rows[0], rows[1:]
