import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from semcarto import EmbeddingMatrix, Vocabulary

_ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


def record_criterion(name: str, status: str) -> None:
    _ACCEPTANCE_RESULTS.append((name, status))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, status in _ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{status:4s}  {name}")


@pytest.fixture
def rng():
    return np.random.default_rng(20210406)


def make_embedding(terms, vectors, label="test"):
    return EmbeddingMatrix(Vocabulary(terms), np.asarray(vectors, dtype=float), label)


@pytest.fixture
def plane_embedding():
    """Hand-set 2-d space used across trivial geometry checks."""
    return make_embedding(
        ["east", "north", "northeast", "west"],
        [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [-1.0, 0.0]],
    )
