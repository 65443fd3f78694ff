"""Vocabulary: a bijection between term strings and dense integer ids.

The same contract backs document-term matrices, co-occurrence matrices,
and embedding matrices, so ids can be exchanged freely once vocabularies
are known to be identical.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .errors import DataError


class Vocabulary:
    """Immutable term <-> id mapping with ids dense in ``0..V-1``."""

    __slots__ = ("_terms", "_index")

    def __init__(self, terms: Iterable[str]):
        self._terms = tuple(terms)
        self._index = {t: i for i, t in enumerate(self._terms)}
        if len(self._index) != len(self._terms):
            seen: set[str] = set()
            for t in self._terms:
                if t in seen:
                    raise DataError(f"duplicate term: {t!r}")
                seen.add(t)

    @classmethod
    def from_sorted(cls, terms: Iterable[str]) -> "Vocabulary":
        """Build with lexicographically sorted ids (deterministic for corpora)."""
        return cls(sorted(set(terms)))

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, term: str) -> bool:
        return term in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self._terms)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Vocabulary) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(self._terms)

    @property
    def terms(self) -> tuple[str, ...]:
        return self._terms

    def id(self, term: str) -> int:
        try:
            return self._index[term]
        except KeyError:
            raise DataError(f"unknown term: {term!r}") from None

    def get(self, term: str) -> int | None:
        return self._index.get(term)

    def term(self, term_id: int) -> str:
        return self._terms[term_id]
