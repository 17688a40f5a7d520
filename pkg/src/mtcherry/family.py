"""Hypothesis families, index sets, and p-value table parsing.

A family is an ordered collection of labelled hypotheses with one p-value
each.  The canonical index order is the order of appearance, counted from 1.
Subsets of a family are represented as bit vectors (:class:`IndexSet`), which
keeps subset algebra cheap for the enumeration engines.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator


class ParseError(ValueError):
    """Raised when a p-value table cannot be parsed."""


@dataclass(frozen=True)
class AlphaLevel:
    """A significance level, restricted to the open interval (0, 1)."""

    value: float

    def __post_init__(self) -> None:
        v = self.value
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ValueError(f"alpha must be a real number, got {v!r}")
        if not (math.isfinite(v) and 0.0 < v < 1.0):
            raise ValueError(f"alpha must lie strictly between 0 and 1, got {v!r}")


def as_alpha(alpha: float | AlphaLevel) -> float:
    """Validate a significance level given as a float or AlphaLevel."""
    if isinstance(alpha, AlphaLevel):
        return alpha.value
    return AlphaLevel(float(alpha)).value


@dataclass(frozen=True)
class IndexSet:
    """A subset of the canonical indices 1..n, stored as a bit vector.

    Bit ``i - 1`` of ``bits`` is set when index ``i`` belongs to the set.
    """

    n: int
    bits: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"index width must be at least 1, got {self.n}")
        if not 0 <= self.bits < (1 << self.n):
            raise ValueError(f"bits {self.bits:#x} out of range for n={self.n}")

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "IndexSet":
        bits = 0
        for i in indices:
            if not 1 <= i <= n:
                raise ValueError(f"index {i} out of range 1..{n}")
            bits |= 1 << (i - 1)
        return cls(n, bits)

    @classmethod
    def empty(cls, n: int) -> "IndexSet":
        return cls(n, 0)

    @classmethod
    def full(cls, n: int) -> "IndexSet":
        return cls(n, (1 << n) - 1)

    @property
    def size(self) -> int:
        return self.bits.bit_count()

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.n) if self.bits >> i & 1)

    def __contains__(self, i: int) -> bool:
        return 1 <= i <= self.n and bool(self.bits >> (i - 1) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __bool__(self) -> bool:
        return self.bits != 0

    def _check_width(self, other: "IndexSet") -> None:
        if self.n != other.n:
            raise ValueError(f"index width mismatch: {self.n} vs {other.n}")

    def issubset(self, other: "IndexSet") -> bool:
        self._check_width(other)
        return self.bits & ~other.bits == 0

    def isdisjoint(self, other: "IndexSet") -> bool:
        self._check_width(other)
        return self.bits & other.bits == 0

    def __or__(self, other: "IndexSet") -> "IndexSet":
        self._check_width(other)
        return IndexSet(self.n, self.bits | other.bits)

    def __and__(self, other: "IndexSet") -> "IndexSet":
        self._check_width(other)
        return IndexSet(self.n, self.bits & other.bits)

    def __sub__(self, other: "IndexSet") -> "IndexSet":
        self._check_width(other)
        return IndexSet(self.n, self.bits & ~other.bits)

    def __repr__(self) -> str:
        return f"IndexSet(n={self.n}, {{{', '.join(map(str, self.indices))}}})"


@dataclass(frozen=True)
class HypothesisFamily:
    """An ordered family of labelled hypotheses with raw p-values."""

    labels: tuple[str, ...]
    p: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        if len(self.labels) == 0:
            raise ValueError("a family needs at least one hypothesis")
        if len(self.labels) != len(self.p):
            raise ValueError(
                f"{len(self.labels)} labels but {len(self.p)} p-values"
            )
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("hypothesis labels must be distinct")
        for label, v in zip(self.labels, self.p):
            if not (math.isfinite(v) and 0.0 <= v <= 1.0):
                raise ValueError(f"p-value for {label!r} out of range [0, 1]: {v!r}")

    @property
    def n(self) -> int:
        return len(self.labels)

    @cached_property
    def _index_of(self) -> dict[str, int]:
        return {label: i + 1 for i, label in enumerate(self.labels)}

    def full_set(self) -> IndexSet:
        return IndexSet.full(self.n)


def parse_family(text: str) -> HypothesisFamily:
    """Parse a UTF-8 CSV table with header ``id,p`` into a family.

    Data rows are numbered from 1 in error messages.  Duplicate ids,
    non-numeric p entries, and p outside [0, 1] are rejected.
    """
    if text.startswith("﻿"):
        text = text[1:]
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty input: expected header 'id,p'") from None
    if [h.strip() for h in header] != ["id", "p"]:
        raise ParseError(f"expected header 'id,p', got {','.join(header)!r}")

    labels: list[str] = []
    pvals: list[float] = []
    seen: dict[str, int] = {}
    row_no = 0
    for row in reader:
        if not row:
            continue
        row_no += 1
        if len(row) != 2:
            raise ParseError(f"expected 2 fields at row {row_no}, got {len(row)}")
        label = row[0].strip()
        raw = row[1].strip()
        if not label:
            raise ParseError(f"missing id at row {row_no}")
        if label in seen:
            raise ParseError(
                f"duplicate id {label!r} at row {row_no} (first seen at row {seen[label]})"
            )
        try:
            v = float(raw)
        except ValueError:
            raise ParseError(f"non-numeric p {raw!r} at row {row_no}") from None
        if not (math.isfinite(v) and 0.0 <= v <= 1.0):
            raise ParseError(f"p out of range [0, 1] at row {row_no}: {raw}")
        seen[label] = row_no
        labels.append(label)
        pvals.append(v)
    if not labels:
        raise ParseError("no data rows after header")
    return HypothesisFamily(tuple(labels), tuple(pvals))


def serialize_family(family: HypothesisFamily) -> str:
    """Render a family back to its CSV form; parse_family inverts this."""
    lines = ["id,p"]
    for label, v in zip(family.labels, family.p):
        lines.append(f"{label},{v!r}")
    return "\n".join(lines) + "\n"


def resolve_set(family: HypothesisFamily, labels: Iterable[str]) -> IndexSet:
    """Map a collection of labels to an IndexSet in canonical order.

    Order and multiplicity of the input labels are irrelevant; unknown
    labels raise a ValueError naming the offender.
    """
    bits = 0
    lookup = family._index_of
    for label in labels:
        i = lookup.get(label)
        if i is None:
            raise ValueError(f"unknown hypothesis label {label!r}")
        bits |= 1 << (i - 1)
    return IndexSet(family.n, bits)
