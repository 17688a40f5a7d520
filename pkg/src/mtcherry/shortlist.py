"""Minimal transversals of the defining sets.

A set of hypotheses pins down the rejection pattern exactly when it meets
every defining set, so the minimal transversals are the smallest hypothesis
selections that each carry at least one false hypothesis at the stated
confidence.  Dualization follows Berge's incremental crossing: fold in one
defining set at a time, extending transversals that miss it and discarding
anything absorbed by a smaller survivor.

The number of minimal transversals can grow exponentially, so enumeration
is capped.  A truncated shortlist keeps two invariants: every reported set
still meets every defining set, and none of them can lose an element.  Only
completeness is given up, and the result says so.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .closure import DefiningSets
from .family import IndexSet

DEFAULT_SHORTLIST_CAP = 100_000


@dataclass(frozen=True)
class Shortlist:
    """Minimal transversals in canonical order (size, then indices)."""

    n: int
    sets: tuple[IndexSet, ...]
    truncated: bool

    def __post_init__(self) -> None:
        for s in self.sets:
            if s.n != self.n:
                raise ValueError(
                    f"index width mismatch: shortlist n={self.n}, member n={s.n}"
                )

    @property
    def size(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)


def _canon_key(mask: int) -> tuple[int, tuple[int, ...]]:
    idx = []
    m = mask
    while m:
        low = m & -m
        idx.append(low.bit_length())
        m ^= low
    return (len(idx), tuple(idx))


class _AbsorptionIndex:
    """Antichain of masks answering 'does anything here fit inside m?'.

    Masks are grouped by lowest element and cardinality; a subset of m can
    only start at an element of m and must be strictly smaller, while an
    equal-size absorber must be m itself.
    """

    def __init__(self) -> None:
        self.seen: set[int] = set()
        self.by_low: dict[int, dict[int, list[int]]] = {}

    def absorbed(self, mask: int) -> bool:
        if mask in self.seen:
            return True
        if 0 in self.seen:
            return True
        size = mask.bit_count()
        m = mask
        while m:
            low = m & -m
            m ^= low
            for sz, bucket in self.by_low.get(low, {}).items():
                if sz >= size:
                    continue
                for e in bucket:
                    if e & ~mask == 0:
                        return True
        return False

    def add(self, mask: int) -> None:
        self.seen.add(mask)
        if mask == 0:
            return
        low = mask & -mask
        self.by_low.setdefault(low, {}).setdefault(mask.bit_count(), []).append(mask)


def _minimize_batch(masks: list[int]) -> list[int]:
    """Keep the inclusion-minimal masks; insertion in ascending size means
    nothing accepted is ever absorbed later."""
    index = _AbsorptionIndex()
    out = []
    for m in sorted(set(masks), key=_canon_key):
        if not index.absorbed(m):
            index.add(m)
            out.append(m)
    return out


def _hits_all(mask: int, edges: list[int]) -> bool:
    return all(mask & e for e in edges)


def _reminimize(masks: list[int], edges: list[int]) -> list[int]:
    """Strip removable elements after a truncation, then drop duplicates."""
    slim = []
    for m in masks:
        cur = m
        rest = m
        while rest:
            low = rest & -rest
            rest ^= low
            cand = cur & ~low
            if _hits_all(cand, edges):
                cur = cand
        slim.append(cur)
    return _minimize_batch(slim)


def minimal_transversals(
    defining: DefiningSets | Sequence[IndexSet],
    cap: int = DEFAULT_SHORTLIST_CAP,
    n: int | None = None,
) -> Shortlist:
    """Enumerate the minimal transversals of a collection of index sets.

    With no defining sets at all the empty set is the one (vacuous)
    transversal; a collection containing the empty set has none.  When the
    enumeration exceeds ``cap`` the canonically first ``cap`` survivors are
    kept, every remaining defining set is still folded in, and a final pass
    restores minimality, so the two invariants above hold for the truncated
    result as well.
    """
    if cap < 1:
        raise ValueError(f"cap must be positive, got {cap}")
    if isinstance(defining, DefiningSets):
        width = defining.n
        members = defining.sets
    else:
        members = tuple(defining)
        if n is not None:
            width = n
        elif members:
            width = members[0].n
        else:
            raise ValueError("cannot infer index width from an empty sequence; pass n")
    for s in members:
        if s.n != width:
            raise ValueError(
                f"index width mismatch: expected n={width}, got member n={s.n}"
            )

    edges = _minimize_batch([s.bits for s in members])
    if edges and edges[0] == 0:
        return Shortlist(n=width, sets=(), truncated=False)
    edges.sort(key=_canon_key)

    current = [0]
    truncated = False
    for e in edges:
        batch = []
        for t in current:
            if t & e:
                batch.append(t)
            else:
                rest = e
                while rest:
                    low = rest & -rest
                    rest ^= low
                    batch.append(t | low)
        current = _minimize_batch(batch)
        if len(current) > cap:
            current.sort(key=_canon_key)
            current = current[:cap]
            truncated = True
    if truncated:
        current = _reminimize(current, edges)

    current.sort(key=_canon_key)
    sets = tuple(
        IndexSet.from_indices(width, _canon_key(m)[1]) for m in current
    )
    return Shortlist(n=width, sets=sets, truncated=truncated)
