"""Exact closed-testing enumeration over all subsets of a small family.

A subset I is rejected by closed testing when every superset J of I is
rejected by the local test.  The collection of such I is up-closed, so it
is fully described by its minimal elements, the defining sets.  Tables are
built in sorted p-value order (bit j of a table mask is the j-th smallest
p-value) and translated back to canonical indices on output.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .family import HypothesisFamily, IndexSet, as_alpha
from .localtests import P_FLOOR, LocalTestSpec, chi2_even_sf_many

DEFAULT_EXACT_CAP = 20


class CapacityError(RuntimeError):
    """Raised when a problem exceeds the exact engine's enumeration cap."""


@dataclass(frozen=True)
class CongruenceOracle:
    """Predicate marking which index sets are logically possible.

    The predicate is taken on trust; the only check applied is that the
    full set must be congruent.  ``expected_n`` pins the family size the
    oracle was built for, when known.
    """

    predicate: Callable[[IndexSet], bool]
    origin: str
    expected_n: int | None = None

    def is_congruent(self, subset: IndexSet) -> bool:
        return bool(self.predicate(subset))


class PartitioningView(Enum):
    EMPTY = "empty"
    NONEMPTY_CANDIDATE = "nonempty-candidate"


def partitioning_view(
    subset: IndexSet, congruence: CongruenceOracle | None
) -> PartitioningView:
    """Classify the partitioning hypothesis attached to a nonempty subset.

    Incongruent subsets carve out an empty cell; everything else remains a
    candidate whose emptiness the data cannot settle here.
    """
    if subset.size == 0:
        raise ValueError("partitioning_view needs a nonempty subset")
    if congruence is not None and not congruence.is_congruent(subset):
        return PartitioningView.EMPTY
    return PartitioningView.NONEMPTY_CANDIDATE


def pairwise_congruence(k: int) -> CongruenceOracle:
    """Congruence oracle for the k(k-1)/2 pairwise-equality hypotheses.

    Hypothesis indices follow the lexicographic pair order (1,2), (1,3),
    ..., (1,k), (2,3), ..., (k-1,k) over k group labels.  A set of pairs is
    congruent exactly when it is transitively closed: within any group of
    labels connected by asserted equalities, every pair must be asserted.
    """
    if k < 2:
        raise ValueError(f"pairwise congruence needs at least 2 groups, got {k}")
    pairs = [(a, b) for a in range(1, k + 1) for b in range(a + 1, k + 1)]
    n = len(pairs)
    pair_index = {pair: i + 1 for i, pair in enumerate(pairs)}

    def congruent(subset: IndexSet) -> bool:
        parent = list(range(k + 1))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        members = set(subset.indices)
        for i in members:
            a, b = pairs[i - 1]
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        for (a, b), i in pair_index.items():
            if find(a) == find(b) and i not in members:
                return False
        return True

    return CongruenceOracle(predicate=congruent, origin=f"pairwise:{k}", expected_n=n)


@dataclass(frozen=True)
class DefiningSets:
    """Minimal rejected sets of a closed-testing run at one alpha."""

    n: int
    sets: tuple[IndexSet, ...]
    alpha: float
    test: LocalTestSpec
    congruence_used: bool = False

    def __post_init__(self) -> None:
        for s in self.sets:
            if s.n != self.n:
                raise ValueError("defining set width differs from family size")
            if s.size == 0:
                raise ValueError("defining sets are nonempty by construction")
        if len(self.sets) <= 2000:
            masks = [s.bits for s in self.sets]
            for i, a in enumerate(masks):
                for j, b in enumerate(masks):
                    if i != j and a & ~b == 0:
                        raise ValueError("defining sets must form an antichain")


def _sorted_order(p: Sequence[float]) -> np.ndarray:
    return np.argsort(np.asarray(p, dtype=np.float64), kind="stable")


def _popcounts(size: int, n: int) -> np.ndarray:
    pc = np.zeros(size, dtype=np.int64)
    for j in range(n):
        half = 1 << j
        pc[half:2 * half] = pc[:half] + 1
    return pc


def _local_p_table(p_sorted: np.ndarray, test: LocalTestSpec) -> np.ndarray:
    """Local p-value for every nonempty mask in sorted bit space.

    Entry 0 is fixed at 1.0 and never consulted.
    """
    n = p_sorted.size
    size = 1 << n
    pc = _popcounts(size, n)
    table = np.empty(size, dtype=np.float64)
    table[0] = 1.0

    if test.kind == "bonferroni":
        mn = np.full(size, np.inf)
        for j in range(n):
            half = 1 << j
            mn[half:2 * half] = np.minimum(mn[:half], p_sorted[j])
        table[1:] = np.minimum(pc[1:] * mn[1:], 1.0)
    elif test.kind == "simes":
        # score(mask) = min_i p_(i) / i, built by adding each element as the
        # new maximum of every mask whose highest bit it is
        score = np.full(size, np.inf)
        for j in range(n):
            half = 1 << j
            score[half:2 * half] = np.minimum(score[:half],
                                              p_sorted[j] / (pc[:half] + 1.0))
        table[1:] = np.minimum(pc[1:] * score[1:], 1.0)
    elif test.kind == "fisher":
        lnp = np.log(np.maximum(p_sorted, P_FLOOR))
        sl = np.zeros(size, dtype=np.float64)
        for j in range(n):
            half = 1 << j
            sl[half:2 * half] = sl[:half] + lnp[j]
        table[1:] = chi2_even_sf_many(pc[1:], -2.0 * sl[1:])
    else:
        raise ValueError(f"no enumeration rule for local test {test.kind!r}")
    return table


def _mask_translate(bits: int, positions: Sequence[int]) -> int:
    out = 0
    j = 0
    while bits:
        if bits & 1:
            out |= 1 << positions[j]
        bits >>= 1
        j += 1
    return out


def _incongruent_flags(
    family: HypothesisFamily,
    congruence: CongruenceOracle,
    pos_of_canon: np.ndarray,
) -> np.ndarray:
    """Boolean table in sorted bit space marking incongruent masks."""
    n = family.n
    if congruence.expected_n is not None and congruence.expected_n != n:
        raise ValueError(
            f"congruence oracle built for {congruence.expected_n} hypotheses, family has {n}"
        )
    if not congruence.is_congruent(IndexSet.full(n)):
        raise ValueError("the full index set must be congruent")
    flags = np.zeros(1 << n, dtype=bool)
    positions = [int(pos_of_canon[j]) for j in range(n)]
    for cmask in range(1, 1 << n):
        if not congruence.is_congruent(IndexSet(n, cmask)):
            flags[_mask_translate(cmask, positions)] = True
    return flags


def _closure_tables(
    family: HypothesisFamily,
    test: LocalTestSpec,
    congruence: CongruenceOracle | None,
    exact_cap: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Sorted-space local p table (incongruent entries zeroed) and the
    canonical bit position of each sorted bit."""
    n = family.n
    if exact_cap < 1:
        raise ValueError(f"exact_cap must be positive, got {exact_cap}")
    if n > exact_cap:
        raise CapacityError(
            f"family of {n} hypotheses exceeds the exact enumeration cap of "
            f"{exact_cap}; use the shortcut engine for bounds at this scale"
        )
    order = _sorted_order(family.p)
    pos_of_canon = np.empty(n, dtype=np.int64)
    pos_of_canon[order] = np.arange(n)
    p_sorted = np.asarray(family.p, dtype=np.float64)[order]
    table = _local_p_table(p_sorted, test)
    if congruence is not None:
        flags = _incongruent_flags(family, congruence, pos_of_canon)
        table = table.copy()
        table[flags] = 0.0
        table[0] = 1.0
    return table, order


def _superset_and(reject: np.ndarray, n: int) -> np.ndarray:
    closed = reject.copy()
    for j in range(n):
        half = 1 << j
        v = closed.reshape(-1, 2 * half)
        v[:, :half] &= v[:, half:]
    return closed


def _superset_max(values: np.ndarray, n: int) -> np.ndarray:
    out = values.copy()
    for j in range(n):
        half = 1 << j
        v = out.reshape(-1, 2 * half)
        np.maximum(v[:, :half], v[:, half:], out=v[:, :half])
    return out


def enumerate_closure(
    family: HypothesisFamily,
    test: LocalTestSpec,
    alpha: float,
    congruence: CongruenceOracle | None = None,
    exact_cap: int = DEFAULT_EXACT_CAP,
) -> DefiningSets:
    """Run closed testing exactly and return the defining sets.

    Incongruent sets count as locally rejected regardless of their p-value.
    Cost is O(n * 2^n) table work, so the family size is gated by
    ``exact_cap``.
    """
    a = as_alpha(alpha)
    n = family.n
    table, order = _closure_tables(family, test, congruence, exact_cap)

    reject = table <= a
    reject[0] = False
    closed = _superset_and(reject, n)

    minimal = closed.copy()
    for j in range(n):
        half = 1 << j
        mv = minimal.reshape(-1, 2 * half)
        cv = closed.reshape(-1, 2 * half)
        mv[:, half:] &= ~cv[:, :half]

    canon_positions = [int(order[j]) for j in range(n)]
    found = []
    for smask in np.nonzero(minimal)[0]:
        cmask = _mask_translate(int(smask), canon_positions)
        found.append(IndexSet(n, cmask))
    found.sort(key=lambda s: (s.size, s.indices))
    return DefiningSets(
        n=n,
        sets=tuple(found),
        alpha=a,
        test=test,
        congruence_used=congruence is not None,
    )


def rejection_table(
    family: HypothesisFamily,
    test: LocalTestSpec,
    alpha: float,
    congruence: CongruenceOracle | None = None,
    exact_cap: int = DEFAULT_EXACT_CAP,
) -> list[tuple[IndexSet, float, bool]]:
    """Every nonempty subset with its local p-value and closure verdict.

    Rows come back in canonical order (size, then indices).  Incongruent
    subsets carry local p 0.  Meant for audits and cross-validation; the
    output has 2^n - 1 rows.
    """
    a = as_alpha(alpha)
    n = family.n
    table, order = _closure_tables(family, test, congruence, exact_cap)
    reject = table <= a
    reject[0] = False
    closed = _superset_and(reject, n)

    canon_positions = [int(order[j]) for j in range(n)]
    rows = []
    for smask in range(1, 1 << n):
        cmask = _mask_translate(smask, canon_positions)
        rows.append((IndexSet(n, cmask), float(table[smask]), bool(closed[smask])))
    rows.sort(key=lambda row: (row[0].size, row[0].indices))
    return rows


def exact_curve(
    family: HypothesisFamily,
    test: LocalTestSpec,
    r: IndexSet | None = None,
    congruence: CongruenceOracle | None = None,
    exact_cap: int = DEFAULT_EXACT_CAP,
) -> np.ndarray:
    """Exact confidence curve G(0..|R|) over subsets of R.

    G(k) is the largest alpha below which some k-subset of R still escapes
    the closure; equivalently the max over k-subsets I of R of the max
    local p over supersets of I.  Thresholding G at any alpha reproduces
    the enumeration bound there.
    """
    n = family.n
    if r is None:
        r = IndexSet.full(n)
    if r.n != n:
        raise ValueError(f"index width mismatch: family n={n}, set n={r.n}")
    table, order = _closure_tables(family, test, congruence, exact_cap)

    witness = _superset_max(table, n)

    pos_of_canon = np.empty(n, dtype=np.int64)
    pos_of_canon[order] = np.arange(n)
    r_sorted = _mask_translate(r.bits, [int(pos_of_canon[j]) for j in range(n)])

    size = 1 << n
    masks = np.arange(size, dtype=np.int64)
    inside = masks & ~r_sorted == 0
    pc = _popcounts(size, n)

    g = np.zeros(r.size + 1, dtype=np.float64)
    g[0] = 1.0
    sel = inside.copy()
    sel[0] = False
    if np.any(sel):
        np.maximum.at(g, pc[sel], witness[masks[sel]])
    return g
