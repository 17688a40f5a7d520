"""Simultaneous confidence bounds on the number of true hypotheses.

For any subset R, t_alpha(R) is the largest size of a subset of R that
closed testing leaves unrejected; |R| - t_alpha(R) lower-bounds the number
of false hypotheses in R with familywise confidence 1 - alpha.

Two engines compute the same quantity.  The exact engine reduces the bound
to a minimum hitting set over the defining sets.  The shortcut engine never
enumerates: for symmetric, coordinate-monotone local tests the hardest
witness superset of any k-subset of R is J*(k, q), the k largest p-values
inside R joined with the q - k largest remaining ones, so scanning (k, q)
suffices at any scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .closure import CongruenceOracle, DefiningSets
from .family import HypothesisFamily, IndexSet, as_alpha
from .localtests import P_FLOOR, LocalTestSpec, chi2_even_sf_many

# above this size the curve is assembled per k instead of all at once
_SIMES_CHUNK = 256


@dataclass(frozen=True)
class ConfidenceReport:
    """Bounds for one subset R at one alpha level."""

    r: IndexSet
    alpha: float
    t: int
    test: LocalTestSpec
    method: str
    f: int = field(init=False)

    def __post_init__(self) -> None:
        if not 0 <= self.t <= self.r.size:
            raise ValueError(f"t={self.t} out of range 0..{self.r.size}")
        if self.method not in ("exact", "shortcut"):
            raise ValueError(f"unknown method {self.method!r}")
        object.__setattr__(self, "f", self.r.size - self.t)


def _greedy_hitting_upper(masks: list[int], n: int) -> int:
    remaining = list(masks)
    chosen = 0
    while remaining:
        best_bit, best_count = -1, -1
        for j in range(n):
            bit = 1 << j
            count = sum(1 for m in remaining if m & bit)
            if count > best_count:
                best_bit, best_count = bit, count
        remaining = [m for m in remaining if not m & best_bit]
        chosen += 1
    return chosen


def _disjoint_lower(masks: list[int]) -> int:
    taken = 0
    used = 0
    for m in masks:
        if not m & used:
            used |= m
            taken += 1
    return taken


def _min_hitting_set_size(masks: list[int], n: int) -> int:
    """Exact minimum hitting set cardinality by branch and bound.

    Branching follows the smallest uncovered set; its elements are tried in
    order of decreasing occurrence count with ties to the lowest index.
    """
    if not masks:
        return 0
    best = _greedy_hitting_upper(masks, n)

    def recurse(remaining: list[int], depth: int) -> None:
        nonlocal best
        if not remaining:
            if depth < best:
                best = depth
            return
        if depth + _disjoint_lower(remaining) >= best:
            return
        pivot = min(remaining, key=lambda m: (m.bit_count(), m))
        bits = [j for j in range(n) if pivot >> j & 1]
        counts = {j: sum(1 for m in remaining if m >> j & 1) for j in bits}
        bits.sort(key=lambda j: (-counts[j], j))
        for j in bits:
            bit = 1 << j
            recurse([m for m in remaining if not m & bit], depth + 1)

    recurse(sorted(masks, key=lambda m: (m.bit_count(), m)), 0)
    return best


def t_alpha_exact(defining: DefiningSets, r: IndexSet) -> ConfidenceReport:
    """Exact bound from defining sets: |R| minus a minimum hitting set.

    Only defining sets contained in R constrain the bound; a subset of R
    escapes the closure exactly when its complement within R hits them all.
    """
    if r.n != defining.n:
        raise ValueError(
            f"index width mismatch: defining sets n={defining.n}, set n={r.n}"
        )
    inside = [d.bits for d in defining.sets if d.bits & ~r.bits == 0]
    hit = _min_hitting_set_size(inside, r.n)
    return ConfidenceReport(
        r=r, alpha=defining.alpha, t=r.size - hit, test=defining.test, method="exact"
    )


def _require_shortcut_capable(test: LocalTestSpec) -> None:
    if not (test.symmetric and test.coordinate_monotone):
        raise ValueError(
            f"shortcut engine needs a symmetric, coordinate-monotone local test; "
            f"{test.kind!r} lacks the declared capabilities"
        )


def _split_desc(family_p: np.ndarray, r: IndexSet) -> tuple[np.ndarray, np.ndarray]:
    mask = np.zeros(family_p.size, dtype=bool)
    for i in r.indices:
        mask[i - 1] = True
    rs = np.sort(family_p[mask])[::-1]
    os_ = np.sort(family_p[~mask])[::-1]
    return rs, os_


def _full_stats_block(p_desc: np.ndarray, test: LocalTestSpec,
                      q_lo: int, q_hi: int,
                      neg_logs: np.ndarray | None) -> np.ndarray:
    """Local p of J*(k, q) = the q largest p-values, for q in [q_lo, q_hi].

    With R equal to the whole family the candidate set depends on q alone.
    """
    qs = np.arange(q_lo, q_hi + 1)
    if test.kind == "bonferroni":
        return np.minimum(qs * p_desc[qs - 1], 1.0)
    if test.kind == "simes":
        out = np.empty(qs.size, dtype=np.float64)
        offsets = np.arange(p_desc.size, dtype=np.float64)
        for pos, q in enumerate(qs):
            # element j (descending) sits at ascending rank q - j
            out[pos] = min(1.0, q * float(np.min(p_desc[:q] / (q - offsets[:q]))))
        return out
    if test.kind == "fisher":
        x = np.cumsum(neg_logs)[qs - 1]
        return chi2_even_sf_many(qs, 2.0 * x)
    raise ValueError(f"no shortcut rule for local test {test.kind!r}")


def _g_general_one_k(rs: np.ndarray, os_: np.ndarray, k: int,
                     test: LocalTestSpec,
                     r_neg_logs: np.ndarray | None) -> float:
    """g(k) = max over q of the local p of J*(k, q) for a proper subset R.

    The pool of admissible additions is everything except the k largest
    p-values of R, scanned in descending order.
    """
    pool = np.sort(np.concatenate([rs[k:], os_]))[::-1]
    n_pool = pool.size
    m_grid = np.arange(0, n_pool + 1, dtype=np.int64)
    q_grid = k + m_grid

    if test.kind == "bonferroni":
        mins = np.empty(n_pool + 1, dtype=np.float64)
        mins[0] = rs[k - 1]
        np.minimum(rs[k - 1], pool, out=mins[1:])
        return float(np.max(np.minimum(q_grid * mins, 1.0)))

    if test.kind == "fisher":
        x = np.empty(n_pool + 1, dtype=np.float64)
        x[0] = r_neg_logs[k - 1]
        x[1:] = r_neg_logs[k - 1] + np.cumsum(-np.log(np.maximum(pool, P_FLOOR)))
        return float(np.max(chi2_even_sf_many(q_grid, 2.0 * x)))

    if test.kind == "simes":
        # ranks inside J*(k, m): pool element j (1-based) has ascending rank
        # m - j + 1 + k - r_j with r_j = count of top-k R entries above it;
        # R entry t (0-based) has rank k - t + m - min(m, g_t) with g_t the
        # count of outside entries above it.  Ties resolve to the largest
        # rank of their block, which is the rank the minimum picks anyway.
        ras = rs[:k][::-1]
        r_j = k - np.searchsorted(ras, pool, side="right")
        w_j = np.arange(1, n_pool + 1) + np.minimum(k, r_j)
        osa = np.sort(os_)
        g_t = os_.size - np.searchsorted(osa, rs[:k], side="right")

        best = 0.0
        top = rs[:k]
        for m0 in range(0, n_pool + 1, _SIMES_CHUNK):
            m1 = min(m0 + _SIMES_CHUNK, n_pool + 1)
            ms = np.arange(m0, m1, dtype=np.int64)[:, None]
            a_den = (k - np.arange(k)[None, :]) + np.maximum(ms - g_t[None, :], 0)
            a_min = np.min(top[None, :] / a_den, axis=1)
            if n_pool:
                # ranks of unselected positions are meaningless; mask them out
                with np.errstate(divide="ignore", invalid="ignore"):
                    b_terms = pool[None, :] / (ms + k + 1 - w_j[None, :])
                b_terms = np.where(np.arange(1, n_pool + 1)[None, :] <= ms,
                                   b_terms, np.inf)
                b_min = np.min(b_terms, axis=1)
            else:
                b_min = np.full(ms.size, np.inf)
            stat = np.minimum((k + ms[:, 0]) * np.minimum(a_min, b_min), 1.0)
            best = max(best, float(np.max(stat)))
        return best

    raise ValueError(f"no shortcut rule for local test {test.kind!r}")


def _prepare_full(p: np.ndarray, test: LocalTestSpec):
    p_desc = np.sort(p)[::-1]
    neg_logs = None
    if test.kind == "fisher":
        neg_logs = -np.log(np.maximum(p_desc, P_FLOOR))
    return p_desc, neg_logs


def _t_full(p: np.ndarray, test: LocalTestSpec, alpha: float,
            block: int = 32) -> int:
    """t for R = full family: the largest q whose top-q candidate survives.

    Scans q downward in geometrically growing blocks; the top block almost
    always decides, since t is near |R| whenever anything survives at all.
    """
    n = p.size
    p_desc, neg_logs = _prepare_full(p, test)
    hi = n
    width = block
    while hi >= 1:
        lo = max(1, hi - width + 1)
        stats = _full_stats_block(p_desc, test, lo, hi, neg_logs)
        surviving = np.nonzero(stats > alpha)[0]
        if surviving.size:
            return lo + int(surviving[-1])
        hi = lo - 1
        width *= 4
    return 0


def _curve_full(p: np.ndarray, test: LocalTestSpec) -> np.ndarray:
    n = p.size
    p_desc, neg_logs = _prepare_full(p, test)
    stats = _full_stats_block(p_desc, test, 1, n, neg_logs)
    g = np.empty(n + 1, dtype=np.float64)
    g[0] = 1.0
    g[1:] = np.maximum.accumulate(stats[::-1])[::-1]
    return g


def _general_setup(family: HypothesisFamily, test: LocalTestSpec, r: IndexSet):
    p = np.asarray(family.p, dtype=np.float64)
    rs, os_ = _split_desc(p, r)
    r_neg_logs = None
    if test.kind == "fisher":
        r_neg_logs = np.cumsum(-np.log(np.maximum(rs, P_FLOOR)))
    return rs, os_, r_neg_logs


def t_alpha_shortcut(
    family: HypothesisFamily,
    test: LocalTestSpec,
    alpha: float,
    r: IndexSet | None = None,
    congruence: CongruenceOracle | None = None,
) -> ConfidenceReport:
    """Shortcut bound; matches the exact engine for the built-in tests.

    t is the largest k such that some candidate witness J*(k, q) keeps a
    local p above alpha.  Congruence restrictions are not expressible in
    the candidate scan and must go through the exact engine.
    """
    _require_shortcut_capable(test)
    if congruence is not None:
        raise ValueError(
            "congruence restrictions need the exact engine; "
            "the shortcut candidate scan cannot honour them"
        )
    a = as_alpha(alpha)
    n = family.n
    if r is None:
        r = IndexSet.full(n)
    if r.n != n:
        raise ValueError(f"index width mismatch: family n={n}, set n={r.n}")

    if r.size == 0:
        return ConfidenceReport(r=r, alpha=a, t=0, test=test, method="shortcut")

    p = np.asarray(family.p, dtype=np.float64)
    if r.size == n:
        t = _t_full(p, test, a)
    else:
        rs, os_, r_neg_logs = _general_setup(family, test, r)
        t = 0
        for k in range(r.size, 0, -1):
            if _g_general_one_k(rs, os_, k, test, r_neg_logs) > a:
                t = k
                break
    return ConfidenceReport(r=r, alpha=a, t=t, test=test, method="shortcut")


def shortcut_curve(
    family: HypothesisFamily, test: LocalTestSpec, r: IndexSet | None = None
) -> np.ndarray:
    """Confidence curve G(0..|R|) from the candidate-witness scan.

    G(k) = max over k' >= k of g(k'); thresholding at alpha gives
    t_alpha(R), exactly as the per-alpha scan decides it.
    """
    _require_shortcut_capable(test)
    n = family.n
    if r is None:
        r = IndexSet.full(n)
    if r.n != n:
        raise ValueError(f"index width mismatch: family n={n}, set n={r.n}")
    if r.size == 0:
        return np.array([1.0])
    p = np.asarray(family.p, dtype=np.float64)
    if r.size == n:
        return _curve_full(p, test)
    rs, os_, r_neg_logs = _general_setup(family, test, r)
    g = np.empty(r.size + 1, dtype=np.float64)
    g[0] = 1.0
    for k in range(1, r.size + 1):
        g[k] = _g_general_one_k(rs, os_, k, test, r_neg_logs)
    g[1:] = np.maximum.accumulate(g[1:][::-1])[::-1]
    return g


def t_upper_full(p: Sequence[float] | np.ndarray, test: LocalTestSpec,
                 alpha: float) -> int:
    """t_alpha over a full family given as a bare p-value vector."""
    _require_shortcut_capable(test)
    a = as_alpha(alpha)
    v = np.asarray(p, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("need a nonempty 1-d p-value vector")
    return _t_full(v, test, a)


def test_partial_conjunction(
    family: HypothesisFamily,
    test: LocalTestSpec,
    alpha: float,
    u: int,
    r: IndexSet | None = None,
) -> str:
    """Verdict on the claim that at least u hypotheses in R are true.

    The claim holds whenever some u-subset of R is all-true, so closed
    testing rejects it exactly when every u-subset is rejected, i.e. when
    t_alpha(R) < u.  Rejection certifies more than |R| - u false.
    """
    if r is None:
        r = IndexSet.full(family.n)
    if not 1 <= u <= r.size:
        raise ValueError(f"u must lie in 1..{r.size}, got {u}")
    report = t_alpha_shortcut(family, test, alpha, r)
    return "reject" if report.t < u else "retain"


def adjusted_p_elementary(
    family: HypothesisFamily, test: LocalTestSpec, i: int
) -> float:
    """Smallest alpha at which closed testing rejects hypothesis i.

    Equals the max over q of the local p of {p_i} joined with the q - 1
    largest other p-values; with the Bonferroni test this is the Holm
    step-down adjusted p-value.
    """
    _require_shortcut_capable(test)
    n = family.n
    if not 1 <= i <= n:
        raise ValueError(f"index {i} out of range 1..{n}")
    pi = float(family.p[i - 1])
    others = np.sort(np.delete(np.asarray(family.p, dtype=np.float64), i - 1))[::-1]

    if test.kind == "bonferroni":
        if n == 1:
            return pi
        qs = np.arange(2, n + 1)
        stats = np.minimum(qs * np.minimum(pi, others[qs - 2]), 1.0)
        return max(pi, float(np.max(stats)))

    if test.kind == "fisher":
        qs = np.arange(1, n + 1, dtype=np.int64)
        x = np.empty(n, dtype=np.float64)
        x[0] = -np.log(max(pi, P_FLOOR))
        if n > 1:
            x[1:] = x[0] + np.cumsum(-np.log(np.maximum(others, P_FLOOR)))
        return float(np.max(chi2_even_sf_many(qs, 2.0 * x)))

    # simes: evaluate each candidate positionally
    best = 0.0
    for q in range(1, n + 1):
        block = others[: q - 1]
        pos = int(np.searchsorted(-block, -pi, side="right"))
        terms = [pi / (q - pos)]
        for j, v in enumerate(block):
            rank = q - j if j < pos else q - 1 - j
            terms.append(v / rank)
        best = max(best, min(1.0, q * min(terms)))
    return best
