"""Shared helpers: independent oracles the implementation never touches.

Local p-values here go through scipy's chi-square tail, and closed testing
is evaluated by the definition (check every superset), so agreement with
the package is a genuine cross-check rather than a tautology.
"""

import itertools
import math

import numpy as np
import scipy.stats

from mtcherry import HypothesisFamily, IndexSet


def oracle_local_p(kind: str, pvals) -> float:
    v = np.asarray(pvals, dtype=np.float64)
    m = v.size
    if kind == "bonferroni":
        return min(1.0, m * float(v.min()))
    if kind == "simes":
        asc = np.sort(v)
        return min(1.0, m * float(np.min(asc / np.arange(1, m + 1))))
    if kind == "fisher":
        stat = -2.0 * float(np.sum(np.log(np.maximum(v, 1e-300))))
        return float(scipy.stats.chi2.sf(stat, 2 * m))
    raise ValueError(kind)


def brute_rejected_masks(p, kind: str, alpha: float, incongruent=None) -> set:
    """Closed-testing rejections by definition: I is in iff every superset
    is locally rejected (or incongruent)."""
    n = len(p)
    local = {}
    for mask in range(1, 1 << n):
        sub = [p[i] for i in range(n) if mask >> i & 1]
        rej = oracle_local_p(kind, sub) <= alpha
        if incongruent is not None and mask in incongruent:
            rej = True
        local[mask] = rej
    rejected = set()
    for mask in range(1, 1 << n):
        free = [i for i in range(n) if not mask >> i & 1]
        ok = True
        for r in range(len(free) + 1):
            for extra in itertools.combinations(free, r):
                sup = mask
                for i in extra:
                    sup |= 1 << i
                if not local[sup]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            rejected.add(mask)
    return rejected


def brute_t(p, kind: str, alpha: float, r_mask: int, incongruent=None) -> int:
    """Largest unrejected subset of R, straight from the definition."""
    rejected = brute_rejected_masks(p, kind, alpha, incongruent)
    n = len(p)
    best = 0
    for mask in range(1 << n):
        if mask & ~r_mask == 0 and mask not in rejected:
            best = max(best, bin(mask).count("1"))
    return best


def mixture_p(rng: np.random.Generator, n: int) -> np.ndarray:
    """Half Uniform(0,1), half Uniform(0,0.05): nulls mixed with signal."""
    small = rng.random(n) < 0.5
    return np.where(small, rng.random(n) * 0.05, rng.random(n))


def make_family(p) -> HypothesisFamily:
    vals = [float(x) for x in p]
    return HypothesisFamily(
        labels=tuple(f"h{i}" for i in range(1, len(vals) + 1)),
        p=tuple(vals),
    )


def mask_to_set(n: int, mask: int) -> IndexSet:
    return IndexSet(n, mask)


def random_subset_mask(rng: np.random.Generator, n: int, keep=0.7) -> int:
    mask = 0
    for i in range(n):
        if rng.random() < keep:
            mask |= 1 << i
    if mask == 0:
        mask = 1 << int(rng.integers(n))
    return mask
