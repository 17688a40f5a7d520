"""Local tests for intersection hypotheses, expressed as local p-value maps.

A local test assigns every nonempty subset of hypotheses a p-value; the
subset counts as rejected at level alpha exactly when that value is <= alpha.
Three classical combining rules are provided.  All three are symmetric in
their arguments, monotone in every coordinate, and reduce to the raw p-value
on singletons; those capability flags gate the shortcut bound engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# p-values are clamped here before taking logarithms (Fisher statistic)
P_FLOOR = 1e-300

# series window in multiples of sqrt(x) plus absolute slack; Poisson mass
# outside [x - w, x + w] is below 1e-30 and cannot move any tail comparison
_WIN_SQRT = 12.0
_WIN_ABS = 100.0

_lgamma_u = np.frompyfunc(math.lgamma, 1, 1)


@dataclass(frozen=True)
class LocalTestSpec:
    """A named local test plus the capability flags engines rely on."""

    kind: str
    symmetric: bool = True
    coordinate_monotone: bool = True
    singleton_faithful: bool = True

    def local_p(self, pvals: Sequence[float] | np.ndarray) -> float:
        func = _EVALUATORS.get(self.kind)
        if func is None:
            raise ValueError(f"unknown local test kind {self.kind!r}")
        return func(pvals)


def _as_pvec(pvals: Sequence[float] | np.ndarray) -> np.ndarray:
    v = np.asarray(pvals, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("local tests need a nonempty 1-d collection of p-values")
    if not np.all(np.isfinite(v)) or v.min() < 0.0 or v.max() > 1.0:
        raise ValueError("p-values must be finite and lie in [0, 1]")
    return v


def bonferroni_local_p(pvals: Sequence[float] | np.ndarray) -> float:
    """min(1, m * min(p)) over the m supplied p-values."""
    v = _as_pvec(pvals)
    return min(1.0, v.size * float(v.min()))


def simes_local_p(pvals: Sequence[float] | np.ndarray) -> float:
    """min over i of (m / i) * p_(i) with p_(i) ascending, capped at 1."""
    a = np.sort(_as_pvec(pvals))
    m = a.size
    ratios = a / np.arange(1.0, m + 1.0)
    return min(1.0, m * float(ratios.min()))


def fisher_local_p(pvals: Sequence[float] | np.ndarray) -> float:
    """Upper tail of chi-square with 2m degrees of freedom at -2 sum(log p)."""
    v = _as_pvec(pvals)
    # fsum gives the correctly rounded total, so the result does not
    # depend on the order the p-values arrive in.
    s = -2.0 * math.fsum(np.log(np.maximum(v, P_FLOOR)).tolist())
    return chi2_even_sf(v.size, s)


def chi2_even_sf(m: int, s: float) -> float:
    """Survival function of chi-square with even df 2m at point s.

    Evaluated through the closed-form series
    exp(-s/2) * sum_{i=0}^{m-1} (s/2)^i / i!
    with running-product term updates and compensated summation.
    """
    if m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    if not (math.isfinite(s) and s >= 0.0):
        raise ValueError(f"s must be finite and nonnegative, got {s!r}")
    return float(chi2_even_sf_many(np.array([m]), np.array([s]))[0])


def chi2_even_sf_many(m, s) -> np.ndarray:
    """Vectorised chi2_even_sf over broadcast arrays of (m, s).

    Series terms for huge s/2 are only accumulated inside a window around
    the Poisson mode; everything outside is below absolute 1e-30.  The
    first windowed term is seeded through lgamma, later terms follow the
    running product t_{i} = t_{i-1} * x / i.
    """
    m_b, s_b = np.broadcast_arrays(np.asarray(m, dtype=np.int64),
                                   np.asarray(s, dtype=np.float64))
    shape = m_b.shape
    mf = m_b.reshape(-1)
    x = 0.5 * s_b.reshape(-1)
    if mf.size and mf.min() < 1:
        raise ValueError("m must be a positive integer")
    if mf.size and (not np.all(np.isfinite(x)) or x.min() < 0.0):
        raise ValueError("s must be finite and nonnegative")

    out = np.empty(mf.size, dtype=np.float64)
    k = mf - 1

    single = mf == 1
    out[single] = np.exp(-x[single])
    w = _WIN_SQRT * np.sqrt(x) + _WIN_ABS
    rest = ~single
    below = rest & (k < x - w)
    above = rest & (k > x + w)
    out[below] = 0.0
    out[above] = 1.0

    core = rest & ~below & ~above
    idx = np.nonzero(core)[0]
    if idx.size:
        out[idx] = _windowed_series(x[idx], k[idx], w[idx])

    np.clip(out, 0.0, 1.0, out=out)
    return out.reshape(shape)


def _start_terms(i0: np.ndarray, x: np.ndarray) -> np.ndarray:
    """First accumulated term exp(i0 log x - x - lgamma(i0 + 1))."""
    t = np.empty(x.size, dtype=np.float64)
    at_zero = i0 == 0
    t[at_zero] = np.exp(-x[at_zero])
    inner = ~at_zero
    if np.any(inner):
        xi = x[inner]
        ii = i0[inner].astype(np.float64)
        lg = _lgamma_u(ii + 1.0).astype(np.float64)
        t[inner] = np.exp(ii * np.log(xi) - xi - lg)
    return t


def _windowed_series(x: np.ndarray, k: np.ndarray, w: np.ndarray) -> np.ndarray:
    i0 = np.maximum(np.floor(x - w), 0.0).astype(np.int64)
    ihi = np.minimum(k, np.floor(x + w).astype(np.int64))
    # core membership guarantees a nonempty window
    res = np.empty(x.size, dtype=np.float64)

    order = np.argsort(i0, kind="stable")
    i0o = i0[order]
    ihio = ihi[order]
    xo = x[order]

    ptr = 0
    n = x.size
    a_x = np.empty(0)
    a_hi = np.empty(0, dtype=np.int64)
    a_pos = np.empty(0, dtype=np.int64)
    a_t = np.empty(0)
    a_acc = np.empty(0)
    a_c = np.empty(0)

    i = int(i0o[0])
    while True:
        if ptr < n and i0o[ptr] == i:
            stop = int(np.searchsorted(i0o, i, side="right"))
            batch = slice(ptr, stop)
            t0 = _start_terms(i0o[batch], xo[batch])
            a_x = np.concatenate([a_x, xo[batch]])
            a_hi = np.concatenate([a_hi, ihio[batch]])
            a_pos = np.concatenate([a_pos, order[batch]])
            a_t = np.concatenate([a_t, t0])
            a_acc = np.concatenate([a_acc, t0.copy()])
            a_c = np.concatenate([a_c, np.zeros(stop - ptr)])
            ptr = stop

        done = a_hi == i
        if np.any(done):
            res[a_pos[done]] = a_acc[done]
            keep = ~done
            a_x = a_x[keep]
            a_hi = a_hi[keep]
            a_pos = a_pos[keep]
            a_t = a_t[keep]
            a_acc = a_acc[keep]
            a_c = a_c[keep]

        if a_x.size == 0:
            if ptr >= n:
                break
            i = int(i0o[ptr])
            continue

        i += 1
        a_t *= a_x / i
        # Kahan update keeps long sums stable
        y = a_t - a_c
        tot = a_acc + y
        a_c = (tot - a_acc) - y
        a_acc = tot

    return res


BONFERRONI = LocalTestSpec("bonferroni")
SIMES = LocalTestSpec("simes")
FISHER = LocalTestSpec("fisher")

_EVALUATORS = {
    "bonferroni": bonferroni_local_p,
    "simes": simes_local_p,
    "fisher": fisher_local_p,
}

BUILTIN_TESTS = {t.kind: t for t in (BONFERRONI, SIMES, FISHER)}


def get_test(name: str) -> LocalTestSpec:
    """Look up one of the built-in local tests by name."""
    try:
        return BUILTIN_TESTS[name]
    except KeyError:
        raise ValueError(
            f"unknown local test {name!r}; expected one of {sorted(BUILTIN_TESTS)}"
        ) from None
