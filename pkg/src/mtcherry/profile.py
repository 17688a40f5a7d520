"""Confidence distribution for the number of true hypotheses in a set.

The breakpoint curve G stores, for each candidate count v, the largest
alpha at which v survives as a possible number of true hypotheses: at level
alpha the simultaneous upper bound is t_alpha = max{v : G(v) > alpha}.
Read as a distribution over counts, mass G(v) - G(v+1) at v, it is a
confidence distribution: a data-dependent random quantity whose quantiles
calibrate the bounds at every level at once.  It is not a probability
distribution over the unknown count, and its masses are not beliefs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .bounds import shortcut_curve
from .closure import CongruenceOracle, DEFAULT_EXACT_CAP, exact_curve
from .family import HypothesisFamily, IndexSet, as_alpha
from .localtests import LocalTestSpec

# below this a mass is reporting noise from subtracting near-equal levels
MASS_DISPLAY_FLOOR = 1e-12


@dataclass(frozen=True)
class ConfidenceProfile:
    """Breakpoints G(0..|R|) of the confidence distribution over a set R."""

    r: IndexSet
    breakpoints: tuple[float, ...]
    test: LocalTestSpec
    method: str

    def __post_init__(self) -> None:
        g = self.breakpoints
        if len(g) != self.r.size + 1:
            raise ValueError(
                f"need {self.r.size + 1} breakpoints for |R|={self.r.size}, got {len(g)}"
            )
        if g[0] != 1.0:
            raise ValueError("G(0) must be exactly 1")
        for a, b in zip(g, g[1:]):
            if not (0.0 <= b <= a):
                raise ValueError("breakpoints must be nonincreasing within [0, 1]")
        if self.method not in ("exact", "shortcut"):
            raise ValueError(f"unknown method {self.method!r}")

    def t_at(self, alpha: float) -> int:
        """Upper confidence bound on the true count at level alpha."""
        a = as_alpha(alpha)
        g = np.asarray(self.breakpoints)
        return int(np.nonzero(g > a)[0][-1])

    def f_at(self, alpha: float) -> int:
        """Lower confidence bound on the false count at level alpha."""
        return self.r.size - self.t_at(alpha)

    def masses(self) -> np.ndarray:
        """Mass at each count v = 0..|R|; sums to 1 up to rounding."""
        g = np.append(np.asarray(self.breakpoints), 0.0)
        return g[:-1] - g[1:]

    def cumulative(self) -> np.ndarray:
        """Mass at or below each count; the last entry is exactly 1."""
        g = np.append(np.asarray(self.breakpoints), 0.0)
        return 1.0 - g[1:]


@dataclass(frozen=True)
class ProfileSummary:
    alpha: float
    t: int
    f: int
    estimate_median: int
    adjusted_p_all_false: float


def confidence_profile(
    family: HypothesisFamily,
    test: LocalTestSpec,
    r: IndexSet | None = None,
    method: str = "auto",
    congruence: CongruenceOracle | None = None,
    exact_cap: int = DEFAULT_EXACT_CAP,
) -> ConfidenceProfile:
    """Profile of the true-count bounds for R across all alpha levels.

    ``auto`` resolves to the exact engine when a congruence restriction is
    present (the shortcut scan cannot honour one) and to the shortcut
    engine otherwise; both give the same thresholds for the built-in tests.
    """
    if r is None:
        r = IndexSet.full(family.n)
    if method == "auto":
        method = "exact" if congruence is not None else "shortcut"
    if method == "exact":
        g = exact_curve(family, test, r=r, congruence=congruence, exact_cap=exact_cap)
    elif method == "shortcut":
        if congruence is not None:
            raise ValueError(
                "congruence restrictions need the exact engine; "
                "the shortcut candidate scan cannot honour them"
            )
        g = shortcut_curve(family, test, r=r)
    else:
        raise ValueError(f"unknown method {method!r}")
    return ConfidenceProfile(
        r=r, breakpoints=tuple(float(x) for x in g), test=test, method=method
    )


def profile_summary(profile: ConfidenceProfile, alpha: float) -> ProfileSummary:
    """Level-alpha bounds plus the two standard scalar readings.

    The median estimate is the true-count bound at level one half; the
    all-false adjusted p-value is the smallest alpha at which every
    hypothesis in R is declared false, which is G(1).
    """
    a = as_alpha(alpha)
    t = profile.t_at(a)
    g = profile.breakpoints
    all_false = g[1] if profile.r.size >= 1 else 0.0
    return ProfileSummary(
        alpha=a,
        t=t,
        f=profile.r.size - t,
        estimate_median=profile.t_at(0.5),
        adjusted_p_all_false=float(all_false),
    )


def emit_pmf(profile: ConfidenceProfile) -> Iterator[tuple[int, float, float]]:
    """Rows (count, mass, cumulative) of the confidence distribution."""
    masses = profile.masses()
    cum = profile.cumulative()
    for v in range(profile.r.size + 1):
        yield v, float(masses[v]), float(cum[v])


def _sig(x: float) -> str:
    return f"{x:.12g}"


def pmf_csv(profile: ConfidenceProfile) -> str:
    """CSV of the confidence distribution; sub-rounding masses print as 0."""
    lines = ["value,mass,cumulative"]
    for v, mass, cum in emit_pmf(profile):
        shown = 0.0 if mass < MASS_DISPLAY_FLOOR else mass
        lines.append(f"{v},{_sig(shown)},{_sig(cum)}")
    return "\n".join(lines) + "\n"
