"""End-to-end acceptance checks, one per shipped guarantee.

Each test prints a single PASS line with the measured numbers once its
assertions hold, so a full run reads as a checklist.
"""

import time

import numpy as np
from statsmodels.stats.multitest import multipletests

from conftest import make_family, mixture_p, random_subset_mask

from mtcherry.bounds import (
    adjusted_p_elementary,
    shortcut_curve,
    t_alpha_exact,
    t_alpha_shortcut,
)
from mtcherry.closure import enumerate_closure, pairwise_congruence
from mtcherry.family import IndexSet
from mtcherry.localtests import get_test
from mtcherry.profile import confidence_profile
from mtcherry.shortlist import minimal_transversals
from mtcherry.simulate import SimConfig, run_coverage_check, run_power_study

KINDS = ("bonferroni", "simes", "fisher")


def test_criterion_1_shortcut_matches_enumeration():
    """Shortcut bound equals the exact engine on 1000 random instances."""
    rng = np.random.default_rng(20260815)
    started = time.monotonic()
    checked = 0
    for _ in range(1000):
        n = int(rng.integers(2, 13))
        fam = make_family(mixture_p(rng, n))
        r = IndexSet(n, random_subset_mask(rng, n))
        for kind in KINDS:
            spec = get_test(kind)
            for alpha in (0.01, 0.05, 0.2):
                fast = t_alpha_shortcut(fam, spec, alpha, r=r).t
                slow = t_alpha_exact(enumerate_closure(fam, spec, alpha), r).t
                assert fast == slow, (kind, alpha, fam.p, r.indices)
                checked += 1
    elapsed = time.monotonic() - started
    assert elapsed < 60.0
    print(f"criterion 1: PASS ({checked} bound pairs identical, {elapsed:.1f}s)")


def test_criterion_2_holm_equivalence():
    """Bonferroni-closed adjusted p-values are Holm's, to 1e-12."""
    rng = np.random.default_rng(414)
    spec = get_test("bonferroni")
    worst = 0.0
    for _ in range(500):
        n = int(rng.integers(1, 13))
        p = mixture_p(rng, n)
        fam = make_family(p)
        ours = np.array([adjusted_p_elementary(fam, spec, i) for i in range(1, n + 1)])
        holm = multipletests(p, method="holm")[1]
        worst = max(worst, float(np.max(np.abs(ours - holm))))
    assert worst <= 1e-12
    print(f"criterion 2: PASS (500 families, max |diff| = {worst:.2e})")


def test_criterion_3_coverage_under_complete_null():
    """Violation rate stays within alpha plus 3 binomial standard errors."""
    rates = {}
    for kind in KINDS:
        res = run_coverage_check(10, 0.05, reps=10_000, test=kind, seed=0)
        rates[kind] = res.rate
        assert res.rate <= 0.0565, (kind, res.rate)
    shown = ", ".join(f"{k}={v:.4f}" for k, v in rates.items())
    print(f"criterion 3: PASS (m=10, reps=10000: {shown} all <= 0.0565)")


def test_criterion_4_power_ordering_across_family_size():
    """Simes beats Fisher at m=1024; the two are close at m=8."""
    cfg = SimConfig(m_values=(8, 1024), tests=("simes", "fisher"))
    res = run_power_study(cfg)
    power = {(c.m, c.test): c.power for c in res.cells}
    small_gap = abs(power[(8, "simes")] - power[(8, "fisher")])
    assert power[(1024, "simes")] > power[(1024, "fisher")]
    assert small_gap < 0.1
    print(
        "criterion 4: PASS (m=1024: simes "
        f"{power[(1024, 'simes')]:.4f} > fisher {power[(1024, 'fisher')]:.4f}; "
        f"m=8 gap {small_gap:.4f} < 0.1)"
    )


def test_criterion_5_large_family_performance():
    """A 7129-hypothesis family is analyzed in seconds, with sane bounds."""
    rng = np.random.default_rng(2026)
    n = 7129
    p = np.where(rng.random(n) < 0.07, rng.random(n) * 1e-4, rng.random(n))
    fam = make_family(p)
    started = time.monotonic()
    reports = {kind: t_alpha_shortcut(fam, get_test(kind), 0.05) for kind in KINDS}
    elapsed = time.monotonic() - started
    assert elapsed < 10.0
    assert reports["fisher"].f >= 0
    alphas = np.linspace(0.001, 0.3, 20)
    for kind in KINDS:
        g = shortcut_curve(fam, get_test(kind))
        ts = [int(np.nonzero(g > a)[0][-1]) for a in alphas]
        assert ts == sorted(ts, reverse=True), kind
    shown = ", ".join(f"{k}: f={reports[k].f}" for k in KINDS)
    print(f"criterion 5: PASS (n=7129 in {elapsed:.2f}s; {shown}; t monotone over 20 alphas)")


def test_criterion_6_restricted_combinations():
    """Pairwise congruence turns f=1 into f=2 on the worked instance."""
    fam = make_family([0.01, 0.6, 0.6])
    spec = get_test("simes")
    r = IndexSet.full(3)
    plain = t_alpha_exact(enumerate_closure(fam, spec, 0.05), r)
    restricted = t_alpha_exact(
        enumerate_closure(fam, spec, 0.05, congruence=pairwise_congruence(3)), r
    )
    assert plain.f == 1
    assert restricted.f == 2
    print("criterion 6: PASS (f=2 with pairwise congruence, 1 without)")


def test_criterion_7_shortlist_semantics():
    """Shortlist membership characterizes hitting sets; dualizing twice
    returns the original antichain."""
    rng = np.random.default_rng(515)
    for trial in range(500):
        n = int(rng.integers(1, 11))
        raw = {int(m) for m in rng.integers(1, 1 << n, size=int(rng.integers(1, 7)))}
        edges = [m for m in raw if not any(o != m and o & ~m == 0 for o in raw)]
        sl = minimal_transversals([IndexSet(n, e) for e in edges], n=n)
        members = [s.bits for s in sl.sets]
        for f_mask in range(1 << n):
            covers = any(m & ~f_mask == 0 for m in members)
            hits = all(f_mask & e for e in edges)
            assert covers == hits, (trial, n, edges, f_mask)
        again = minimal_transversals(sl.sets, n=n)
        assert sorted(s.bits for s in again.sets) == sorted(edges), (trial, edges)
    print("criterion 7: PASS (500 antichains, exhaustive membership + double dual)")


def test_criterion_8_profile_consistency():
    """Profile thresholds reproduce the bounds; masses form a distribution;
    the worked curve comes out exactly."""
    rng = np.random.default_rng(616)
    for _ in range(200):
        n = int(rng.integers(2, 13))
        fam = make_family(mixture_p(rng, n))
        kind = KINDS[int(rng.integers(3))]
        prof = confidence_profile(fam, get_test(kind))
        masses = prof.masses()
        assert np.all(masses >= 0)
        assert abs(float(np.sum(masses)) - 1.0) <= 1e-12
        for a in rng.uniform(0.001, 0.5, size=25):
            alpha = float(a)
            assert prof.t_at(alpha) == t_alpha_shortcut(fam, get_test(kind), alpha).t
    worked = confidence_profile(make_family([0.01, 0.02, 0.30]), get_test("bonferroni"))
    assert worked.breakpoints == (1.0, 0.30, 2 * 0.02, 3 * 0.01)
    print("criterion 8: PASS (200 instances x 25 levels; worked curve exact)")
