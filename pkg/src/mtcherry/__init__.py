"""Simultaneous confidence bounds for the number of true hypotheses.

Closed testing turns a family of p-values into, for every subset R at
once, an upper confidence bound t_alpha(R) on the number of true
hypotheses in R (and the lower bound f = |R| - t on false ones).  The
package exposes the exact enumeration engine, the large-scale shortcut,
congruence restrictions, shortlist reporting, confidence-distribution
profiles, and a Monte-Carlo harness.
"""

from .family import (
    AlphaLevel,
    HypothesisFamily,
    IndexSet,
    ParseError,
    as_alpha,
    parse_family,
    resolve_set,
    serialize_family,
)
from .localtests import (
    BONFERRONI,
    BUILTIN_TESTS,
    FISHER,
    SIMES,
    LocalTestSpec,
    bonferroni_local_p,
    chi2_even_sf,
    chi2_even_sf_many,
    fisher_local_p,
    get_test,
    simes_local_p,
)
from .closure import (
    CapacityError,
    CongruenceOracle,
    DEFAULT_EXACT_CAP,
    DefiningSets,
    PartitioningView,
    enumerate_closure,
    exact_curve,
    pairwise_congruence,
    partitioning_view,
    rejection_table,
)
from .bounds import (
    ConfidenceReport,
    adjusted_p_elementary,
    shortcut_curve,
    t_alpha_exact,
    t_alpha_shortcut,
    t_upper_full,
    test_partial_conjunction,
)
from .shortlist import (
    DEFAULT_SHORTLIST_CAP,
    Shortlist,
    minimal_transversals,
)
from .profile import (
    ConfidenceProfile,
    ProfileSummary,
    confidence_profile,
    emit_pmf,
    pmf_csv,
    profile_summary,
)
from .simulate import (
    CoverageResult,
    PowerCell,
    SimConfig,
    SimResult,
    run_coverage_check,
    run_power_study,
    standard_normal_tail,
)
from .svg import pmf_bar_chart

__version__ = "0.1.0"

__all__ = [
    "AlphaLevel",
    "BONFERRONI",
    "BUILTIN_TESTS",
    "CapacityError",
    "ConfidenceProfile",
    "ConfidenceReport",
    "CongruenceOracle",
    "CoverageResult",
    "DEFAULT_EXACT_CAP",
    "DEFAULT_SHORTLIST_CAP",
    "DefiningSets",
    "FISHER",
    "HypothesisFamily",
    "IndexSet",
    "LocalTestSpec",
    "ParseError",
    "PartitioningView",
    "PowerCell",
    "ProfileSummary",
    "SIMES",
    "Shortlist",
    "SimConfig",
    "SimResult",
    "adjusted_p_elementary",
    "as_alpha",
    "bonferroni_local_p",
    "chi2_even_sf",
    "chi2_even_sf_many",
    "confidence_profile",
    "emit_pmf",
    "enumerate_closure",
    "exact_curve",
    "fisher_local_p",
    "get_test",
    "minimal_transversals",
    "pairwise_congruence",
    "parse_family",
    "partitioning_view",
    "pmf_bar_chart",
    "pmf_csv",
    "profile_summary",
    "rejection_table",
    "resolve_set",
    "run_coverage_check",
    "run_power_study",
    "serialize_family",
    "shortcut_curve",
    "simes_local_p",
    "standard_normal_tail",
    "t_alpha_exact",
    "t_alpha_shortcut",
    "t_upper_full",
    "test_partial_conjunction",
    "__version__",
]
