"""Monte-Carlo harness: power of the false-count bound and coverage checks.

Power is the expected fraction of the s planted false nulls that the bound
certifies, E[min(f_alpha(full), s) / s].  The cap matters: a chance
rejection of a true null can push f past s, and an uncapped ratio would
read as power above one.  Every replicate derives its own RNG stream from
(seed, m, rep), so results are bitwise reproducible and do not depend on
execution order or worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import t_upper_full
from .family import as_alpha
from .localtests import BUILTIN_TESTS, LocalTestSpec, get_test

DEFAULT_M_VALUES = (8, 32, 128, 512, 1024)

_erfc = np.frompyfunc(math.erfc, 1, 1)


def standard_normal_tail(z: float) -> float:
    """Upper tail P(Z > z) of the standard normal."""
    if not math.isfinite(z):
        raise ValueError(f"z must be finite, got {z}")
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _tail_many(z: np.ndarray) -> np.ndarray:
    return 0.5 * _erfc(z / math.sqrt(2.0)).astype(np.float64)


@dataclass(frozen=True)
class SimConfig:
    """Design of a power study over family sizes and local tests."""

    m_values: tuple[int, ...] = DEFAULT_M_VALUES
    s: int = 2
    mu: float = 5.0
    alpha: float = 0.05
    reps: int = 2000
    tests: tuple[str, ...] = ("bonferroni", "simes", "fisher")
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.m_values:
            raise ValueError("need at least one family size")
        for m in self.m_values:
            if int(m) != m or m < 1:
                raise ValueError(f"family sizes must be positive integers, got {m}")
        object.__setattr__(self, "m_values", tuple(int(m) for m in self.m_values))
        if int(self.s) != self.s or self.s < 1:
            raise ValueError(f"false-null count must be a positive integer, got {self.s}")
        object.__setattr__(self, "s", int(self.s))
        if self.s > min(self.m_values):
            raise ValueError(
                f"false-null count {self.s} exceeds the smallest family size "
                f"{min(self.m_values)}"
            )
        if not (math.isfinite(self.mu) and self.mu >= 0):
            raise ValueError(f"signal mean must be finite and nonnegative, got {self.mu}")
        object.__setattr__(self, "alpha", as_alpha(self.alpha))
        if int(self.reps) != self.reps or self.reps < 1:
            raise ValueError(f"replication count must be a positive integer, got {self.reps}")
        object.__setattr__(self, "reps", int(self.reps))
        if not self.tests:
            raise ValueError("need at least one local test")
        for kind in self.tests:
            if kind not in BUILTIN_TESTS:
                raise ValueError(
                    f"unknown local test {kind!r}; choose from {sorted(BUILTIN_TESTS)}"
                )
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class PowerCell:
    m: int
    test: str
    power: float
    se: float


@dataclass(frozen=True)
class SimResult:
    config: SimConfig
    cells: tuple[PowerCell, ...]

    def to_csv(self) -> str:
        lines = ["m,test,power,se,reps,seed"]
        for c in self.cells:
            lines.append(
                f"{c.m},{c.test},{c.power:.12g},{c.se:.12g},"
                f"{self.config.reps},{self.config.seed}"
            )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CoverageResult:
    m: int
    test: str
    rate: float
    se: float
    reps: int
    seed: int


def _replicate_p(m: int, s: int, mu: float, seed: int, rep: int) -> np.ndarray:
    """One family draw: s shifted-normal false nulls, then m - s uniforms."""
    rng = np.random.default_rng(np.random.SeedSequence((seed, m, rep)))
    p = np.empty(m, dtype=np.float64)
    if s:
        p[:s] = _tail_many(rng.standard_normal(s) + mu)
    p[s:] = rng.random(m - s)
    return p


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / math.sqrt(values.size))


def run_power_study(config: SimConfig) -> SimResult:
    """Power table over (m, test); rows in m-major, test-minor order."""
    specs = [(kind, get_test(kind)) for kind in config.tests]
    cells = []
    for m in config.m_values:
        fracs = {kind: np.empty(config.reps) for kind, _ in specs}
        for rep in range(config.reps):
            p = _replicate_p(m, config.s, config.mu, config.seed, rep)
            for kind, test in specs:
                f = m - t_upper_full(p, test, config.alpha)
                fracs[kind][rep] = min(f, config.s) / config.s
        for kind, _ in specs:
            power, se = _mean_se(fracs[kind])
            cells.append(PowerCell(m=m, test=kind, power=power, se=se))
    return SimResult(config=config, cells=tuple(cells))


def run_coverage_check(
    m: int, alpha: float, reps: int, test: str | LocalTestSpec, seed: int = 0
) -> CoverageResult:
    """Violation rate of the bound under the complete null.

    All m hypotheses are true, so any claim of a false one (t < m) is a
    coverage violation; its rate must stay at or below alpha up to
    Monte-Carlo error.
    """
    if int(m) != m or m < 1:
        raise ValueError(f"family size must be a positive integer, got {m}")
    if int(reps) != reps or reps < 1:
        raise ValueError(f"replication count must be a positive integer, got {reps}")
    a = as_alpha(alpha)
    spec = test if isinstance(test, LocalTestSpec) else get_test(test)
    hits = np.empty(int(reps))
    for rep in range(int(reps)):
        rng = np.random.default_rng(np.random.SeedSequence((int(seed), int(m), rep)))
        p = rng.random(int(m))
        hits[rep] = 1.0 if t_upper_full(p, spec, a) < m else 0.0
    rate, se = _mean_se(hits)
    return CoverageResult(
        m=int(m), test=spec.kind, rate=rate, se=se, reps=int(reps), seed=int(seed)
    )
