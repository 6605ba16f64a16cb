"""Monte-Carlo harness for the uniform random mechanism on random values.

Each trial draws every player's item values i.i.d. from her distribution on
[0, 1], assigns every item uniformly at random, and records each player's
total ``Y_i`` together with the success event that every player clears
``rho * v_i(M) / n``.  This is the one corner of the package that uses
floating point; all randomness derives from (seed, trial index), so results
are bit-for-bit reproducible and independent of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ContinuousUniform01:
    """Uniform on [0, 1]; mean 1/2."""

    @property
    def mean(self) -> float:
        return 0.5

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.random(size)

    def __str__(self):
        return "uniform"


@dataclass(frozen=True)
class DiscreteUniform:
    """Uniform over ``levels`` evenly spaced points covering [0, 1]; mean 1/2."""

    levels: int

    def __post_init__(self):
        if self.levels < 2:
            raise ValueError("discrete uniform needs at least 2 levels")

    @property
    def mean(self) -> float:
        return 0.5

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.integers(0, self.levels, size) / (self.levels - 1)

    def __str__(self):
        return f"discrete:{self.levels}"


@dataclass(frozen=True)
class Bernoulli:
    """Value 1 with probability ``p``, else 0; mean ``p`` (must be positive)."""

    p: float

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise ValueError("bernoulli needs p in (0, 1]")

    @property
    def mean(self) -> float:
        return self.p

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return (rng.random(size) < self.p).astype(float)

    def __str__(self):
        return f"bernoulli:{self.p}"


def parse_distribution(spec: str):
    """Parse 'uniform', 'discrete:K', or 'bernoulli:P'."""
    if spec == "uniform":
        return ContinuousUniform01()
    if spec.startswith("discrete:"):
        return DiscreteUniform(int(spec.split(":", 1)[1]))
    if spec.startswith("bernoulli:"):
        return Bernoulli(float(spec.split(":", 1)[1]))
    raise ValueError(f"unknown distribution {spec!r}")


@dataclass(frozen=True)
class MCConfig:
    n: int
    m: int
    distributions: tuple  # one distribution per player
    rho: float
    trials: int
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.m < 0:
            raise ValueError("need n >= 1 and m >= 0")
        if len(self.distributions) != self.n:
            raise ValueError("need one distribution per player")
        if not 0 <= self.rho < 1:
            raise ValueError("rho must be in [0, 1)")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        for d in self.distributions:
            if d.mean <= 0:
                raise ValueError("every distribution needs a positive mean")


def mc_config(
    n: int,
    m: int,
    distribution,
    rho: float,
    trials: int,
    seed: int = 0,
) -> MCConfig:
    """Config with the same distribution for every player."""
    return MCConfig(
        n=n,
        m=m,
        distributions=tuple(distribution for _ in range(n)),
        rho=float(rho),
        trials=trials,
        seed=seed,
    )


@dataclass(frozen=True)
class MCResult:
    trials: int
    success_rate: float
    means: tuple[float, ...]  # per-player average of Y_i
    variances: tuple[float, ...]  # per-player sample variance of Y_i
    thresholds: tuple[float, ...]  # a_i = (rho*m*mean_i + rho*m**0.75)/n

    @property
    def failure_rate(self) -> float:
        return 1.0 - self.success_rate


def montecarlo_randomized(cfg: MCConfig) -> MCResult:
    """Run the trials and aggregate totals, success rate, and thresholds."""
    n, m = cfg.n, cfg.m
    totals = np.empty((cfg.trials, n))
    successes = np.empty(cfg.trials, dtype=bool)
    for t in range(cfg.trials):
        rng = np.random.default_rng((cfg.seed, t))
        values = np.stack([d.sample(rng, m) for d in cfg.distributions])
        owner = rng.integers(0, n, size=m)
        received = np.array(
            [values[i, owner == i].sum() for i in range(n)]
        )
        needed = cfg.rho * values.sum(axis=1) / n
        totals[t] = received
        successes[t] = bool(np.all(received >= needed))
    means = totals.mean(axis=0)
    if cfg.trials > 1:
        variances = totals.var(axis=0, ddof=1)
    else:
        variances = np.zeros(n)
    thresholds = tuple(
        cfg.rho * (m * d.mean + m**0.75) / n for d in cfg.distributions
    )
    return MCResult(
        trials=cfg.trials,
        success_rate=float(successes.mean()),
        means=tuple(float(x) for x in means),
        variances=tuple(float(x) for x in variances),
        thresholds=thresholds,
    )
