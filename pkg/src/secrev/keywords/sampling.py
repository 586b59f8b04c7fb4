"""Statistically sized, seed-reproducible sampling for keyword validation.

Sample sizes follow Cochran's formula with p = 0.5 (maximally conservative)
and finite-population correction. The normal quantile is rounded to six
decimals (1.959964 at 95%) so results are bit-reproducible across libm
implementations.
"""

import math
import random
from dataclasses import dataclass
from statistics import NormalDist
from typing import Sequence, TypeVar

from secrev.errors import DomainError

T = TypeVar("T")


def normal_quantile(confidence: float) -> float:
    """Two-sided normal quantile for a confidence level, 6-decimal precision."""
    if not 0.0 < confidence < 1.0:
        raise DomainError(f"confidence must be in (0, 1), got {confidence}")
    return round(NormalDist().inv_cdf((1.0 + confidence) / 2.0), 6)


def required_sample_size(population: int, confidence: float = 0.95,
                         margin: float = 0.05) -> int:
    """Cochran sample size with finite-population correction, capped at N."""
    if population < 1:
        raise DomainError(f"population must be >= 1, got {population}")
    if not 0.0 < margin < 1.0:
        raise DomainError(f"margin must be in (0, 1), got {margin}")
    z = normal_quantile(confidence)
    n0 = z * z * 0.25 / (margin * margin)
    n = n0 / (1.0 + (n0 - 1.0) / population)
    return min(math.ceil(n), population)


@dataclass(frozen=True)
class SamplePlan:
    population_size: int
    confidence: float
    margin: float
    sample_size: int
    seed: int

    def __post_init__(self):
        if not 0 < self.sample_size <= self.population_size:
            raise DomainError(
                f"sample_size {self.sample_size} outside (0, {self.population_size}]")


def make_plan(population_size: int, seed: int, confidence: float = 0.95,
              margin: float = 0.05) -> SamplePlan:
    return SamplePlan(
        population_size=population_size,
        confidence=confidence,
        margin=margin,
        sample_size=required_sample_size(population_size, confidence, margin),
        seed=seed,
    )


def draw_sample(population_ids: Sequence[T], plan: SamplePlan) -> list[T]:
    """Sample without replacement; identical output for identical (ids, seed)."""
    if len(population_ids) != plan.population_size:
        raise DomainError(
            f"population has {len(population_ids)} ids, plan says {plan.population_size}")
    rng = random.Random(plan.seed)
    return rng.sample(list(population_ids), plan.sample_size)
