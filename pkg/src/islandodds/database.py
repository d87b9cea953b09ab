"""Database-search statistics: who does a match pattern point to, and how well
does a database of a given size perform in the long run.

A search reports which of the n members match the trace; matched members
occupy the first k indices by convention.  ``member_alphas`` are the prior
probabilities, given the offender bears the trait, that the offender is each
member; ``outside_alpha_total`` is the mass on non-members.  Growth analysis
treats the inclusion probability q_n = P(offender in the database of size n)
as a design choice and traces odds and unique-match probability along n.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import (
    Convention,
    DomainError,
    InvalidValueError,
    LikelihoodRatio,
    OddsResult,
    check_probability,
    make_odds_result,
)

__all__ = [
    "UniformAlphas",
    "DatabaseSpec",
    "Inclusion",
    "GrowthModel",
    "GrowthPoint",
    "database_focused",
    "individual_focused",
    "database_effectiveness",
    "unique_match_probability",
    "growth_curve",
    "enlargement_threshold",
]

_NORM_TOL = 1e-10


@dataclass(frozen=True)
class UniformAlphas:
    """Offender mass spread evenly over the database members."""

    total: float

    def __post_init__(self) -> None:
        check_probability(self.total, "total member alpha")


@dataclass(frozen=True)
class DatabaseSpec:
    """One database search outcome: n members, the first k of them matching."""

    n: int
    k: int
    member_alphas: tuple[float, ...] | UniformAlphas
    outside_alpha_total: float
    p: float

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise InvalidValueError(f"database size must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if int(self.k) != self.k or not (0 <= self.k <= self.n):
            raise InvalidValueError(f"match count must lie in 0..n, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))
        check_probability(self.outside_alpha_total, "outside_alpha_total")
        p = float(self.p)
        if math.isnan(p) or not (0.0 < p < 1.0):
            raise DomainError(f"trait frequency must lie in (0, 1), got {self.p!r}")
        object.__setattr__(self, "p", p)
        if isinstance(self.member_alphas, UniformAlphas):
            member_total = self.member_alphas.total
        else:
            alphas = tuple(float(a) for a in self.member_alphas)
            object.__setattr__(self, "member_alphas", alphas)
            if len(alphas) != self.n:
                raise InvalidValueError("member_alphas must list one value per member")
            for a in alphas:
                check_probability(a, "member alpha")
            member_total = math.fsum(alphas)
        if abs(member_total + self.outside_alpha_total - 1.0) > _NORM_TOL:
            raise InvalidValueError("member and outside offender mass must sum to 1")

    def alphas(self) -> np.ndarray:
        if isinstance(self.member_alphas, UniformAlphas):
            return np.full(self.n, self.member_alphas.total / self.n)
        return np.asarray(self.member_alphas, dtype=float)

    def member_total(self) -> float:
        if isinstance(self.member_alphas, UniformAlphas):
            return self.member_alphas.total
        return float(math.fsum(self.member_alphas))


def database_focused(spec: DatabaseSpec) -> OddsResult:
    """Posterior odds that the offender is in the database at all.

    The likelihood ratio compares the match pattern under offender-inside
    versus offender-outside; the prior odds are member mass against outside
    mass.  k = 0 legitimately gives zero odds and is flagged, not rejected.
    """
    alphas = spec.alphas()
    matched = float(alphas[: spec.k].sum())
    member_total = spec.member_total()
    lr = (
        LikelihoodRatio(matched / (spec.p * member_total), Convention.CONDITIONAL_ON_I)
        if member_total > 0.0
        else None
    )
    prior_odds = (
        math.inf if spec.outside_alpha_total == 0.0 else member_total / spec.outside_alpha_total
    )
    if spec.k == 0 or matched == 0.0:
        note = "no member matched" if spec.k == 0 else "matched members carry no offender mass"
        return make_odds_result(0.0, lr=lr, prior_odds=prior_odds, note=note)
    if spec.outside_alpha_total == 0.0:
        return make_odds_result(
            math.inf, lr=lr, prior_odds=prior_odds, note="database covers the whole population"
        )
    return make_odds_result(matched / (spec.p * spec.outside_alpha_total), lr=lr, prior_odds=prior_odds)


def individual_focused(spec: DatabaseSpec, target: int) -> OddsResult:
    """Posterior odds that matched member ``target`` (1-based) is the offender.

    Non-matching members are ruled out by the pattern itself, so the
    competition is the other matched members plus a coincidental match by an
    outsider.  With a single match the likelihood ratio is simply 1/p.
    """
    if int(target) != target or not (1 <= target <= spec.k):
        raise InvalidValueError(
            f"target must name a matched member (1..{spec.k}), got {target!r}"
        )
    alphas = spec.alphas()
    target_alpha = float(alphas[target - 1])
    others = float(alphas[: spec.k].sum()) - target_alpha
    competition = others + spec.p * spec.outside_alpha_total
    lr = None
    prior_odds = None
    if spec.k == 1:
        lr = LikelihoodRatio(1.0 / spec.p, Convention.CONDITIONAL_ON_I)
        prior_odds = (
            math.inf
            if spec.outside_alpha_total == 0.0
            else target_alpha / spec.outside_alpha_total
        )
    if competition == 0.0:
        return make_odds_result(
            math.inf, lr=lr, prior_odds=prior_odds, note="no alternative source of the match"
        )
    return make_odds_result(target_alpha / competition, lr=lr, prior_odds=prior_odds)


def _stable_power(one_minus_p_exponent: int, p: float) -> float:
    """(1 - p)^n without underflow-prone repeated multiplication."""
    return math.exp(one_minus_p_exponent * math.log1p(-p))


def unique_match_probability(n: int, p: float, q: float) -> float:
    """Probability the search of an n-member database yields exactly one match."""
    if int(n) != n or n < 1:
        raise InvalidValueError(f"database size must be a positive integer, got {n!r}")
    if not (0.0 < p < 1.0):
        raise DomainError(f"trait frequency must lie in (0, 1), got {p!r}")
    q = check_probability(q, "inclusion probability")
    return q * _stable_power(int(n), p) + (1.0 - q) * n * p * _stable_power(int(n) - 1, p)


def database_effectiveness(n: int, p: float, q: float) -> tuple[OddsResult, float]:
    """Long-run performance of a database of size n with inclusion probability q.

    Returns the posterior odds that a unique match is with the offender,
    (1/(np)) * q/(1-q), together with the probability of obtaining a unique
    match at all.  q of 0 or 1 gives degenerate odds, flagged.
    """
    if int(n) != n or n < 1:
        raise InvalidValueError(f"database size must be a positive integer, got {n!r}")
    if not (0.0 < p < 1.0):
        raise DomainError(f"trait frequency must lie in (0, 1), got {p!r}")
    q = check_probability(q, "inclusion probability")
    p_unique = unique_match_probability(n, p, q)
    lr = LikelihoodRatio(1.0 / p, Convention.CONDITIONAL_ON_I)
    if q == 0.0:
        odds = make_odds_result(0.0, lr=lr, prior_odds=0.0, note="offender never in the database")
        return odds, p_unique
    if q == 1.0:
        odds = make_odds_result(
            math.inf, lr=lr, prior_odds=math.inf, note="offender always in the database"
        )
        return odds, p_unique
    prior_odds = q / (n * (1.0 - q))  # any single member against everyone outside
    odds = make_odds_result((1.0 / (n * p)) * q / (1.0 - q), lr=lr, prior_odds=prior_odds)
    return odds, p_unique


class Inclusion(str, enum.Enum):
    RANDOM_SAMPLE = "random_sample"  # q_n = n/N
    SQRT_WEIGHTED = "sqrt_weighted"  # q_n = sqrt(n/N)


@dataclass(frozen=True)
class GrowthModel:
    """How inclusion probability scales as the database grows inside a population of N."""

    N: int
    p: float
    inclusion: Inclusion | Callable[[int], float]

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 1:
            raise InvalidValueError(f"population size must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        p = float(self.p)
        if math.isnan(p) or not (0.0 < p < 1.0):
            raise DomainError(f"trait frequency must lie in (0, 1), got {self.p!r}")
        object.__setattr__(self, "p", p)
        if isinstance(self.inclusion, str):
            object.__setattr__(self, "inclusion", Inclusion(self.inclusion))

    def q(self, n: int) -> float:
        if isinstance(self.inclusion, Inclusion):
            fraction = n / self.N
            value = fraction if self.inclusion is Inclusion.RANDOM_SAMPLE else math.sqrt(fraction)
        else:
            value = float(self.inclusion(n))
        return check_probability(value, f"inclusion probability at n={n}")


@dataclass(frozen=True)
class GrowthPoint:
    n: int
    odds: float
    p_unique: float


def growth_curve(model: GrowthModel, n_grid: Sequence[int]) -> list[GrowthPoint]:
    """Effectiveness odds and unique-match probability along a grid of database sizes."""
    points = []
    for n in n_grid:
        if int(n) != n or not (1 <= n <= model.N):
            raise DomainError(f"database size must lie in 1..{model.N}, got {n!r}")
        odds, p_unique = database_effectiveness(int(n), model.p, model.q(int(n)))
        points.append(GrowthPoint(n=int(n), odds=odds.odds, p_unique=p_unique))
    return points


def enlargement_threshold(q_n: float, q_2n: float) -> bool:
    """Does doubling the database size improve its effectiveness odds?

    Doubling halves the per-member factor 1/(np), so it pays only when the
    inclusion odds more than double.
    """
    q_n = check_probability(q_n, "q_n")
    q_2n = check_probability(q_2n, "q_2n")
    if not (0.0 < q_n < 1.0 and 0.0 < q_2n < 1.0):
        raise DomainError("enlargement comparison needs inclusion probabilities strictly inside (0, 1)")
    return q_2n / (1.0 - q_2n) > 2.0 * q_n / (1.0 - q_n)
