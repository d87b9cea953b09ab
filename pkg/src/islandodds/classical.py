"""Homogeneous closed population: posterior of identity and bearer counts.

The population holds the person of interest plus N other inhabitants, each
bearing the trait independently with known frequency p.  The offender is
uniform over the population a priori.  Two selection stories are covered:
a suspect named independently of the trait (the classical posterior) and a
search that examines inhabitants in random order until a bearer turns up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core import (
    CapacityError,
    Convention,
    DomainError,
    InvalidValueError,
    LikelihoodRatio,
    OddsResult,
    make_odds_result,
)

__all__ = [
    "MATERIALIZE_LIMIT",
    "BearerDistribution",
    "classical_posterior",
    "bearers_given_I",
    "bearers_unconditioned",
    "yellin_posterior",
]

MATERIALIZE_LIMIT = 1_000_000  # point-mass tables above this size are not built


def _check_inputs(n_others: int, p: float) -> tuple[int, float]:
    if int(n_others) != n_others or n_others < 0:
        raise InvalidValueError(f"N must be a nonnegative integer, got {n_others!r}")
    p = float(p)
    if math.isnan(p) or not (0.0 < p < 1.0):
        raise DomainError(f"trait frequency must lie in (0, 1), got {p!r}")
    return int(n_others), p


def _binomial_pmf(n: int, p: float) -> np.ndarray:
    """Bin(n, p) probabilities for k = 0..n, via log-gamma for stability."""
    k = np.arange(n + 1)
    log_pmf = (
        gammaln(n + 1)
        - gammaln(k + 1)
        - gammaln(n - k + 1)
        + k * math.log(p)
        + (n - k) * math.log1p(-p)
    )
    return np.exp(log_pmf)


def _yellin_value(n: int, p: float) -> float:
    # -expm1 keeps full precision where 1 - exp(...) would cancel (tiny (N+1)p)
    return -math.expm1((n + 1) * math.log1p(-p)) / ((n + 1) * p)


@dataclass(frozen=True)
class BearerDistribution:
    """Distribution of the number of trait bearers among the N+1 inhabitants.

    ``probabilities[k]`` is the mass at bearer count k for k = 0..N+1.  For
    N beyond the materialization limit the table is omitted and only the
    analytic moments are available.  ``conditioning`` records what the law
    is conditioned on: nothing, the offender bearing the trait, or
    additionally the named suspect matching.
    """

    n_others: int
    trait_freq: float
    conditioning: str  # "unconditioned" | "given_I" | "given_I_and_E"
    probabilities: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.conditioning not in ("unconditioned", "given_I", "given_I_and_E"):
            raise InvalidValueError(f"unknown conditioning tag {self.conditioning!r}")
        if self.probabilities is None:
            return
        probs = np.asarray(self.probabilities, dtype=float)
        object.__setattr__(self, "probabilities", probs)
        if probs.shape != (self.n_others + 2,):
            raise InvalidValueError("bearer-count table must cover k = 0..N+1")
        if not math.isclose(probs.sum(), 1.0, abs_tol=1e-12):
            raise InvalidValueError("bearer-count probabilities must sum to 1")
        if self.conditioning in ("given_I", "given_I_and_E") and probs[0] != 0.0:
            raise InvalidValueError(f"{self.conditioning} forbids mass at zero bearers")

    def _require_table(self) -> np.ndarray:
        if self.probabilities is None:
            raise CapacityError(
                f"bearer-count tables are materialized only for N <= {MATERIALIZE_LIMIT}; "
                "use the analytic moments"
            )
        return self.probabilities

    def pmf(self, k: int) -> float:
        table = self._require_table()
        if not (0 <= k <= self.n_others + 1):
            return 0.0
        return float(table[k])

    def mean(self) -> float:
        n, p = self.n_others, self.trait_freq
        if self.conditioning == "unconditioned":
            return (n + 1) * p
        mean_i = 1.0 + n * p
        if self.conditioning == "given_I":
            return mean_i
        # size-biased: E(U | I, E) = E(U^2 | I) / E(U | I)
        return (n * p * (1.0 - p) + mean_i * mean_i) / mean_i

    def inverse_moment(self) -> float:
        """E[1/U]; defined only when no mass sits at zero bearers."""
        if self.conditioning == "unconditioned":
            raise DomainError("inverse moment undefined: positive mass at zero bearers")
        if self.probabilities is not None:
            k = np.arange(1, self.n_others + 2)
            return float(self.probabilities[1:] @ (1.0 / k))
        if self.conditioning == "given_I":
            return _yellin_value(self.n_others, self.trait_freq)
        # E(1/U | I, E) = E(U/U | I) / E(U | I) = 1 / E(U | I)
        return 1.0 / (1.0 + self.n_others * self.trait_freq)

    def conditioned_on_match(self) -> "BearerDistribution":
        """Size-bias the given_I law by the event that the named suspect matches."""
        if self.conditioning != "given_I":
            raise InvalidValueError("size-biasing applies to the given_I distribution")
        table = self.probabilities
        if table is not None:
            k = np.arange(self.n_others + 2)
            table = k * table / (table @ k)
        return BearerDistribution(
            n_others=self.n_others,
            trait_freq=self.trait_freq,
            conditioning="given_I_and_E",
            probabilities=table,
        )


def classical_posterior(n_others: int, p: float) -> OddsResult:
    """Posterior odds that a named matching suspect is the offender.

    Odds are 1/(Np): the likelihood ratio 1/p times uniform prior odds 1/N.
    A population of one (N = 0) gives infinite odds.
    """
    n, p = _check_inputs(n_others, p)
    lr = LikelihoodRatio(1.0 / p, Convention.CONDITIONAL_ON_I)
    if n == 0:
        return make_odds_result(math.inf, lr=lr, prior_odds=math.inf, note="single-inhabitant population")
    return make_odds_result(1.0 / (n * p), lr=lr, prior_odds=1.0 / n)


def bearers_given_I(n_others: int, p: float) -> BearerDistribution:
    """Law of the bearer count given the offender bears the trait: 1 + Bin(N, p)."""
    n, p = _check_inputs(n_others, p)
    probs = None
    if n <= MATERIALIZE_LIMIT:
        probs = np.zeros(n + 2)
        probs[1:] = _binomial_pmf(n, p)
        probs /= probs.sum()  # remove accumulated roundoff
    return BearerDistribution(n_others=n, trait_freq=p, conditioning="given_I", probabilities=probs)


def bearers_unconditioned(n_others: int, p: float) -> BearerDistribution:
    """Law of the bearer count with no conditioning: Bin(N+1, p)."""
    n, p = _check_inputs(n_others, p)
    probs = None
    if n <= MATERIALIZE_LIMIT:
        probs = _binomial_pmf(n + 1, p)
        probs = probs / probs.sum()
    return BearerDistribution(n_others=n, trait_freq=p, conditioning="unconditioned", probabilities=probs)


def yellin_posterior(n_others: int, p: float) -> float:
    """Posterior probability of identity when the suspect was found by search.

    Searching in uniform random order until a bearer appears makes the
    posterior the inverse-moment E[1/U] of the bearer count given I, which
    has the closed form (1 - (1-p)^(N+1)) / ((N+1) p).
    """
    n, p = _check_inputs(n_others, p)
    return _yellin_value(n, p)
