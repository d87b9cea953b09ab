"""Shared value types, error taxonomy, and numerical primitives.

Everything downstream (closed-form evidence models, the enumeration and
Monte-Carlo oracles, the HTTP service) builds on the types defined here.
Scalars are plain floats validated at construction sites; structured
results carry a posterior odds value, the matching probability, and the
likelihood-ratio decomposition that produced them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "IslandOddsError",
    "InvalidValueError",
    "DomainError",
    "StageError",
    "ConventionError",
    "NoEquivalentError",
    "CapacityError",
    "PreconditionError",
    "ImpossibleConditioningError",
    "InfeasibleConditioningError",
    "Convention",
    "LikelihoodRatio",
    "OddsResult",
    "PointFrequency",
    "Subpopulation",
    "PopulationModel",
    "check_probability",
    "check_odds",
    "probability_from_odds",
    "odds_from_probability",
    "simpson_weights",
    "integrate",
]


class IslandOddsError(Exception):
    """Base class for every error raised by this package."""


class InvalidValueError(IslandOddsError, ValueError):
    """A scalar or field is outside its legal range (or NaN)."""


class DomainError(IslandOddsError, ValueError):
    """Inputs are individually legal but the operation is undefined on them."""


class StageError(IslandOddsError, ValueError):
    """A density tagged with one conditioning stage was passed where another is required."""


class ConventionError(IslandOddsError, ValueError):
    """The requested likelihood-ratio convention does not apply to the given model."""


class NoEquivalentError(IslandOddsError, ValueError):
    """A requested model translation has no valid counterpart."""


class CapacityError(IslandOddsError, ValueError):
    """The request exceeds a documented size limit."""


class PreconditionError(IslandOddsError, ValueError):
    """The model lacks a field or property this operation requires."""


class ImpossibleConditioningError(IslandOddsError, ValueError):
    """The conditioning event has probability zero under the scenario."""


class InfeasibleConditioningError(IslandOddsError, RuntimeError):
    """The conditioning event is too rare for Monte-Carlo rejection sampling."""


class Convention(str, enum.Enum):
    """Labels the background conditioning a likelihood ratio was computed under."""

    CONDITIONAL_ON_I = "conditional_on_I"  # evidence weighed given a bearer committed the act
    JOINT_I_AND_E = "joint_I_and_E"  # trace and match treated as one compound event
    LARGE_N = "large_N"  # limiting form for large subpopulations
    DEFAULT_POPULATION = "default_population"  # suspect contrasted with a reference group
    CONSERVATIVE = "conservative"  # defendant-favourable bound


def check_probability(value: float, name: str = "probability") -> float:
    """Validate a probability in [0, 1] and return it as a float."""
    v = float(value)
    if math.isnan(v) or not (0.0 <= v <= 1.0):
        raise InvalidValueError(f"{name} must lie in [0, 1], got {value!r}")
    return v


def check_odds(value: float, name: str = "odds") -> float:
    """Validate an odds value in [0, +inf] (infinite odds are legal) and return it."""
    v = float(value)
    if math.isnan(v) or v < 0.0:
        raise InvalidValueError(f"{name} must be a nonnegative real or +inf, got {value!r}")
    return v


def probability_from_odds(odds: float) -> float:
    """Convert odds o to the probability o / (1 + o); +inf maps to 1."""
    o = check_odds(odds)
    if math.isinf(o):
        return 1.0
    return o / (1.0 + o)


def odds_from_probability(probability: float) -> float:
    """Convert a probability p to odds p / (1 - p); p = 1 maps to +inf."""
    p = check_probability(probability)
    if p == 1.0:
        return math.inf
    return p / (1.0 - p)


@dataclass(frozen=True)
class LikelihoodRatio:
    """A likelihood ratio together with the convention it is valid under."""

    value: float  # nonnegative, +inf allowed
    convention: Convention

    def __post_init__(self) -> None:
        check_odds(self.value, "likelihood ratio")
        if not isinstance(self.convention, Convention):
            object.__setattr__(self, "convention", Convention(self.convention))


@dataclass(frozen=True)
class OddsResult:
    """Posterior odds of identity with the decomposition that produced them.

    ``odds`` and ``probability`` always refer to the same posterior event.
    When the posterior factors as LR x correction x prior odds the factors
    are carried along; fields that do not apply stay None.  ``note`` flags
    degenerate but well-defined outcomes (zero or infinite odds).
    """

    odds: float
    probability: float
    lr: LikelihoodRatio | None = None
    prior_odds: float | None = None
    correction_factor: float | None = None
    note: str | None = None

    def __post_init__(self) -> None:
        check_odds(self.odds, "odds")
        check_probability(self.probability, "probability")
        if self.prior_odds is not None:
            check_odds(self.prior_odds, "prior odds")


def make_odds_result(
    odds: float,
    lr: LikelihoodRatio | None = None,
    prior_odds: float | None = None,
    correction_factor: float | None = None,
    note: str | None = None,
) -> OddsResult:
    """Build an OddsResult, deriving the probability from the odds."""
    o = check_odds(odds)
    return OddsResult(
        odds=o,
        probability=probability_from_odds(o),
        lr=lr,
        prior_odds=prior_odds,
        correction_factor=correction_factor,
        note=note,
    )


@dataclass(frozen=True)
class PointFrequency:
    """A trait frequency known exactly."""

    p: float

    def __post_init__(self) -> None:
        p = float(self.p)
        if math.isnan(p) or not (0.0 < p < 1.0):
            raise InvalidValueError(f"trait frequency must lie in (0, 1), got {self.p!r}")
        object.__setattr__(self, "p", p)

    def mean(self) -> float:
        return self.p

    def variance(self) -> float:
        return 0.0


@dataclass(frozen=True)
class Subpopulation:
    """One group: its size, trait-frequency spec, and prior weights.

    ``freq`` is either a PointFrequency or a FrequencyDensity (an object
    exposing mean() and variance()).  ``beta`` is the prior probability
    that the offender belongs to this group; ``epsilon`` the prior that
    the person of interest does, required only by operations that use it.
    """

    size: int
    freq: object
    beta: float
    epsilon: float | None = None

    def __post_init__(self) -> None:
        if int(self.size) != self.size or self.size < 1:
            raise InvalidValueError(f"subpopulation size must be an integer >= 1, got {self.size!r}")
        object.__setattr__(self, "size", int(self.size))
        if not hasattr(self.freq, "mean") or not hasattr(self.freq, "variance"):
            raise InvalidValueError("freq must expose mean() and variance()")
        check_probability(self.freq.mean(), "freq mean")
        if not (0.0 < self.freq.mean() < 1.0):
            raise InvalidValueError("freq mean must lie strictly inside (0, 1)")
        b = float(self.beta)
        if math.isnan(b) or b <= 0.0:
            raise InvalidValueError(f"beta must be > 0, got {self.beta!r}")
        object.__setattr__(self, "beta", b)
        if self.epsilon is not None:
            object.__setattr__(self, "epsilon", check_probability(self.epsilon, "epsilon"))

    @property
    def freq_mean(self) -> float:
        return float(self.freq.mean())

    @property
    def freq_variance(self) -> float:
        return float(self.freq.variance())


_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class PopulationModel:
    """A population partitioned into subpopulations."""

    subpops: tuple[Subpopulation, ...]

    def __post_init__(self) -> None:
        subs = tuple(self.subpops)
        if not subs:
            raise InvalidValueError("a population model needs at least one subpopulation")
        object.__setattr__(self, "subpops", subs)
        beta_sum = math.fsum(s.beta for s in subs)
        if abs(beta_sum - 1.0) > _WEIGHT_TOL:
            raise InvalidValueError(f"beta weights must sum to 1, got {beta_sum!r}")
        eps = [s.epsilon for s in subs]
        if any(e is not None for e in eps):
            if any(e is None for e in eps):
                raise InvalidValueError("epsilon must be given for all subpopulations or none")
            eps_sum = math.fsum(eps)  # type: ignore[arg-type]
            if abs(eps_sum - 1.0) > _WEIGHT_TOL:
                raise InvalidValueError(f"epsilon weights must sum to 1, got {eps_sum!r}")

    def __len__(self) -> int:
        return len(self.subpops)

    def sizes(self) -> np.ndarray:
        return np.array([s.size for s in self.subpops], dtype=float)

    def betas(self) -> np.ndarray:
        return np.array([s.beta for s in self.subpops], dtype=float)

    def means(self) -> np.ndarray:
        return np.array([s.freq_mean for s in self.subpops], dtype=float)

    def variances(self) -> np.ndarray:
        return np.array([s.freq_variance for s in self.subpops], dtype=float)

    def epsilons(self) -> np.ndarray:
        if any(s.epsilon is None for s in self.subpops):
            raise PreconditionError("this operation requires epsilon on every subpopulation")
        return np.array([s.epsilon for s in self.subpops], dtype=float)

    def total_size(self) -> int:
        return int(sum(s.size for s in self.subpops))

    def check_index(self, index: int) -> int:
        if not (0 <= index < len(self.subpops)):
            raise InvalidValueError(f"subpopulation index {index} out of range for {len(self.subpops)} groups")
        return int(index)


def simpson_weights(resolution: int) -> np.ndarray:
    """Composite Simpson weights for a uniform grid of `resolution` nodes on [0, 1].

    The node count must be odd and at least 3 so the panel count is even.
    """
    n = int(resolution)
    if n < 3 or n % 2 == 0:
        raise DomainError(f"resolution must be an odd integer >= 3, got {resolution!r}")
    h = 1.0 / (n - 1)
    w = np.full(n, 2.0)
    w[1::2] = 4.0
    w[0] = 1.0
    w[-1] = 1.0
    return w * (h / 3.0)


def integrate(func: Callable[[np.ndarray], Sequence[float] | np.ndarray], resolution: int = 4097) -> float:
    """Integrate a real function over [0, 1] by composite Simpson quadrature.

    ``func`` may accept an array of nodes; if it only handles scalars it is
    evaluated pointwise.  Non-finite values anywhere on the grid raise
    DomainError rather than silently propagating.
    """
    w = simpson_weights(resolution)
    nodes = np.linspace(0.0, 1.0, int(resolution))
    try:
        values = np.asarray(func(nodes), dtype=float)
        if values.shape != nodes.shape:
            raise TypeError
    except (TypeError, ValueError):
        values = np.array([func(t) for t in nodes], dtype=float)  # type: ignore[arg-type]
    if not np.all(np.isfinite(values)):
        raise DomainError("integrand is not finite on [0, 1]")
    return float(w @ values)
