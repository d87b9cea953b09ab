"""Inference when the trait frequency itself is a random quantity W.

Learning that the offender bears the trait tilts the frequency density
upward; learning that the suspect also matches tilts it again.  The three
stages are the prior-to-crime density (chi), the prior-to-suspect density
(chi after conditioning on the offender bearing) and the post-match
density.  Their means p, p' and p'' drive every posterior here: known
frequencies are the sigma = 0 special case and reproduce the point-
frequency modules exactly.

Densities are either Beta laws (closed-form moments) or tabulations on a
uniform grid over [0, 1] with an odd node count, integrated by composite
Simpson quadrature.  All uncertainty-aware subpopulation posteriors need
only the per-group moments (p_i, sigma_i), so point and density frequencies
can be mixed freely in one population model.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.stats import beta as _beta_dist

from .core import (
    Convention,
    ConventionError,
    DomainError,
    InvalidValueError,
    LikelihoodRatio,
    OddsResult,
    PointFrequency,
    PopulationModel,
    StageError,
    Subpopulation,
    make_odds_result,
    simpson_weights,
)

__all__ = [
    "DEFAULT_RESOLUTION",
    "Stage",
    "Direction",
    "BetaParams",
    "TabulatedGrid",
    "FrequencyDensity",
    "FrequencyMoments",
    "beta_from_moments",
    "density_values",
    "transform_density",
    "frequency_moments",
    "uncertain_posterior",
    "uncertain_subpop_posterior",
    "uncertain_subpop_lr",
    "within_subpop_posterior",
    "suspect_subpop_posterior",
    "unknown_subpop_posterior",
    "naive_homogeneous_posterior",
]

DEFAULT_RESOLUTION = 4097


class Stage(str, enum.Enum):
    PRIOR_TO_CRIME = "prior_to_crime"  # chi: before any observation
    PRIOR_TO_SUSPECT = "prior_to_suspect"  # chi_I: offender known to bear the trait
    POST_MATCH = "post_match"  # chi_IE: suspect known to match as well


class Direction(str, enum.Enum):
    CRIME_TO_SUSPECT = "crime_to_suspect"
    SUSPECT_TO_MATCH = "suspect_to_match"
    MATCH_TO_SUSPECT = "match_to_suspect"
    SUSPECT_TO_CRIME = "suspect_to_crime"


@dataclass(frozen=True)
class BetaParams:
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > 0.0 and self.b > 0.0) or math.isnan(self.a) or math.isnan(self.b):
            raise InvalidValueError(f"Beta parameters must be positive, got ({self.a!r}, {self.b!r})")


@dataclass(frozen=True)
class TabulatedGrid:
    """Density values on the uniform grid over [0, 1]; normalized on construction."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 3 or values.size % 2 == 0:
            raise InvalidValueError(
                f"a tabulated density needs an odd number of nodes >= 3, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)) or np.any(values < 0.0):
            raise InvalidValueError("tabulated density values must be finite and nonnegative")
        integral = float(simpson_weights(values.size) @ values)
        if not (integral > 0.0) or not math.isfinite(integral):
            raise DomainError("tabulated density does not integrate to a positive finite value")
        object.__setattr__(self, "values", tuple(values / integral))


def beta_from_moments(mean: float, sd: float) -> BetaParams:
    """The Beta law with the given mean and standard deviation."""
    m = float(mean)
    v = float(sd) ** 2
    if not (0.0 < m < 1.0):
        raise InvalidValueError(f"mean must lie in (0, 1), got {mean!r}")
    if not (0.0 < v < m * (1.0 - m)):
        raise InvalidValueError(
            f"no Beta law has mean {mean!r} and standard deviation {sd!r}"
        )
    concentration = m * (1.0 - m) / v - 1.0
    return BetaParams(a=m * concentration, b=(1.0 - m) * concentration)


@dataclass(frozen=True)
class FrequencyDensity:
    """A density for the unknown trait frequency W, tagged with its stage.

    ``context_N`` records the population size the post-match conditioning
    was computed against; it is required exactly at that stage.
    """

    representation: BetaParams | TabulatedGrid
    stage: Stage = Stage.PRIOR_TO_CRIME
    context_N: int | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.representation, (BetaParams, TabulatedGrid)):
            raise InvalidValueError("representation must be BetaParams or TabulatedGrid")
        if not isinstance(self.stage, Stage):
            object.__setattr__(self, "stage", Stage(self.stage))
        if self.stage is Stage.POST_MATCH:
            n = self.context_N
            if n is None or int(n) != n or n < 0:
                raise InvalidValueError("a post-match density needs the population size it was conditioned on")
            object.__setattr__(self, "context_N", int(n))
        elif self.context_N is not None:
            raise InvalidValueError("context_N applies only to post-match densities")
        if not (0.0 < self.mean() < 1.0):
            raise InvalidValueError("density mean must lie strictly inside (0, 1)")

    @cached_property
    def _grid_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        values = np.asarray(self.representation.values, dtype=float)  # type: ignore[union-attr]
        nodes = np.linspace(0.0, 1.0, values.size)
        return nodes, values, simpson_weights(values.size)

    def _raw_moment(self, order: int) -> float:
        rep = self.representation
        if isinstance(rep, BetaParams):
            value = 1.0
            for r in range(order):
                value *= (rep.a + r) / (rep.a + rep.b + r)
            return value
        nodes, values, weights = self._grid_arrays
        return float(weights @ (nodes**order * values))

    def mean(self) -> float:
        return self._raw_moment(1)

    def variance(self) -> float:
        m = self._raw_moment(1)
        return max(self._raw_moment(2) - m * m, 0.0)

    def third_moment(self) -> float:
        return self._raw_moment(3)


def density_values(d: FrequencyDensity, resolution: int | None = None) -> np.ndarray:
    """The density evaluated on the uniform grid (its own grid when tabulated).

    Beta laws with a pole at an endpoint (a < 1 or b < 1) cannot be
    tabulated faithfully and are rejected.
    """
    rep = d.representation
    if isinstance(rep, TabulatedGrid):
        if resolution is not None and resolution != len(rep.values):
            raise InvalidValueError("a tabulated density is only available on its own grid")
        return np.asarray(rep.values, dtype=float)
    if rep.a < 1.0 or rep.b < 1.0:
        raise DomainError("Beta densities with an endpoint pole cannot be tabulated")
    n = DEFAULT_RESOLUTION if resolution is None else int(resolution)
    nodes = np.linspace(0.0, 1.0, n)
    return _beta_dist.pdf(nodes, rep.a, rep.b)


def _normalized_grid(values: np.ndarray) -> TabulatedGrid:
    if not np.all(np.isfinite(values)):
        raise DomainError("transformed density is not finite on the grid")
    return TabulatedGrid(values=tuple(values))


def _require_stage(d: FrequencyDensity, stage: Stage, direction: Direction) -> None:
    if d.stage is not stage:
        raise StageError(
            f"direction {direction.value} needs a {stage.value} density, got {d.stage.value}"
        )


def transform_density(
    d: FrequencyDensity,
    direction: Direction,
    N: int | None = None,
    resolution: int | None = None,
) -> FrequencyDensity:
    """Move a frequency density one conditioning step forward or backward.

    Forward, learning the offender bears the trait multiplies the density
    by t; learning the suspect matches too multiplies by (1 + N t), since a
    uniformly named suspect is the offender with chance 1/(N+1).  Backward
    transforms divide those factors out; at t = 0 the division by t is
    filled by cubic extrapolation.  Beta densities stay Beta for the
    first forward step and are tabulated otherwise.
    """
    direction = Direction(direction)
    if direction is Direction.CRIME_TO_SUSPECT:
        _require_stage(d, Stage.PRIOR_TO_CRIME, direction)
        rep = d.representation
        if isinstance(rep, BetaParams):
            return FrequencyDensity(BetaParams(rep.a + 1.0, rep.b), stage=Stage.PRIOR_TO_SUSPECT)
        nodes = np.linspace(0.0, 1.0, len(rep.values))
        tilted = nodes * np.asarray(rep.values)
        return FrequencyDensity(_normalized_grid(tilted), stage=Stage.PRIOR_TO_SUSPECT)

    if direction is Direction.SUSPECT_TO_MATCH:
        _require_stage(d, Stage.PRIOR_TO_SUSPECT, direction)
        if N is None or int(N) != N or N < 0:
            raise InvalidValueError("suspect_to_match needs the population size N")
        values = density_values(d, resolution)
        nodes = np.linspace(0.0, 1.0, values.size)
        tilted = (1.0 + int(N) * nodes) * values
        return FrequencyDensity(_normalized_grid(tilted), stage=Stage.POST_MATCH, context_N=int(N))

    if direction is Direction.MATCH_TO_SUSPECT:
        _require_stage(d, Stage.POST_MATCH, direction)
        if N is not None and int(N) != d.context_N:
            raise InvalidValueError(
                f"density was conditioned against N={d.context_N}, got N={N}"
            )
        values = density_values(d, resolution)
        nodes = np.linspace(0.0, 1.0, values.size)
        untilted = values / (1.0 + d.context_N * nodes)  # type: ignore[operator]
        return FrequencyDensity(_normalized_grid(untilted), stage=Stage.PRIOR_TO_SUSPECT)

    if direction is Direction.SUSPECT_TO_CRIME:
        _require_stage(d, Stage.PRIOR_TO_SUSPECT, direction)
        values = density_values(d, resolution)
        nodes = np.linspace(0.0, 1.0, values.size)
        ratio = np.empty_like(values)
        ratio[1:] = values[1:] / nodes[1:]
        # the t=0 node of chi_I/t is its limit chi(0): cubic extrapolation
        ratio[0] = max(4.0 * ratio[1] - 6.0 * ratio[2] + 4.0 * ratio[3] - ratio[4], 0.0)
        return FrequencyDensity(_normalized_grid(ratio), stage=Stage.PRIOR_TO_CRIME)

    raise InvalidValueError(f"unknown direction {direction!r}")


@dataclass(frozen=True)
class FrequencyMoments:
    """Means of W at the three conditioning stages, plus the prior variance."""

    p: float
    sigma2: float
    p_prime: float
    p_double_prime: float


def frequency_moments(d: FrequencyDensity, N: int) -> FrequencyMoments:
    """Moments p, sigma^2, p', p'' of a prior-to-crime density against population size N."""
    if d.stage is not Stage.PRIOR_TO_CRIME:
        raise StageError(f"moments are defined from a prior_to_crime density, got {d.stage.value}")
    if int(N) != N or N < 0:
        raise InvalidValueError(f"N must be a nonnegative integer, got {N!r}")
    p = d.mean()
    if p <= 0.0:
        raise DomainError("density mean must be positive")
    sigma2 = d.variance()
    p_prime = p + sigma2 / p
    second_given_i = d.third_moment() / p  # E(W^2 | I)
    p_double = (p_prime + N * second_given_i) / (1.0 + N * p_prime)
    return FrequencyMoments(p=p, sigma2=sigma2, p_prime=p_prime, p_double_prime=p_double)


def uncertain_posterior(N: int, d: FrequencyDensity) -> OddsResult:
    """Posterior odds of identity in a homogeneous population with uncertain frequency.

    Identical to the classical posterior with p replaced by p' = p + sigma^2/p:
    frequency uncertainty always cuts the likelihood ratio, never helps it.
    """
    moments = frequency_moments(d, N)
    lr = LikelihoodRatio(1.0 / moments.p_prime, Convention.CONDITIONAL_ON_I)
    if N == 0:
        return make_odds_result(math.inf, lr=lr, prior_odds=math.inf, note="single-inhabitant population")
    return make_odds_result(1.0 / (N * moments.p_prime), lr=lr, prior_odds=1.0 / N)


def _sub_moments(sub: Subpopulation, index: int) -> tuple[float, float]:
    freq = sub.freq
    if isinstance(freq, FrequencyDensity) and freq.stage is not Stage.PRIOR_TO_CRIME:
        raise StageError(f"subpopulation {index} needs a prior_to_crime density")
    return sub.freq_mean, sub.freq_variance


def _model_moments(model: PopulationModel) -> tuple[np.ndarray, np.ndarray]:
    pairs = [_sub_moments(sub, i) for i, sub in enumerate(model.subpops)]
    means = np.array([m for m, _ in pairs])
    variances = np.array([v for _, v in pairs])
    return means, variances


def uncertain_subpop_posterior(model: PopulationModel, s_index: int, large_n: bool = False) -> float:
    """Posterior probability of identity for a suspect of known group, uncertain frequencies.

    The exact value needs the suspect group's frequency variance only; other
    groups enter through their mean frequencies.  With ``large_n`` the
    stated large-group approximation is returned instead (it may exceed 1
    on very small models and is never substituted silently).
    """
    s = model.check_index(s_index)
    p, var = _model_moments(model)
    sizes = model.sizes()
    betas = model.betas()
    n_s = sizes[s]
    mixed = float((betas / betas[s]) @ p)
    if large_n:
        return 1.0 / (n_s * (mixed + var[s] / p[s]))
    return 1.0 / (1.0 + n_s * mixed + (n_s - 1.0) * var[s] / p[s] - p[s])


def within_subpop_posterior(model: PopulationModel, s_index: int) -> float:
    """Posterior probability of identity given the offender shares the suspect's group."""
    s = model.check_index(s_index)
    p, var = _model_moments(model)
    p_prime = p[s] + var[s] / p[s]
    return 1.0 / (1.0 + (model.sizes()[s] - 1.0) * p_prime)


def _alphas_from_means(model: PopulationModel, means: np.ndarray) -> np.ndarray:
    weighted = means * model.betas()
    return weighted / weighted.sum()


def uncertain_subpop_lr(
    model: PopulationModel,
    s_index: int,
    convention: Convention,
    large_n: bool = False,
) -> LikelihoodRatio:
    """Likelihood ratio for a suspect of known group under frequency uncertainty.

    conditional_on_I treats the trace as background and needs the updated
    group priors alpha; joint_I_and_E treats trace and match jointly and
    needs only beta.  ``large_n`` selects each convention's large-group
    limit; the large_N convention names the joint limit directly.  The
    conservative value is the conditional limit at alpha_s = 1, a
    defendant-favourable bound independent of the priors.
    """
    s = model.check_index(s_index)
    convention = Convention(convention)
    p, var = _model_moments(model)
    sizes = model.sizes()
    betas = model.betas()
    p_s = float(p[s])
    p_prime_s = p_s + float(var[s]) / p_s
    n_s = float(sizes[s])

    if convention is Convention.CONDITIONAL_ON_I:
        alpha_s = float(_alphas_from_means(model, p)[s])
        if large_n:
            return LikelihoodRatio(1.0 / (p_s + alpha_s * (p_prime_s - p_s)), convention)
        denominator = n_s * p_s * (1.0 - alpha_s) + alpha_s * (n_s - 1.0) * p_prime_s
        return LikelihoodRatio((n_s - alpha_s) / denominator, convention)

    if convention is Convention.JOINT_I_AND_E:
        if large_n:
            return LikelihoodRatio(
                1.0 / (float(betas @ p) + betas[s] * var[s] / p_s), convention
            )
        denominator = (
            n_s * float(betas @ p) + n_s * betas[s] * (p_prime_s - p_s) - p_prime_s * betas[s]
        )
        return LikelihoodRatio((n_s - betas[s]) / denominator, convention)

    if convention is Convention.LARGE_N:
        return LikelihoodRatio(1.0 / (float(betas @ p) + betas[s] * var[s] / p_s), convention)

    if convention is Convention.CONSERVATIVE:
        return LikelihoodRatio(p_s / (p_s * p_s + float(var[s])), convention)

    raise ConventionError(f"convention {convention.value} does not apply to this model")


def suspect_subpop_posterior(model: PopulationModel) -> np.ndarray:
    """P(the suspect belongs to each group | trace and match), as a vector.

    Combines the suspect's group prior epsilon, the chance a group member
    matches, and how strongly a match in that group argues identity.
    """
    epsilons = model.epsilons()
    p, _ = _model_moments(model)
    sizes = model.sizes()
    betas = model.betas()
    posteriors = np.array(
        [uncertain_subpop_posterior(model, i) for i in range(len(model))]
    )
    weights = p * epsilons * betas / (sizes * posteriors)
    return weights / weights.sum()


def unknown_subpop_posterior(model: PopulationModel) -> float:
    """Posterior probability of identity when the suspect's group is itself unknown.

    Symmetric in epsilon and beta: swapping who-is-from-where priors for the
    suspect and the offender leaves the value unchanged.
    """
    epsilons = model.epsilons()
    p, _ = _model_moments(model)
    sizes = model.sizes()
    betas = model.betas()
    posteriors = np.array(
        [uncertain_subpop_posterior(model, i) for i in range(len(model))]
    )
    contributions = p * epsilons * betas / sizes
    return float(contributions.sum() / (contributions / posteriors).sum())


def naive_homogeneous_posterior(model: PopulationModel) -> float:
    """The posterior an analyst gets by ignoring group structure entirely.

    Pools every group into one population and applies the homogeneous
    formula with the first (dominant) group's frequency moments.
    """
    p, var = _model_moments(model)
    p_prime = p[0] + var[0] / p[0]
    pooled_others = model.total_size() - 1.0
    return 1.0 / (1.0 + pooled_others * p_prime)
