"""Posterior odds when the suspect selection or the trait itself is not independent.

Two departures from the classical model are covered.  In a biased search the
investigators' chance of landing on the named suspect depends on who the
offender actually is; the per-group ``ratio`` is the selection weight for
the suspect relative to the weight when the suspect is the offender.  Under
trait correlation the ``ratio`` is the conditional bearer probability

    c = P(suspect bears | the other individual bears)

for each group of alternatives (or its transpose, when working with
unconditioned offender priors).  The two stories produce identical posterior
odds under an explicit translation, exposed as bias_correlation_equivalent.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .core import (
    Convention,
    InvalidValueError,
    LikelihoodRatio,
    NoEquivalentError,
    OddsResult,
    PreconditionError,
    check_probability,
    make_odds_result,
)

__all__ = [
    "RatioKind",
    "DependenceConditioning",
    "DependencyGroup",
    "GroupedDependencySpec",
    "biased_search_odds",
    "selection_posterior",
    "correlated_odds",
    "bias_correlation_equivalent",
]

_NORM_TOL = 1e-10


class RatioKind(str, enum.Enum):
    CORRELATION_C = "correlation_c"  # ratio is a conditional bearer probability
    BIAS_SIGMA = "bias_sigma"  # ratio is a relative selection weight


class DependenceConditioning(str, enum.Enum):
    ON_I = "on_I"  # offender priors already conditioned on the offender bearing the trait
    UNCONDITIONED = "unconditioned"


@dataclass(frozen=True)
class DependencyGroup:
    """A class of alternative offenders sharing one prior and one ratio.

    ``prior_given_I`` is per individual.  ``freq`` (the group's own trait
    frequency) is needed only for consistency checks and for translating a
    biased search into a correlation model.
    """

    count: int
    prior_given_I: float
    ratio: float
    prior_unconditioned: float | None = None
    freq: float | None = None

    def __post_init__(self) -> None:
        if int(self.count) != self.count or self.count < 1:
            raise InvalidValueError(f"group count must be a positive integer, got {self.count!r}")
        object.__setattr__(self, "count", int(self.count))
        check_probability(self.prior_given_I, "prior_given_I")
        r = float(self.ratio)
        if math.isnan(r) or r < 0.0:
            raise InvalidValueError(f"ratio must be nonnegative, got {self.ratio!r}")
        object.__setattr__(self, "ratio", r)
        if self.prior_unconditioned is not None:
            check_probability(self.prior_unconditioned, "prior_unconditioned")
        if self.freq is not None:
            f = float(self.freq)
            if math.isnan(f) or not (0.0 < f < 1.0):
                raise InvalidValueError(f"group trait frequency must lie in (0, 1), got {self.freq!r}")


@dataclass(frozen=True)
class GroupedDependencySpec:
    """Suspect plus grouped alternative offenders, with one dependence ratio per group."""

    groups: tuple[DependencyGroup, ...]
    suspect_freq: float
    ratio_kind: RatioKind
    suspect_prior_given_I: float
    suspect_prior_unconditioned: float | None = None

    def __post_init__(self) -> None:
        groups = tuple(self.groups)
        object.__setattr__(self, "groups", groups)
        if not groups:
            raise InvalidValueError("at least one non-suspect group is required")
        ps = float(self.suspect_freq)
        if math.isnan(ps) or not (0.0 < ps < 1.0):
            raise InvalidValueError(f"suspect trait frequency must lie in (0, 1), got {self.suspect_freq!r}")
        object.__setattr__(self, "suspect_freq", ps)
        if not isinstance(self.ratio_kind, RatioKind):
            object.__setattr__(self, "ratio_kind", RatioKind(self.ratio_kind))
        check_probability(self.suspect_prior_given_I, "suspect_prior_given_I")
        total = self.suspect_prior_given_I + math.fsum(g.count * g.prior_given_I for g in groups)
        if abs(total - 1.0) > _NORM_TOL:
            raise InvalidValueError(f"offender priors given I must sum to 1, got {total!r}")
        if self.ratio_kind is RatioKind.CORRELATION_C:
            for i, g in enumerate(groups):
                if g.ratio > 1.0:
                    raise InvalidValueError(
                        f"group {i}: a conditional bearer probability cannot exceed 1, got {g.ratio!r}"
                    )
        uncond = [g.prior_unconditioned for g in groups]
        if self.suspect_prior_unconditioned is not None or any(u is not None for u in uncond):
            if self.suspect_prior_unconditioned is None or any(u is None for u in uncond):
                raise InvalidValueError("unconditioned priors must be given everywhere or nowhere")
            check_probability(self.suspect_prior_unconditioned, "suspect_prior_unconditioned")
            total_u = self.suspect_prior_unconditioned + math.fsum(
                g.count * g.prior_unconditioned for g in groups  # type: ignore[operator]
            )
            if abs(total_u - 1.0) > _NORM_TOL:
                raise InvalidValueError(f"unconditioned offender priors must sum to 1, got {total_u!r}")

    def alternative_prior_given_I(self) -> float:
        return math.fsum(g.count * g.prior_given_I for g in self.groups)


def _require_kind(spec: GroupedDependencySpec, kind: RatioKind, op: str) -> None:
    if spec.ratio_kind is not kind:
        raise InvalidValueError(f"{op} needs ratio_kind={kind.value}, got {spec.ratio_kind.value}")


def biased_search_odds(spec: GroupedDependencySpec) -> OddsResult:
    """Posterior odds of identity when the search that produced the suspect was biased.

    The odds factor as (1/p_s) x bias correction x prior odds, where the
    correction compares the selection weight mass on alternatives with what
    an unbiased search would have put there.
    """
    _require_kind(spec, RatioKind.BIAS_SIGMA, "biased_search_odds")
    p_s = spec.suspect_freq
    prior_s = spec.suspect_prior_given_I
    prior_alt = spec.alternative_prior_given_I()
    weighted_alt = math.fsum(g.count * g.ratio * g.prior_given_I for g in spec.groups)
    lr = LikelihoodRatio(1.0 / p_s, Convention.CONDITIONAL_ON_I)
    prior_odds = math.inf if prior_alt == 0.0 else prior_s / prior_alt
    denominator = p_s * weighted_alt
    if denominator == 0.0:
        note = (
            "no selection weight on alternative offenders"
            if weighted_alt == 0.0
            else "selection weight on alternative offenders underflows"
        )
        return make_odds_result(math.inf, lr=lr, prior_odds=prior_odds, note=note)
    correction = prior_alt / weighted_alt
    return make_odds_result(
        prior_s / denominator,
        lr=lr,
        prior_odds=prior_odds,
        correction_factor=correction,
    )


def selection_posterior(spec: GroupedDependencySpec) -> float:
    """P(the suspect is the offender | being selected, before the trait match)."""
    _require_kind(spec, RatioKind.BIAS_SIGMA, "selection_posterior")
    weighted_alt = math.fsum(g.count * g.ratio * g.prior_given_I for g in spec.groups)
    return spec.suspect_prior_given_I / (spec.suspect_prior_given_I + weighted_alt)


def _check_transpose(ratio: float, own: float, other: float, index: int) -> None:
    """The transpose of a conditional bearer probability must itself be one."""
    twin = ratio * other / own
    if twin > 1.0 + 1e-12:
        raise InvalidValueError(
            f"group {index}: ratio {ratio!r} with frequency {other!r} implies a "
            f"transposed conditional probability {twin!r} > 1"
        )


def correlated_odds(
    spec: GroupedDependencySpec,
    conditioning: DependenceConditioning = DependenceConditioning.ON_I,
) -> OddsResult:
    """Posterior odds of identity when trait indicators are correlated.

    With conditioning on_I the ratios are read as c = P(suspect bears |
    alternative bears) against offender priors given I; unconditioned, as the
    transpose against plain offender priors.  Both give the same odds when
    derived from one joint law, but the factor decompositions differ.
    """
    _require_kind(spec, RatioKind.CORRELATION_C, "correlated_odds")
    conditioning = DependenceConditioning(conditioning)
    p_s = spec.suspect_freq
    if conditioning is DependenceConditioning.ON_I:
        prior_s = spec.suspect_prior_given_I
        priors = [g.prior_given_I for g in spec.groups]
        for i, g in enumerate(spec.groups):
            if g.freq is not None:
                _check_transpose(g.ratio, p_s, g.freq, i)
    else:
        if spec.suspect_prior_unconditioned is None:
            raise PreconditionError("unconditioned mode needs unconditioned offender priors")
        prior_s = spec.suspect_prior_unconditioned
        priors = [g.prior_unconditioned for g in spec.groups]  # type: ignore[misc]
        for i, g in enumerate(spec.groups):
            if g.freq is not None:
                _check_transpose(g.ratio, g.freq, p_s, i)
    prior_alt = math.fsum(g.count * pr for g, pr in zip(spec.groups, priors))
    weighted_alt = math.fsum(g.count * g.ratio * pr for g, pr in zip(spec.groups, priors))
    lr = LikelihoodRatio(1.0 / p_s, Convention.CONDITIONAL_ON_I)
    prior_odds = math.inf if prior_alt == 0.0 else prior_s / prior_alt
    if weighted_alt == 0.0:
        return make_odds_result(
            math.inf,
            lr=lr,
            prior_odds=prior_odds,
            note="alternative offenders cannot bear the trait",
        )
    correction = p_s * prior_alt / weighted_alt
    return make_odds_result(
        prior_s / weighted_alt,
        lr=lr,
        prior_odds=prior_odds,
        correction_factor=correction,
    )


def bias_correlation_equivalent(
    spec: GroupedDependencySpec,
    group_freqs: tuple[float, ...] | None = None,
) -> GroupedDependencySpec:
    """Translate a biased search into the correlation model with identical odds.

    A selection ratio r for a group maps to the conditional bearer
    probability c = p_s * r; its transpose is p_group * r.  Both must be
    probabilities, otherwise no correlation model reproduces the search and
    the offending group is named.
    """
    _require_kind(spec, RatioKind.BIAS_SIGMA, "bias_correlation_equivalent")
    p_s = spec.suspect_freq
    freqs: list[float] = []
    for i, g in enumerate(spec.groups):
        f = group_freqs[i] if group_freqs is not None else g.freq
        if f is None:
            raise PreconditionError(f"group {i}: a trait frequency is required for the translation")
        freqs.append(float(f))
    new_groups = []
    for i, (g, f) in enumerate(zip(spec.groups, freqs)):
        c = p_s * g.ratio
        transpose = f * g.ratio
        if c > 1.0 or transpose > 1.0:
            raise NoEquivalentError(
                f"group {i}: selection ratio {g.ratio!r} needs conditional bearer "
                f"probabilities {c!r} and {transpose!r}, which exceed 1"
            )
        new_groups.append(replace(g, ratio=c, freq=f))
    return replace(spec, groups=tuple(new_groups), ratio_kind=RatioKind.CORRELATION_C)
