"""Heterogeneous population with known per-group trait frequencies.

The population splits into groups of sizes N_i with point frequencies p_i.
The offender lands in group i with prior beta_i and is uniform within the
group.  Operations cover the beta -> alpha update (conditioning on the
offender bearing the trait), the posterior odds for a suspect of known
group, the competing likelihood-ratio conventions, an expected-bearer
identity, and the posterior marginalized over a uniformly chosen suspect.
"""

from __future__ import annotations

import math

import numpy as np

from .core import (
    Convention,
    ConventionError,
    LikelihoodRatio,
    OddsResult,
    PointFrequency,
    PopulationModel,
    PreconditionError,
    make_odds_result,
)

__all__ = [
    "alpha_from_beta",
    "hetero_posterior_odds",
    "hetero_lr",
    "hetero_posterior_marginal",
    "hetero_expected_bearers",
]

_BETA_SIZE_TOL = 1e-12


def _require_point_freqs(model: PopulationModel) -> None:
    for i, sub in enumerate(model.subpops):
        if not isinstance(sub.freq, PointFrequency):
            raise PreconditionError(
                f"subpopulation {i} carries an uncertain frequency; "
                "use the uncertainty-aware operations instead"
            )


def alpha_from_beta(model: PopulationModel) -> np.ndarray:
    """Offender-group probabilities after learning the offender bears the trait.

    alpha_i is beta_i reweighted by the group frequency p_i and renormalized.
    """
    _require_point_freqs(model)
    weighted = model.means() * model.betas()
    return weighted / weighted.sum()


def hetero_posterior_odds(model: PopulationModel, s_index: int) -> OddsResult:
    """Posterior odds of identity for a matching suspect from group s_index."""
    _require_point_freqs(model)
    s = model.check_index(s_index)
    p = model.means()
    sizes = model.sizes()
    betas = model.betas()
    p_s = p[s]
    denominator = sizes[s] * float(p @ betas) / betas[s] - p_s
    alphas = alpha_from_beta(model)
    prior_odds = alphas[s] / (sizes[s] - alphas[s])
    lr = LikelihoodRatio(1.0 / p_s, Convention.CONDITIONAL_ON_I)
    if denominator <= 0.0:
        return make_odds_result(
            math.inf, lr=lr, prior_odds=prior_odds, note="no alternative bearer mass"
        )
    return make_odds_result(1.0 / denominator, lr=lr, prior_odds=prior_odds)


def hetero_lr(model: PopulationModel, s_index: int, convention: Convention) -> LikelihoodRatio:
    """The likelihood ratio for a suspect from group s_index under a named convention.

    conditional_on_I weighs only the suspect's match; joint_I_and_E treats
    trace and match as one compound event; large_N is the joint value's
    limit for large groups; default_population contrasts a lone suspect
    against a single reference group and uses that group's frequency.
    """
    _require_point_freqs(model)
    s = model.check_index(s_index)
    convention = Convention(convention)
    p = model.means()
    sizes = model.sizes()
    betas = model.betas()
    if convention is Convention.CONDITIONAL_ON_I:
        return LikelihoodRatio(1.0 / p[s], convention)
    if convention is Convention.JOINT_I_AND_E:
        value = (sizes[s] - betas[s]) / (sizes[s] * float(p @ betas) - p[s] * betas[s])
        return LikelihoodRatio(value, convention)
    if convention is Convention.LARGE_N:
        return LikelihoodRatio(1.0 / float(p @ betas), convention)
    if convention is Convention.DEFAULT_POPULATION:
        if len(model) != 2 or sizes[s] != 1:
            raise ConventionError(
                "default_population needs exactly two groups with a lone suspect group"
            )
        return LikelihoodRatio(1.0 / p[1 - s], convention)
    raise ConventionError(f"convention {convention.value} does not apply to point-frequency models")


def hetero_posterior_marginal(model: PopulationModel) -> float:
    """Posterior probability of identity for a suspect drawn uniformly from the population.

    A weighted average of the group-conditioned posteriors: group i enters
    with weight N_i p_i, the expected number of bearers it contributes.
    """
    _require_point_freqs(model)
    p = model.means()
    sizes = model.sizes()
    alphas = alpha_from_beta(model)
    conditioned = alphas / (p * (sizes - alphas) + alphas)
    weights = sizes * p
    return float(weights @ conditioned / weights.sum())


def hetero_expected_bearers(model: PopulationModel, s_index: int) -> float:
    """Expected bearer count given the offender bears and shares the suspect's group.

    Valid only when the offender prior is proportional to group sizes; then
    the posterior probability of identity is the inverse of this count.
    """
    _require_point_freqs(model)
    s = model.check_index(s_index)
    sizes = model.sizes()
    betas = model.betas()
    total = sizes.sum()
    if np.max(np.abs(betas - sizes / total)) > _BETA_SIZE_TOL:
        raise PreconditionError(
            "the expected-bearer identity requires offender priors proportional to group sizes"
        )
    p = model.means()
    return float(sizes @ p) + 1.0 - p[s]
