"""Posterior odds of identity for closed-population trait-match evidence.

The package answers one question under progressively weaker assumptions:
given that a person of interest shares a rare trait with the offender, how
probable is it that they are the same person?  Modules cover the
homogeneous population, biased searches and trait correlations, known
subpopulation structure, uncertain trait frequencies, unknown group
membership, and database searches.  Every closed form is checked against
enumeration and Monte-Carlo oracles that work directly from the generative
definitions.
"""

from .core import (
    CapacityError,
    Convention,
    ConventionError,
    DomainError,
    ImpossibleConditioningError,
    InfeasibleConditioningError,
    InvalidValueError,
    IslandOddsError,
    LikelihoodRatio,
    NoEquivalentError,
    OddsResult,
    PointFrequency,
    PopulationModel,
    PreconditionError,
    StageError,
    Subpopulation,
    integrate,
    odds_from_probability,
    probability_from_odds,
)
from .classical import (
    BearerDistribution,
    bearers_given_I,
    bearers_unconditioned,
    classical_posterior,
    yellin_posterior,
)
from .dependence import (
    DependenceConditioning,
    DependencyGroup,
    GroupedDependencySpec,
    RatioKind,
    bias_correlation_equivalent,
    biased_search_odds,
    correlated_odds,
    selection_posterior,
)
from .subpop import (
    alpha_from_beta,
    hetero_expected_bearers,
    hetero_lr,
    hetero_posterior_marginal,
    hetero_posterior_odds,
)
from .uncertain import (
    BetaParams,
    Direction,
    FrequencyDensity,
    FrequencyMoments,
    Stage,
    TabulatedGrid,
    beta_from_moments,
    frequency_moments,
    naive_homogeneous_posterior,
    suspect_subpop_posterior,
    transform_density,
    uncertain_posterior,
    uncertain_subpop_lr,
    uncertain_subpop_posterior,
    unknown_subpop_posterior,
    within_subpop_posterior,
)
from .database import (
    DatabaseSpec,
    GrowthModel,
    GrowthPoint,
    Inclusion,
    UniformAlphas,
    database_effectiveness,
    database_focused,
    enlargement_threshold,
    growth_curve,
    individual_focused,
    unique_match_probability,
)
from .oracle import (
    OracleEstimate,
    ScenarioSpec,
    exact_posterior,
    mc_posterior,
)

__version__ = "0.1.0"
