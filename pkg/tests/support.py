"""Shared builders: each closed-form model realized as an explicit probability space.

Every builder returns an oracle scenario whose exact enumeration must agree
with the corresponding closed-form module, usually to machine precision.
The constructions never reuse module formulas — they spell out atoms,
offender priors, and selection protocols directly, so the comparison stays
an independent check.
"""

from __future__ import annotations

import math

from islandodds import oracle
from islandodds.core import PointFrequency, PopulationModel, Subpopulation
from islandodds.database import DatabaseSpec
from islandodds.dependence import DependencyGroup, GroupedDependencySpec, RatioKind
from islandodds.uncertain import FrequencyDensity, beta_from_moments

GRID_N = range(2, 13)
GRID_P = (0.1, 0.3, 0.5, 0.7)


def make_model(sizes, freqs, betas, epsilons=None) -> PopulationModel:
    eps = epsilons if epsilons is not None else (None,) * len(sizes)
    return PopulationModel(
        tuple(
            Subpopulation(size=n, freq=PointFrequency(p), beta=b, epsilon=e)
            for n, p, b, e in zip(sizes, freqs, betas, eps)
        )
    )


def classical_scenario(n_others: int, p: float) -> oracle.ScenarioSpec:
    """Named suspect in a uniform population where everyone bears with chance p."""
    m = n_others + 1
    return oracle.ScenarioSpec(
        variant="classical",
        atoms=((1.0, (p,) * m),),
        criminal_prior=(1.0 / m,) * m,
        suspect=oracle.FixedSuspect(0),
    )


def yellin_scenario(n_others: int, p: float) -> oracle.ScenarioSpec:
    """Suspect found by examining inhabitants in uniform order until one bears."""
    m = n_others + 1
    return oracle.ScenarioSpec(
        variant="yellin",
        atoms=((1.0, (p,) * m),),
        criminal_prior=(1.0 / m,) * m,
        suspect=oracle.SequentialSearchSuspect(),
        conditioning=("I",),
    )


def hetero_layout(sizes, freqs, betas, s_group=0):
    """Per-individual vectors for a grouped population; suspect heads group s."""
    probs: list[float] = []
    prior: list[float] = []
    labels: list[int] = []
    for g, (n, p, b) in enumerate(zip(sizes, freqs, betas)):
        probs.extend([p] * n)
        prior.extend([b / n] * n)
        labels.extend([g] * n)
    suspect_index = sum(sizes[:s_group])
    return tuple(probs), tuple(prior), tuple(labels), suspect_index


def hetero_scenario(sizes, freqs, betas, s_group=0):
    """Known-group suspect in a heterogeneous population; exact match expected."""
    probs, prior, labels, s = hetero_layout(sizes, freqs, betas, s_group)
    spec = oracle.ScenarioSpec(
        variant="hetero",
        atoms=((1.0, probs),),
        criminal_prior=prior,
        suspect=oracle.FixedSuspect(s),
        groups=labels,
    )
    return spec, make_model(sizes, freqs, betas)


def hetero_marginal_scenario(sizes, freqs, betas):
    """Suspect drawn uniformly from the whole population (closed form is approximate)."""
    probs, prior, labels, _ = hetero_layout(sizes, freqs, betas)
    spec = oracle.ScenarioSpec(
        variant="hetero",
        atoms=((1.0, probs),),
        criminal_prior=prior,
        suspect=oracle.UniformSuspect(),
        groups=labels,
    )
    return spec, make_model(sizes, freqs, betas)


def correlated_spread(p: float, spread: float = 0.5) -> float:
    """Largest usable two-point spread keeping p*(1+t) a probability."""
    return min(spread, 0.9 * (1.0 - p) / p)


def correlated_scenario(n_corr: int, n_indep: int, p: float, spread: float = 0.5):
    """Suspect plus a correlated block plus independent bystanders.

    A two-atom exchangeable mixture moves the suspect and the correlated
    block together between p(1+t) and p(1-t); bystanders stay at p.  Any
    pair inside the moving block then has conditional bearer probability
    c = p(1+t^2), while block-to-bystander pairs stay independent.
    """
    t = correlated_spread(p, spread)
    hi, lo = p * (1.0 + t), p * (1.0 - t)
    m = 1 + n_corr + n_indep
    moving = 1 + n_corr
    atoms = (
        (0.5, (hi,) * moving + (p,) * n_indep),
        (0.5, (lo,) * moving + (p,) * n_indep),
    )
    # a non-uniform offender prior; every individual bears with mean p, so
    # priors given I coincide with these unconditional ones
    w_s = 2.0 / (m + 1)
    w_alt = (1.0 - w_s) / (m - 1)
    prior = (w_s,) + (w_alt,) * (m - 1)
    spec = oracle.ScenarioSpec(
        variant="correlated",
        atoms=atoms,
        criminal_prior=prior,
        suspect=oracle.FixedSuspect(0),
    )
    c_block = p * (1.0 + t * t)
    groups = [DependencyGroup(count=n_corr, prior_given_I=w_alt, ratio=c_block, freq=p)]
    if n_indep:
        groups.append(DependencyGroup(count=n_indep, prior_given_I=w_alt, ratio=p, freq=p))
    module_spec = GroupedDependencySpec(
        groups=tuple(groups),
        suspect_freq=p,
        ratio_kind=RatioKind.CORRELATION_C,
        suspect_prior_given_I=w_s,
    )
    return spec, module_spec


def biased_scenario(n_others: int, p: float, base: float = 0.2):
    """Search whose chance of landing on the named suspect depends on the offender.

    Row y of the selection matrix puts mass ratio_y * base on the suspect
    (slot 0) and spreads the rest evenly; all rows sum to one, so the
    module's relative weights are read off the first column directly.
    """
    m = n_others + 1
    cycle = (2.0, 0.5, 1.0, 3.0)
    ratios = tuple(cycle[(y - 1) % len(cycle)] for y in range(1, m))
    rows = [(base,) + ((1.0 - base) / n_others,) * n_others]
    for r in ratios:
        w0 = r * base
        rows.append((w0,) + ((1.0 - w0) / n_others,) * n_others)
    spec = oracle.ScenarioSpec(
        variant="biased",
        atoms=((1.0, (p,) * m),),
        criminal_prior=(1.0 / m,) * m,
        suspect=oracle.BiasedSearchSuspect(tuple(rows)),
        conditioning=("I", "E", "S_eq:0"),
    )
    module_spec = GroupedDependencySpec(
        groups=tuple(
            DependencyGroup(count=1, prior_given_I=1.0 / m, ratio=r, freq=p) for r in ratios
        ),
        suspect_freq=p,
        ratio_kind=RatioKind.BIAS_SIGMA,
        suspect_prior_given_I=1.0 / m,
    )
    return spec, module_spec


def two_point_density(lo: float, hi: float, weight_lo: float) -> FrequencyDensity:
    """Beta density sharing the first two moments of a two-point frequency mixture."""
    mean = weight_lo * lo + (1.0 - weight_lo) * hi
    second = weight_lo * lo * lo + (1.0 - weight_lo) * hi * hi
    sd = math.sqrt(second - mean * mean)
    return FrequencyDensity(beta_from_moments(mean, sd))


def uncertain_scenario(n_others: int, p: float, spread: float = 0.5, weight_lo: float = 0.6):
    """Homogeneous population whose shared frequency is a two-point mixture."""
    t = correlated_spread(p, spread)
    lo, hi = p * (1.0 - t), p * (1.0 + t)
    m = n_others + 1
    atoms = ((weight_lo, (lo,) * m), (1.0 - weight_lo, (hi,) * m))
    spec = oracle.ScenarioSpec(
        variant="uncertain",
        atoms=atoms,
        criminal_prior=(1.0 / m,) * m,
        suspect=oracle.FixedSuspect(0),
    )
    return spec, two_point_density(lo, hi, weight_lo)


def uncertain_subpop_scenario(sizes, freqs, betas, spread=0.5, weight_lo=0.6):
    """Two-group population where the suspect group's frequency is uncertain.

    Only group 0 (the suspect's) moves between its two atom values; other
    groups keep fixed frequencies, so cross-group indicators stay independent.
    """
    p0 = freqs[0]
    t = correlated_spread(p0, spread)
    lo, hi = p0 * (1.0 - t), p0 * (1.0 + t)
    rest = tuple(f for n, f in zip(sizes[1:], freqs[1:]) for _ in range(n))
    atoms = (
        (weight_lo, (lo,) * sizes[0] + rest),
        (1.0 - weight_lo, (hi,) * sizes[0] + rest),
    )
    _, prior, labels, s = hetero_layout(sizes, freqs, betas, 0)
    spec = oracle.ScenarioSpec(
        variant="uncertain",
        atoms=atoms,
        criminal_prior=prior,
        suspect=oracle.FixedSuspect(s),
        groups=labels,
    )
    subs = [Subpopulation(size=sizes[0], freq=two_point_density(lo, hi, weight_lo), beta=betas[0])]
    for n, p, b in zip(sizes[1:], freqs[1:], betas[1:]):
        subs.append(Subpopulation(size=n, freq=PointFrequency(p), beta=b))
    return spec, PopulationModel(tuple(subs))


def database_scenario(member_alphas, outside_total: float, pop_total: int, p: float, k: int):
    """Database whose first k members matched; offender mass is explicit per member."""
    n = len(member_alphas)
    outsiders = pop_total - n
    prior = tuple(member_alphas) + (outside_total / outsiders,) * outsiders
    spec = oracle.ScenarioSpec(
        variant="database",
        atoms=((1.0, (p,) * pop_total),),
        criminal_prior=prior,
        suspect=oracle.DatabaseSuspect(),
        database=tuple(range(n)),
        event="C_in_db",
        conditioning=("I", f"DB_first:{k}"),
    )
    module_spec = DatabaseSpec(
        n=n, k=k, member_alphas=tuple(member_alphas), outside_alpha_total=outside_total, p=p
    )
    return spec, module_spec


def effectiveness_scenario(n_db: int, pop_total: int, p: float, q: float) -> oracle.ScenarioSpec:
    """Database search judged by its unique-match outcome; inclusion chance q."""
    outsiders = pop_total - n_db
    prior = (q / n_db,) * n_db + ((1.0 - q) / outsiders,) * outsiders
    return oracle.ScenarioSpec(
        variant="effectiveness",
        atoms=((1.0, (p,) * pop_total),),
        criminal_prior=prior,
        suspect=oracle.DatabaseSuspect(),
        database=tuple(range(n_db)),
        event="G",
        conditioning=("I", "DB_unique"),
    )


def unique_match_given_inside(n: int, p: float, q: float) -> float:
    """P(exactly one member matches | offender bears), from first principles."""
    return q * (1.0 - p) ** (n - 1) + (1.0 - q) * n * p * (1.0 - p) ** (n - 1)


def grid_sizes(n_others: int) -> tuple[int, int]:
    """Split N+1 inhabitants into a suspect-bearing group and a remainder group."""
    first = n_others // 2 + 1
    return first, n_others + 1 - first


def mc_gate_scenarios():
    """The three sampling-gate scenarios with their closed-form targets."""
    from islandodds.classical import classical_posterior
    from islandodds.database import database_effectiveness
    from islandodds.subpop import hetero_posterior_odds

    classical = classical_scenario(100, 0.05)

    sizes, freqs, betas = (40, 10), (0.1, 0.3), (0.5, 0.5)
    hetero, model = hetero_scenario(sizes, freqs, betas, s_group=1)

    q = 5 / 20
    database = effectiveness_scenario(5, 20, 0.2, q)
    odds, _ = database_effectiveness(5, 0.2, q)

    return (
        ("classical", classical, classical_posterior(100, 0.05).probability),
        ("hetero", hetero, hetero_posterior_odds(model, 1).probability),
        ("database", database, odds.probability),
    )
