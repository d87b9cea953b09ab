"""Registry of published example values, recomputed and checked on demand.

Each target re-runs a set of published figures through the library and
reports pass/fail per value at the precision the source printed.  The
``table1`` and ``table2`` targets rebuild the two guilt-probability tables
row by row; ``examples`` sweeps every quoted single value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import classical, database, dependence, subpop, uncertain
from .core import (
    Convention,
    InvalidValueError,
    PointFrequency,
    PopulationModel,
    Subpopulation,
    probability_from_odds,
)
from .dependence import DependencyGroup, GroupedDependencySpec, RatioKind
from .database import DatabaseSpec, GrowthModel, Inclusion, UniformAlphas
from .uncertain import FrequencyDensity, beta_from_moments

__all__ = ["CheckResult", "ReproduceReport", "available_targets", "run_target"]

TWO_DECIMALS = 0.005 + 1e-7
THREE_DECIMALS = 0.0005 + 1e-7
FOUR_DECIMALS = 0.00005 + 1e-7


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    label: str
    expected: float
    computed: float
    tolerance: float
    mode: str  # "abs" or "rel"
    passed: bool


@dataclass(frozen=True)
class ReproduceReport:
    target: str
    checks: tuple[CheckResult, ...]
    table_columns: tuple[str, ...] = ()
    table_rows: tuple[tuple[object, ...], ...] = ()

    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _check(check_id: str, label: str, expected: float, computed: float,
           tolerance: float, mode: str = "abs") -> CheckResult:
    expected = float(expected)
    computed = float(computed)
    if mode == "rel":
        passed = abs(computed - expected) <= tolerance * abs(expected)
    elif mode == "abs":
        passed = abs(computed - expected) <= tolerance
    else:
        raise InvalidValueError(f"unknown tolerance mode {mode!r}")
    return CheckResult(check_id, label, expected, computed, float(tolerance), mode, bool(passed))


# The two published tables share the subpopulation sizes and sd = p/2.
_TABLE_SIZES = (2 * 10**7, 10**6, 10**5)
_TABLE1_FREQS = (1e-8, 1e-7, 1e-6)
_TABLE2_FREQS = (1e-8, 1e-9, 1e-10)
# a uniform prior over individuals weights each group by its head count
_UNIFORM3 = tuple(float(n) for n in _TABLE_SIZES)

_TABLE1_ROWS: tuple[tuple[tuple[float, ...], tuple[float, ...], float], ...] = (
    ((0.9, 0.05, 0.05), (0.999, 0.0005, 0.0005), 0.50),
    ((0.9, 0.05, 0.05), _UNIFORM3, 0.70),
    ((0.9, 0.05, 0.05), (0.99, 0.005, 0.005), 0.74),
    ((0.9, 0.05, 0.05), (0.9, 0.05, 0.05), 0.84),
)

_TABLE2_ROWS: tuple[tuple[tuple[float, ...], tuple[float, ...], float], ...] = (
    (_UNIFORM3, _UNIFORM3, 0.80),
    ((0.9, 0.05, 0.01), (0.9, 0.05, 0.05), 0.80),
    ((0.2, 0.6, 0.2), (0.2, 0.6, 0.2), 0.98),
    ((0.1, 0.3, 0.6), (0.3, 0.3, 0.4), 0.97),
    ((0.9, 0.09, 0.01), (0.01, 0.01, 0.98), 0.88),
    ((0.99, 0.009, 0.001), (0.001, 0.001, 0.998), 0.57),
)

_NAIVE_PRINTED = 0.79


def _half_sd_density(p: float) -> FrequencyDensity:
    return FrequencyDensity(beta_from_moments(p, p / 2.0))


def _table_model(freqs: tuple[float, ...], eps: tuple[float, ...],
                 betas: tuple[float, ...]) -> PopulationModel:
    e = np.asarray(eps, dtype=float)
    e = e / e.sum()  # printed weights are scale free
    b = np.asarray(betas, dtype=float)
    b = b / b.sum()
    subs = tuple(
        Subpopulation(size=n, freq=_half_sd_density(p), beta=float(bi), epsilon=float(ei))
        for n, p, bi, ei in zip(_TABLE_SIZES, freqs, b, e)
    )
    return PopulationModel(subs)


def _swapped(freqs: tuple[float, ...], eps: tuple[float, ...],
             betas: tuple[float, ...]) -> PopulationModel:
    return _table_model(freqs, betas, eps)


def _fmt(x: float) -> float:
    return float(x)


def _weights_label(weights: tuple[float, ...]) -> str:
    if weights == _UNIFORM3:
        return "uniform"
    return "(" + ", ".join(f"{v:g}" for v in weights) + ")"


def _table_target(target: str, freqs: tuple[float, ...],
                  rows: tuple[tuple[tuple[float, ...], tuple[float, ...], float], ...],
                  extra: Callable[[list[CheckResult]], None] | None = None) -> ReproduceReport:
    checks: list[CheckResult] = []
    table_rows: list[tuple[object, ...]] = []
    naive_value: float | None = None
    for i, (eps, betas, printed) in enumerate(rows, start=1):
        model = _table_model(freqs, eps, betas)
        computed = uncertain.unknown_subpop_posterior(model)
        if naive_value is None:
            naive_value = uncertain.naive_homogeneous_posterior(model)
        check = _check(f"{target}-row{i}", f"guilt probability, row {i}",
                       printed, computed, TWO_DECIMALS)
        checks.append(check)
        table_rows.append((
            i, _weights_label(eps), _weights_label(betas),
            _fmt(computed), printed, _fmt(naive_value), _NAIVE_PRINTED, check.passed,
        ))
    assert naive_value is not None
    checks.append(_check(f"{target}-naive", "homogeneous comparison column",
                         _NAIVE_PRINTED, naive_value, TWO_DECIMALS))
    if extra is not None:
        extra(checks)
    return ReproduceReport(
        target=target,
        checks=tuple(checks),
        table_columns=("row", "epsilon", "beta", "P", "P_printed", "P_hom", "P_hom_printed", "pass"),
        table_rows=tuple(table_rows),
    )


def _target_table1(resolution: int) -> ReproduceReport:
    def extra(checks: list[CheckResult]) -> None:
        model = _table_model(_TABLE1_FREQS, *_TABLE1_ROWS[0][:2])
        member = uncertain.suspect_subpop_posterior(model)
        checks.append(_check("table1-member-x1", "suspect in group 1 given the match",
                             0.40, float(member[0]), TWO_DECIMALS))
        checks.append(_check("table1-member-x3", "suspect in group 3 given the match",
                             0.56, float(member[2]), TWO_DECIMALS))

    return _table_target("table1", _TABLE1_FREQS, _TABLE1_ROWS, extra)


def _target_table2(resolution: int) -> ReproduceReport:
    def extra(checks: list[CheckResult]) -> None:
        # swapping the suspect and offender group priors must not move P
        worst = 0.0
        for eps, betas, _ in _TABLE1_ROWS:
            base = uncertain.unknown_subpop_posterior(_table_model(_TABLE1_FREQS, eps, betas))
            swapped = uncertain.unknown_subpop_posterior(_swapped(_TABLE1_FREQS, eps, betas))
            worst = max(worst, abs(swapped - base) / base)
        checks.append(_check("table2-exchange", "epsilon/beta exchange symmetry (max rel diff)",
                             0.0, worst, 1e-12))

    return _table_target("table2", _TABLE2_FREQS, _TABLE2_ROWS, extra)


def _hetero_model() -> PopulationModel:
    return PopulationModel((
        Subpopulation(size=10**7, freq=PointFrequency(1e-9), beta=0.5),
        Subpopulation(size=10**5, freq=PointFrequency(1e-8), beta=0.5),
    ))


def _correlation_spec() -> GroupedDependencySpec:
    return GroupedDependencySpec(
        groups=(
            DependencyGroup(count=3, prior_given_I=0.1, ratio=1e-3, freq=1e-7),
            DependencyGroup(count=10**6, prior_given_I=0.3 / 10**6, ratio=1e-7, freq=1e-7),
        ),
        suspect_freq=1e-7,
        ratio_kind=RatioKind.CORRELATION_C,
        suspect_prior_given_I=0.4,
    )


def _bias_spec() -> GroupedDependencySpec:
    return GroupedDependencySpec(
        groups=(
            DependencyGroup(count=3, prior_given_I=0.1, ratio=1e4, freq=1e-7),
            DependencyGroup(count=10**6, prior_given_I=0.3 / 10**6, ratio=1.0, freq=1e-7),
        ),
        suspect_freq=1e-7,
        ratio_kind=RatioKind.BIAS_SIGMA,
        suspect_prior_given_I=0.4,
    )


def _target_examples(resolution: int) -> ReproduceReport:
    checks: list[CheckResult] = []
    add = checks.append

    add(_check("ex-odds-to-prob-9", "odds 9.09 as a probability",
               0.901, probability_from_odds(9.09), THREE_DECIMALS))
    add(_check("ex-odds-to-prob-25", "odds 25 as a probability",
               0.9615, probability_from_odds(25.0), FOUR_DECIMALS))

    r = classical.classical_posterior(10**7, 1e-8)
    add(_check("ex-classical", "named suspect, N=1e7, p=1e-8",
               0.91, r.probability, TWO_DECIMALS))
    add(_check("ex-bearer-mean", "expected bearer count given the trace",
               1.1, classical.bearers_given_I(10**7, 1e-8).mean(), 1e-9))

    density = FrequencyDensity(beta_from_moments(1e-8, 1e-8))
    add(_check("ex-uncertain", "same suspect with frequency sd = p",
               0.83, uncertain.uncertain_posterior(10**7, density).probability, TWO_DECIMALS))
    moments = uncertain.frequency_moments(density, 10**7)
    add(_check("ex-p-prime", "post-trace mean doubles when sd = p",
               2e-8, moments.p_prime, 1e-9, mode="rel"))

    hetero_model = _hetero_model()
    alphas = subpop.alpha_from_beta(hetero_model)
    add(_check("ex-alpha-1", "offender in group 1 given the trace",
               0.09, float(alphas[0]), TWO_DECIMALS))
    add(_check("ex-alpha-2", "offender in group 2 given the trace",
               0.91, float(alphas[1]), TWO_DECIMALS))
    odds1 = subpop.hetero_posterior_odds(hetero_model, 0)
    odds2 = subpop.hetero_posterior_odds(hetero_model, 1)
    add(_check("ex-hetero-odds-x1", "posterior odds, suspect from group 1",
               9.0, odds1.odds, 0.02, mode="rel"))
    add(_check("ex-hetero-prob-x1", "posterior probability, suspect from group 1",
               0.9, odds1.probability, 0.01))
    add(_check("ex-hetero-odds-x2", "posterior odds, suspect from group 2",
               910.0, odds2.odds, 0.02, mode="rel"))
    add(_check("ex-hetero-lr-largen", "large-group likelihood ratio",
               1.8e8, subpop.hetero_lr(hetero_model, 0, Convention.LARGE_N).value,
               0.02, mode="rel"))
    add(_check("ex-hetero-lr-cond", "inverse match probability for group 1",
               1e9, subpop.hetero_lr(hetero_model, 0, Convention.CONDITIONAL_ON_I).value,
               1e-9, mode="rel"))

    corr = dependence.correlated_odds(_correlation_spec())
    assert corr.correction_factor is not None and corr.lr is not None
    add(_check("ex-corr-correction", "relatedness correction factor",
               1.0 / 5000.0, corr.correction_factor, 0.02, mode="rel"))
    add(_check("ex-corr-effective-lr", "effective likelihood ratio after correction",
               2000.0, corr.lr.value * corr.correction_factor, 0.01, mode="rel"))
    add(_check("ex-corr-posterior", "posterior probability with related alternatives",
               1.0 - 3.0 / 4000.0, corr.probability, 1e-4))

    bias = _bias_spec()
    add(_check("ex-bias-selection", "chance the search stopped at the offender",
               1.0 / 7500.0, dependence.selection_posterior(bias), 0.01, mode="rel"))
    bias_result = dependence.biased_search_odds(bias)
    add(_check("ex-bias-posterior", "posterior probability under the biased search",
               1.0 - 3.0 / 4000.0, bias_result.probability, 1e-4))
    converted = dependence.bias_correlation_equivalent(bias)
    add(_check("ex-convert-ratio", "search bias mapped to a bearer probability",
               1e-3, converted.groups[0].ratio, 1e-9, mode="rel"))
    add(_check("ex-convert-agree", "converted model reproduces the same odds",
               bias_result.odds, dependence.correlated_odds(converted).odds,
               1e-12, mode="rel"))

    db = DatabaseSpec(n=10**5, k=1, member_alphas=UniformAlphas(0.2),
                      outside_alpha_total=0.8, p=1e-7)
    unique = database.individual_focused(db, 1)
    add(_check("ex-db-odds", "odds the unique database match is the offender",
               25.0, unique.odds, 1e-9, mode="rel"))
    add(_check("ex-db-prob", "probability the unique match is the offender",
               0.96, unique.probability, TWO_DECIMALS))
    add(_check("ex-db-punique-small", "chance of exactly one match, n=1e5",
               0.206, database.unique_match_probability(10**5, 1e-7, 0.2), THREE_DECIMALS))
    add(_check("ex-db-punique-large", "chance of exactly one match, n=2e6",
               0.491, database.unique_match_probability(2 * 10**6, 1e-7, 0.5), THREE_DECIMALS))
    eff_large, _ = database.database_effectiveness(2 * 10**6, 1e-7, 0.5)
    add(_check("ex-db-eff-odds", "effectiveness odds for the enlarged database",
               5.0, eff_large.odds, 1e-9, mode="rel"))

    sqrt_model = GrowthModel(N=2 * 10**7, p=1e-8, inclusion=Inclusion.SQRT_WEIGHTED)
    expected_by_n = {5 * 10**4: 105.0, 2 * 10**5: 55.0, 5 * 10**6: 20.0, 10**7: 24.0}
    for point in database.growth_curve(sqrt_model, sorted(expected_by_n)):
        add(_check(f"ex-growth-{point.n}", f"sqrt-weighted growth odds at n={point.n}",
                   expected_by_n[point.n], point.odds, 0.02, mode="rel"))
    sample_model = GrowthModel(N=2 * 10**7, p=1e-8, inclusion=Inclusion.RANDOM_SAMPLE)
    sample_point = database.growth_curve(sample_model, [5 * 10**6])[0]
    add(_check("ex-growth-sample", "random-sample growth odds match 1/(p(N-n))",
               1.0 / (1e-8 * (2 * 10**7 - 5 * 10**6)), sample_point.odds, 1e-9, mode="rel"))

    row1 = _table_model(_TABLE1_FREQS, *_TABLE1_ROWS[0][:2])
    row4 = _table_model(_TABLE1_FREQS, *_TABLE1_ROWS[3][:2])
    add(_check("ex-post-x3-row1", "guilt given the suspect is from group 3, row 1",
               0.32, uncertain.uncertain_subpop_posterior(row1, 2), TWO_DECIMALS))
    add(_check("ex-within-x3-row4", "guilt within group 3, row 4 (the published 0.89)",
               0.89, uncertain.within_subpop_posterior(row4, 2), TWO_DECIMALS))
    member = uncertain.suspect_subpop_posterior(row1)
    add(_check("ex-member-x1", "suspect in group 1 given the match, row 1",
               0.40, float(member[0]), TWO_DECIMALS))
    add(_check("ex-member-x3", "suspect in group 3 given the match, row 1",
               0.56, float(member[2]), TWO_DECIMALS))
    add(_check("ex-t1-row1", "guilt probability, table 1 row 1",
               0.50, uncertain.unknown_subpop_posterior(row1), TWO_DECIMALS))
    add(_check("ex-t1-row4", "guilt probability, table 1 row 4",
               0.84, uncertain.unknown_subpop_posterior(row4), TWO_DECIMALS))
    t2row3 = _table_model(_TABLE2_FREQS, *_TABLE2_ROWS[2][:2])
    add(_check("ex-t2-row3", "guilt probability, table 2 row 3",
               0.98, uncertain.unknown_subpop_posterior(t2row3), TWO_DECIMALS))
    add(_check("ex-naive", "homogeneous comparison value",
               0.79, uncertain.naive_homogeneous_posterior(row1), TWO_DECIMALS))

    # limiting forms of the membership posterior, checked at concrete points
    flat = PopulationModel((
        Subpopulation(size=10**9, freq=PointFrequency(1e-6), beta=0.5, epsilon=0.3),
        Subpopulation(size=10**9, freq=PointFrequency(2e-6), beta=0.5, epsilon=0.7),
    ))
    add(_check("ex-member-limit-freq", "membership limit: huge groups, sd 0",
               0.3e-6 / (0.3e-6 + 1.4e-6), float(uncertain.suspect_subpop_posterior(flat)[0]),
               1e-3, mode="rel"))
    n1, n2 = 4000, 6000
    sparse = PopulationModel((
        Subpopulation(size=n1, freq=PointFrequency(1e-9), beta=n1 / (n1 + n2), epsilon=n1 / (n1 + n2)),
        Subpopulation(size=n2, freq=PointFrequency(3e-9), beta=n2 / (n1 + n2), epsilon=n2 / (n1 + n2)),
    ))
    add(_check("ex-member-limit-bearers", "membership limit: rare trait, census priors",
               n1 * 1e-9 / (n1 * 1e-9 + n2 * 3e-9),
               float(uncertain.suspect_subpop_posterior(sparse)[0]), 1e-3, mode="rel"))

    return ReproduceReport(target="examples", checks=tuple(checks))


_TARGETS: dict[str, Callable[[int], ReproduceReport]] = {
    "table1": _target_table1,
    "table2": _target_table2,
    "examples": _target_examples,
}


def available_targets() -> tuple[str, ...]:
    return tuple(sorted(_TARGETS))


def run_target(target: str, resolution: int = uncertain.DEFAULT_RESOLUTION) -> ReproduceReport:
    """Recompute one registry target; the registry values are closed form,
    so ``resolution`` only matters if a tabulated density ever enters."""
    if target not in _TARGETS:
        raise InvalidValueError(
            f"unknown reproduction target {target!r}; choose from {', '.join(available_targets())}"
        )
    if int(resolution) != resolution or resolution < 3 or resolution % 2 == 0:
        raise InvalidValueError(f"resolution must be an odd integer >= 3, got {resolution!r}")
    return _TARGETS[target](int(resolution))
