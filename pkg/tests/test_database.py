import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from islandodds import oracle
from islandodds.core import Convention, DomainError, InvalidValueError
from islandodds.database import (
    DatabaseSpec,
    GrowthModel,
    Inclusion,
    UniformAlphas,
    database_effectiveness,
    database_focused,
    enlargement_threshold,
    growth_curve,
    individual_focused,
    unique_match_probability,
)

from support import database_scenario, effectiveness_scenario, unique_match_given_inside


class TestSpecValidation:
    def test_alpha_mass_must_sum_to_one(self):
        with pytest.raises(InvalidValueError):
            DatabaseSpec(n=2, k=1, member_alphas=(0.2, 0.2), outside_alpha_total=0.5, p=0.1)

    def test_match_count_range(self):
        with pytest.raises(InvalidValueError):
            DatabaseSpec(n=2, k=3, member_alphas=(0.2, 0.2), outside_alpha_total=0.6, p=0.1)

    def test_uniform_alphas_share_the_member_mass(self):
        spec = DatabaseSpec(
            n=4, k=2, member_alphas=UniformAlphas(0.6), outside_alpha_total=0.4, p=0.1
        )
        assert spec.alphas().tolist() == pytest.approx([0.15] * 4)
        assert spec.member_total() == pytest.approx(0.6)

    def test_member_alpha_length_must_match(self):
        with pytest.raises(InvalidValueError):
            DatabaseSpec(n=3, k=1, member_alphas=(0.5, 0.5), outside_alpha_total=0.0, p=0.1)


class TestDatabaseFocused:
    def test_worked_example(self):
        spec = DatabaseSpec(
            n=3, k=2, member_alphas=(0.1, 0.2, 0.1), outside_alpha_total=0.6, p=0.5
        )
        res = database_focused(spec)
        assert res.odds == pytest.approx(0.3 / (0.5 * 0.6), abs=1e-12)
        assert res.lr.value == pytest.approx(0.3 / (0.5 * 0.4), rel=1e-12)
        assert res.prior_odds == pytest.approx(0.4 / 0.6, rel=1e-12)

    def test_no_match_gives_zero_odds_with_note(self):
        spec = DatabaseSpec(
            n=3, k=0, member_alphas=(0.1, 0.2, 0.1), outside_alpha_total=0.6, p=0.5
        )
        res = database_focused(spec)
        assert res.odds == 0.0
        assert res.note == "no member matched"

    def test_full_coverage_gives_certainty(self):
        spec = DatabaseSpec(n=2, k=1, member_alphas=(0.4, 0.6), outside_alpha_total=0.0, p=0.5)
        res = database_focused(spec)
        assert math.isinf(res.odds)

    def test_matches_enumeration(self):
        scenario, spec = database_scenario((0.1, 0.15, 0.05, 0.1), 0.6, 9, 0.3, k=2)
        expected = oracle.exact_posterior(scenario).value
        assert database_focused(spec).probability == pytest.approx(expected, abs=1e-10)


class TestIndividualFocused:
    def test_target_must_name_a_matched_member(self):
        spec = DatabaseSpec(
            n=3, k=2, member_alphas=(0.1, 0.2, 0.1), outside_alpha_total=0.6, p=0.5
        )
        for bad in (0, 3, -1):
            with pytest.raises(InvalidValueError):
                individual_focused(spec, bad)

    def test_competition_is_other_matches_plus_coincidence(self):
        spec = DatabaseSpec(
            n=3, k=2, member_alphas=(0.1, 0.2, 0.1), outside_alpha_total=0.6, p=0.5
        )
        res = individual_focused(spec, 1)
        assert res.odds == pytest.approx(0.1 / (0.2 + 0.5 * 0.6), rel=1e-12)
        assert res.lr is None  # several members matched: no single-factor reading

    def test_single_match_carries_the_classical_factor(self):
        spec = DatabaseSpec(
            n=3, k=1, member_alphas=(0.1, 0.2, 0.1), outside_alpha_total=0.6, p=0.5
        )
        res = individual_focused(spec, 1)
        assert res.lr.value == pytest.approx(2.0)
        assert res.lr.convention is Convention.CONDITIONAL_ON_I
        assert res.prior_odds == pytest.approx(0.1 / 0.6, rel=1e-12)

    def test_matches_enumeration(self):
        scenario, spec = database_scenario((0.1, 0.15, 0.05, 0.1), 0.6, 9, 0.3, k=2)
        expected = oracle.exact_posterior(scenario, "C_eq:0", ("I", "DB_first:2")).value
        assert individual_focused(spec, 1).probability == pytest.approx(expected, abs=1e-10)


class TestEffectiveness:
    def test_unique_match_probability_endpoints(self):
        assert unique_match_probability(4, 0.2, 0.0) == pytest.approx(4 * 0.2 * 0.8**3)
        assert unique_match_probability(4, 0.2, 1.0) == pytest.approx(0.8**4)

    def test_odds_factor_as_lr_times_inclusion_odds(self):
        odds, p_unique = database_effectiveness(100, 0.01, 0.5)
        assert odds.odds == pytest.approx(1.0, rel=1e-12)
        assert odds.lr.value == pytest.approx(100.0)
        assert odds.prior_odds == pytest.approx(0.5 / (100 * 0.5), rel=1e-12)
        assert 0.0 < p_unique < 1.0

    def test_degenerate_inclusion_probabilities(self):
        never, _ = database_effectiveness(10, 0.1, 0.0)
        always, _ = database_effectiveness(10, 0.1, 1.0)
        assert never.odds == 0.0 and never.note is not None
        assert math.isinf(always.odds) and always.note is not None

    def test_odds_match_enumeration(self):
        n, total, p, q = 4, 9, 0.3, 0.35
        scenario = effectiveness_scenario(n, total, p, q)
        odds, _ = database_effectiveness(n, p, q)
        assert odds.probability == pytest.approx(oracle.exact_posterior(scenario).value, abs=1e-10)

    def test_unique_match_chance_given_offender_bears(self):
        # first-principles value for P(exactly one match | offender bears)
        n, total, p, q = 4, 9, 0.3, 0.35
        scenario = effectiveness_scenario(n, total, p, q)
        expected = oracle.exact_event_probability(scenario, "DB_unique", ("I",))
        assert unique_match_given_inside(n, p, q) == pytest.approx(expected, abs=1e-10)

    def test_reported_form_differs_from_conditional_at_large_p(self):
        # the reported unique-match probability uses (1-p)^n on its first
        # term; the conditional-given-I value uses (1-p)^(n-1).  They agree
        # closely for small p but are distinct quantities.
        n, p, q = 3, 0.5, 0.5
        assert unique_match_probability(n, p, q) == pytest.approx(0.25)
        assert unique_match_given_inside(n, p, q) == pytest.approx(0.3125)
        tiny = 1e-6
        assert unique_match_probability(n, tiny, q) == pytest.approx(
            unique_match_given_inside(n, tiny, q), rel=1e-5
        )

    def test_match_count_outcomes_cover_all_cases(self):
        # over match counts 0..n the conditional probabilities must sum to 1
        n, total, p, q = 5, 12, 0.25, 0.4
        scenario = effectiveness_scenario(n, total, p, q)
        mass = sum(
            oracle.exact_event_probability(scenario, f"DB_count:{j}", ("I",))
            for j in range(n + 1)
        )
        assert mass == pytest.approx(1.0, abs=1e-12)


class TestGrowthCurve:
    def test_random_sampling_gives_strictly_increasing_odds(self):
        model = GrowthModel(N=1000, p=0.01, inclusion=Inclusion.RANDOM_SAMPLE)
        points = growth_curve(model, [10, 100, 500, 900])
        odds = [pt.odds for pt in points]
        assert odds == sorted(odds)
        assert len(set(odds)) == len(odds)
        # closed form 1/(p (N - n))
        assert odds[0] == pytest.approx(1.0 / (0.01 * 990), rel=1e-12)

    def test_sqrt_weighting_dips_at_a_quarter_of_the_population(self):
        n_total = 400
        model = GrowthModel(N=n_total, p=0.01, inclusion=Inclusion.SQRT_WEIGHTED)
        grid = list(range(1, n_total + 1))
        points = growth_curve(model, grid)
        lowest = min(points, key=lambda pt: pt.odds)
        assert lowest.n == n_total // 4

    def test_callable_inclusion(self):
        model = GrowthModel(N=100, p=0.1, inclusion=lambda n: 0.5)
        (point,) = growth_curve(model, [10])
        assert point.odds == pytest.approx(1.0, rel=1e-12)

    def test_grid_bounds_are_checked(self):
        model = GrowthModel(N=100, p=0.1, inclusion=Inclusion.RANDOM_SAMPLE)
        with pytest.raises(DomainError):
            growth_curve(model, [101])
        with pytest.raises(DomainError):
            growth_curve(model, [0])

    def test_doubling_pays_only_when_inclusion_odds_more_than_double(self):
        assert enlargement_threshold(0.2, 0.5)
        assert not enlargement_threshold(0.4, 0.5)

    @given(
        st.integers(min_value=1, max_value=8),
        st.floats(min_value=0.01, max_value=0.9),
        st.floats(min_value=0.0, max_value=1.0),
    )
    @settings(max_examples=100)
    def test_probabilities_stay_in_range(self, n, p, q):
        odds, p_unique = database_effectiveness(n, p, q)
        assert 0.0 <= odds.probability <= 1.0
        assert 0.0 <= p_unique <= 1.0
