import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from islandodds import oracle
from islandodds.core import (
    Convention,
    InvalidValueError,
    NoEquivalentError,
    PreconditionError,
)
from islandodds.dependence import (
    DependenceConditioning,
    DependencyGroup,
    GroupedDependencySpec,
    RatioKind,
    bias_correlation_equivalent,
    biased_search_odds,
    correlated_odds,
    selection_posterior,
)

from support import biased_scenario, correlated_scenario


def bias_spec(ratios, priors, suspect_prior, p_s, freqs=None, counts=None):
    counts = counts or (1,) * len(ratios)
    freqs = freqs or (None,) * len(ratios)
    return GroupedDependencySpec(
        groups=tuple(
            DependencyGroup(count=c, prior_given_I=w, ratio=r, freq=f)
            for c, w, r, f in zip(counts, priors, ratios, freqs)
        ),
        suspect_freq=p_s,
        ratio_kind=RatioKind.BIAS_SIGMA,
        suspect_prior_given_I=suspect_prior,
    )


class TestSpecValidation:
    def test_priors_must_sum_to_one(self):
        with pytest.raises(InvalidValueError):
            bias_spec((1.0, 1.0), (0.3, 0.3), 0.3, 0.5)

    def test_correlation_ratios_cannot_exceed_one(self):
        with pytest.raises(InvalidValueError):
            GroupedDependencySpec(
                groups=(DependencyGroup(count=1, prior_given_I=0.5, ratio=1.5),),
                suspect_freq=0.5,
                ratio_kind=RatioKind.CORRELATION_C,
                suspect_prior_given_I=0.5,
            )

    def test_bias_ratios_may_exceed_one(self):
        spec = bias_spec((2.5,), (0.6,), 0.4, 0.5)
        assert spec.groups[0].ratio == 2.5

    def test_group_field_validation(self):
        with pytest.raises(InvalidValueError):
            DependencyGroup(count=0, prior_given_I=0.5, ratio=1.0)
        with pytest.raises(InvalidValueError):
            DependencyGroup(count=1, prior_given_I=0.5, ratio=-0.1)
        with pytest.raises(InvalidValueError):
            DependencyGroup(count=1, prior_given_I=0.5, ratio=1.0, freq=1.0)

    def test_unconditioned_priors_all_or_none(self):
        with pytest.raises(InvalidValueError):
            GroupedDependencySpec(
                groups=(DependencyGroup(count=1, prior_given_I=0.5, ratio=0.5),),
                suspect_freq=0.5,
                ratio_kind=RatioKind.CORRELATION_C,
                suspect_prior_given_I=0.5,
                suspect_prior_unconditioned=0.5,
            )

    def test_operations_check_the_ratio_kind(self):
        spec = bias_spec((1.0,), (0.6,), 0.4, 0.5)
        with pytest.raises(InvalidValueError):
            correlated_odds(spec)
        corr = GroupedDependencySpec(
            groups=(DependencyGroup(count=1, prior_given_I=0.6, ratio=0.5),),
            suspect_freq=0.5,
            ratio_kind=RatioKind.CORRELATION_C,
            suspect_prior_given_I=0.4,
        )
        with pytest.raises(InvalidValueError):
            biased_search_odds(corr)
        with pytest.raises(InvalidValueError):
            selection_posterior(corr)


class TestBiasedSearch:
    def test_two_alternative_example(self):
        spec = bias_spec((2.0, 1.0), (0.3, 0.3), 0.4, 0.5)
        res = biased_search_odds(spec)
        assert res.odds == pytest.approx(0.4 / (0.5 * 0.9), abs=1e-12)
        assert res.lr.value == 2.0
        assert res.prior_odds == pytest.approx(0.4 / 0.6, abs=1e-12)
        assert res.correction_factor == pytest.approx(0.6 / 0.9, abs=1e-12)
        # odds = LR x correction x prior odds
        assert res.odds == pytest.approx(
            res.lr.value * res.correction_factor * res.prior_odds, rel=1e-12
        )

    def test_selection_posterior(self):
        spec = bias_spec((2.0, 1.0), (0.3, 0.3), 0.4, 0.5)
        assert selection_posterior(spec) == pytest.approx(0.4 / 1.3, abs=1e-12)

    def test_unbiased_search_reduces_to_prior_times_lr(self):
        spec = bias_spec((1.0, 1.0), (0.3, 0.3), 0.4, 0.2)
        res = biased_search_odds(spec)
        assert res.correction_factor == pytest.approx(1.0, abs=1e-12)
        assert res.odds == pytest.approx((0.4 / 0.6) / 0.2, rel=1e-12)

    def test_zero_weight_on_alternatives_gives_certainty(self):
        spec = bias_spec((0.0,), (0.6,), 0.4, 0.5)
        res = biased_search_odds(spec)
        assert math.isinf(res.odds)
        assert res.note is not None

    def test_matches_enumeration_with_per_individual_ratios(self):
        scenario, module_spec = biased_scenario(7, 0.35)
        expected = oracle.exact_posterior(scenario).value
        assert biased_search_odds(module_spec).probability == pytest.approx(expected, abs=1e-10)

    @given(
        st.lists(st.floats(min_value=0.0, max_value=4.0), min_size=1, max_size=4),
        st.floats(min_value=0.05, max_value=0.95),
        st.floats(min_value=0.05, max_value=0.95),
    )
    @settings(max_examples=80)
    def test_odds_equal_the_weighted_prior_formula(self, ratios, p_s, w_s):
        w_alt = (1.0 - w_s) / len(ratios)
        spec = bias_spec(tuple(ratios), (w_alt,) * len(ratios), w_s, p_s)
        weighted = sum(r * w_alt for r in ratios)
        res = biased_search_odds(spec)
        if weighted == 0.0:
            assert math.isinf(res.odds)
        else:
            assert res.odds == pytest.approx(w_s / (p_s * weighted), rel=1e-12)


class TestCorrelatedBearers:
    def test_exchangeable_pair_example(self):
        # suspect plus an exchangeable pair, uniform offender prior
        spec = GroupedDependencySpec(
            groups=(DependencyGroup(count=2, prior_given_I=1 / 3, ratio=0.8),),
            suspect_freq=0.5,
            ratio_kind=RatioKind.CORRELATION_C,
            suspect_prior_given_I=1 / 3,
        )
        assert correlated_odds(spec).odds == pytest.approx(0.625, abs=1e-12)

    def test_independent_ratio_recovers_classical_odds(self):
        n, p = 9, 0.2
        spec = GroupedDependencySpec(
            groups=(DependencyGroup(count=n, prior_given_I=(1 - 1 / (n + 1)) / n, ratio=p),),
            suspect_freq=p,
            ratio_kind=RatioKind.CORRELATION_C,
            suspect_prior_given_I=1 / (n + 1),
        )
        assert correlated_odds(spec).odds == pytest.approx(1.0 / (n * p), rel=1e-12)

    def test_matches_enumeration_of_exchangeable_mixture(self):
        scenario, module_spec = correlated_scenario(4, 2, 0.3)
        expected = oracle.exact_posterior(scenario).value
        assert correlated_odds(module_spec).probability == pytest.approx(expected, abs=1e-10)

    def test_transpose_consistency_check(self):
        # c = 0.5 against a group frequency 0.9 with p_s = 0.2 would need a
        # transposed conditional probability of 2.25
        spec = GroupedDependencySpec(
            groups=(DependencyGroup(count=1, prior_given_I=0.6, ratio=0.5, freq=0.9),),
            suspect_freq=0.2,
            ratio_kind=RatioKind.CORRELATION_C,
            suspect_prior_given_I=0.4,
        )
        with pytest.raises(InvalidValueError, match="group 0"):
            correlated_odds(spec)

    def test_unconditioned_mode_needs_unconditioned_priors(self):
        spec = GroupedDependencySpec(
            groups=(DependencyGroup(count=1, prior_given_I=0.6, ratio=0.5),),
            suspect_freq=0.5,
            ratio_kind=RatioKind.CORRELATION_C,
            suspect_prior_given_I=0.4,
        )
        with pytest.raises(PreconditionError):
            correlated_odds(spec, DependenceConditioning.UNCONDITIONED)

    def test_both_conditioning_modes_agree_when_derived_from_one_law(self):
        # flat frequencies make the offender prior invariant to learning I
        spec = GroupedDependencySpec(
            groups=(
                DependencyGroup(count=3, prior_given_I=0.15, ratio=0.4, prior_unconditioned=0.15, freq=0.3),
                DependencyGroup(count=1, prior_given_I=0.25, ratio=0.3, prior_unconditioned=0.25, freq=0.3),
            ),
            suspect_freq=0.3,
            ratio_kind=RatioKind.CORRELATION_C,
            suspect_prior_given_I=0.3,
            suspect_prior_unconditioned=0.3,
        )
        on_i = correlated_odds(spec, DependenceConditioning.ON_I)
        uncond = correlated_odds(spec, DependenceConditioning.UNCONDITIONED)
        assert on_i.odds == pytest.approx(uncond.odds, rel=1e-12)


class TestBiasToCorrelation:
    def test_translation_preserves_the_posterior(self):
        spec = bias_spec((2.0, 0.5), (0.3, 0.2), 0.5, 0.3, freqs=(0.3, 0.3))
        converted = bias_correlation_equivalent(spec)
        assert converted.ratio_kind is RatioKind.CORRELATION_C
        assert converted.groups[0].ratio == pytest.approx(0.3 * 2.0, abs=1e-15)
        assert correlated_odds(converted).odds == pytest.approx(
            biased_search_odds(spec).odds, rel=1e-12
        )

    def test_translation_can_fail_and_names_the_group(self):
        # ratio 2 against a group frequency of 0.6 needs a transposed
        # conditional bearer probability of 1.2
        spec = bias_spec((2.0,), (0.7,), 0.3, 0.3, freqs=(0.6,))
        with pytest.raises(NoEquivalentError, match="group 0"):
            bias_correlation_equivalent(spec)

    def test_translation_requires_frequencies(self):
        spec = bias_spec((2.0,), (0.7,), 0.3, 0.3)
        with pytest.raises(PreconditionError):
            bias_correlation_equivalent(spec)
        converted = bias_correlation_equivalent(spec, group_freqs=(0.3,))
        assert converted.groups[0].freq == 0.3

    @given(
        st.lists(st.floats(min_value=0.0, max_value=2.0), min_size=1, max_size=4),
        st.floats(min_value=0.05, max_value=0.45),
        st.floats(min_value=0.05, max_value=0.95),
    )
    @settings(max_examples=60)
    def test_round_trip_odds_equality(self, ratios, p_s, w_s):
        w_alt = (1.0 - w_s) / len(ratios)
        spec = bias_spec(
            tuple(ratios), (w_alt,) * len(ratios), w_s, p_s, freqs=(p_s,) * len(ratios)
        )
        try:
            converted = bias_correlation_equivalent(spec)
        except NoEquivalentError:
            assert any(r * p_s > 1.0 for r in ratios)
            return
        original = biased_search_odds(spec).odds
        translated = correlated_odds(converted).odds
        if math.isinf(original):
            assert math.isinf(translated)
        else:
            assert translated == pytest.approx(original, rel=1e-12)
