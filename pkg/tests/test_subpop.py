import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from islandodds import oracle
from islandodds.core import (
    Convention,
    ConventionError,
    InvalidValueError,
    PreconditionError,
    odds_from_probability,
)
from islandodds.subpop import (
    alpha_from_beta,
    hetero_expected_bearers,
    hetero_lr,
    hetero_posterior_marginal,
    hetero_posterior_odds,
)
from islandodds.uncertain import BetaParams, FrequencyDensity

from support import hetero_marginal_scenario, hetero_scenario, make_model

TWO_GROUP_EXAMPLE = dict(
    sizes=(10**7, 10**5), freqs=(1e-9, 1e-8), betas=(0.5, 0.5)
)


def example_model():
    return make_model(**TWO_GROUP_EXAMPLE)


small_models = st.builds(
    lambda sizes, freqs, b0: (sizes, freqs, (b0, 1.0 - b0)),
    st.tuples(st.integers(min_value=1, max_value=9), st.integers(min_value=1, max_value=9)),
    st.tuples(
        st.floats(min_value=0.01, max_value=0.95),
        st.floats(min_value=0.01, max_value=0.95),
    ),
    st.floats(min_value=0.05, max_value=0.95),
)


class TestAlphaFromBeta:
    def test_two_group_example(self):
        alphas = alpha_from_beta(example_model())
        assert alphas[0] == pytest.approx(1.0 / 11.0, abs=1e-6)
        assert alphas[1] == pytest.approx(10.0 / 11.0, abs=1e-6)
        assert alphas.sum() == pytest.approx(1.0, abs=1e-12)

    def test_equal_frequencies_leave_priors_unchanged(self):
        model = make_model((5, 3), (0.2, 0.2), (0.7, 0.3))
        assert np.allclose(alpha_from_beta(model), [0.7, 0.3], atol=1e-15)

    def test_uncertain_frequencies_are_rejected(self):
        model_subs = list(example_model().subpops)
        from islandodds.core import PopulationModel, Subpopulation

        model_subs[0] = Subpopulation(
            size=model_subs[0].size,
            freq=FrequencyDensity(BetaParams(2.0, 5.0)),
            beta=model_subs[0].beta,
        )
        with pytest.raises(PreconditionError):
            alpha_from_beta(PopulationModel(tuple(model_subs)))


class TestPosteriorOdds:
    def test_two_group_example_both_suspects(self):
        model = example_model()
        first = hetero_posterior_odds(model, 0)
        second = hetero_posterior_odds(model, 1)
        assert first.odds == pytest.approx(9.0909, rel=1e-3)
        assert second.odds == pytest.approx(909.1, rel=1e-3)
        assert first.lr.value == pytest.approx(1e9, rel=1e-12)

    def test_prior_odds_use_updated_group_weights(self):
        model = make_model((6, 3), (0.3, 0.6), (0.5, 0.5))
        res = hetero_posterior_odds(model, 1)
        alpha_1 = alpha_from_beta(model)[1]
        assert res.prior_odds == pytest.approx(alpha_1 / (3 - alpha_1), rel=1e-12)

    def test_index_validation(self):
        with pytest.raises(InvalidValueError):
            hetero_posterior_odds(example_model(), 2)

    @pytest.mark.parametrize("s_group", [0, 1])
    def test_matches_enumeration(self, s_group):
        scenario, model = hetero_scenario((5, 4), (0.25, 0.6), (0.55, 0.45), s_group)
        expected = oracle.exact_posterior(scenario).value
        assert hetero_posterior_odds(model, s_group).probability == pytest.approx(
            expected, abs=1e-10
        )


class TestLikelihoodRatioConventions:
    def test_conditional_is_inverse_group_frequency(self):
        model = example_model()
        assert hetero_lr(model, 0, Convention.CONDITIONAL_ON_I).value == pytest.approx(1e9)
        assert hetero_lr(model, 1, Convention.CONDITIONAL_ON_I).value == pytest.approx(1e8)

    def test_large_n_limit_value(self):
        model = example_model()
        assert hetero_lr(model, 0, Convention.LARGE_N).value == pytest.approx(
            1.0 / 5.5e-9, rel=1e-12
        )

    def test_joint_and_conditional_routes_reach_the_same_odds(self):
        for sizes, freqs, betas, s in [
            ((10, 5), (0.2, 0.4), (0.6, 0.4), 0),
            ((7, 2), (0.5, 0.1), (0.3, 0.7), 1),
            ((4, 4, 4), (0.1, 0.2, 0.3), (0.2, 0.3, 0.5), 2),
        ]:
            model = make_model(sizes, freqs, betas)
            odds = hetero_posterior_odds(model, s).odds
            alpha_s = alpha_from_beta(model)[s]
            beta_s, n_s = betas[s], sizes[s]
            via_conditional = hetero_lr(model, s, Convention.CONDITIONAL_ON_I).value * (
                alpha_s / (n_s - alpha_s)
            )
            via_joint = hetero_lr(model, s, Convention.JOINT_I_AND_E).value * (
                beta_s / (n_s - beta_s)
            )
            assert via_conditional == pytest.approx(odds, rel=1e-12)
            assert via_joint == pytest.approx(odds, rel=1e-12)

    def test_default_population_contrasts_lone_suspect_with_reference_group(self):
        model = make_model((1, 100), (0.4, 0.2), (0.01, 0.99))
        assert hetero_lr(model, 0, Convention.DEFAULT_POPULATION).value == pytest.approx(5.0)
        with pytest.raises(ConventionError):
            hetero_lr(example_model(), 0, Convention.DEFAULT_POPULATION)

    def test_conservative_requires_uncertainty(self):
        with pytest.raises(ConventionError):
            hetero_lr(example_model(), 0, Convention.CONSERVATIVE)

    def test_joint_lr_matches_enumeration_odds_ratio(self):
        scenario, model = hetero_scenario((5, 4), (0.25, 0.6), (0.55, 0.45), 1)
        post = oracle.exact_posterior(scenario).value
        prior = oracle.exact_event_probability(scenario, "G", ())
        expected = odds_from_probability(post) / odds_from_probability(prior)
        assert hetero_lr(model, 1, Convention.JOINT_I_AND_E).value == pytest.approx(
            expected, rel=1e-10
        )


class TestMarginalPosterior:
    def test_is_bearer_weighted_mean_of_group_values(self):
        model = example_model()
        per_group = [hetero_posterior_odds(model, i).probability for i in range(2)]
        weights = np.array([1e7 * 1e-9, 1e5 * 1e-8])
        expected = float(weights @ per_group / weights.sum())
        assert hetero_posterior_marginal(model) == pytest.approx(expected, rel=1e-12)

    def test_close_to_enumeration_for_uniformly_drawn_suspect(self):
        # the closed form neglects the coupling between selection and identity,
        # so agreement is approximate rather than exact
        scenario, model = hetero_marginal_scenario((8, 4), (0.25, 0.5), (2 / 3, 1 / 3))
        expected = oracle.exact_posterior(scenario).value
        value = hetero_posterior_marginal(model)
        assert value == pytest.approx(expected, rel=2e-3)
        assert value != pytest.approx(expected, rel=1e-6)

    @pytest.mark.parametrize(
        "sizes,freqs,betas",
        [
            ((6, 6), (0.1, 0.3), (0.5, 0.5)),
            ((9, 3), (0.2, 0.1), (0.75, 0.25)),
            ((4, 4, 4), (0.1, 0.2, 0.3), (1 / 3, 1 / 3, 1 / 3)),
        ],
    )
    def test_enumeration_agreement_across_models(self, sizes, freqs, betas):
        scenario, model = hetero_marginal_scenario(sizes, freqs, betas)
        expected = oracle.exact_posterior(scenario).value
        assert hetero_posterior_marginal(model) == pytest.approx(expected, rel=2e-3)


class TestExpectedBearers:
    def test_size_proportional_example(self):
        model = make_model((8, 4), (0.25, 0.5), (2 / 3, 1 / 3))
        expected_count = hetero_expected_bearers(model, 0)
        assert expected_count == pytest.approx(4.75, abs=1e-12)
        assert hetero_posterior_odds(model, 0).probability == pytest.approx(
            1.0 / expected_count, rel=1e-12
        )

    def test_requires_size_proportional_offender_priors(self):
        model = make_model((8, 4), (0.25, 0.5), (0.5, 0.5))
        with pytest.raises(PreconditionError):
            hetero_expected_bearers(model, 0)


class TestRandomizedModels:
    @given(small_models, st.integers(min_value=0, max_value=1))
    @settings(max_examples=100, deadline=None)
    def test_identity_chain_on_random_two_group_models(self, params, s):
        sizes, freqs, betas = params
        model = make_model(sizes, freqs, betas)
        res = hetero_posterior_odds(model, s)
        assert 0.0 < res.probability <= 1.0
        alphas = alpha_from_beta(model)
        assert alphas.sum() == pytest.approx(1.0, abs=1e-12)
        if np.isfinite(res.odds):
            via_joint = hetero_lr(model, s, Convention.JOINT_I_AND_E).value * (
                betas[s] / (sizes[s] - betas[s])
            )
            assert via_joint == pytest.approx(res.odds, rel=1e-9)
