"""HTTP service exposing every calculation as a single document endpoint.

A request is one scenario document: a schema version, a variant name, the
variant's parameters, and output options.  The service validates the
document strictly (unknown fields are rejected), runs the computation, and
returns the raw results plus a ready-to-render table.  Infinite odds are
serialized as the string "inf".
"""

from __future__ import annotations

import math
from typing import Any, Callable, Literal, Sequence

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from . import __version__, classical, database, dependence, oracle, reproduce, subpop, uncertain
from .core import (
    CapacityError,
    Convention,
    ConventionError,
    DomainError,
    InvalidValueError,
    IslandOddsError,
    LikelihoodRatio,
    OddsResult,
    PointFrequency,
    PopulationModel,
    PreconditionError,
    StageError,
    Subpopulation,
    odds_from_probability,
)
from .dependence import DependencyGroup, GroupedDependencySpec, RatioKind
from .database import DatabaseSpec, GrowthModel, Inclusion, UniformAlphas
from .uncertain import BetaParams, FrequencyDensity, TabulatedGrid, beta_from_moments

__all__ = ["app", "create_app", "ASSUMPTIONS"]

ASSUMPTIONS: dict[str, str] = {
    "conditional_on_I": "trace treated as background; multiply by prior odds that already condition on it",
    "joint_I_and_E": "trace and match treated as one event; requires the offender group priors",
    "large_N": "large-group limit of the joint value; an approximation",
    "default_population": "suspect contrasted against a single reference population",
    "conservative": "defendant-favourable lower bound, independent of group priors",
}

# document validation failures and computation failures map to different
# HTTP statuses so the CLI can distinguish exit codes 2 and 1
_VALIDATION_ERRORS = (
    InvalidValueError,
    DomainError,
    StageError,
    ConventionError,
    CapacityError,
    PreconditionError,
)


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class BetaSpec(StrictModel):
    a: float
    b: float


class MomentsSpec(StrictModel):
    mean: float
    sd: float


class FrequencySpec(StrictModel):
    """Exactly one way of giving a trait frequency: a known point value, a
    Beta law, a tabulated density on a uniform grid over [0, 1], or a
    mean/sd pair matched to a Beta law."""

    point: float | None = None
    beta: BetaSpec | None = None
    grid: list[float] | None = None
    moments: MomentsSpec | None = None

    @model_validator(mode="after")
    def _exactly_one(self) -> "FrequencySpec":
        given = [name for name in ("point", "beta", "grid", "moments")
                 if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"give exactly one of point/beta/grid/moments, got {given or 'none'}")
        return self

    def build(self) -> PointFrequency | FrequencyDensity:
        if self.point is not None:
            return PointFrequency(self.point)
        if self.beta is not None:
            return FrequencyDensity(BetaParams(self.beta.a, self.beta.b))
        if self.grid is not None:
            return FrequencyDensity(TabulatedGrid(np.asarray(self.grid, dtype=float)))
        assert self.moments is not None
        return FrequencyDensity(beta_from_moments(self.moments.mean, self.moments.sd))

    def build_density(self) -> FrequencyDensity:
        built = self.build()
        if isinstance(built, PointFrequency):
            raise InvalidValueError(
                "a point frequency has no uncertainty; use the classical variant instead"
            )
        return built


class SubpopulationSpec(StrictModel):
    size: int
    freq: FrequencySpec
    beta: float
    epsilon: float | None = None

    def build(self) -> Subpopulation:
        return Subpopulation(size=self.size, freq=self.freq.build(),
                             beta=self.beta, epsilon=self.epsilon)


def _build_model(specs: Sequence[SubpopulationSpec]) -> PopulationModel:
    return PopulationModel(tuple(s.build() for s in specs))


class DependencyGroupSpec(StrictModel):
    count: int
    prior_given_I: float
    ratio: float
    prior_unconditioned: float | None = None
    freq: float | None = None

    def build(self) -> DependencyGroup:
        return DependencyGroup(count=self.count, prior_given_I=self.prior_given_I,
                               ratio=self.ratio, prior_unconditioned=self.prior_unconditioned,
                               freq=self.freq)


class DependenceParams(StrictModel):
    suspect_freq: float
    suspect_prior_given_I: float
    suspect_prior_unconditioned: float | None = None
    groups: list[DependencyGroupSpec] = Field(min_length=1)

    def build(self, kind: RatioKind) -> GroupedDependencySpec:
        return GroupedDependencySpec(
            groups=tuple(g.build() for g in self.groups),
            suspect_freq=self.suspect_freq,
            ratio_kind=kind,
            suspect_prior_given_I=self.suspect_prior_given_I,
            suspect_prior_unconditioned=self.suspect_prior_unconditioned,
        )


class CorrelatedParams(DependenceParams):
    conditioning: Literal["on_I", "unconditioned"] = "on_I"


class ClassicalParams(StrictModel):
    N: int
    p: float


class YellinParams(StrictModel):
    N: int
    p: float


class HeteroParams(StrictModel):
    subpopulations: list[SubpopulationSpec] = Field(min_length=1)
    s_index: int | None = None
    marginal: bool = False

    @model_validator(mode="after")
    def _one_question(self) -> "HeteroParams":
        if self.marginal == (self.s_index is not None):
            raise ValueError("give either s_index (known group) or marginal: true, not both")
        return self


class UncertainParams(StrictModel):
    N: int
    density: FrequencySpec


class UncertainSubpopParams(StrictModel):
    subpopulations: list[SubpopulationSpec] = Field(min_length=1)
    s_index: int
    large_n: bool = False


class MembershipParams(StrictModel):
    subpopulations: list[SubpopulationSpec] = Field(min_length=1)


class DatabaseParams(StrictModel):
    n: int
    k: int
    p: float
    outside_alpha_total: float
    member_alphas: list[float] | None = None
    uniform_member_total: float | None = None
    target: int | None = None

    @model_validator(mode="after")
    def _one_alpha_form(self) -> "DatabaseParams":
        if (self.member_alphas is None) == (self.uniform_member_total is None):
            raise ValueError("give exactly one of member_alphas or uniform_member_total")
        return self

    def build(self) -> DatabaseSpec:
        alphas: tuple[float, ...] | UniformAlphas
        if self.member_alphas is not None:
            alphas = tuple(self.member_alphas)
        else:
            assert self.uniform_member_total is not None
            alphas = UniformAlphas(self.uniform_member_total)
        return DatabaseSpec(n=self.n, k=self.k, member_alphas=alphas,
                            outside_alpha_total=self.outside_alpha_total, p=self.p)


class EffectivenessParams(StrictModel):
    n: int
    p: float
    q: float


class GrowthParams(StrictModel):
    N: int
    p: float
    inclusion: Literal["random_sample", "sqrt_weighted"]
    points: int = 200
    n_grid: list[int] | None = None

    def grid(self) -> list[int]:
        if self.n_grid is not None:
            return list(self.n_grid)
        if self.points < 1:
            raise InvalidValueError(f"points must be positive, got {self.points}")
        grid = sorted({max(1, round(j * self.N / self.points)) for j in range(1, self.points + 1)})
        return grid


class AtomSpec(StrictModel):
    weight: float
    freqs: list[float] = Field(min_length=1)


class SuspectSpec(StrictModel):
    kind: Literal["fixed", "uniform", "categorical", "sequential", "biased", "database"]
    index: int | None = None
    probs: list[float] | None = None
    weights: list[list[float]] | None = None

    def build(self) -> oracle.SuspectProtocol:
        if self.kind == "fixed":
            if self.index is None:
                raise InvalidValueError("fixed suspect needs an index")
            return oracle.FixedSuspect(self.index)
        if self.kind == "uniform":
            return oracle.UniformSuspect()
        if self.kind == "categorical":
            if self.probs is None:
                raise InvalidValueError("categorical suspect needs probs")
            return oracle.CategoricalSuspect(tuple(self.probs))
        if self.kind == "sequential":
            return oracle.SequentialSearchSuspect()
        if self.kind == "biased":
            if self.weights is None:
                raise InvalidValueError("biased suspect needs a weights matrix")
            return oracle.BiasedSearchSuspect(tuple(tuple(row) for row in self.weights))
        return oracle.DatabaseSuspect()


class OracleScenarioSpec(StrictModel):
    variant: str
    atoms: list[AtomSpec] = Field(min_length=1)
    criminal_prior: list[float]
    suspect: SuspectSpec
    groups: list[int] | None = None
    database: list[int] | None = None
    event: str = "G"
    conditioning: list[str] = ["I", "E"]

    def build(self) -> oracle.ScenarioSpec:
        return oracle.ScenarioSpec(
            variant=self.variant,
            atoms=tuple((a.weight, tuple(a.freqs)) for a in self.atoms),
            criminal_prior=tuple(self.criminal_prior),
            suspect=self.suspect.build(),
            groups=tuple(self.groups) if self.groups is not None else None,
            database=tuple(self.database) if self.database is not None else None,
            event=self.event,
            conditioning=tuple(self.conditioning),
        )


class OracleParams(StrictModel):
    method: Literal["exact", "mc"]
    scenario: OracleScenarioSpec
    event: str | None = None
    conditioning: list[str] | None = None
    trials: int = 1_000_000
    seed: int | None = None


_CONVENTION_TAGS = Literal[
    "conditional_on_I", "joint_I_and_E", "large_N", "default_population", "conservative"
]


class OutputSpec(StrictModel):
    format: Literal["table", "csv"] = "table"
    conventions: list[_CONVENTION_TAGS] = []
    resolution: int = uncertain.DEFAULT_RESOLUTION

    @model_validator(mode="after")
    def _odd_resolution(self) -> "OutputSpec":
        if self.resolution < 3 or self.resolution % 2 == 0:
            raise ValueError(f"resolution must be an odd integer >= 3, got {self.resolution}")
        return self


_PARAM_MODELS: dict[str, type[StrictModel]] = {
    "classical": ClassicalParams,
    "yellin": YellinParams,
    "biased_search": DependenceParams,
    "correlated": CorrelatedParams,
    "bias_to_correlation": DependenceParams,
    "hetero": HeteroParams,
    "uncertain": UncertainParams,
    "uncertain_subpop": UncertainSubpopParams,
    "membership": MembershipParams,
    "database": DatabaseParams,
    "effectiveness": EffectivenessParams,
    "growth": GrowthParams,
    "oracle": OracleParams,
}


class ScenarioDocument(StrictModel):
    schema_version: Literal[1]
    variant: Literal[
        "classical", "yellin", "biased_search", "correlated", "bias_to_correlation",
        "hetero", "uncertain", "uncertain_subpop", "membership", "database",
        "effectiveness", "growth", "oracle",
    ]
    parameters: dict[str, Any]
    output: OutputSpec = Field(default_factory=OutputSpec)


def _num(x: float | None) -> float | str | None:
    """JSON-safe number: infinities become the string 'inf'."""
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _odds_entries(result: OddsResult) -> list[tuple[str, Any]]:
    entries: list[tuple[str, Any]] = [
        ("posterior probability", result.probability),
        ("posterior odds", _num(result.odds)),
    ]
    if result.prior_odds is not None:
        entries.append(("prior odds", _num(result.prior_odds)))
    if result.correction_factor is not None:
        entries.append(("correction factor", _num(result.correction_factor)))
    if result.note is not None:
        entries.append(("note", result.note))
    return entries


def _odds_block(result: OddsResult) -> dict[str, Any]:
    block: dict[str, Any] = {
        "odds": _num(result.odds),
        "probability": result.probability,
        "prior_odds": _num(result.prior_odds),
        "correction_factor": _num(result.correction_factor),
        "note": result.note,
    }
    if result.lr is not None:
        block["lr"] = _lr_block(result.lr)
    return block


def _lr_block(lr: LikelihoodRatio) -> dict[str, Any]:
    tag = lr.convention.value
    return {"value": _num(lr.value), "convention": tag, "assumption": ASSUMPTIONS[tag]}


def _lr_entries(lrs: Sequence[LikelihoodRatio]) -> list[tuple[str, Any]]:
    entries: list[tuple[str, Any]] = []
    for lr in lrs:
        tag = lr.convention.value
        entries.append((f"LR ({tag})", _num(lr.value)))
        entries.append((f"assumption ({tag})", ASSUMPTIONS[tag]))
    return entries


def _kv_table(entries: Sequence[tuple[str, Any]]) -> dict[str, Any]:
    return {"columns": ["quantity", "value"], "rows": [[k, v] for k, v in entries]}


def _requested_conventions(doc: ScenarioDocument, default: Sequence[Convention]) -> list[Convention]:
    if not doc.output.conventions:
        return list(default)
    return [Convention(tag) for tag in doc.output.conventions]


Handler = Callable[[ScenarioDocument, StrictModel], tuple[dict[str, Any], dict[str, Any]]]


def _run_classical(doc: ScenarioDocument, params: StrictModel) -> tuple[dict[str, Any], dict[str, Any]]:
    assert isinstance(params, ClassicalParams)
    result = classical.classical_posterior(params.N, params.p)
    assert result.lr is not None
    lrs = []
    for convention in _requested_conventions(doc, [Convention.CONDITIONAL_ON_I]):
        if convention not in (Convention.CONDITIONAL_ON_I, Convention.JOINT_I_AND_E):
            raise ConventionError(
                f"the classical posterior has no {convention.value} likelihood ratio"
            )
        # with one homogeneous population the two conventions coincide
        lrs.append(LikelihoodRatio(result.lr.value, convention))
    results = {"posterior": _odds_block(result), "lrs": [_lr_block(lr) for lr in lrs]}
    return results, _kv_table(_odds_entries(result) + _lr_entries(lrs))


def _run_yellin(doc: ScenarioDocument, params: StrictModel) -> tuple[dict[str, Any], dict[str, Any]]:
    assert isinstance(params, YellinParams)
    if doc.output.conventions:
        raise ConventionError("the search posterior has no likelihood-ratio decomposition")
    prob = classical.yellin_posterior(params.N, params.p)
    odds = odds_from_probability(prob)
    results = {"probability": prob, "odds": _num(odds)}
    entries = [("posterior probability", prob), ("posterior odds", _num(odds))]
    return results, _kv_table(entries)


def _run_biased_search(doc: ScenarioDocument, params: StrictModel) -> tuple[dict[str, Any], dict[str, Any]]:
    assert isinstance(params, DependenceParams)
    spec = params.build(RatioKind.BIAS_SIGMA)
    result = dependence.biased_search_odds(spec)
    selection = dependence.selection_posterior(spec)
    results = {"posterior": _odds_block(result), "selection_posterior": selection}
    entries = _odds_entries(result)
    if result.lr is not None:
        entries += _lr_entries([result.lr])
    entries.append(("pre-match selection posterior", selection))
    return results, _kv_table(entries)


def _run_correlated(doc: ScenarioDocument, params: StrictModel) -> tuple[dict[str, Any], dict[str, Any]]:
    assert isinstance(params, CorrelatedParams)
    spec = params.build(RatioKind.CORRELATION_C)
    conditioning = dependence.DependenceConditioning(params.conditioning)
    result = dependence.correlated_odds(spec, conditioning)
    results: dict[str, Any] = {"posterior": _odds_block(result)}
    entries = _odds_entries(result)
    if result.lr is not None:
        entries += _lr_entries([result.lr])
        if result.correction_factor is not None:
            effective = result.lr.value * result.correction_factor
            results["effective_lr"] = _num(effective)
            entries.append(("effective LR after correction", _num(effective)))
    return results, _kv_table(entries)


def _run_bias_to_correlation(doc: ScenarioDocument, params: StrictModel) -> tuple[dict[str, Any], dict[str, Any]]:
    assert isinstance(params, DependenceParams)
    spec = params.build(RatioKind.BIAS_SIGMA)
    converted = dependence.bias_correlation_equivalent(spec)
    original = dependence.biased_search_odds(spec)
    equivalent = dependence.correlated_odds(converted)
    results = {
        "converted_groups": [
            {"count": g.count, "prior_given_I": g.prior_given_I,
             "ratio": g.ratio, "freq": g.freq}
            for g in converted.groups
        ],
        "original_odds": _num(original.odds),
        "converted_odds": _num(equivalent.odds),
    }
    entries: list[tuple[str, Any]] = [
        (f"group {i}: bearer probability given the offender matches", g.ratio)
        for i, g in enumerate(converted.groups)
    ]
    entries.append(("original posterior odds", _num(original.odds)))
    entries.append(("converted posterior odds", _num(equivalent.odds)))
    return results, _kv_table(entries)


def _run_hetero(doc: ScenarioDocument, params: StrictModel) -> tuple[dict[str, Any], dict[str, Any]]:
    assert isinstance(params, HeteroParams)
    model = _build_model(params.subpopulations)
    alphas = subpop.alpha_from_beta(model)
    results: dict[str, Any] = {"alphas": [float(a) for a in alphas]}
    entries: list[tuple[str, Any]] = [
        (f"alpha (offender in group {i})", float(a)) for i, a in enumerate(alphas)
    ]
    if params.marginal:
        prob = subpop.hetero_posterior_marginal(model)
        results["marginal_probability"] = prob
        entries.append(("marginal posterior probability", prob))
        return results, _kv_table(entries)
    assert params.s_index is not None
    result = subpop.hetero_posterior_odds(model, params.s_index)
    lrs = [subpop.hetero_lr(model, params.s_index, convention)
           for convention in _requested_conventions(doc, [Convention.CONDITIONAL_ON_I])]
    results["posterior"] = _odds_block(result)
    results["lrs"] = [_lr_block(lr) for lr in lrs]
    return results, _kv_table(entries + _odds_entries(result) + _lr_entries(lrs))


def _run_uncertain(doc: ScenarioDocument, params: StrictModel) -> tuple[dict[str, Any], dict[str, Any]]:
    assert isinstance(params, UncertainParams)
    density = params.density.build_density()
    result = uncertain.uncertain_posterior(params.N, density)
    moments = uncertain.frequency_moments(density, params.N)
    if doc.output.conventions and doc.output.conventions != ["conditional_on_I"]:
        raise ConventionError(
            "the homogeneous uncertain posterior supports only the conditional_on_I convention"
        )
    results = {
        "posterior": _odds_block(result),
        "moments": {"p": moments.p, "sigma2": moments.sigma2,
                    "p_prime": moments.p_prime, "p_double_prime": moments.p_double_prime},
    }
    entries = _odds_entries(result)
    if result.lr is not None:
        entries += _lr_entries([result.lr])
    entries += [
        ("mean frequency (no conditioning)", moments.p),
        ("frequency variance", moments.sigma2),
        ("mean frequency given the trace", moments.p_prime),
        ("mean frequency given trace and match", moments.p_double_prime),
    ]
    return results, _kv_table(entries)


def _run_uncertain_subpop(doc: ScenarioDocument, params: StrictModel) -> tuple[dict[str, Any], dict[str, Any]]:
    assert isinstance(params, UncertainSubpopParams)
    model = _build_model(params.subpopulations)
    prob = uncertain.uncertain_subpop_posterior(model, params.s_index, large_n=params.large_n)
    within = uncertain.within_subpop_posterior(model, params.s_index)
    lrs = [uncertain.uncertain_subpop_lr(model, params.s_index, convention, large_n=params.large_n)
           for convention in _requested_conventions(doc, [Convention.CONDITIONAL_ON_I])]
    results = {
        "probability": prob,
        "within_group_probability": within,
        "lrs": [_lr_block(lr) for lr in lrs],
    }
    entries = [("posterior probability", prob),
               ("posterior probability within the suspect's group", within)]
    return results, _kv_table(entries + _lr_entries(lrs))


def _run_membership(doc: ScenarioDocument, params: StrictModel) -> tuple[dict[str, Any], dict[str, Any]]:
    assert isinstance(params, MembershipParams)
    model = _build_model(params.subpopulations)
    member = uncertain.suspect_subpop_posterior(model)
    unknown = uncertain.unknown_subpop_posterior(model)
    naive = uncertain.naive_homogeneous_posterior(model)
    results = {
        "membership": [float(x) for x in member],
        "probability": unknown,
        "naive_probability": naive,
    }
    entries = [(f"suspect in group {i} given the match", float(x))
               for i, x in enumerate(member)]
    entries.append(("posterior probability (group unknown)", unknown))
    entries.append(("posterior probability ignoring groups", naive))
    return results, _kv_table(entries)


def _run_database(doc: ScenarioDocument, params: StrictModel) -> tuple[dict[str, Any], dict[str, Any]]:
    assert isinstance(params, DatabaseParams)
    spec = params.build()
    focused = database.database_focused(spec)
    results: dict[str, Any] = {"database_posterior": _odds_block(focused)}
    entries = [("offender in the database: " + k, v) for k, v in _odds_entries(focused)]
    if focused.lr is not None:
        entries += _lr_entries([focused.lr])
    if params.target is not None:
        individual = database.individual_focused(spec, params.target)
        results["individual_posterior"] = _odds_block(individual)
        entries += [(f"match {params.target} is the offender: " + k, v)
                    for k, v in _odds_entries(individual)]
    return results, _kv_table(entries)


def _run_effectiveness(doc: ScenarioDocument, params: StrictModel) -> tuple[dict[str, Any], dict[str, Any]]:
    assert isinstance(params, EffectivenessParams)
    result, p_unique = database.database_effectiveness(params.n, params.p, params.q)
    results = {"posterior": _odds_block(result), "p_unique": p_unique}
    entries = _odds_entries(result)
    if result.lr is not None:
        entries += _lr_entries([result.lr])
    entries.append(("probability of exactly one match", p_unique))
    return results, _kv_table(entries)


def _run_growth(doc: ScenarioDocument, params: StrictModel) -> tuple[dict[str, Any], dict[str, Any]]:
    assert isinstance(params, GrowthParams)
    model = GrowthModel(N=params.N, p=params.p, inclusion=Inclusion(params.inclusion))
    points = database.growth_curve(model, params.grid())
    rows = [[point.n, _num(point.odds), point.p_unique] for point in points]
    results = {"points": [{"n": point.n, "odds": _num(point.odds), "p_unique": point.p_unique}
                          for point in points]}
    return results, {"columns": ["n", "odds", "p_unique"], "rows": rows}


def _run_oracle(doc: ScenarioDocument, params: StrictModel) -> tuple[dict[str, Any], dict[str, Any]]:
    assert isinstance(params, OracleParams)
    spec = params.scenario.build()
    conditioning = tuple(params.conditioning) if params.conditioning is not None else None
    if params.method == "exact":
        estimate = oracle.exact_posterior(spec, event=params.event, conditioning=conditioning)
    else:
        estimate = oracle.mc_posterior(spec, event=params.event, conditioning=conditioning,
                                       trials=params.trials, seed=params.seed)
    results = {
        "value": estimate.value,
        "method": estimate.method,
        "trials": estimate.trials,
        "std_error": estimate.std_error,
        "seed": estimate.seed,
    }
    entries: list[tuple[str, Any]] = [("estimate", estimate.value), ("method", estimate.method)]
    if estimate.trials is not None:
        entries.append(("trials", estimate.trials))
    if estimate.std_error is not None:
        entries.append(("standard error", estimate.std_error))
    if estimate.seed is not None:
        entries.append(("seed", estimate.seed))
    return results, _kv_table(entries)


_HANDLERS: dict[str, Handler] = {
    "classical": _run_classical,
    "yellin": _run_yellin,
    "biased_search": _run_biased_search,
    "correlated": _run_correlated,
    "bias_to_correlation": _run_bias_to_correlation,
    "hetero": _run_hetero,
    "uncertain": _run_uncertain,
    "uncertain_subpop": _run_uncertain_subpop,
    "membership": _run_membership,
    "database": _run_database,
    "effectiveness": _run_effectiveness,
    "growth": _run_growth,
    "oracle": _run_oracle,
}


def _reproduce_payload(report: reproduce.ReproduceReport) -> dict[str, Any]:
    return {
        "target": report.target,
        "passed": report.all_passed(),
        "checks": [
            {
                "id": c.check_id,
                "label": c.label,
                "expected": c.expected,
                "computed": c.computed,
                "tolerance": c.tolerance,
                "mode": c.mode,
                "passed": c.passed,
            }
            for c in report.checks
        ],
        "table": {"columns": list(report.table_columns),
                  "rows": [list(r) for r in report.table_rows]},
    }


def create_app() -> FastAPI:
    app = FastAPI(title="islandodds", version=__version__)

    @app.exception_handler(IslandOddsError)
    async def _domain_error(request: Request, exc: IslandOddsError) -> JSONResponse:
        status = 422 if isinstance(exc, _VALIDATION_ERRORS) else 400
        return JSONResponse(status_code=status,
                            content={"error": str(exc), "type": type(exc).__name__})

    @app.get("/v1/health")
    async def health() -> dict[str, str]:
        return {"status": "ok", "version": __version__}

    @app.post("/v1/run")
    async def run(document: ScenarioDocument) -> JSONResponse:
        try:
            params = _PARAM_MODELS[document.variant].model_validate(document.parameters)
        except ValidationError as exc:
            return JSONResponse(status_code=422, content={
                "error": f"invalid parameters for variant {document.variant!r}",
                "type": "ValidationError",
                "detail": [
                    {"loc": list(err["loc"]), "msg": err["msg"]} for err in exc.errors()
                ],
            })
        results, table = _HANDLERS[document.variant](document, params)
        return JSONResponse(content={
            "variant": document.variant,
            "results": results,
            "table": table,
        })

    @app.get("/v1/reproduce/{target}")
    async def run_reproduce(target: str, resolution: int = uncertain.DEFAULT_RESOLUTION) -> JSONResponse:
        report = reproduce.run_target(target, resolution=resolution)
        return JSONResponse(content=_reproduce_payload(report))

    return app


app = create_app()
