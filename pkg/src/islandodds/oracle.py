"""Brute-force verification engines: exact enumeration and rejection sampling.

Both engines work straight from the generative story: draw a frequency
configuration, draw who bears the trait, draw the offender, then pick the
person of interest by the declared selection protocol and condition on the
observed events.  Neither engine calls the closed-form modules; their value
is that they cannot share a formula's mistake.

Events are conjunctions of string terms:

    I             the offender bears the trait
    E             the selected person bears the trait
    G             the selected person is the offender
    S_def         the selection protocol produced someone
    S_eq:<x>      the selected person is individual x
    C_eq:<x>      the offender is individual x
    S_in:<g>      the selected person belongs to group g
    C_in:<g>      the offender belongs to group g
    C_in_db       the offender is a database member
    U_eq:<k>      exactly k inhabitants bear the trait
    DB_unique     exactly one database member bears the trait
    DB_count:<j>  exactly j database members bear the trait
    DB_first:<k>  the first k database members bear it and the rest do not
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .core import (
    CapacityError,
    ImpossibleConditioningError,
    InfeasibleConditioningError,
    InvalidValueError,
    check_probability,
)

__all__ = [
    "MAX_POPULATION",
    "MC_MAX_POPULATION",
    "MAX_ATOMS",
    "MAX_DATABASE",
    "FixedSuspect",
    "UniformSuspect",
    "CategoricalSuspect",
    "SequentialSearchSuspect",
    "BiasedSearchSuspect",
    "DatabaseSuspect",
    "ScenarioSpec",
    "OracleEstimate",
    "exact_posterior",
    "exact_event_probability",
    "joint_mass",
    "mc_posterior",
]

MAX_POPULATION = 20  # exact enumeration walks 2^M trait assignments
MC_MAX_POPULATION = 128  # bounds per-chunk memory for the sampling engine
MAX_ATOMS = 4
MAX_DATABASE = 8

_STAR = -1  # selection protocols that can fail to produce anyone yield this index

_NORM_TOL = 1e-9


@dataclass(frozen=True)
class FixedSuspect:
    """The person of interest is a fixed, named individual."""

    index: int


@dataclass(frozen=True)
class UniformSuspect:
    """The person of interest is drawn uniformly from the population."""


@dataclass(frozen=True)
class CategoricalSuspect:
    """The person of interest is drawn from an explicit distribution."""

    probs: tuple[float, ...]


@dataclass(frozen=True)
class SequentialSearchSuspect:
    """Inhabitants are examined in uniform random order; the first bearer is selected.

    If nobody bears the trait the selection is undefined (S_def is false).
    """


@dataclass(frozen=True)
class BiasedSearchSuspect:
    """Selection depends on who the offender is.

    ``weights[c][s]`` is proportional to the probability that individual s is
    selected when the offender is c; rows are normalized internally.  The
    draw is independent of the trait assignment, matching a search whose
    bias operates through case knowledge rather than through the trait.
    """

    weights: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class DatabaseSuspect:
    """The person of interest is the unique matching database member, if any."""


SuspectProtocol = Union[
    FixedSuspect,
    UniformSuspect,
    CategoricalSuspect,
    SequentialSearchSuspect,
    BiasedSearchSuspect,
    DatabaseSuspect,
]


@dataclass(frozen=True)
class ScenarioSpec:
    """A fully explicit probability space over one small population.

    ``atoms`` is a finite mixture: each entry is (weight, per-individual
    bearer probability vector); conditionally on the atom, individuals bear
    the trait independently.  ``criminal_prior`` is the unconditional law of
    the offender.  ``groups`` labels each individual with a group index and
    ``database`` lists the database members in match-report order, both
    optional.  ``event`` / ``conditioning`` record the canonical query for
    the scenario; callers may override them per call.
    """

    variant: str
    atoms: tuple[tuple[float, tuple[float, ...]], ...]
    criminal_prior: tuple[float, ...]
    suspect: SuspectProtocol
    groups: tuple[int, ...] | None = None
    database: tuple[int, ...] | None = None
    event: str = "G"
    conditioning: tuple[str, ...] = ("I", "E")

    def __post_init__(self) -> None:
        atoms = tuple((float(w), tuple(float(q) for q in qs)) for w, qs in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise InvalidValueError("at least one mixture atom is required")
        if len(atoms) > MAX_ATOMS:
            raise CapacityError(f"at most {MAX_ATOMS} mixture atoms are supported, got {len(atoms)}")
        m = len(atoms[0][1])
        if m < 1:
            raise InvalidValueError("the population must contain at least one individual")
        if m > MC_MAX_POPULATION:
            raise CapacityError(f"population size {m} exceeds the oracle cap {MC_MAX_POPULATION}")
        for w, qs in atoms:
            check_probability(w, "atom weight")
            if len(qs) != m:
                raise InvalidValueError("all atoms must cover the same population")
            for q in qs:
                check_probability(q, "bearer probability")
        if abs(math.fsum(w for w, _ in atoms) - 1.0) > _NORM_TOL:
            raise InvalidValueError("atom weights must sum to 1")

        prior = tuple(float(x) for x in self.criminal_prior)
        object.__setattr__(self, "criminal_prior", prior)
        if len(prior) != m:
            raise InvalidValueError("criminal prior length must equal the population size")
        for x in prior:
            check_probability(x, "criminal prior")
        if abs(math.fsum(prior) - 1.0) > _NORM_TOL:
            raise InvalidValueError("criminal prior must sum to 1")

        if self.groups is not None:
            groups = tuple(int(g) for g in self.groups)
            object.__setattr__(self, "groups", groups)
            if len(groups) != m:
                raise InvalidValueError("group labels must cover the whole population")
            if any(g < 0 for g in groups):
                raise InvalidValueError("group labels must be nonnegative")

        if self.database is not None:
            db = tuple(int(i) for i in self.database)
            object.__setattr__(self, "database", db)
            if len(db) > MAX_DATABASE:
                raise CapacityError(f"database size {len(db)} exceeds the oracle cap {MAX_DATABASE}")
            if len(set(db)) != len(db) or any(not (0 <= i < m) for i in db):
                raise InvalidValueError("database indices must be distinct members of the population")

        sus = self.suspect
        if isinstance(sus, FixedSuspect):
            if not (0 <= sus.index < m):
                raise InvalidValueError("fixed suspect index out of range")
        elif isinstance(sus, CategoricalSuspect):
            if len(sus.probs) != m:
                raise InvalidValueError("suspect distribution length must equal the population size")
            for x in sus.probs:
                check_probability(x, "suspect probability")
            if abs(math.fsum(sus.probs) - 1.0) > _NORM_TOL:
                raise InvalidValueError("suspect distribution must sum to 1")
        elif isinstance(sus, BiasedSearchSuspect):
            if len(sus.weights) != m or any(len(row) != m for row in sus.weights):
                raise InvalidValueError("biased-search weights must form a population-square matrix")
            for row in sus.weights:
                if any(w < 0 or math.isnan(w) for w in row):
                    raise InvalidValueError("biased-search weights must be nonnegative")
                if math.fsum(row) <= 0.0:
                    raise InvalidValueError("each biased-search row needs positive total weight")
        elif isinstance(sus, DatabaseSuspect):
            if self.database is None:
                raise InvalidValueError("a database suspect protocol needs database members")
        elif not isinstance(sus, (UniformSuspect, SequentialSearchSuspect)):
            raise InvalidValueError(f"unknown suspect protocol {sus!r}")

        object.__setattr__(self, "conditioning", tuple(self.conditioning))

    @property
    def population(self) -> int:
        return len(self.criminal_prior)


@dataclass(frozen=True)
class OracleEstimate:
    """A probability produced by one of the verification engines."""

    value: float
    method: str  # "exact" or "monte_carlo"
    trials: int | None = None
    std_error: float | None = None
    seed: int | None = None


def _parse_term(term: str) -> tuple[str, int | None]:
    if ":" in term:
        head, _, tail = term.partition(":")
        try:
            return head, int(tail)
        except ValueError:
            raise InvalidValueError(f"malformed event term {term!r}") from None
    return term, None


_PLAIN_TERMS = {"I", "E", "G", "S_def", "C_in_db", "DB_unique"}
_PARAM_TERMS = {"S_eq", "C_eq", "S_in", "C_in", "U_eq", "DB_count", "DB_first"}


def _validate_terms(terms: Iterable[str], spec: ScenarioSpec) -> tuple[tuple[str, int | None], ...]:
    parsed = []
    for term in terms:
        head, arg = _parse_term(term)
        if arg is None and head not in _PLAIN_TERMS:
            raise InvalidValueError(f"unknown event term {term!r}")
        if arg is not None and head not in _PARAM_TERMS:
            raise InvalidValueError(f"unknown event term {term!r}")
        if head in ("S_in", "C_in") and spec.groups is None:
            raise InvalidValueError(f"event {term!r} needs group labels on the scenario")
        if head in ("C_in_db", "DB_unique", "DB_count", "DB_first") and spec.database is None:
            raise InvalidValueError(f"event {term!r} needs a database on the scenario")
        parsed.append((head, arg))
    return tuple(parsed)


def _db_first_indicator(bits: list[np.ndarray], db: tuple[int, ...], k: int) -> np.ndarray:
    if not (0 <= k <= len(db)):
        raise InvalidValueError(f"DB_first count {k} out of range for database of size {len(db)}")
    ind = np.ones(bits[0].shape, dtype=bool)
    for j, member in enumerate(db):
        ind &= bits[member] if j < k else ~bits[member]
    return ind


def _exact_indicator(
    head: str,
    arg: int | None,
    c: int,
    s: int,
    bits: list[np.ndarray],
    counts: np.ndarray,
    db_counts: np.ndarray | None,
    spec: ScenarioSpec,
) -> bool | np.ndarray:
    if head == "I":
        return bits[c]
    if head == "E":
        return bits[s] if s != _STAR else False
    if head == "G":
        return s == c
    if head == "S_def":
        return s != _STAR
    if head == "S_eq":
        return s == arg
    if head == "C_eq":
        return c == arg
    if head == "S_in":
        return s != _STAR and spec.groups[s] == arg  # type: ignore[index]
    if head == "C_in":
        return spec.groups[c] == arg  # type: ignore[index]
    if head == "C_in_db":
        return c in spec.database  # type: ignore[operator]
    if head == "U_eq":
        return counts == arg
    if head == "DB_unique":
        return db_counts == 1  # type: ignore[return-value]
    if head == "DB_count":
        return db_counts == arg  # type: ignore[return-value]
    if head == "DB_first":
        return _db_first_indicator(bits, spec.database, int(arg))  # type: ignore[arg-type]
    raise InvalidValueError(f"unknown event term {head!r}")


def _conjunction(
    terms: tuple[tuple[str, int | None], ...],
    c: int,
    s: int,
    bits: list[np.ndarray],
    counts: np.ndarray,
    db_counts: np.ndarray | None,
    spec: ScenarioSpec,
    base: np.ndarray | bool = True,
) -> np.ndarray | bool:
    """AND together term indicators; scalar False short-circuits."""
    acc: np.ndarray | bool = base
    for head, arg in terms:
        ind = _exact_indicator(head, arg, c, s, bits, counts, db_counts, spec)
        if isinstance(ind, np.ndarray):
            acc = ind if acc is True else acc & ind
        elif not ind:
            return False
    return acc


def _selection_weights(
    spec: ScenarioSpec,
    c: int,
    bits: list[np.ndarray],
    counts: np.ndarray,
    db_counts: np.ndarray | None,
) -> list[tuple[int, float | np.ndarray]]:
    """Per-candidate selection probabilities given the offender and the trait assignment.

    Returns (candidate index, probability) with probabilities either scalars
    or per-assignment vectors; the _STAR entry carries the no-selection mass.
    Entries for every assignment sum to 1.
    """
    m = spec.population
    sus = spec.suspect
    if isinstance(sus, FixedSuspect):
        return [(sus.index, 1.0)]
    if isinstance(sus, UniformSuspect):
        return [(s, 1.0 / m) for s in range(m)]
    if isinstance(sus, CategoricalSuspect):
        return [(s, sus.probs[s]) for s in range(m) if sus.probs[s] > 0.0]
    if isinstance(sus, BiasedSearchSuspect):
        row = np.asarray(sus.weights[c], dtype=float)
        row = row / row.sum()
        return [(s, float(row[s])) for s in range(m) if row[s] > 0.0]
    if isinstance(sus, SequentialSearchSuspect):
        # in a uniform random order the first bearer is any given bearer with chance 1/U
        safe = np.where(counts > 0, counts, 1).astype(float)
        out: list[tuple[int, float | np.ndarray]] = [
            (s, np.where(bits[s], 1.0 / safe, 0.0)) for s in range(m)
        ]
        out.append((_STAR, (counts == 0).astype(float)))
        return out
    if isinstance(sus, DatabaseSuspect):
        unique = db_counts == 1  # type: ignore[operator]
        out = [(s, (unique & bits[s]).astype(float)) for s in spec.database]  # type: ignore[union-attr]
        out.append((_STAR, (~unique).astype(float)))
        return out
    raise InvalidValueError(f"unknown suspect protocol {sus!r}")


def _enumerate(
    spec: ScenarioSpec,
    event_terms: tuple[tuple[str, int | None], ...],
    given_terms: tuple[tuple[str, int | None], ...],
) -> tuple[float, float]:
    """Sum exact joint probabilities of (given) and (event AND given)."""
    m = spec.population
    if m > MAX_POPULATION:
        raise CapacityError(
            f"exact enumeration walks 2^M trait assignments and is capped at "
            f"M = {MAX_POPULATION}; got {m} (use mc_posterior)"
        )
    n_assign = 1 << m
    idx = np.arange(n_assign, dtype=np.uint32)
    bits = [((idx >> x) & 1).astype(bool) for x in range(m)]
    counts = np.zeros(n_assign, dtype=np.int64)
    for x in range(m):
        counts += bits[x]
    db_counts = None
    if spec.database is not None:
        db_counts = np.zeros(n_assign, dtype=np.int64)
        for x in spec.database:
            db_counts += bits[x]

    numerator = 0.0
    denominator = 0.0
    for weight, qs in spec.atoms:
        if weight == 0.0:
            continue
        assign_prob = np.ones(n_assign)
        for x in range(m):
            assign_prob *= np.where(bits[x], qs[x], 1.0 - qs[x])
        for c in range(m):
            pc = spec.criminal_prior[c]
            if pc == 0.0:
                continue
            for s, sel in _selection_weights(spec, c, bits, counts, db_counts):
                given_ind = _conjunction(given_terms, c, s, bits, counts, db_counts, spec)
                if given_ind is False:
                    continue
                sel_mass = assign_prob * sel
                if given_ind is not True:
                    sel_mass = sel_mass * given_ind
                term_given = weight * pc * float(sel_mass.sum())
                if term_given == 0.0:
                    continue
                denominator += term_given
                both_ind = _conjunction(
                    event_terms, c, s, bits, counts, db_counts, spec, base=given_ind
                )
                if both_ind is False:
                    continue
                if both_ind is True:
                    numerator += term_given
                else:
                    numerator += weight * pc * float((assign_prob * sel * both_ind).sum())
    return numerator, denominator


def exact_posterior(
    spec: ScenarioSpec,
    event: str | None = None,
    conditioning: Sequence[str] | None = None,
) -> OracleEstimate:
    """P(event | conditioning) by exact enumeration of the joint law."""
    event_terms = _validate_terms([event if event is not None else spec.event], spec)
    given = tuple(conditioning) if conditioning is not None else spec.conditioning
    given_terms = _validate_terms(given, spec)
    num, den = _enumerate(spec, event_terms, given_terms)
    if den <= 0.0:
        raise ImpossibleConditioningError(f"conditioning {given!r} has probability zero")
    return OracleEstimate(value=num / den, method="exact")


def exact_event_probability(spec: ScenarioSpec, event: str, conditioning: Sequence[str] = ()) -> float:
    """Convenience wrapper returning the bare probability."""
    return exact_posterior(spec, event=event, conditioning=conditioning).value


def joint_mass(spec: ScenarioSpec) -> float:
    """Total probability of the full joint space; should be 1 up to roundoff."""
    _, den = _enumerate(spec, (), ())
    return den


_PILOT_TRIALS = 10_000
_MIN_ACCEPTANCE = 1e-4
_MIN_TRIALS = 10_000
_WORDS_PER_ADVANCE = 4  # Philox emits four 64-bit words per counter step


def _trial_width(spec: ScenarioSpec) -> int:
    m = spec.population
    sus = spec.suspect
    if isinstance(sus, (FixedSuspect, DatabaseSuspect)):
        extra = 0
    elif isinstance(sus, SequentialSearchSuspect):
        extra = m  # one ordering key per inhabitant
    else:
        extra = 1
    return 2 + m + extra  # atom choice + bearer draws + offender draw + selection draws


def _uniform_rows(seed: int, first_row: int, n_rows: int, width_padded: int) -> np.ndarray:
    bit_gen = np.random.Philox(key=seed)
    bit_gen.advance(first_row * width_padded // _WORDS_PER_ADVANCE)
    return np.random.Generator(bit_gen).random((n_rows, width_padded))


def _mc_indicator(
    head: str,
    arg: int | None,
    bearers: np.ndarray,
    criminal: np.ndarray,
    selected: np.ndarray,
    spec: ScenarioSpec,
) -> np.ndarray:
    rows = np.arange(bearers.shape[0])
    defined = selected >= 0
    safe_sel = np.where(defined, selected, 0)
    if head == "I":
        return bearers[rows, criminal]
    if head == "E":
        return defined & bearers[rows, safe_sel]
    if head == "G":
        return defined & (selected == criminal)
    if head == "S_def":
        return defined
    if head == "S_eq":
        return defined & (selected == arg)
    if head == "C_eq":
        return criminal == arg
    if head == "S_in":
        labels = np.asarray(spec.groups)
        return defined & (labels[safe_sel] == arg)
    if head == "C_in":
        labels = np.asarray(spec.groups)
        return labels[criminal] == arg
    if head == "C_in_db":
        in_db = np.zeros(spec.population, dtype=bool)
        in_db[list(spec.database)] = True  # type: ignore[arg-type]
        return in_db[criminal]
    if head in ("DB_unique", "DB_count"):
        counts = bearers[:, list(spec.database)].sum(axis=1)  # type: ignore[arg-type]
        return counts == (1 if head == "DB_unique" else arg)
    if head == "DB_first":
        db = list(spec.database)  # type: ignore[arg-type]
        k = int(arg)  # type: ignore[arg-type]
        if not (0 <= k <= len(db)):
            raise InvalidValueError(f"DB_first count {k} out of range for database of size {len(db)}")
        ind = np.ones(bearers.shape[0], dtype=bool)
        for j, member in enumerate(db):
            ind &= bearers[:, member] if j < k else ~bearers[:, member]
        return ind
    raise InvalidValueError(f"unknown event term {head!r}")


def _mc_chunk(
    spec: ScenarioSpec,
    uniforms: np.ndarray,
    cum_weights: np.ndarray,
    freq_table: np.ndarray,
    cum_prior: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Decode one block of uniforms into (bearers, criminal, selected)."""
    m = spec.population
    n = uniforms.shape[0]
    atom = np.searchsorted(cum_weights, uniforms[:, 0], side="right").clip(max=len(cum_weights) - 1)
    bearers = uniforms[:, 1 : m + 1] < freq_table[atom]
    criminal = np.searchsorted(cum_prior, uniforms[:, m + 1], side="right").clip(max=m - 1)

    sus = spec.suspect
    if isinstance(sus, FixedSuspect):
        selected = np.full(n, sus.index, dtype=np.int64)
    elif isinstance(sus, UniformSuspect):
        selected = np.minimum((uniforms[:, m + 2] * m).astype(np.int64), m - 1)
    elif isinstance(sus, CategoricalSuspect):
        cum = np.cumsum(sus.probs)
        selected = np.searchsorted(cum, uniforms[:, m + 2], side="right").clip(max=m - 1)
    elif isinstance(sus, BiasedSearchSuspect):
        w = np.asarray(sus.weights, dtype=float)
        cum = np.cumsum(w / w.sum(axis=1, keepdims=True), axis=1)
        selected = (cum[criminal] <= uniforms[:, m + 2 : m + 3]).sum(axis=1).clip(max=m - 1)
    elif isinstance(sus, SequentialSearchSuspect):
        keys = np.where(bearers, uniforms[:, m + 2 : 2 * m + 2], 2.0)
        selected = np.where(bearers.any(axis=1), keys.argmin(axis=1), _STAR)
    elif isinstance(sus, DatabaseSuspect):
        db = np.asarray(spec.database, dtype=np.int64)
        db_bearers = bearers[:, db]
        unique = db_bearers.sum(axis=1) == 1
        selected = np.where(unique, db[db_bearers.argmax(axis=1)], _STAR)
    else:
        raise InvalidValueError(f"unknown suspect protocol {sus!r}")
    return bearers, criminal, selected


def mc_posterior(
    spec: ScenarioSpec,
    event: str | None = None,
    conditioning: Sequence[str] | None = None,
    trials: int = 1_000_000,
    seed: int | None = None,
    chunk: int = 65_536,
) -> OracleEstimate:
    """P(event | conditioning) by rejection sampling of the generative story.

    Reproducible for a fixed (seed, trials) pair regardless of chunk size:
    trial t always consumes the same counter-indexed block of the stream, so
    chunks (or parallel workers) can decode disjoint trial ranges
    independently.  A pilot over the first 10^4 trials aborts when the
    conditioning event is accepted too rarely for rejection sampling.
    """
    if seed is None:
        raise InvalidValueError("mc_posterior requires an explicit seed")
    if trials < _MIN_TRIALS:
        raise InvalidValueError(f"at least {_MIN_TRIALS} trials are required, got {trials}")
    event_terms = _validate_terms([event if event is not None else spec.event], spec)
    given = tuple(conditioning) if conditioning is not None else spec.conditioning
    given_terms = _validate_terms(given, spec)

    width = _trial_width(spec)
    width_padded = -(-width // _WORDS_PER_ADVANCE) * _WORDS_PER_ADVANCE
    cum_weights = np.cumsum([w for w, _ in spec.atoms])
    freq_table = np.asarray([qs for _, qs in spec.atoms], dtype=float)
    cum_prior = np.cumsum(spec.criminal_prior)

    accepted = 0
    hits = 0
    done = 0
    # the pilot block is decoded exactly like any other chunk; its trials count
    block_edges = [_PILOT_TRIALS] if trials > _PILOT_TRIALS else []
    row = 0
    while done < trials:
        edge = block_edges.pop(0) if block_edges else min(done + chunk, trials)
        n_rows = edge - done
        uniforms = _uniform_rows(seed, row, n_rows, width_padded)
        bearers, criminal, selected = _mc_chunk(spec, uniforms, cum_weights, freq_table, cum_prior)
        keep = np.ones(n_rows, dtype=bool)
        for head, arg in given_terms:
            keep &= _mc_indicator(head, arg, bearers, criminal, selected, spec)
        hit = keep.copy()
        for head, arg in event_terms:
            hit &= _mc_indicator(head, arg, bearers, criminal, selected, spec)
        accepted += int(keep.sum())
        hits += int(hit.sum())
        done = edge
        row += n_rows
        if done >= _PILOT_TRIALS and done - n_rows < _PILOT_TRIALS:
            rate = accepted / done
            if rate < _MIN_ACCEPTANCE:
                raise InfeasibleConditioningError(
                    f"pilot acceptance rate {rate:.2e} over {done} trials is below "
                    f"{_MIN_ACCEPTANCE:.0e}; use exact_posterior or the closed forms"
                )
    if accepted == 0:
        raise InfeasibleConditioningError("no trial satisfied the conditioning event")
    value = hits / accepted
    std_error = math.sqrt(value * (1.0 - value) / accepted)
    return OracleEstimate(
        value=value,
        method="monte_carlo",
        trials=trials,
        std_error=std_error,
        seed=seed,
    )
