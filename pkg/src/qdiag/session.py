"""Sequential diagnosis sessions: propose queries, apply answers, converge."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Protocol

from .diagnosis import (
    Diagnosis,
    DiagnosisOrder,
    DiagnosisSet,
    compute_diagnoses,
    diagnosis_probabilities,
)
from .dpi import DPI, behavior_kb
from .logic import EntailmentType, Reasoner
from .measures import (
    QCMKind,
    QCMSpec,
    QSMKind,
    QSMSpec,
    outcome_probability,
    qcm_value,
    qsm_value,
)
from .p1 import optimize_qpartition
from .p2 import optimize_query_for_qpartition
from .p3 import expand_query, opti_minimize_query
from .qspace import QPartition, Query

__all__ = [
    "SessionConfig",
    "SessionState",
    "HistoryEntry",
    "QueryScores",
    "Oracle",
    "SimulatedOracle",
    "StaleQueryError",
    "new_session",
    "next_query",
    "apply_answer",
    "run_session",
]


class StaleQueryError(ValueError):
    """An answer was supplied for a query that is not the pending one."""


@dataclass(frozen=True)
class SessionConfig:
    qsm: QSMSpec = QSMSpec(kind=QSMKind.ENT, threshold=0.0)
    qcm: QCMSpec = QCMSpec(kind=QCMKind.CARD)
    enhance: bool = False
    et: frozenset[EntailmentType] = frozenset({EntailmentType.SINGLETON_BODY_DEFINITE})
    leading_count: int = 9
    max_queries: int = 50
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.leading_count < 2:
            raise ValueError("leading_count must be at least 2")
        if self.enhance and not self.et:
            raise ValueError("enhancement requires at least one entailment type")


@dataclass(frozen=True)
class QueryScores:
    m_value: float
    c_value: float
    p_true: float
    reasoner_calls: int
    time_p1p2_s: float
    time_p3_s: float


@dataclass
class HistoryEntry:
    query: Query
    partition: QPartition
    scores: QueryScores
    diagnoses_before: DiagnosisSet
    answer: bool | None = None


@dataclass
class SessionState:
    """Mutable state of one diagnosis session; owns its reasoner and counters.

    The measurement sets of the underlying problem instance only ever grow;
    every answer narrows the leading diagnoses to the side it left alive.
    """

    dpi: DPI
    diagnoses: DiagnosisSet
    reasoner: Reasoner
    history: list[HistoryEntry] = field(default_factory=list)
    pending: HistoryEntry | None = None
    converged: bool = False
    rounds: int = 0


class Oracle(Protocol):
    def answer(self, query: Query) -> bool: ...


@dataclass
class SimulatedOracle:
    """Answers deterministically as if ``actual`` were the true fault state:
    positive exactly when the actual behavior KB entails the whole query."""

    dpi: DPI
    actual: Diagnosis
    reasoner: Reasoner | None = None

    def answer(self, query: Query) -> bool:
        reasoner = self.reasoner or Reasoner()
        return reasoner.entails(behavior_kb(self.dpi, self.actual), query.sentences)


def _recompute(dpi: DPI, config: SessionConfig, reasoner: Reasoner, round_no: int) -> DiagnosisSet:
    return compute_diagnoses(
        dpi,
        max_count=config.leading_count,
        order=DiagnosisOrder.UNIFORM_COST_PROBABILITY,
        rng_seed=config.rng_seed + round_no,
        reasoner=reasoner,
    )


def new_session(dpi: DPI, config: SessionConfig, reasoner: Reasoner | None = None) -> SessionState:
    reasoner = reasoner or Reasoner()
    diagnoses = _recompute(dpi, config, reasoner, 0)
    state = SessionState(dpi=dpi, diagnoses=diagnoses, reasoner=reasoner)
    state.converged = len(diagnoses) == 1
    return state


def next_query(state: SessionState, config: SessionConfig) -> tuple[Query, QPartition, QueryScores]:
    """Run the optimized query pipeline against the current leading diagnoses.

    Without enhancement the query is assembled purely from behavior sentences
    and the reasoner is untouched; with enhancement the expansion and
    minimization consult it.
    """
    if len(state.diagnoses) < 2:
        raise ValueError("session needs at least two leading diagnoses to query")
    if state.pending is not None:
        entry = state.pending
        return entry.query, entry.partition, entry.scores

    calls_before = state.reasoner.calls
    started = time.perf_counter()
    partition, _ = optimize_qpartition(state.dpi, state.diagnoses, config.qsm)
    query = optimize_query_for_qpartition(state.dpi, partition, config.qcm)
    p1p2_time = time.perf_counter() - started

    p3_time = 0.0
    if config.enhance:
        started = time.perf_counter()
        expansion = expand_query(
            state.dpi, state.diagnoses, partition, config.et, state.reasoner, config.qcm
        )
        query = opti_minimize_query(state.dpi, state.diagnoses, partition, expansion, state.reasoner)
        p3_time = time.perf_counter() - started

    scores = QueryScores(
        m_value=qsm_value(config.qsm, partition, state.diagnoses),
        c_value=qcm_value(config.qcm, query),
        p_true=outcome_probability(partition, state.diagnoses),
        reasoner_calls=state.reasoner.calls - calls_before,
        time_p1p2_s=p1p2_time,
        time_p3_s=p3_time,
    )
    entry = HistoryEntry(
        query=query,
        partition=partition,
        scores=scores,
        diagnoses_before=state.diagnoses,
    )
    state.pending = entry
    return query, partition, scores


def apply_answer(state: SessionState, query: Query, answer: bool, config: SessionConfig) -> SessionState:
    """Fold the oracle's verdict into the measurements and narrow the leading set.

    A positive answer extends the positive measurements and invalidates the
    partition's rejected side; a negative one extends the negative
    measurements and invalidates the accepted side.  Survivors are re-checked
    against the grown problem instance and their probabilities renormalized;
    one survivor means convergence.
    """
    if state.pending is None or state.pending.query != query:
        raise StaleQueryError("answered query is not the pending one")
    entry = state.pending
    if answer:
        grown = state.dpi.extended(pos=query.sentences)
        eliminated = frozenset(entry.partition.dminus)
    else:
        grown = state.dpi.extended(neg=query.sentences)
        eliminated = frozenset(entry.partition.dplus)
    survivors = [d for d in state.diagnoses if d not in eliminated]
    for diagnosis in survivors:
        kb = behavior_kb(grown, diagnosis)
        if not state.reasoner.is_consistent(kb) or any(
            state.reasoner.entails(kb, n) for n in grown.neg
        ):  # pragma: no cover - survivors provably stay valid
            raise RuntimeError(f"surviving diagnosis {sorted(diagnosis)} failed re-verification")

    entry.answer = answer
    state.history.append(entry)
    state.pending = None
    state.rounds += 1
    state.dpi = grown
    state.diagnoses = diagnosis_probabilities(grown, survivors)
    state.converged = len(survivors) == 1
    return state


def run_session(
    dpi: DPI,
    config: SessionConfig,
    oracle: Oracle,
    reasoner: Reasoner | None = None,
) -> SessionState:
    """Drive the propose/answer loop until one diagnosis remains or the
    query budget runs out (state returned with ``converged`` False then)."""
    state = new_session(dpi, config, reasoner)
    if isinstance(oracle, SimulatedOracle):
        _check_actual(dpi, oracle.actual, state.reasoner)
    while not state.converged and len(state.history) < config.max_queries:
        query, _, _ = next_query(state, config)
        apply_answer(state, query, oracle.answer(query), config)
    return state


def _check_actual(dpi: DPI, actual: Diagnosis, reasoner: Reasoner) -> None:
    kb = behavior_kb(dpi, actual)
    if not reasoner.is_consistent(kb) or any(reasoner.entails(kb, n) for n in dpi.neg):
        raise ValueError(f"planted diagnosis {sorted(actual)} does not explain the evidence")
