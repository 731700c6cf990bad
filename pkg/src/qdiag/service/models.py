"""Request/response schemas of the session service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

from ..logic import EntailmentType
from ..measures import QCMKind, QCMSpec, QSMKind, QSMSpec
from ..session import SessionConfig


class DPIDocument(BaseModel):
    """Wire form of a diagnosis problem instance; formulas are grammar strings."""

    components: list[str]
    behaviors: dict[str, str]
    sd_extra: list[str] = Field(default_factory=list)
    obs: list[str] = Field(default_factory=list)
    pos: list[list[str]] = Field(default_factory=list)
    neg: list[list[str]] = Field(default_factory=list)
    fault_probs: dict[str, float] = Field(default_factory=dict)


class SessionConfigModel(BaseModel):
    qsm: Literal["ent", "spl"] = "ent"
    qcm: Literal["sum", "max", "card"] = "card"
    tm: float = Field(default=0.0, ge=0.0)
    enhance: bool = False
    et: list[Literal["atoms", "defclause"]] = Field(default_factory=lambda: ["defclause"])
    leading: int = Field(default=9, ge=2)
    max_queries: int = Field(default=50, ge=1)
    seed: int = 0

    def to_config(self) -> SessionConfig:
        return SessionConfig(
            qsm=QSMSpec(kind=QSMKind(self.qsm), threshold=self.tm),
            qcm=QCMSpec(kind=QCMKind(self.qcm)),
            enhance=self.enhance,
            et=frozenset(EntailmentType(v) for v in self.et),
            leading_count=self.leading,
            max_queries=self.max_queries,
            rng_seed=self.seed,
        )


class CreateSessionRequest(BaseModel):
    dpi: DPIDocument
    config: SessionConfigModel = Field(default_factory=SessionConfigModel)


class DiagnosisModel(BaseModel):
    id: str
    components: list[str]
    probability: float


class PartitionModel(BaseModel):
    """Diagnosis ids by predicted outcome: what each answer would eliminate."""

    dplus: list[str]
    dminus: list[str]
    dzero: list[str] = Field(default_factory=list)


class ScoresModel(BaseModel):
    m_value: float
    c_value: float
    p_true: float
    reasoner_calls: int
    time_p1p2_ms: float
    time_p3_ms: float


class QueryModel(BaseModel):
    sentences: list[str]
    sentence_costs: dict[str, float]
    components: list[str] | None = None


class PendingQueryModel(BaseModel):
    query: QueryModel
    partition: PartitionModel
    scores: ScoresModel


class SessionView(BaseModel):
    session_id: str
    status: Literal["querying", "awaiting-answer", "converged"]
    converged: bool
    diagnoses: list[DiagnosisModel]
    pending: PendingQueryModel | None = None
    queries_asked: int
    max_queries: int


class AnswerRequest(BaseModel):
    answer: bool


class HistoryEntryModel(BaseModel):
    query: QueryModel
    partition: PartitionModel
    scores: ScoresModel
    answer: bool
    diagnoses_before: list[DiagnosisModel]


class HistoryModel(BaseModel):
    session_id: str
    entries: list[HistoryEntryModel]


class ErrorModel(BaseModel):
    detail: str
