"""Query selection measures (partition quality) and query cost measures."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .diagnosis import DiagnosisSet
from .logic import Formula, literal_cost
from .qspace import QPartition, Query

__all__ = [
    "QSMKind",
    "QSMSpec",
    "QCMKind",
    "QCMSpec",
    "outcome_probability",
    "qsm_value",
    "qcm_value",
]


class QSMKind(Enum):
    ENT = "ent"
    SPL = "spl"


class QCMKind(Enum):
    SUM = "sum"
    MAX = "max"
    CARD = "card"


@dataclass(frozen=True)
class QSMSpec:
    """A selection measure with its optimality threshold.

    A partition scoring within ``threshold`` of the measure's attainable
    optimum is regarded optimal.
    """

    kind: QSMKind
    threshold: float = 0.0

    def __post_init__(self) -> None:
        if self.threshold < 0:
            raise ValueError("threshold must be non-negative")

    def optimum(self, n_diagnoses: int) -> float:
        if self.kind is QSMKind.ENT:
            return 0.0
        return float(n_diagnoses % 2)

    def is_optimal(self, value: float, n_diagnoses: int) -> bool:
        return abs(value - self.optimum(n_diagnoses)) <= self.threshold


@dataclass(frozen=True)
class QCMSpec:
    """A cost measure over queries with a per-sentence cost function.

    The default sentence cost is the number of distinct literals in the
    sentence's clausal form, which is strictly positive.
    """

    kind: QCMKind
    sentence_cost: Callable[[Formula], float] = field(default=literal_cost)


def outcome_probability(p: QPartition, probs: DiagnosisSet) -> float:
    """Probability of a positive answer: accepted mass plus half the undecided."""
    known = set(probs.probabilities)
    if p.diagnoses - known:
        raise ValueError("partition contains diagnoses without probabilities")
    positive = sum(probs.probability(d) for d in p.dplus)
    undecided = sum(probs.probability(d) for d in p.dzero)
    return positive + 0.5 * undecided


def _plogp(x: float) -> float:
    return x * math.log2(x) if x > 0.0 else 0.0


def qsm_value(spec: QSMSpec, p: QPartition, probs: DiagnosisSet | None = None) -> float:
    """Score a partition; lower is better for both measures.

    ENT is the binary information loss 1 + p log2 p + (1-p) log2 (1-p) of the
    answer distribution, 0 at an even split.  SPL counts the imbalance of the
    two decided sides plus every undecided diagnosis.
    """
    if spec.kind is QSMKind.ENT:
        if probs is None:
            raise ValueError("ENT requires diagnosis probabilities")
        p_true = outcome_probability(p, probs)
        return 1.0 + _plogp(p_true) + _plogp(1.0 - p_true)
    return float(abs(len(p.dplus) - len(p.dminus)) + len(p.dzero))


def qcm_value(spec: QCMSpec, q: Query) -> float:
    """Cost of a query under the chosen measure."""
    if not q.sentences:
        raise ValueError("cannot cost an empty query")
    if spec.kind is QCMKind.CARD:
        return float(len(q.sentences))
    costs = [spec.sentence_cost(f) for f in q.sentences]
    return float(max(costs)) if spec.kind is QCMKind.MAX else float(sum(costs))
