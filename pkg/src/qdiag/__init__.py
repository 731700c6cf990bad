"""Sequential model-based diagnosis with optimized measurement queries."""

from .diagnosis import (
    Diagnosis,
    DiagnosisOrder,
    DiagnosisSet,
    compute_diagnoses,
    diagnosis_probabilities,
    min_conflict,
)
from .dpi import DPI, BehSet, beh_set, behavior_kb, build_dpi, load_dpi, serialize_dpi
from .logic import (
    EntailmentType,
    Formula,
    InferenceCounter,
    Reasoner,
    parse_formula,
)
from .measures import QCMKind, QCMSpec, QSMKind, QSMSpec, outcome_probability, qcm_value, qsm_value
from .p1 import optimize_qpartition
from .p2 import optimize_query_for_qpartition
from .p3 import expand_query, opti_minimize_query
from .qspace import (
    QPartition,
    Query,
    canonical_query,
    disc_sentences,
    enumerate_cqps,
    initial_successors,
    partition_canonical,
    partition_reasoned,
    successors,
    trait_classes,
)
from .session import (
    SessionConfig,
    SessionState,
    SimulatedOracle,
    apply_answer,
    new_session,
    next_query,
    run_session,
)

__version__ = "0.1.0"

__all__ = [
    "DPI",
    "BehSet",
    "Diagnosis",
    "DiagnosisOrder",
    "DiagnosisSet",
    "EntailmentType",
    "Formula",
    "InferenceCounter",
    "QCMKind",
    "QCMSpec",
    "QPartition",
    "QSMKind",
    "QSMSpec",
    "Query",
    "Reasoner",
    "SessionConfig",
    "SessionState",
    "SimulatedOracle",
    "apply_answer",
    "beh_set",
    "behavior_kb",
    "build_dpi",
    "canonical_query",
    "compute_diagnoses",
    "diagnosis_probabilities",
    "disc_sentences",
    "enumerate_cqps",
    "expand_query",
    "initial_successors",
    "load_dpi",
    "min_conflict",
    "new_session",
    "next_query",
    "opti_minimize_query",
    "optimize_qpartition",
    "optimize_query_for_qpartition",
    "outcome_probability",
    "parse_formula",
    "partition_canonical",
    "partition_reasoned",
    "qcm_value",
    "qsm_value",
    "run_session",
    "serialize_dpi",
    "successors",
    "trait_classes",
]
