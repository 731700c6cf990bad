from __future__ import annotations

import pytest

from qdiag.diagnosis import DiagnosisSet, diag_key, diagnosis_probabilities
from qdiag.dpi import DPI, load_dpi

TAB1_DOC = {
    "components": ["c1", "c2", "c3", "c4", "c5"],
    "behaviors": {
        "c1": "A -> B & L",
        "c2": "A -> F",
        "c3": "B | F -> H",
        "c4": "L -> H",
        "c5": "!H -> G & !A",
    },
    "sd_extra": [],
    "obs": [],
    "pos": [],
    "neg": [["A -> H"]],
    "fault_probs": {},
}

D1 = frozenset({"c1", "c2", "c5"})
D2 = frozenset({"c1", "c3", "c5"})
D3 = frozenset({"c3", "c4", "c5"})


@pytest.fixture(scope="session")
def tab1() -> DPI:
    return load_dpi(TAB1_DOC)


@pytest.fixture(scope="session")
def tab1_diagnoses(tab1: DPI) -> DiagnosisSet:
    return diagnosis_probabilities(tab1, sorted([D1, D2, D3], key=diag_key))
