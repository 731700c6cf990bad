from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdiag.diagnosis import DiagnosisSet
from qdiag.dpi import beh_set
from qdiag.logic import parse_formula
from qdiag.measures import (
    QCMKind,
    QCMSpec,
    QSMKind,
    QSMSpec,
    outcome_probability,
    qcm_value,
    qsm_value,
)
from qdiag.qspace import QPartition, Query

from conftest import D1, D2, D3

P1 = QPartition.make([D1], [D2, D3])
P3 = QPartition.make([D2], [D1, D3])


def diag_set(p1: float, p2: float, p3: float) -> DiagnosisSet:
    return DiagnosisSet(diagnoses=(D1, D2, D3), probabilities={D1: p1, D2: p2, D3: p3})


def _ent_of(p_true: float) -> float:
    def plogp(x):
        return x * math.log2(x) if x else 0.0

    return 1.0 + plogp(p_true) + plogp(1.0 - p_true)


class TestOutcomeProbability:
    def test_uniform_single_accept(self, tab1_diagnoses):
        assert outcome_probability(P1, tab1_diagnoses) == pytest.approx(1 / 3)

    def test_everything_accepting(self, tab1_diagnoses):
        full = QPartition.make([D1, D2, D3], [])
        assert outcome_probability(full, tab1_diagnoses) == pytest.approx(1.0)

    def test_skewed_prior(self):
        probs = diag_set(0.45, 0.10, 0.45)
        assert outcome_probability(P3, probs) == pytest.approx(0.10)

    def test_undecided_mass_counts_half(self):
        p = QPartition.make([D1], [D2], [D3])
        probs = diag_set(0.2, 0.4, 0.4)
        assert outcome_probability(p, probs) == pytest.approx(0.2 + 0.5 * 0.4)

    def test_mismatched_probability_set(self, tab1):
        probs = DiagnosisSet(diagnoses=(D1,), probabilities={D1: 1.0})
        with pytest.raises(ValueError):
            outcome_probability(P1, probs)


class TestEntropyMeasure:
    SPEC = QSMSpec(kind=QSMKind.ENT)

    def test_one_of_three_uniform(self, tab1_diagnoses):
        # 1 + (1/3)log2(1/3) + (2/3)log2(2/3)
        expected = _ent_of(1 / 3)
        assert expected == pytest.approx(0.08170416594551044)
        assert qsm_value(self.SPEC, P1, tab1_diagnoses) == pytest.approx(expected)

    def test_even_split_is_optimal(self):
        probs = diag_set(0.5, 0.25, 0.25)
        assert qsm_value(self.SPEC, P1, probs) == pytest.approx(0.0)
        assert self.SPEC.is_optimal(0.0, 3)

    @given(st.floats(0.0, 1.0))
    def test_symmetric_and_bounded(self, p_true):
        assert _ent_of(p_true) == pytest.approx(_ent_of(1.0 - p_true))
        assert 0.0 <= _ent_of(p_true) <= 1.0 + 1e-12

    @given(st.floats(0.001, 0.499), st.floats(0.0005, 0.0995))
    def test_strictly_decreasing_below_half(self, p_true, bump):
        assert _ent_of(min(p_true + bump, 0.5)) < _ent_of(p_true)

    def test_optimum_is_zero(self):
        assert self.SPEC.optimum(3) == 0.0
        assert self.SPEC.optimum(4) == 0.0


class TestSplitInHalfMeasure:
    SPEC = QSMSpec(kind=QSMKind.SPL)

    def test_one_versus_two(self, tab1_diagnoses):
        assert qsm_value(self.SPEC, P1, tab1_diagnoses) == 1.0

    def test_swapping_sides_is_invariant(self, tab1_diagnoses):
        swapped = QPartition.make([D2, D3], [D1])
        assert qsm_value(self.SPEC, P1, tab1_diagnoses) == qsm_value(
            self.SPEC, swapped, tab1_diagnoses
        )

    def test_undecided_diagnoses_penalized(self):
        p = QPartition.make([D1], [D2], [D3])
        assert qsm_value(self.SPEC, p) == 1.0

    def test_optimum_follows_parity(self):
        assert self.SPEC.optimum(3) == 1.0
        assert self.SPEC.optimum(4) == 0.0

    def test_goal_predicate_uses_threshold(self):
        spec = QSMSpec(kind=QSMKind.SPL, threshold=1.0)
        assert spec.is_optimal(2.0, 3)
        assert not spec.is_optimal(2.5, 3)

    def test_negative_threshold_rejected(self):
        with pytest.raises(ValueError):
            QSMSpec(kind=QSMKind.SPL, threshold=-0.1)


class TestCostMeasures:
    def test_cardinality(self, tab1):
        q = Query.from_behaviors(beh_set(tab1, {"c3", "c4"}))
        assert qcm_value(QCMSpec(kind=QCMKind.CARD), q) == 2.0

    def test_literal_costs_sum_and_max(self, tab1):
        q = Query.from_behaviors(beh_set(tab1, {"c3", "c4"}))
        assert qcm_value(QCMSpec(kind=QCMKind.SUM), q) == 5.0
        assert qcm_value(QCMSpec(kind=QCMKind.MAX), q) == 3.0

    def test_singleton_query(self):
        q = Query(frozenset({parse_formula("F -> H")}))
        assert qcm_value(QCMSpec(kind=QCMKind.CARD), q) == 1.0
        assert qcm_value(QCMSpec(kind=QCMKind.SUM), q) == 2.0
        assert qcm_value(QCMSpec(kind=QCMKind.MAX), q) == 2.0

    def test_cardinality_is_sum_under_unit_costs(self, tab1):
        unit = QCMSpec(kind=QCMKind.SUM, sentence_cost=lambda f: 1.0)
        for comps in ({"c1"}, {"c2", "c3"}, {"c1", "c2", "c3", "c4"}):
            q = Query.from_behaviors(beh_set(tab1, comps))
            assert qcm_value(unit, q) == qcm_value(QCMSpec(kind=QCMKind.CARD), q)

    def test_empty_query_rejected(self):
        with pytest.raises(ValueError):
            qcm_value(QCMSpec(kind=QCMKind.CARD), Query(frozenset()))
