"""Phase three: widen the query with typed entailments, then minimize it.

Expansion adds every entailed sentence of the requested shapes that depends
on the canonical query (not on the background alone), which provably keeps
the partition intact.  Minimization then strips the widened query back to a
subset-minimal, partition-preserving core, preferring configured
cost-preferred sentences and otherwise cheap ones.  This is the only phase
that consults the inference engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .diagnosis import DiagnosisSet
from .dpi import DPI, behavior_kb
from .logic import (
    Atom,
    EntailmentType,
    Formula,
    Implies,
    Reasoner,
    kb_atoms,
    literal_cost,
)
from .measures import QCMSpec
from .qspace import QPartition, Query, canonical_query, partition_reasoned, union_of

__all__ = ["ExpansionResult", "expand_query", "opti_minimize_query", "reasoner_call_ceiling"]


@dataclass(frozen=True)
class ExpansionResult:
    """A widened query split into cost-preferred and dispreferred sentences.

    ``expansion`` is the full set of added entailments; it may overlap the
    base query, and ``q_expanded`` is the union of the two.
    """

    base_query: Query
    expansion: frozenset[Formula]
    q_expanded: Query
    preferred: frozenset[Formula]
    dispreferred: frozenset[Formula]
    costs: dict[Formula, float]
    partition: QPartition


def _matches_shape(formula: Formula, shape: EntailmentType) -> bool:
    if shape is EntailmentType.ATOMS:
        return isinstance(formula, Atom)
    return (
        isinstance(formula, Implies)
        and isinstance(formula.left, Atom)
        and isinstance(formula.right, Atom)
    )


def expand_query(
    dpi: DPI,
    d: DiagnosisSet,
    p: QPartition,
    et: Iterable[EntailmentType],
    reasoner: Reasoner | None = None,
    qcm: QCMSpec | None = None,
    preferred_shape: EntailmentType = EntailmentType.SINGLETON_BODY_DEFINITE,
) -> ExpansionResult:
    """Widen the partition's canonical query with entailments of shapes ``et``.

    The added sentences are those entailed by the background KB (all leading
    diagnoses' components assumed faulty) together with the canonical query
    but not by the background alone.  Sentences matching ``preferred_shape``
    are marked cost-preferred.
    """
    et = frozenset(et)
    if not et:
        raise ValueError("at least one entailment type is required for expansion")
    reasoner = reasoner or Reasoner()
    base = canonical_query(dpi, d, seed=p.dplus)
    if base is None:
        raise ValueError("partition has no canonical query")
    background = behavior_kb(dpi, union_of(d))
    combined = background | base.sentences
    if not reasoner.is_consistent(combined):
        raise ValueError("background KB together with the query is inconsistent")
    vocabulary = kb_atoms(combined)
    with_query = reasoner.enumerate_entailments(combined, et, vocabulary)
    without_query = reasoner.enumerate_entailments(background, et, vocabulary)
    expansion = with_query - without_query
    q_expanded = Query(sentences=base.sentences | expansion)
    preferred = frozenset(f for f in q_expanded.sentences if _matches_shape(f, preferred_shape))
    cost_fn = qcm.sentence_cost if qcm is not None else literal_cost
    costs = {f: cost_fn(f) for f in q_expanded.sentences}
    return ExpansionResult(
        base_query=base,
        expansion=expansion,
        q_expanded=q_expanded,
        preferred=preferred,
        dispreferred=q_expanded.sentences - preferred,
        costs=costs,
        partition=p,
    )


def opti_minimize_query(
    dpi: DPI,
    d: DiagnosisSet,
    p: QPartition,
    exp: ExpansionResult,
    reasoner: Reasoner | None = None,
) -> Query:
    """Subset-minimal partition-preserving core of the widened query.

    Divide-and-conquer over the element order [preferred, dispreferred by
    ascending cost], so a preferred-only core is returned whenever one
    exists, and otherwise the most expensive retained sentence is as cheap
    as possible.  Polynomially many inference calls in the query size.
    """
    if exp.partition != p:
        raise ValueError("expansion was produced for a different partition")
    reasoner = reasoner or Reasoner()

    def accepts(sentences: Iterable[Formula]) -> bool:
        sentences = frozenset(sentences)
        if not sentences:
            return False
        return partition_reasoned(dpi, d, sentences, reasoner) == p

    ordered = sorted(exp.preferred, key=lambda f: (exp.costs[f], str(f)))
    ordered += sorted(exp.dispreferred, key=lambda f: (exp.costs[f], str(f)))
    if not accepts(ordered):
        raise ValueError("widened query no longer realizes the partition")

    def minimize(base: list[Formula], delta: list[Formula], rest: list[Formula]) -> list[Formula]:
        if delta and accepts(base):
            return []
        if len(rest) == 1:
            return list(rest)
        half = len(rest) // 2
        first, second = rest[:half], rest[half:]
        need2 = minimize(base + first, first, second)
        need1 = minimize(base + need2, need2, first)
        return need1 + need2

    core = minimize([], [], ordered)
    return Query(sentences=frozenset(core))


def reasoner_call_ceiling(result_size: int, expanded_size: int, n_diagnoses: int, n_neg: int) -> int:
    """Generous polynomial bound on inference calls for one minimization run.

    Divide and conquer probes the acceptance predicate O(k + k log(n/k))
    times; each probe partitions every diagnosis against the candidate and
    the negative measurements.
    """
    k = max(result_size, 1)
    n = max(expanded_size, 1)
    probes = 4.0 * (k + 1) * (2.0 + 2.0 * math.log2(max(n / k, 2.0)))
    per_probe = n_diagnoses * (n + 2) * (n_neg + 2)
    return math.ceil(probes * per_probe)
