"""Minimal conflicts, minimal diagnoses, and diagnosis probabilities."""

from __future__ import annotations

import heapq
import math
import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .dpi import DPI, ComponentId
from .logic import Reasoner

__all__ = [
    "Diagnosis",
    "ConflictSet",
    "DiagnosisSet",
    "DiagnosisOrder",
    "diag_key",
    "min_conflict",
    "compute_diagnoses",
    "diagnosis_probabilities",
    "raw_probability",
]

Diagnosis = frozenset[ComponentId]
ConflictSet = frozenset[ComponentId]


def diag_key(diagnosis: Diagnosis) -> tuple[ComponentId, ...]:
    """Deterministic ordering key for diagnoses."""
    return tuple(sorted(diagnosis))


class DiagnosisOrder(Enum):
    BREADTH_FIRST = "bfs"
    UNIFORM_COST_PROBABILITY = "prob"


@dataclass
class DiagnosisSet:
    """Leading diagnoses with normalized probabilities.

    ``exhaustive`` marks whether the search concluded without hitting the
    requested cap, i.e. whether the list holds every minimal diagnosis.
    """

    diagnoses: tuple[Diagnosis, ...]
    probabilities: dict[Diagnosis, float] = field(default_factory=dict)
    exhaustive: bool = False

    def __len__(self) -> int:
        return len(self.diagnoses)

    def __iter__(self):
        return iter(self.diagnoses)

    def probability(self, diagnosis: Diagnosis) -> float:
        return self.probabilities[diagnosis]


def _is_conflict(dpi: DPI, healthy: Iterable[ComponentId], reasoner: Reasoner) -> bool:
    """Does assuming exactly ``healthy`` components normal already violate?

    Violation is inconsistency or entailment of some negative measurement.
    Monotone in ``healthy``, so this doubles as "a conflict exists within".
    """
    kb = dpi.core_kb() | {dpi.behaviors[c] for c in healthy}
    if not reasoner.is_consistent(kb):
        return True
    return any(reasoner.entails(kb, n) for n in dpi.neg)


def min_conflict(
    dpi: DPI,
    candidates: Sequence[ComponentId],
    reasoner: Reasoner | None = None,
) -> ConflictSet | None:
    """A subset-minimal conflict within ``candidates``, or None if none exists.

    Divide-and-conquer minimization; the candidate order steers which of
    several minimal conflicts is preferred (earlier elements are favored).
    """
    reasoner = reasoner or Reasoner()
    candidates = list(candidates)
    if not _is_conflict(dpi, candidates, reasoner):
        return None

    def recurse(base: list[ComponentId], delta: list[ComponentId], rest: list[ComponentId]) -> list[ComponentId]:
        if delta and _is_conflict(dpi, base, reasoner):
            return []
        if len(rest) == 1:
            return list(rest)
        half = len(rest) // 2
        first, second = rest[:half], rest[half:]
        core2 = recurse(base + first, first, second)
        core1 = recurse(base + core2, core2, first)
        return core1 + core2

    return frozenset(recurse([], [], candidates))


def compute_diagnoses(
    dpi: DPI,
    max_count: int,
    order: DiagnosisOrder = DiagnosisOrder.BREADTH_FIRST,
    rng_seed: int = 0,
    reasoner: Reasoner | None = None,
) -> DiagnosisSet:
    """Up to ``max_count`` minimal diagnoses via a hitting-set tree.

    BREADTH_FIRST explores by cardinality (minimum-cardinality diagnoses
    first); UNIFORM_COST_PROBABILITY explores most-probable-first using
    additive log-odds path costs.  ``rng_seed`` shuffles conflict candidate
    order to diversify which conflicts label the tree.
    """
    if max_count < 1:
        raise ValueError("max_count must be positive")
    reasoner = reasoner or Reasoner()
    rng = random.Random(rng_seed)

    def fresh_conflict(blocked: frozenset[ComponentId]) -> ConflictSet | None:
        candidates = [c for c in dpi.comps if c not in blocked]
        rng.shuffle(candidates)
        return min_conflict(dpi, candidates, reasoner)

    # Path cost for most-probable-first order; monotone whenever p(c) < 0.5.
    def path_cost(hit: frozenset[ComponentId]) -> float:
        return sum(math.log((1.0 - dpi.fault_prob(c)) / dpi.fault_prob(c)) for c in hit)

    conflicts: list[ConflictSet] = []
    found: list[Diagnosis] = []
    visited: set[frozenset[ComponentId]] = set()
    exhausted = True

    root: frozenset[ComponentId] = frozenset()
    if order is DiagnosisOrder.BREADTH_FIRST:
        queue: deque | list = deque([root])
        pop = queue.popleft
        push = queue.append
    else:
        queue = []
        heapq.heappush(queue, (0.0, diag_key(root), root))
        pop = lambda: heapq.heappop(queue)[2]  # noqa: E731
        push = lambda h: heapq.heappush(queue, (path_cost(h), diag_key(h), h))  # noqa: E731

    while queue:
        node = pop()
        if node in visited:
            continue
        visited.add(node)
        if any(d <= node for d in found):
            continue

        conflict = next((c for c in conflicts if not (c & node)), None)
        if conflict is None:
            conflict = fresh_conflict(node)
            if conflict is not None:
                conflicts.append(conflict)
        if conflict is None:
            # Conflict-free fault assumption; verify minimality before
            # accepting (guards probability orders that are not monotone).
            if all(
                _is_conflict(dpi, [c for c in dpi.comps if c not in (node - {dropped})], reasoner)
                for dropped in node
            ):
                found.append(node)
                if len(found) >= max_count:
                    exhausted = not queue
                    break
            continue
        for element in sorted(conflict):
            child = node | {element}
            if child not in visited:
                push(child)

    ordered = sorted(found, key=diag_key)
    if order is DiagnosisOrder.BREADTH_FIRST:
        ordered.sort(key=len)
    else:
        ordered.sort(key=lambda d: -raw_probability(dpi, d))
    result = diagnosis_probabilities(dpi, ordered)
    result.exhaustive = exhausted
    return result


def raw_probability(dpi: DPI, diagnosis: Diagnosis) -> float:
    """Independent-component fault probability of exactly this fault state."""
    p = 1.0
    for c in dpi.comps:
        p *= dpi.fault_prob(c) if c in diagnosis else 1.0 - dpi.fault_prob(c)
    return p


def diagnosis_probabilities(dpi: DPI, diagnoses: Sequence[Diagnosis]) -> DiagnosisSet:
    """Attach probabilities normalized over the given diagnoses."""
    if not diagnoses:
        raise ValueError("cannot normalize probabilities over an empty diagnosis list")
    raw = {d: raw_probability(dpi, d) for d in diagnoses}
    total = sum(raw.values())
    return DiagnosisSet(
        diagnoses=tuple(diagnoses),
        probabilities={d: raw[d] / total for d in diagnoses},
    )
