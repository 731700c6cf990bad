"""Phase two: cheapest subset-minimal query realizing a fixed partition.

A subset-minimal query with a given canonical partition is exactly a minimal
hitting set of the partition's subset-minimal traits, so the optimization is
a uniform-cost hitting-set search over readily available component sets.
No inference engine is involved.
"""

from __future__ import annotations

import heapq
from typing import Sequence

from .dpi import DPI, beh_set
from .measures import QCMKind, QCMSpec, qcm_value
from .qspace import QPartition, Query, trait_classes

__all__ = ["optimize_query_for_qpartition", "enumerate_minimal_queries", "minimal_traits"]


def minimal_traits(dpi: DPI, p: QPartition) -> list[frozenset[str]]:
    """Deduplicated subset-minimal traits of the rejected side, as component sets."""
    return [cls.trait_components for cls in trait_classes(dpi, p).minimal_classes()]


def optimize_query_for_qpartition(dpi: DPI, p: QPartition, qcm: QCMSpec) -> Query:
    """Cost-minimal subset-minimal query whose canonical partition is ``p``."""
    if not p.is_canonical_shape() or not p.is_query_partition():
        raise ValueError("expected a canonical partition with both sides non-empty")
    traits = minimal_traits(dpi, p)
    if qcm.kind is QCMKind.MAX:
        # Not additive: rank the (cheaply enumerable) minimal hitting sets.
        candidates = _minimal_hitting_sets(traits)
        chosen = min(
            candidates,
            key=lambda h: (qcm_value(qcm, Query.from_behaviors(beh_set(dpi, h))), sorted(h)),
        )
        return Query.from_behaviors(beh_set(dpi, chosen))

    def element_cost(comp: str) -> float:
        return 1.0 if qcm.kind is QCMKind.CARD else qcm.sentence_cost(dpi.behaviors[comp])

    # Uniform-cost hitting-set tree; positive element costs make the first
    # complete hit both cost-minimal and subset-minimal.
    heap: list[tuple[float, tuple[str, ...], frozenset[str]]] = [(0.0, (), frozenset())]
    seen: set[frozenset[str]] = set()
    while heap:
        cost, _, hit = heapq.heappop(heap)
        if hit in seen:
            continue
        seen.add(hit)
        unhit = next((t for t in traits if not (t & hit)), None)
        if unhit is None:
            return Query.from_behaviors(beh_set(dpi, hit))
        for comp in sorted(unhit, key=lambda c: (element_cost(c), c)):
            child = hit | {comp}
            if child not in seen:
                heapq.heappush(heap, (cost + element_cost(comp), tuple(sorted(child)), child))
    raise RuntimeError("trait hitting-set search exhausted without a cover")


def enumerate_minimal_queries(dpi: DPI, p: QPartition) -> list[Query]:
    """Every subset-minimal query with partition ``p`` (test oracle helper)."""
    return [
        Query.from_behaviors(beh_set(dpi, h))
        for h in sorted(_minimal_hitting_sets(minimal_traits(dpi, p)), key=sorted)
    ]


def _minimal_hitting_sets(traits: Sequence[frozenset[str]]) -> list[frozenset[str]]:
    complete: list[frozenset[str]] = []
    frontier: list[frozenset[str]] = [frozenset()]
    while frontier:
        next_frontier: list[frozenset[str]] = []
        for hit in frontier:
            if any(done <= hit for done in complete):
                continue
            unhit = next((t for t in traits if not (t & hit)), None)
            if unhit is None:
                complete.append(hit)
                continue
            for comp in sorted(unhit):
                child = hit | {comp}
                if child not in next_frontier:
                    next_frontier.append(child)
        frontier = next_frontier
    # Breadth-first growth plus the subset guard leaves only minimal hits,
    # but equal-cardinality non-minimal covers cannot exist; dedupe instead.
    return sorted(set(complete), key=sorted)
