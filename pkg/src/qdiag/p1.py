"""Phase one: search the canonical partitions for a selection-measure optimum.

Depth-first, locally best-first backtracking over the successor relation.
The accepted side only grows along a branch, so both measures worsen
monotonically once the accepted mass (or cardinality) passes the balance
point; descent is cut there without losing the optimum.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnosis import DiagnosisSet, diag_key
from .dpi import DPI
from .measures import QSMKind, QSMSpec, outcome_probability, qsm_value
from .qspace import QPartition, initial_successors, successors

__all__ = ["SearchStats", "optimize_qpartition"]


@dataclass
class SearchStats:
    nodes_expanded: int = 0
    cqps_visited: int = 0
    best_value: float = 0.0
    reasoner_calls: int = 0
    goal_reached: bool = False


def optimize_qpartition(
    dpi: DPI,
    d: DiagnosisSet,
    qsm: QSMSpec,
    budget: int | None = None,
) -> tuple[QPartition, SearchStats]:
    """Best canonical partition found for the measure, plus search statistics.

    Stops at the first partition within the measure's threshold of its
    optimum; with threshold 0 and no budget the non-pruned space is explored
    exhaustively, so the returned value is the global minimum.  ``budget``
    caps node expansions.  No inference engine is involved.
    """
    if len(d) < 2:
        raise ValueError("at least two leading diagnoses are required")
    if budget is not None and budget <= 0:
        raise ValueError("budget must be positive")

    stats = SearchStats()
    n = len(d)
    best: QPartition | None = None
    best_value = float("inf")
    visited: set[QPartition] = set()

    def balance(p: QPartition) -> float:
        """Accepted-side mass (ENT) or normalized cardinality (SPL)."""
        if qsm.kind is QSMKind.ENT:
            return outcome_probability(p, d)
        return len(p.dplus) / n

    def descend(p: QPartition) -> bool:
        """Visit p and its subtree; True once a goal partition was accepted."""
        nonlocal best, best_value
        if p in visited:
            return False
        visited.add(p)
        stats.cqps_visited += 1
        value = qsm_value(qsm, p, d)
        if value < best_value or (value == best_value and best is None):
            best, best_value = p, value
        if qsm.is_optimal(value, n):
            stats.goal_reached = True
            return True
        # Past the balance point every descendant scores strictly worse.
        if balance(p) >= 0.5:
            return False
        if budget is not None and stats.nodes_expanded >= budget:
            return False
        stats.nodes_expanded += 1
        children = successors(dpi, p)
        children.sort(key=lambda c: (_heuristic(c), tuple(map(diag_key, c.dplus))))
        for child in children:
            if descend(child):
                return True
        return False

    def _heuristic(p: QPartition) -> tuple[int, float]:
        # Prefer children whose accepted side approaches the balance point
        # from below; among over-shooters, the least excess first.
        b = balance(p)
        if b <= 0.5:
            return (0, 0.5 - b)
        return (1, b - 0.5)

    roots = initial_successors(d)
    roots.sort(key=lambda c: (_heuristic(c), tuple(map(diag_key, c.dplus))))
    for root in roots:
        if descend(root):
            break

    assert best is not None
    stats.best_value = best_value
    return best, stats
