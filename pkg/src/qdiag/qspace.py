"""Q-partitions, canonical queries, traits, and the successor relation.

Everything in this module except ``partition_reasoned`` is pure set
arithmetic over component ids: no inference engine is involved.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .diagnosis import Diagnosis, DiagnosisSet, diag_key
from .dpi import DPI, BehSet, beh_set, behavior_kb
from .logic import Formula, Reasoner

__all__ = [
    "QPartition",
    "Query",
    "Trait",
    "TraitClass",
    "TraitClasses",
    "union_of",
    "intersection_of",
    "partition_reasoned",
    "disc_sentences",
    "canonical_query",
    "partition_canonical",
    "trait_classes",
    "initial_successors",
    "successors",
    "enumerate_cqps",
    "count_cqps",
]


@dataclass(frozen=True)
class QPartition:
    """Split of the leading diagnoses by predicted query outcome.

    ``dplus`` holds diagnoses consistent only with a positive answer,
    ``dminus`` those consistent only with a negative one, and ``dzero``
    those compatible with both.  Entries are kept sorted so partitions
    compare and hash structurally.
    """

    dplus: tuple[Diagnosis, ...]
    dminus: tuple[Diagnosis, ...]
    dzero: tuple[Diagnosis, ...] = ()

    @staticmethod
    def make(
        dplus: Iterable[Diagnosis],
        dminus: Iterable[Diagnosis],
        dzero: Iterable[Diagnosis] = (),
    ) -> "QPartition":
        return QPartition(
            dplus=tuple(sorted(dplus, key=diag_key)),
            dminus=tuple(sorted(dminus, key=diag_key)),
            dzero=tuple(sorted(dzero, key=diag_key)),
        )

    @property
    def diagnoses(self) -> frozenset[Diagnosis]:
        return frozenset(self.dplus) | frozenset(self.dminus) | frozenset(self.dzero)

    def is_query_partition(self) -> bool:
        return bool(self.dplus) and bool(self.dminus)

    def is_canonical_shape(self) -> bool:
        return not self.dzero


@dataclass(frozen=True)
class Query:
    """A set of sentences posed to the oracle.

    ``components`` carries provenance when every sentence is some
    component's behavior sentence.
    """

    sentences: frozenset[Formula]
    components: frozenset[str] | None = None

    def __len__(self) -> int:
        return len(self.sentences)

    @staticmethod
    def from_behaviors(behaviors: BehSet) -> "Query":
        return Query(sentences=behaviors.formulas, components=behaviors.components)


@dataclass(frozen=True)
class Trait:
    """What a rejected diagnosis still needs for discrimination vs. the seed."""

    owner: Diagnosis
    sentences: BehSet


@dataclass(frozen=True)
class TraitClass:
    trait_components: frozenset[str]
    sentences: BehSet
    members: tuple[Diagnosis, ...]
    minimal: bool


@dataclass(frozen=True)
class TraitClasses:
    classes: tuple[TraitClass, ...]

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def minimal_classes(self) -> tuple[TraitClass, ...]:
        return tuple(c for c in self.classes if c.minimal)


def union_of(diagnoses: Iterable[Diagnosis]) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for d in diagnoses:
        out |= d
    return out


def intersection_of(diagnoses: Sequence[Diagnosis]) -> frozenset[str]:
    if not diagnoses:
        return frozenset()
    out = frozenset(diagnoses[0])
    for d in diagnoses[1:]:
        out &= d
    return out


def partition_reasoned(
    dpi: DPI,
    d: DiagnosisSet,
    x: Iterable[Formula],
    reasoner: Reasoner | None = None,
) -> QPartition:
    """Partition induced by an arbitrary sentence set, decided by inference.

    A diagnosis lands in dplus when its behavior KB entails x, in dminus when
    adding x yields inconsistency or entails a negative measurement.  For
    genuine minimal diagnoses the two conditions exclude each other.
    """
    x = frozenset(x)
    if not x:
        raise ValueError("x must be non-empty")
    reasoner = reasoner or Reasoner()
    dplus: list[Diagnosis] = []
    dminus: list[Diagnosis] = []
    dzero: list[Diagnosis] = []
    for diagnosis in d:
        kb = behavior_kb(dpi, diagnosis)
        if reasoner.entails(kb, x):
            dplus.append(diagnosis)
            continue
        extended = kb | x
        if not reasoner.is_consistent(extended) or any(
            reasoner.entails(extended, n) for n in dpi.neg
        ):
            dminus.append(diagnosis)
        else:
            dzero.append(diagnosis)
    return QPartition.make(dplus, dminus, dzero)


def disc_sentences(dpi: DPI, d: DiagnosisSet) -> BehSet:
    """Behavior sentences able to discriminate among the leading diagnoses:
    those of components in some but not all of them."""
    if len(d) < 2:
        raise ValueError("discrimination requires at least two leading diagnoses")
    return beh_set(dpi, union_of(d) - intersection_of(d.diagnoses))


def canonical_query(dpi: DPI, d: DiagnosisSet, seed: Iterable[Diagnosis]) -> Query | None:
    """The set-operation query representative for a seed ``∅ ⊂ seed ⊂ D``.

    Behaviors of components outside the seed's union, restricted to the
    discrimination sentences; None when that intersection is empty.
    """
    seed = frozenset(seed)
    all_diags = frozenset(d.diagnoses)
    if not seed or not seed < all_diags:
        raise ValueError("seed must be a non-empty proper subset of the leading diagnoses")
    disc = disc_sentences(dpi, d)
    components = (frozenset(dpi.comps) - union_of(seed)) & disc.components
    if not components:
        return None
    return Query.from_behaviors(beh_set(dpi, components))


def partition_canonical(dpi: DPI, d: DiagnosisSet, q: Query) -> QPartition:
    """Partition of a behavior-sentence query by set containment alone.

    A diagnosis predicts a positive answer exactly when it leaves every
    queried component healthy.  No inference engine involved.
    """
    if q.components is None:
        raise ValueError("query lacks component provenance")
    disc = disc_sentences(dpi, d)
    if not q.components <= disc.components:
        raise ValueError("query is not built from discrimination sentences")
    dplus = [diagnosis for diagnosis in d if not (q.components & diagnosis)]
    dminus = [diagnosis for diagnosis in d if q.components & diagnosis]
    return QPartition.make(dplus, dminus)


def trait_classes(dpi: DPI, p: QPartition) -> TraitClasses:
    """Group dminus by equal trait and flag classes with subset-minimal traits.

    The trait of a rejected diagnosis is the behavior set of its components
    not covered by the accepted side's union.
    """
    if not p.is_canonical_shape():
        raise ValueError("traits are defined for canonical partitions (empty dzero)")
    if not p.dplus:
        raise ValueError("partition has an empty accepted side; use initial_successors")
    seed_union = union_of(p.dplus)
    groups: dict[frozenset[str], list[Diagnosis]] = {}
    for diagnosis in p.dminus:
        groups.setdefault(diagnosis - seed_union, []).append(diagnosis)
    traits = list(groups)
    classes = []
    for trait in sorted(traits, key=sorted):
        minimal = not any(other < trait for other in traits)
        classes.append(
            TraitClass(
                trait_components=trait,
                sentences=beh_set(dpi, trait),
                members=tuple(sorted(groups[trait], key=diag_key)),
                minimal=minimal,
            )
        )
    return TraitClasses(tuple(classes))


def initial_successors(d: DiagnosisSet) -> list[QPartition]:
    """The |D| single-seed partitions reachable from the empty seed."""
    if len(d) < 2:
        raise ValueError("at least two leading diagnoses are required")
    all_diags = list(d.diagnoses)
    return [
        QPartition.make([diagnosis], set(all_diags) - {diagnosis})
        for diagnosis in sorted(all_diags, key=diag_key)
    ]


def successors(dpi: DPI, p: QPartition) -> list[QPartition]:
    """Minimal accepted-side extensions of a canonical partition.

    Moves one equivalence class with subset-minimal trait from dminus to
    dplus; no successors when all rejected diagnoses share a single trait.
    """
    classes = trait_classes(dpi, p)
    if len(classes) < 2:
        return []
    out = []
    for cls in classes.minimal_classes():
        moved = set(cls.members)
        out.append(QPartition.make(set(p.dplus) | moved, set(p.dminus) - moved))
    return out


def _distinct_seed_unions(dpi: DPI, d: DiagnosisSet) -> set[int]:
    """Distinct unions of proper non-empty diagnosis subsets, as bitmasks."""
    index = {c: i for i, c in enumerate(dpi.comps)}
    masks = []
    for diagnosis in d:
        m = 0
        for c in diagnosis:
            m |= 1 << index[c]
        masks.append(m)
    full = 0
    for m in masks:
        full |= m
    n = len(masks)
    unions = [0] * (1 << n)
    distinct: set[int] = set()
    for seed in range(1, (1 << n) - 1):
        low = seed & -seed
        unions[seed] = unions[seed ^ low] | masks[low.bit_length() - 1]
        if unions[seed] != full:
            distinct.add(unions[seed])
    return distinct


def _partition_for_union(d: DiagnosisSet, union: frozenset[str]) -> QPartition:
    dplus = [diagnosis for diagnosis in d if diagnosis <= union]
    dminus = [diagnosis for diagnosis in d if not diagnosis <= union]
    return QPartition.make(dplus, dminus)


def enumerate_cqps(dpi: DPI, d: DiagnosisSet) -> list[QPartition]:
    """All canonical q-partitions, one per distinct attainable seed union."""
    if len(d) < 2:
        raise ValueError("at least two leading diagnoses are required")
    comps = list(dpi.comps)
    out = []
    for mask in sorted(_distinct_seed_unions(dpi, d)):
        union = frozenset(comps[i] for i in range(len(comps)) if mask >> i & 1)
        out.append(_partition_for_union(d, union))
    # Distinct unions map to distinct partitions; dedupe defensively anyway.
    return sorted(set(out), key=lambda p: tuple(map(diag_key, p.dplus)))


def count_cqps(dpi: DPI, d: DiagnosisSet) -> int:
    """Number of canonical q-partitions (distinct proper seed unions)."""
    if len(d) < 2:
        raise ValueError("at least two leading diagnoses are required")
    return len(_distinct_seed_unions(dpi, d))
