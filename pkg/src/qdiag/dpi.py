"""Diagnosis problem instances: data model, JSON format, and behavior KBs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Any, Iterable, Iterator, Mapping

from .logic import Formula, Reasoner, parse_formula

__all__ = [
    "ComponentId",
    "DPI",
    "BehSet",
    "DPIError",
    "NoDiagnosisError",
    "build_dpi",
    "load_dpi",
    "serialize_dpi",
    "behavior_kb",
    "beh_set",
    "diagnosis_exists",
]

ComponentId = str

DEFAULT_FAULT_PROB = 0.1


class DPIError(ValueError):
    """Invalid diagnosis problem instance."""


class NoDiagnosisError(DPIError):
    """The instance admits no diagnosis: the evidence alone is already violated."""


@dataclass(frozen=True)
class DPI:
    """A diagnosis problem: components with behavior sentences plus evidence.

    ``pos``/``neg`` are the accumulated positive and negative measurement
    sets; each measurement is itself a set of sentences.  Instances are
    immutable; sequential diagnosis grows them via ``extended``.
    """

    comps: tuple[ComponentId, ...]
    behaviors: Mapping[ComponentId, Formula]
    sd_extra: frozenset[Formula] = frozenset()
    obs: frozenset[Formula] = frozenset()
    pos: tuple[frozenset[Formula], ...] = ()
    neg: tuple[frozenset[Formula], ...] = ()
    fault_probs: Mapping[ComponentId, float] = field(default_factory=dict)

    def core_kb(self) -> frozenset[Formula]:
        """Evidence shared by every fault assumption: sd_extra, obs, and all P."""
        out = set(self.sd_extra) | set(self.obs)
        for p in self.pos:
            out |= p
        return frozenset(out)

    def fault_prob(self, comp: ComponentId) -> float:
        return self.fault_probs.get(comp, DEFAULT_FAULT_PROB)

    def extended(
        self,
        pos: Iterable[Formula] | None = None,
        neg: Iterable[Formula] | None = None,
    ) -> "DPI":
        """Copy with one more positive and/or negative measurement set."""
        return DPI(
            comps=self.comps,
            behaviors=self.behaviors,
            sd_extra=self.sd_extra,
            obs=self.obs,
            pos=self.pos + ((frozenset(pos),) if pos is not None else ()),
            neg=self.neg + ((frozenset(neg),) if neg is not None else ()),
            fault_probs=self.fault_probs,
        )


@dataclass(frozen=True)
class BehSet:
    """Behavior sentences of a component set, keeping component provenance."""

    members: tuple[tuple[ComponentId, Formula], ...]

    @property
    def components(self) -> frozenset[ComponentId]:
        return frozenset(c for c, _ in self.members)

    @property
    def formulas(self) -> frozenset[Formula]:
        return frozenset(f for _, f in self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[tuple[ComponentId, Formula]]:
        return iter(self.members)

    def __le__(self, other: "BehSet") -> bool:
        return self.components <= other.components

    def __lt__(self, other: "BehSet") -> bool:
        return self.components < other.components


def _parse_formula_list(values: Any, where: str) -> frozenset[Formula]:
    if not isinstance(values, list):
        raise DPIError(f"{where} must be an array of formula strings")
    return frozenset(parse_formula(v) for v in values)


def build_dpi(
    components: Iterable[ComponentId],
    behaviors: Mapping[ComponentId, str | Formula],
    sd_extra: Iterable[str | Formula] = (),
    obs: Iterable[str | Formula] = (),
    pos: Iterable[Iterable[str | Formula]] = (),
    neg: Iterable[Iterable[str | Formula]] = (),
    fault_probs: Mapping[ComponentId, float] | None = None,
    check: bool = True,
    reasoner: Reasoner | None = None,
) -> DPI:
    """Assemble and validate a DPI from formula strings or parsed sentences."""

    def as_formula(v: str | Formula) -> Formula:
        return parse_formula(v) if isinstance(v, str) else v

    comps = tuple(components)
    dpi = DPI(
        comps=comps,
        behaviors={c: as_formula(f) for c, f in behaviors.items()},
        sd_extra=frozenset(as_formula(f) for f in sd_extra),
        obs=frozenset(as_formula(f) for f in obs),
        pos=tuple(frozenset(as_formula(f) for f in group) for group in pos),
        neg=tuple(frozenset(as_formula(f) for f in group) for group in neg),
        fault_probs=dict(fault_probs or {}),
    )
    _validate(dpi, check=check, reasoner=reasoner)
    return dpi


def load_dpi(document: bytes | str | IO | Mapping[str, Any], check: bool = True) -> DPI:
    """Parse and validate a DPI from its JSON document form.

    Raises DPIError on structural problems and NoDiagnosisError when the
    evidence alone already violates a negative measurement (in which case no
    fault assignment can explain the observations).
    """
    if isinstance(document, Mapping):
        doc: Any = document
    else:
        if hasattr(document, "read"):
            document = document.read()
        if isinstance(document, bytes):
            document = document.decode("utf-8")
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise DPIError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DPIError("DPI document must be a JSON object")

    components = doc.get("components")
    if not isinstance(components, list) or not components:
        raise DPIError("'components' must be a non-empty array")
    behaviors = doc.get("behaviors")
    if not isinstance(behaviors, dict):
        raise DPIError("'behaviors' must be an object mapping component to formula")

    pos_doc = doc.get("pos", [])
    neg_doc = doc.get("neg", [])
    if not isinstance(pos_doc, list) or not isinstance(neg_doc, list):
        raise DPIError("'pos' and 'neg' must be arrays of formula-string arrays")

    try:
        dpi = DPI(
            comps=tuple(components),
            behaviors={c: parse_formula(f) for c, f in behaviors.items()},
            sd_extra=_parse_formula_list(doc.get("sd_extra", []), "'sd_extra'"),
            obs=_parse_formula_list(doc.get("obs", []), "'obs'"),
            pos=tuple(_parse_formula_list(g, "'pos' entry") for g in pos_doc),
            neg=tuple(_parse_formula_list(g, "'neg' entry") for g in neg_doc),
            fault_probs=dict(doc.get("fault_probs", {})),
        )
    except DPIError:
        raise
    except ValueError as exc:
        raise DPIError(str(exc)) from exc
    _validate(dpi, check=check)
    return dpi


def _validate(dpi: DPI, check: bool, reasoner: Reasoner | None = None) -> None:
    if not dpi.comps:
        raise DPIError("at least one component is required")
    if len(set(dpi.comps)) != len(dpi.comps):
        raise DPIError("duplicate component ids")
    missing = [c for c in dpi.comps if c not in dpi.behaviors]
    if missing:
        raise DPIError(f"missing behavior for components: {missing}")
    unknown = [c for c in dpi.behaviors if c not in dpi.comps]
    if unknown:
        raise DPIError(f"behavior for unknown components: {unknown}")
    unknown = [c for c in dpi.fault_probs if c not in dpi.comps]
    if unknown:
        raise DPIError(f"fault probability for unknown components: {unknown}")
    for comp, prob in dpi.fault_probs.items():
        if not isinstance(prob, (int, float)) or not 0.0 < prob < 1.0:
            raise DPIError(f"fault probability of {comp} must lie strictly in (0, 1)")
    if not check:
        return

    reasoner = reasoner or Reasoner()
    if not reasoner.is_consistent(dpi.obs):
        raise DPIError("observations are inconsistent")
    for i, p in enumerate(dpi.pos):
        if not reasoner.is_consistent(p):
            raise DPIError(f"positive measurement set #{i} is inconsistent")
    for i, n in enumerate(dpi.neg):
        if not reasoner.is_consistent(n):
            raise DPIError(f"negative measurement set #{i} is inconsistent")
    # The system description on its own (all components assumed healthy,
    # evidence aside) must be consistent.
    if not reasoner.is_consistent(set(dpi.sd_extra) | set(dpi.behaviors[c] for c in dpi.comps)):
        raise DPIError("system description inconsistent with all components healthy")
    if not diagnosis_exists(dpi, reasoner):
        raise NoDiagnosisError(
            "no diagnosis exists: the evidence violates a negative measurement "
            "regardless of which components are faulty"
        )


def serialize_dpi(dpi: DPI) -> dict[str, Any]:
    """JSON-ready document; ``load_dpi`` of the result reproduces the DPI."""
    return {
        "components": list(dpi.comps),
        "behaviors": {c: str(dpi.behaviors[c]) for c in dpi.comps},
        "sd_extra": sorted(str(f) for f in dpi.sd_extra),
        "obs": sorted(str(f) for f in dpi.obs),
        "pos": [sorted(str(f) for f in group) for group in dpi.pos],
        "neg": [sorted(str(f) for f in group) for group in dpi.neg],
        "fault_probs": {c: dpi.fault_probs[c] for c in dpi.comps if c in dpi.fault_probs},
    }


def behavior_kb(dpi: DPI, faulty: Iterable[ComponentId]) -> frozenset[Formula]:
    """KB describing the system when exactly ``faulty`` components are abnormal.

    Abnormality is resolved structurally: a faulty component contributes no
    behavior sentence, a healthy one contributes its behavior; the shared
    evidence (sd_extra, obs, positive measurements) is always included.
    """
    faulty = frozenset(faulty)
    unknown = faulty - set(dpi.comps)
    if unknown:
        raise DPIError(f"unknown components: {sorted(unknown)}")
    healthy = [c for c in dpi.comps if c not in faulty]
    return dpi.core_kb() | {dpi.behaviors[c] for c in healthy}


def beh_set(dpi: DPI, components: Iterable[ComponentId]) -> BehSet:
    """Behavior sentences of exactly the given components, with provenance."""
    comps = frozenset(components)
    unknown = comps - set(dpi.comps)
    if unknown:
        raise DPIError(f"unknown components: {sorted(unknown)}")
    return BehSet(tuple((c, dpi.behaviors[c]) for c in sorted(comps)))


def diagnosis_exists(dpi: DPI, reasoner: Reasoner | None = None) -> bool:
    """A diagnosis exists iff the evidence alone is consistent and violates no n."""
    reasoner = reasoner or Reasoner()
    core = dpi.core_kb()
    if not reasoner.is_consistent(core):
        return False
    return all(not reasoner.entails(core, n) for n in dpi.neg)
