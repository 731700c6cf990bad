"""Seeded random problem instances for benchmarking and property tests.

Instances are structure-matched to small implication networks: each
component's behavior is an implication over a shared atom pool, and the
negative measurements are implications entailed by the all-healthy system,
which guarantees both that conflicts exist and that diagnoses exist.
"""

from __future__ import annotations

import random

from .diagnosis import DiagnosisOrder, compute_diagnoses
from .dpi import DPI, build_dpi
from .logic import Reasoner, parse_formula

__all__ = ["random_dpi"]


def _behavior_text(rng: random.Random, atoms: list[str], density: float) -> str:
    body_size = 2 if rng.random() < density and len(atoms) > 2 else 1
    picks = rng.sample(atoms, body_size + 1)
    body, head = picks[:-1], picks[-1]
    if body_size == 2:
        joiner = " | " if rng.random() < 0.5 else " & "
        return f"{joiner.join(body)} -> {head}"
    return f"{body[0]} -> {head}"


def random_dpi(
    n_comps: int,
    seed: int = 0,
    density: float = 0.4,
    n_neg: int = 2,
    min_diagnoses: int = 2,
    max_attempts: int = 60,
) -> DPI:
    """A validated random instance with at least ``min_diagnoses`` diagnoses.

    Deterministic in its arguments; unpromising draws are retried with
    derived sub-seeds.  Behaviors are pairwise distinct implications, fault
    probabilities are drawn from (0.05, 0.45).
    """
    for attempt in range(max_attempts):
        rng = random.Random(f"{seed}:{attempt}")
        n_atoms = max(4, n_comps // 2 + 3)
        atoms = [f"X{i}" for i in range(n_atoms)]
        comps = [f"c{i + 1}" for i in range(n_comps)]

        behaviors: dict[str, str] = {}
        used: set[str] = set()
        for comp in comps:
            for _ in range(50):
                text = _behavior_text(rng, atoms, density)
                if text not in used:
                    used.add(text)
                    behaviors[comp] = text
                    break
            else:
                break
        if len(behaviors) < n_comps:
            continue

        reasoner = Reasoner()
        dpi = build_dpi(comps, behaviors, check=False)
        full_kb = {dpi.behaviors[c] for c in comps}

        # Negative measurements: implications the all-healthy system entails.
        candidates = [(a, b) for a in atoms for b in atoms if a != b]
        rng.shuffle(candidates)
        neg: list[list[str]] = []
        for a, b in candidates:
            if len(neg) >= n_neg:
                break
            if reasoner.entails(full_kb, [parse_formula(f"{a} -> {b}")]):
                neg.append([f"{a} -> {b}"])
        if not neg:
            continue

        probs = {c: rng.uniform(0.05, 0.45) for c in comps}
        try:
            dpi = build_dpi(comps, behaviors, neg=neg, fault_probs=probs)
        except ValueError:
            continue
        found = compute_diagnoses(
            dpi, max_count=min_diagnoses, order=DiagnosisOrder.BREADTH_FIRST, rng_seed=seed
        )
        if len(found) >= min_diagnoses:
            return dpi
    raise RuntimeError(f"no suitable instance found for seed {seed}")
