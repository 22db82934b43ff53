"""Display strategies: what to reveal, expand, and highlight, and when.

The strategies here are deliberately cluster- and subsystem-granular. Each
auxiliary cluster and each subsystem template is evaluated independently
against the rest of the display, which keeps layouts spatially stable and
the analysis tractable; a joint search across everything is available
separately via :func:`fovea.metrics.best_reveal_subset`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .bayesnet import Evidence
from .decision import (
    DecisionModel,
    best_action,
    display_conditioned_action,
    eu_profile,
    gold_standard_action,
    hypothesis_posterior,
)
from .metrics import MetricConfig, evri

MINIMAL_EXHAUSTIVE_CAP = 20


@dataclass(frozen=True, eq=False)
class Template:
    """Nested detail levels for one subsystem, from summary to full detail."""

    subsystem: str
    levels: tuple[frozenset[str], ...]

    def __post_init__(self):
        levels = tuple(frozenset(l) for l in self.levels)
        object.__setattr__(self, "levels", levels)
        if not levels or not levels[0]:
            raise ValueError(f"{self.subsystem}: level 0 must be a nonempty summary")
        for i in range(len(levels) - 1):
            if not levels[i] < levels[i + 1]:
                raise ValueError(
                    f"{self.subsystem}: level {i + 1} must strictly contain level {i}"
                )


@dataclass(frozen=True, eq=False)
class EvidencePartition:
    """Core always-on evidence plus named optional clusters."""

    core: frozenset[str]
    aux_clusters: Mapping[str, frozenset[str]]

    def __post_init__(self):
        object.__setattr__(self, "core", frozenset(self.core))
        clusters = {name: frozenset(ids) for name, ids in self.aux_clusters.items()}
        object.__setattr__(self, "aux_clusters", clusters)
        taken = set(self.core)
        for name in sorted(clusters):
            overlap = clusters[name] & taken
            if overlap:
                raise ValueError(f"cluster {name!r} overlaps: {sorted(overlap)}")
            taken |= clusters[name]


@dataclass(frozen=True)
class Context:
    """Operating phase: baseline detail, criticality, and highlight budget."""

    phase: str = "default"
    baseline_levels: Mapping[str, int] = field(default_factory=dict)
    criticality: float = 1.0
    highlight_n: int = 3

    def __post_init__(self):
        object.__setattr__(self, "baseline_levels", dict(self.baseline_levels))

    def baseline(self, subsystem: str) -> int:
        return self.baseline_levels.get(subsystem, 0)


@dataclass(frozen=True)
class DisplayState:
    """The engine's semantic display directive for one frame."""

    levels: Mapping[str, int]
    aux: tuple[str, ...]
    highlights: tuple[tuple[str, float], ...]
    ranked_faults: tuple[tuple[str, float], ...]
    ranked_actions: tuple[tuple[str, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", dict(self.levels))
        object.__setattr__(self, "aux", tuple(self.aux))
        object.__setattr__(self, "highlights", tuple(self.highlights))
        object.__setattr__(self, "ranked_faults", tuple(self.ranked_faults))
        object.__setattr__(self, "ranked_actions", tuple(self.ranked_actions))


def _restrict(ids, full: Evidence) -> dict[str, str]:
    return {i: full[i] for i in sorted(ids) if i in full}


def rank_faults(model: DecisionModel, full: Evidence) -> list[tuple[str, float]]:
    """Hypothesis states by descending posterior; ties keep declaration order."""
    dist = hypothesis_posterior(model, full)
    pairs = list(zip(dist.states, dist.probs))
    pairs.sort(key=lambda sp: -sp[1])  # stable: declaration order survives ties
    return pairs


def rank_actions(
    model: DecisionModel, full: Evidence, t: float = 0.0
) -> list[tuple[str, float]]:
    """Actions by descending expected utility under the full posterior."""
    profile = eu_profile(model, hypothesis_posterior(model, full), t)
    return sorted(profile.items(), key=lambda kv: (-kv[1], kv[0]))


def decide_auxiliary(
    model: DecisionModel,
    cfg: MetricConfig,
    partition: EvidencePartition,
    full: Evidence,
) -> set[str]:
    """Names of auxiliary clusters whose reveal value over the core is positive.

    Clusters are judged independently against the core display, so the
    result does not depend on enumeration order.
    """
    shown = _restrict(partition.core, full)
    chosen: set[str] = set()
    for name in sorted(partition.aux_clusters):
        e = _restrict(partition.aux_clusters[name], full)
        if not e:
            continue
        if cfg.evaluate(model, e, shown, full).value > 0:
            chosen.add(name)
    return chosen


def telescope_levels(
    model: DecisionModel,
    cfg: MetricConfig,
    templates: Sequence[Template],
    full: Evidence,
    ctx: Context,
) -> dict[str, int]:
    """Per-subsystem detail level after metric-driven escalation.

    Each subsystem starts at its context baseline and escalates while the
    next level's increment has strictly positive value, holding the other
    subsystems at their baselines. Levels never drop below the baseline.
    """
    cfg = cfg.scaled(ctx.criticality)
    result: dict[str, int] = {}
    for tpl in templates:
        others: set[str] = set()
        for other in templates:
            if other.subsystem != tpl.subsystem:
                base = min(ctx.baseline(other.subsystem), len(other.levels) - 1)
                others |= other.levels[base]
        level = min(ctx.baseline(tpl.subsystem), len(tpl.levels) - 1)
        while level + 1 < len(tpl.levels):
            increment = tpl.levels[level + 1] - tpl.levels[level]
            shown = _restrict(others | tpl.levels[level], full)
            e = _restrict(increment, full)
            if e and cfg.evaluate(model, e, shown, full).value > 0:
                level += 1
            else:
                break
        result[tpl.subsystem] = level
    return result


def minimal_consistent_set(
    model: DecisionModel, full: Evidence, t: float = 0.0
) -> dict[str, str]:
    """Smallest evidence subset whose display-conditioned action matches gold.

    Exhaustive search by increasing cardinality (lexicographic within a
    cardinality) up to 20 items; larger sets fall back to a greedy backward
    pass that yields a minimal, not necessarily minimum, subset.
    """
    gold, _ = gold_standard_action(model, full, t)
    ids = sorted(full)

    if len(ids) <= MINIMAL_EXHAUSTIVE_CAP:
        for k in range(len(ids) + 1):
            for subset in itertools.combinations(ids, k):
                candidate = {v: full[v] for v in subset}
                if display_conditioned_action(model, candidate, t)[0] == gold:
                    return candidate
        raise AssertionError("full evidence always reproduces the gold action")

    kept = dict(full)
    for var in ids:
        trial = {k: v for k, v in kept.items() if k != var}
        if display_conditioned_action(model, trial, t)[0] == gold:
            kept = trial
    return kept


def highlight(
    model: DecisionModel,
    displayed: Evidence,
    full: Evidence,
    n: int,
    t: float = 0.0,
) -> list[tuple[str, float]]:
    """Top-n displayed items by myopic reveal value, as (id, intensity) pairs.

    Each item's value is its reveal value in the context of the other
    displayed items. Items with zero or negative value are dropped; the
    survivors are sorted by descending value (ties lexicographic) and their
    intensities normalized so the top item is exactly 1.
    """
    values: list[tuple[str, float]] = []
    for var in sorted(displayed):
        rest = {k: v for k, v in displayed.items() if k != var}
        v = evri(model, {var: displayed[var]}, rest, full, t).value
        if v > 0:
            values.append((var, v))
    values.sort(key=lambda iv: (-iv[1], iv[0]))
    values = values[: max(0, n)]
    if not values:
        return []
    top = values[0][1]
    return [(var, v / top) for var, v in values]


def carry_levels(
    prev_levels: Mapping[str, int] | None,
    prev_phase: str | None,
    fresh: Mapping[str, int],
    ctx: Context,
) -> dict[str, int]:
    """Sticky escalation: within a phase levels never shrink; a phase change
    resets them to whatever the fresh computation says (its baseline floor)."""
    if prev_levels is None or prev_phase != ctx.phase:
        return dict(fresh)
    return {k: max(v, prev_levels.get(k, v)) for k, v in fresh.items()}


def compose_display(
    model: DecisionModel,
    cfg: MetricConfig,
    templates: Sequence[Template],
    partition: EvidencePartition,
    full: Evidence,
    ctx: Context,
    t: float = 0.0,
    prev_levels: Mapping[str, int] | None = None,
    prev_phase: str | None = None,
) -> tuple[DisplayState, dict[str, str]]:
    """Run the full per-frame policy; returns the state and the revealed set."""
    levels = carry_levels(
        prev_levels, prev_phase, telescope_levels(model, cfg, templates, full, ctx), ctx
    )
    aux = tuple(sorted(decide_auxiliary(model, cfg.scaled(ctx.criticality), partition, full)))
    shown_ids = set(partition.core)
    for tpl in templates:
        shown_ids |= tpl.levels[levels[tpl.subsystem]]
    for name in aux:
        shown_ids |= partition.aux_clusters[name]
    revealed = _restrict(shown_ids, full)
    state = DisplayState(
        levels=levels,
        aux=aux,
        highlights=tuple(highlight(model, revealed, full, ctx.highlight_n, t)),
        ranked_faults=tuple(rank_faults(model, full)),
        ranked_actions=tuple(rank_actions(model, full, t)),
    )
    return state, revealed
