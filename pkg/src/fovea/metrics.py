"""Value-of-display metrics and the reveal-subset search.

Three metrics score the effect of revealing a hidden-but-certain evidence
subset ``e`` on top of an already-displayed subset ``E``, out of the full
evidence ``full`` available to the display manager:

* ``evri``: the revised action is chosen from the displayed posterior and
  scored against the full-evidence posterior; the value is the score change.
  Review delays do not enter, so evaluation happens at a fixed delay
  (default 0). The value is exactly zero whenever the action is unchanged.
* ``nevri``: like ``evri`` but the action on each side is chosen and scored
  at its own review delay t(E+e) vs t(E), so the cost of reading more data
  competes with its diagnostic benefit.
* ``evdi``: replaces the optimizing decision maker with a probabilistic
  operator model p(action | displayed), scoring the operator's expected
  behavior on each side.

``best_reveal_subset`` searches for the subset maximizing a chosen metric,
either exhaustively or with myopic / limited-lookahead strategies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

from .bayesnet import Evidence
from .decision import DecisionModel, best_action, eu_profile, hypothesis_posterior
from .user_model import UserResponseModel, user_action_distribution


@dataclass(frozen=True)
class ReviewTimeModel:
    """Deterministic review delay t(E) = base_delay + sum of per-item costs."""

    base_delay: float = 0.0
    item_costs: Mapping[str, float] = field(default_factory=dict)
    default_cost: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "item_costs", dict(self.item_costs))
        if self.base_delay < 0 or self.default_cost < 0:
            raise ValueError("review-time costs must be nonnegative")
        if any(c < 0 for c in self.item_costs.values()):
            raise ValueError("review-time costs must be nonnegative")

    def cost(self, item: str) -> float:
        return self.item_costs.get(item, self.default_cost)

    def scaled(self, factor: float) -> "ReviewTimeModel":
        """Scale all delays, e.g. by a context criticality factor."""
        return ReviewTimeModel(
            self.base_delay * factor,
            {k: v * factor for k, v in self.item_costs.items()},
            self.default_cost * factor,
        )


ZERO_DELAY = ReviewTimeModel(base_delay=0.0, item_costs={}, default_cost=0.0)


def review_time(rtm: ReviewTimeModel, evidence: Evidence) -> float:
    """Additive, order-independent review delay for a displayed set."""
    return rtm.base_delay + sum(rtm.cost(item) for item in evidence)


@dataclass(frozen=True)
class MetricResult:
    value: float
    action_before: str
    action_after: str
    delay_before: float = 0.0
    delay_after: float = 0.0


def _check_args(e: Evidence, shown: Evidence, full: Evidence) -> None:
    overlap = set(e) & set(shown)
    if overlap:
        raise ValueError(f"reveal set overlaps displayed set: {sorted(overlap)}")
    for name, subset in (("reveal", e), ("displayed", shown)):
        for var, state in subset.items():
            if var not in full:
                raise ValueError(f"{name} item {var!r} is not in the full evidence")
            if full[var] != state:
                raise ValueError(
                    f"{name} item {var}={state!r} contradicts full evidence "
                    f"{var}={full[var]!r}"
                )


def evri(
    model: DecisionModel,
    e: Evidence,
    shown: Evidence,
    full: Evidence,
    t: float = 0.0,
) -> MetricResult:
    """Expected value of revealing ``e`` given ``shown``, scored under ``full``."""
    _check_args(e, shown, full)
    gold = hypothesis_posterior(model, full)
    gold_eu = eu_profile(model, gold, t)

    before, _ = best_action(eu_profile(model, hypothesis_posterior(model, shown), t))
    after, _ = best_action(
        eu_profile(model, hypothesis_posterior(model, {**shown, **e}), t)
    )
    return MetricResult(
        value=gold_eu[after] - gold_eu[before],
        action_before=before,
        action_after=after,
        delay_before=t,
        delay_after=t,
    )


def nevri(
    model: DecisionModel,
    rtm: ReviewTimeModel,
    e: Evidence,
    shown: Evidence,
    full: Evidence,
) -> MetricResult:
    """Net value of revealing ``e``: each side pays its own review delay."""
    _check_args(e, shown, full)
    combined = {**shown, **e}
    t_before = review_time(rtm, shown)
    t_after = review_time(rtm, combined)
    gold = hypothesis_posterior(model, full)

    before, _ = best_action(
        eu_profile(model, hypothesis_posterior(model, shown), t_before)
    )
    after, _ = best_action(
        eu_profile(model, hypothesis_posterior(model, combined), t_after)
    )
    eu_before = eu_profile(model, gold, t_before)[before]
    eu_after = eu_profile(model, gold, t_after)[after]
    return MetricResult(
        value=eu_after - eu_before,
        action_before=before,
        action_after=after,
        delay_before=t_before,
        delay_after=t_after,
    )


def evdi(
    model: DecisionModel,
    user: UserResponseModel,
    rtm: ReviewTimeModel,
    e: Evidence,
    shown: Evidence,
    full: Evidence,
) -> MetricResult:
    """Net value of displaying ``e`` to a modeled operator.

    Each side weighs the operator's action distribution given the displayed
    set against the full-evidence posterior, at that side's review delay.
    The reported actions are the operator's most probable on each side.
    """
    _check_args(e, shown, full)
    if set(user.actions) != set(model.action_ids):
        raise ValueError(
            f"user model actions {sorted(user.actions)} do not match "
            f"decision model actions {sorted(model.action_ids)}"
        )
    combined = {**shown, **e}
    t_before = review_time(rtm, shown)
    t_after = review_time(rtm, combined)
    gold = hypothesis_posterior(model, full)

    def side(displayed: Evidence, t: float) -> tuple[float, str]:
        action_p = user_action_distribution(user, displayed, t)
        scores = eu_profile(model, gold, t)
        value = sum(p * scores[a] for a, p in action_p.items())
        modal = max(sorted(action_p), key=lambda a: action_p[a])
        return value, modal

    v_before, modal_before = side(shown, t_before)
    v_after, modal_after = side(combined, t_after)
    return MetricResult(
        value=v_after - v_before,
        action_before=modal_before,
        action_after=modal_after,
        delay_before=t_before,
        delay_after=t_after,
    )


# ---------------------------------------------------------------------------
# Metric dispatch

METRIC_KINDS = ("evri", "nevri", "evdi")


@dataclass(frozen=True)
class MetricConfig:
    """A metric choice plus whatever that metric needs to run."""

    kind: str = "evri"
    rtm: ReviewTimeModel = ZERO_DELAY
    user: Optional[UserResponseModel] = None
    t: float = 0.0  # evaluation delay for evri

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise ValueError(f"unknown metric {self.kind!r}")
        if self.kind == "evdi" and self.user is None:
            raise ValueError("evdi requires a user response model")

    def evaluate(
        self, model: DecisionModel, e: Evidence, shown: Evidence, full: Evidence
    ) -> MetricResult:
        if self.kind == "evri":
            return evri(model, e, shown, full, self.t)
        if self.kind == "nevri":
            return nevri(model, self.rtm, e, shown, full)
        return evdi(model, self.user, self.rtm, e, shown, full)

    def scaled(self, factor: float) -> "MetricConfig":
        return replace(self, rtm=self.rtm.scaled(factor))


# ---------------------------------------------------------------------------
# Reveal-subset search

EXHAUSTIVE_CAP = 20


def _subsets_in_order(items: list[str]) -> itertools.chain:
    """All subsets ordered by cardinality then lexicographically."""
    items = sorted(items)
    return itertools.chain.from_iterable(
        itertools.combinations(items, k) for k in range(len(items) + 1)
    )


def best_reveal_subset(
    model: DecisionModel,
    cfg: MetricConfig,
    shown: Evidence,
    full: Evidence,
    strategy: str = "exhaustive",
    lookahead: int = 2,
) -> tuple[dict[str, str], MetricResult]:
    """Find the subset of hidden evidence that maximizes the configured metric.

    ``exhaustive`` scans every subset of ``full`` minus ``shown`` (capped at
    20 hidden items); ties go to the smallest subset, then lexicographic id
    order. ``greedy`` adds the single best item while its marginal metric is
    strictly positive. ``lookahead`` generalizes greedy to extensions of up
    to ``lookahead`` items per step.
    """
    hidden = sorted(set(full) - set(shown))

    if strategy == "exhaustive":
        if len(hidden) > EXHAUSTIVE_CAP:
            raise ValueError(
                f"{len(hidden)} hidden items exceeds exhaustive cap {EXHAUSTIVE_CAP}"
            )
        best_subset: tuple[str, ...] = ()
        best_result = cfg.evaluate(model, {}, shown, full)
        for subset in _subsets_in_order(hidden):
            if not subset:
                continue
            e = {v: full[v] for v in subset}
            result = cfg.evaluate(model, e, shown, full)
            if result.value > best_result.value:
                best_subset, best_result = subset, result
        return {v: full[v] for v in best_subset}, best_result

    if strategy == "greedy":
        step = 1
    elif strategy == "lookahead":
        step = max(1, lookahead)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    chosen: dict[str, str] = {}
    while True:
        remaining = sorted(set(hidden) - set(chosen))
        if not remaining:
            break
        context = {**shown, **chosen}
        best_ext: tuple[str, ...] | None = None
        best_val = 0.0
        for k in range(1, step + 1):
            for subset in itertools.combinations(remaining, k):
                e = {v: full[v] for v in subset}
                val = cfg.evaluate(model, e, context, full).value
                if val > best_val:
                    best_ext, best_val = subset, val
        if best_ext is None:  # no strictly positive extension left
            break
        chosen.update({v: full[v] for v in best_ext})
    return chosen, cfg.evaluate(model, chosen, shown, full)
