"""Operator belief and response models.

An operator is modeled in two stages: a belief network (typically the gold
diagnostic network with distinctions pruned away, standing in for a given
level of expertise) produces the operator's posterior over fault hypotheses,
and a belief-to-action mapping turns that posterior into a probability
distribution over the operator's actions.

Evidence the pruned network cannot represent is silently dropped before
inference: an operator cannot interpret data outside their mental model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .bayesnet import Distribution, Evidence, Network, PruneSpec, posterior, prune_network
from .decision import DecisionModel, TimedUtility

MAPPING_KINDS = ("argmax", "monotone")


@dataclass(frozen=True, eq=False)
class UserBeliefModel:
    """A belief network labeled with the expertise level it represents."""

    expertise_label: str
    belief_network: Network


@dataclass(frozen=True, eq=False)
class ActionMapping:
    """How inferred beliefs become action probabilities.

    ``argmax`` puts all mass on the action maximizing the user's perceived
    expected utility (exact ties split uniformly). ``monotone`` weights
    actions by exp(temperature * EU), which is uniform at temperature 0 and
    approaches argmax as the temperature grows.
    """

    kind: str
    user_utility: TimedUtility
    temperature: float = 5.0

    def __post_init__(self):
        if self.kind not in MAPPING_KINDS:
            raise ValueError(f"unknown mapping kind {self.kind!r}")
        if self.temperature < 0:
            raise ValueError("temperature must be nonnegative")


@dataclass(frozen=True, eq=False)
class UserResponseModel:
    belief: UserBeliefModel
    mapping: ActionMapping
    actions: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        hyp = self.belief.belief_network.variable(
            self.belief.belief_network.hypothesis_var
        )
        missing = [
            (a, s)
            for a in self.actions
            for s in hyp.states
            if (a, s) not in self.mapping.user_utility.curves
        ]
        if missing:
            raise ValueError(f"user utility missing for {missing}")


def user_belief(model: UserBeliefModel, evidence: Evidence) -> Distribution:
    """The operator's posterior over hypotheses, given what they can see.

    Evidence on variables absent from the belief network is dropped.
    """
    net = model.belief_network
    visible = {k: v for k, v in evidence.items() if k in net.evidence_vars}
    return posterior(net, visible, net.hypothesis_var)


def user_expected_utilities(
    model: UserResponseModel, evidence: Evidence, t: float
) -> dict[str, float]:
    """EU of each action from the operator's own beliefs and utilities."""
    belief = user_belief(model.belief, evidence)
    return {
        action: sum(
            p * model.mapping.user_utility.value(action, state, t)
            for state, p in zip(belief.states, belief.probs)
        )
        for action in model.actions
    }


def user_action_distribution(
    model: UserResponseModel, evidence: Evidence, t: float = 0.0
) -> dict[str, float]:
    """p(action | displayed evidence) under the operator model."""
    eus = user_expected_utilities(model, evidence, t)
    actions = sorted(model.actions)

    if model.mapping.kind == "argmax":
        top = max(eus.values())
        winners = [a for a in actions if eus[a] == top]
        share = 1.0 / len(winners)
        return {a: (share if a in winners else 0.0) for a in actions}

    lam = model.mapping.temperature
    # subtract the max before exponentiating to keep large temperatures finite
    top = max(eus.values())
    weights = {a: math.exp(lam * (eus[a] - top)) for a in actions}
    total = sum(weights.values())
    return {a: w / total for a, w in weights.items()}


def build_pruned_user_model(
    gold: Network, spec: PruneSpec, label: str
) -> UserBeliefModel:
    """Wrap a pruned copy of the gold network as a labeled belief model."""
    return UserBeliefModel(expertise_label=label, belief_network=prune_network(gold, spec))


def gold_as_user(model: DecisionModel, label: str = "expert") -> UserResponseModel:
    """An idealized operator: gold beliefs, gold utilities, argmax mapping."""
    return UserResponseModel(
        belief=UserBeliefModel(expertise_label=label, belief_network=model.network),
        mapping=ActionMapping(kind="argmax", user_utility=model.utility),
        actions=model.action_ids,
    )
