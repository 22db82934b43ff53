"""Time-dependent expected utility and action selection.

The decision model pairs a diagnostic network with a set of actions and a
utility surface u(action, hypothesis state, delay). Delay is a nonnegative
real in abstract review units; the simulator maps one telemetry frame to one
unit. Utilities are piecewise linear in delay with constant extrapolation
beyond the breakpoint range.

Action selection follows a fixed convention throughout the engine:

* the *gold-standard* action maximizes expected utility under the posterior
  conditioned on all available evidence;
* the *display-conditioned* action maximizes expected utility under the
  posterior conditioned on the displayed subset only;
* either action can then be scored against the all-evidence posterior, which
  is how the display metrics compare reveal choices.

Ties in expected utility always go to the lexicographically smallest action
id, so results are deterministic.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Mapping

from .bayesnet import Distribution, Evidence, Network, posterior


@dataclass(frozen=True)
class ActionDef:
    id: str
    name: str


Breakpoints = tuple[tuple[float, float], ...]


@dataclass(frozen=True, eq=False)
class TimedUtility:
    """Piecewise-linear u(action, hypothesis state, delay).

    ``curves`` maps (action id, hypothesis state) to a breakpoint list of
    (t, utility) pairs with strictly increasing t. Evaluation is linear
    between breakpoints and constant outside the covered range.
    """

    curves: Mapping[tuple[str, str], Breakpoints]

    def __post_init__(self):
        frozen = {}
        for key, pts in self.curves.items():
            pts = tuple((float(t), float(u)) for t, u in pts)
            if not pts:
                raise ValueError(f"utility for {key}: needs at least one breakpoint")
            ts = [t for t, _ in pts]
            if any(b <= a for a, b in zip(ts, ts[1:])):
                raise ValueError(f"utility for {key}: breakpoints must strictly increase")
            frozen[key] = pts
        object.__setattr__(self, "curves", frozen)

    def value(self, action: str, state: str, t: float) -> float:
        try:
            pts = self.curves[(action, state)]
        except KeyError:
            raise ValueError(f"no utility for action {action!r}, state {state!r}") from None
        if t <= pts[0][0]:
            return pts[0][1]
        if t >= pts[-1][0]:
            return pts[-1][1]
        i = bisect_right([p[0] for p in pts], t)
        (t0, u0), (t1, u1) = pts[i - 1], pts[i]
        return u0 + (u1 - u0) * (t - t0) / (t1 - t0)

    @classmethod
    def constant(cls, values: Mapping[str, Mapping[str, float]]) -> "TimedUtility":
        """Build a time-constant utility from {action: {state: u}}."""
        return cls(
            {
                (action, state): ((0.0, u),)
                for action, per_state in values.items()
                for state, u in per_state.items()
            }
        )


@dataclass(frozen=True, eq=False)
class DecisionModel:
    """Diagnostic network plus actions and their timed utilities."""

    network: Network
    actions: tuple[ActionDef, ...]
    utility: TimedUtility

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        ids = [a.id for a in self.actions]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate action ids")
        hyp = self.network.variable(self.network.hypothesis_var)
        missing = [
            (a.id, s)
            for a in self.actions
            for s in hyp.states
            if (a.id, s) not in self.utility.curves
        ]
        if missing:
            raise ValueError(f"utility missing for {missing}")

    @property
    def action_ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.actions)

    @property
    def hypothesis_states(self) -> tuple[str, ...]:
        return self.network.variable(self.network.hypothesis_var).states


def expected_utility(
    model: DecisionModel, action: str, hyp_dist: Distribution, t: float
) -> float:
    """Sum of u(action, H_j, t) weighted by the given hypothesis distribution."""
    if action not in model.action_ids:
        raise ValueError(f"unknown action {action!r}")
    if t < 0:
        raise ValueError("delay must be nonnegative")
    return sum(
        p * model.utility.value(action, state, t)
        for state, p in zip(hyp_dist.states, hyp_dist.probs)
    )


def eu_profile(
    model: DecisionModel, hyp_dist: Distribution, t: float
) -> dict[str, float]:
    """Expected utility of every action under one hypothesis distribution."""
    return {a: expected_utility(model, a, hyp_dist, t) for a in model.action_ids}


def best_action(profile: Mapping[str, float]) -> tuple[str, float]:
    """Argmax over an EU profile; exact ties go to the smallest action id."""
    best = max(sorted(profile), key=lambda a: profile[a])
    return best, profile[best]


def hypothesis_posterior(model: DecisionModel, evidence: Evidence) -> Distribution:
    return posterior(model.network, evidence, model.network.hypothesis_var)


def gold_standard_action(
    model: DecisionModel, full_evidence: Evidence, t: float = 0.0
) -> tuple[str, float]:
    """Best action given the complete available evidence."""
    dist = hypothesis_posterior(model, full_evidence)
    return best_action(eu_profile(model, dist, t))


def display_conditioned_action(
    model: DecisionModel, displayed: Evidence, t: float = 0.0
) -> tuple[str, float]:
    """Best action given only the displayed evidence subset.

    The returned value is the expected utility *under the displayed
    posterior*; use :func:`evaluate_under_gold` to score the same action
    against the all-evidence posterior.
    """
    dist = hypothesis_posterior(model, displayed)
    return best_action(eu_profile(model, dist, t))


def evaluate_under_gold(
    model: DecisionModel, action: str, full_evidence: Evidence, t: float = 0.0
) -> float:
    """Score any action against the posterior over all available evidence."""
    dist = hypothesis_posterior(model, full_evidence)
    return expected_utility(model, action, dist, t)
