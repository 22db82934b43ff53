"""Seeded telemetry generator with fault injection and an episode runner.

Sensor draws use a counter-based generator keyed by (seed, frame, sensor id),
so any frame can be produced independently of evaluation order and identical
seeds give bit-identical episodes. One frame equals one time unit for the
delay-dependent utilities.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .decision import DecisionModel, gold_standard_action
from .errors import EngineError
from .metrics import ZERO_DELAY, MetricConfig, ReviewTimeModel, review_time
from .policy import (
    Context,
    DisplayState,
    EvidencePartition,
    Template,
    compose_display,
    highlight,
    minimal_consistent_set,
    rank_actions,
    rank_faults,
)
from .user_model import UserResponseModel, user_action_distribution

EMISSION_TOL = 1e-9
FAILURE_KINDS = ("stuck", "drift", "sinusoidal")
POLICY_KINDS = ("managed", "everything", "minimal")


class OperatorDisconnect(EngineError):
    """Raised by an external operator when its channel goes away mid-episode."""


def _unit(seed: int, frame: int, tag: str) -> float:
    """Deterministic uniform draw in [0, 1) for one (seed, frame, tag) cell."""
    key = f"{seed}:{frame}:{tag}".encode()
    raw = hashlib.blake2b(key, digest_size=8).digest()
    return int.from_bytes(raw, "big") / 2.0**64


def _sample_index(probs: Sequence[float], u: float) -> int:
    acc = 0.0
    for i, p in enumerate(probs):
        acc += p
        if u < acc:
            return i
    return len(probs) - 1


@dataclass(frozen=True)
class FailureMode:
    """Sensor failure: stuck at a state, drifting upward, or cycling."""

    kind: str
    onset: int
    state: str | None = None  # stuck only
    period: int = 1  # drift: frames per step; sinusoidal: full cycle length

    def __post_init__(self):
        if self.kind not in FAILURE_KINDS:
            raise ValueError(f"unknown failure kind {self.kind!r}")
        if self.onset < 0:
            raise ValueError("failure onset must be >= 0")
        if self.kind == "stuck" and self.state is None:
            raise ValueError("stuck failure needs a state")
        if self.kind != "stuck" and self.period < 1:
            raise ValueError("period must be >= 1")

    def index_at(self, frame: int, n_states: int) -> int:
        k = frame - self.onset
        if self.kind == "drift":
            return min(n_states - 1, k // self.period)
        # Triangle wave over state indexes, repeating every `period` frames.
        seq = list(range(n_states)) + list(range(n_states - 2, 0, -1))
        return seq[(k * len(seq)) // self.period % len(seq)]


@dataclass(frozen=True, eq=False)
class SensorSpec:
    """One evidence variable's emission model and optional failure."""

    id: str
    emission: Mapping[str, Mapping[str, float]]  # hypothesis state -> state -> p
    failure: FailureMode | None = None

    def __post_init__(self):
        emission = {h: dict(row) for h, row in self.emission.items()}
        object.__setattr__(self, "emission", emission)
        for h, row in emission.items():
            total = sum(row.values())
            if abs(total - 1.0) > EMISSION_TOL:
                raise ValueError(f"sensor {self.id}: emission for {h} sums to {total}")
            if any(p < 0 for p in row.values()):
                raise ValueError(f"sensor {self.id}: negative emission probability")


@dataclass(frozen=True)
class PhaseSpan:
    start: int
    end: int
    context: Context


@dataclass(frozen=True, eq=False)
class Scenario:
    """A reproducible monitoring episode: truth, sensors, phases, layout."""

    seed: int
    model: DecisionModel
    ground_truth: str
    onset: int
    sensors: tuple[SensorSpec, ...]
    horizon: int
    templates: tuple[Template, ...]
    partition: EvidencePartition
    phases: tuple[PhaseSpan, ...] = ()
    null_action: str | None = None
    name: str = "scenario"

    def __post_init__(self):
        object.__setattr__(self, "sensors", tuple(self.sensors))
        object.__setattr__(self, "templates", tuple(self.templates))
        if not self.phases:
            object.__setattr__(
                self, "phases", (PhaseSpan(0, self.horizon, Context()),)
            )
        else:
            object.__setattr__(self, "phases", tuple(self.phases))
        net = self.model.network
        hyp_states = self.model.hypothesis_states
        if self.ground_truth not in hyp_states:
            raise ValueError(f"unknown ground truth state {self.ground_truth!r}")
        if self.onset < 0:
            raise ValueError("fault onset must be >= 0")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        seen: set[str] = set()
        for sensor in self.sensors:
            if sensor.id in seen:
                raise ValueError(f"duplicate sensor {sensor.id}")
            seen.add(sensor.id)
            if sensor.id not in net.evidence_vars:
                raise ValueError(f"sensor {sensor.id} is not an evidence variable")
            states = set(net.variable(sensor.id).states)
            for h, row in sensor.emission.items():
                if h not in hyp_states:
                    raise ValueError(f"sensor {sensor.id}: unknown hypothesis {h!r}")
                if set(row) != states:
                    raise ValueError(f"sensor {sensor.id}: emission states mismatch")
        if self.null_action is not None and self.null_action not in self.model.action_ids:
            raise ValueError(f"unknown null action {self.null_action!r}")
        spans = sorted(self.phases, key=lambda s: s.start)
        cursor = 0
        for span in spans:
            if span.start != cursor or span.end <= span.start:
                raise ValueError("phases must tile [0, horizon) without gaps")
            cursor = span.end
        if cursor < self.horizon:
            raise ValueError("phases must cover the full horizon")

    @property
    def baseline_state(self) -> str:
        """Ground truth before fault onset: the first declared hypothesis state."""
        return self.model.hypothesis_states[0]

    def truth_at(self, frame: int) -> str:
        return self.ground_truth if frame >= self.onset else self.baseline_state

    def context_at(self, frame: int) -> Context:
        for span in self.phases:
            if span.start <= frame < span.end:
                return span.context
        return self.phases[-1].context


@dataclass(frozen=True)
class TelemetryFrame:
    frame: int
    evidence: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "evidence", dict(self.evidence))


def step(scenario: Scenario, frame: int) -> TelemetryFrame:
    """Generate the full sensor readout for one frame."""
    if not 0 <= frame < scenario.horizon:
        raise EngineError(f"frame {frame} outside [0, {scenario.horizon})")
    truth = scenario.truth_at(frame)
    evidence: dict[str, str] = {}
    for sensor in scenario.sensors:
        states = scenario.model.network.variable(sensor.id).states
        failure = sensor.failure
        if failure is not None and frame >= failure.onset:
            if failure.kind == "stuck":
                evidence[sensor.id] = str(failure.state)
                continue
            evidence[sensor.id] = states[failure.index_at(frame, len(states))]
            continue
        row = sensor.emission.get(truth)
        if row is None:
            raise EngineError(f"sensor {sensor.id}: no emission for {truth!r}")
        probs = [row[s] for s in states]
        u = _unit(scenario.seed, frame, sensor.id)
        evidence[sensor.id] = states[_sample_index(probs, u)]
    return TelemetryFrame(frame, evidence)


@dataclass(frozen=True)
class PolicyConfig:
    """How the engine chooses what to reveal each frame."""

    name: str = "managed"
    kind: str = "managed"
    metric: MetricConfig = field(default_factory=MetricConfig)

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}")

    def apply(
        self,
        scenario: Scenario,
        full: Mapping[str, str],
        ctx: Context,
        prev_levels: Mapping[str, int] | None = None,
        prev_phase: str | None = None,
    ) -> tuple[DisplayState, dict[str, str]]:
        model = scenario.model
        if self.kind == "managed":
            return compose_display(
                model,
                self.metric,
                scenario.templates,
                scenario.partition,
                full,
                ctx,
                prev_levels=prev_levels,
                prev_phase=prev_phase,
            )
        if self.kind == "everything":
            revealed = dict(sorted(full.items()))
            levels = {t.subsystem: len(t.levels) - 1 for t in scenario.templates}
            aux = tuple(sorted(scenario.partition.aux_clusters))
        else:
            revealed = minimal_consistent_set(model, full)
            levels = {t.subsystem: ctx.baseline(t.subsystem) for t in scenario.templates}
            aux = ()
        state = DisplayState(
            levels=levels,
            aux=aux,
            highlights=tuple(highlight(model, revealed, full, ctx.highlight_n)),
            ranked_faults=tuple(rank_faults(model, full)),
            ranked_actions=tuple(rank_actions(model, full)),
        )
        return state, revealed


@dataclass(frozen=True)
class SimulatedOperator:
    """Operator stand-in: reviews the displayed set, then samples an action.

    The action is drawn from the response model's distribution, evaluated at
    the anticipated landing time (review cost plus response delay past the
    deciding frame).
    """

    user: UserResponseModel
    review: ReviewTimeModel = ZERO_DELAY
    response_delay: float = 0.0

    def landing_offset(self, revealed: Mapping[str, str]) -> float:
        return review_time(self.review, revealed) + self.response_delay

    def decide(
        self,
        frame: int,
        state: DisplayState,
        revealed: Mapping[str, str],
        u: float,
    ) -> str | None:
        t = self.landing_offset(revealed)
        dist = user_action_distribution(self.user, revealed, t)
        ids = sorted(dist)
        return ids[_sample_index([dist[a] for a in ids], u)]


@dataclass(frozen=True)
class FrameRecord:
    frame: int
    evidence: Mapping[str, str]
    revealed: Mapping[str, str]
    display: DisplayState
    action: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "evidence", dict(self.evidence))
        object.__setattr__(self, "revealed", dict(self.revealed))


@dataclass(frozen=True)
class EpisodeResult:
    """Outcome of one episode, scored against the true condition."""

    scenario: str
    policy: str
    action: str | None
    action_frame: int
    delay: float
    utility: float
    gold_action: str
    frames: tuple[FrameRecord, ...]
    traces: tuple[Mapping[str, float], ...]
    aborted: bool = False

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        object.__setattr__(self, "traces", tuple(dict(t) for t in self.traces))


def run_episode(
    scenario: Scenario, policy: PolicyConfig, operator
) -> EpisodeResult:
    """Drive one episode: display, operator decision, realized outcome.

    The episode ends at the first action other than the scenario's null
    action, or at the horizon. Simulated operators incur their review and
    response latency before the action lands; the realized utility is the
    model's utility for the chosen action against the true condition at
    the landing delay.
    """
    model = scenario.model
    frames: list[FrameRecord] = []
    traces: list[dict[str, float]] = []
    final_action: str | None = None
    action_frame = scenario.horizon
    landing = float(scenario.horizon)
    aborted = False

    prev_levels: Mapping[str, int] | None = None
    prev_phase: str | None = None
    for f in range(scenario.horizon):
        frame = step(scenario, f)
        ctx = scenario.context_at(f)
        state, revealed = policy.apply(
            scenario, frame.evidence, ctx, prev_levels, prev_phase
        )
        prev_levels, prev_phase = state.levels, ctx.phase
        try:
            action = operator.decide(
                f, state, revealed, _unit(scenario.seed, f, "operator")
            )
        except OperatorDisconnect:
            aborted = True
            frames.append(FrameRecord(f, frame.evidence, revealed, state))
            break
        frames.append(FrameRecord(f, frame.evidence, revealed, state, action))
        traces.append(
            {
                "frame": float(f),
                "shown": float(len(revealed)),
                "value": policy.metric.evaluate(
                    model, revealed, {}, frame.evidence
                ).value
                if revealed
                else 0.0,
            }
        )
        if action is not None and action != scenario.null_action:
            final_action = action
            action_frame = f
            landing = f + operator.landing_offset(revealed)
            break

    if final_action is None and not aborted:
        final_action = scenario.null_action
        action_frame = scenario.horizon
        landing = float(scenario.horizon)

    delay = max(0.0, landing - scenario.onset)
    if final_action is None:
        utility = 0.0
    else:
        utility = model.utility.value(final_action, scenario.ground_truth, delay)
    last_evidence = frames[-1].evidence if frames else {}
    gold, _ = gold_standard_action(model, last_evidence)
    return EpisodeResult(
        scenario=scenario.name,
        policy=policy.name,
        action=final_action,
        action_frame=action_frame,
        delay=delay,
        utility=utility,
        gold_action=gold,
        frames=tuple(frames),
        traces=tuple(traces),
        aborted=aborted,
    )


@dataclass(frozen=True)
class EvaluationRow:
    scenario: str
    policy: str
    episodes: int
    mean_utility: float
    mean_delay: float
    match_rate: float

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "policy": self.policy,
            "episodes": self.episodes,
            "mean_utility": self.mean_utility,
            "mean_delay": self.mean_delay,
            "match_rate": self.match_rate,
        }


def evaluate_policies(
    scenarios: Sequence[Scenario],
    policies: Sequence[PolicyConfig],
    operator,
    replications: int = 1,
) -> list[EvaluationRow]:
    """Score each policy on each scenario over seeded replications.

    Replication r reruns the scenario with seed + r, so results are
    deterministic and policies face identical telemetry.
    """
    if replications < 1:
        raise ValueError("replications must be >= 1")
    rows: list[EvaluationRow] = []
    for scenario in scenarios:
        for policy in policies:
            results = [
                run_episode(replace(scenario, seed=scenario.seed + r), policy, operator)
                for r in range(replications)
            ]
            matches = sum(1 for r in results if r.action == r.gold_action)
            rows.append(
                EvaluationRow(
                    scenario=scenario.name,
                    policy=policy.name,
                    episodes=len(results),
                    mean_utility=sum(r.utility for r in results) / len(results),
                    mean_delay=sum(r.delay for r in results) / len(results),
                    match_rate=matches / len(results),
                )
            )
    return rows
