"""Live-session wire protocol and the session state machine.

Messages are JSON objects with a ``type`` field, one per line on the wire:

* outbound: ``hello``, ``frame``, ``inference``, ``directive``, ``ack``,
  ``end``
* inbound: ``action {n, id}``, ``tick {}`` (advance one frame; lockstep
  clients send it explicitly, the timer server injects it), ``expand
  {subsystem, level}`` (manual detail request, display-only; level -1
  returns the panel to the directed level)

:class:`SessionEngine` is a synchronous, single-writer state machine; the
socket server wraps it without adding any behavior. Every inbound message
is recorded next to the outbound messages it produced, so a logged session
can be replayed byte-for-byte: feed the same inbound records to a fresh
engine and the outbound stream must be identical.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from .model_io import canonical_json
from .simulator import PolicyConfig, Scenario, step

OUTBOUND_TYPES = ("hello", "frame", "inference", "directive", "ack", "end")
INBOUND_TYPES = ("action", "tick", "expand")


def hello_message(session_id: str, scenario: Scenario) -> dict:
    return {
        "type": "hello",
        "session": session_id,
        "actions": [{"id": a.id, "name": a.name} for a in scenario.model.actions],
        "subsystems": [t.subsystem for t in scenario.templates],
        "templates": [
            {"subsystem": t.subsystem, "levels": [sorted(l) for l in t.levels]}
            for t in scenario.templates
        ],
        "clusters": {
            name: sorted(ids)
            for name, ids in scenario.partition.aux_clusters.items()
        },
        "phases": [
            {"start": p.start, "end": p.end, "phase": p.context.phase}
            for p in scenario.phases
        ],
    }


@dataclass
class SessionEngine:
    """One live session: scenario playback, display policy, operator actions.

    All mutation goes through :meth:`handle`; callers must serialize calls
    (the server holds one lock per session). The engine never reads the
    clock: timer pacing is expressed as injected ``tick`` messages, which
    keeps logged sessions replayable.
    """

    scenario: Scenario
    policy: PolicyConfig
    session_id: str = "s1"
    frame: int = -1
    done: bool = False
    log: list[dict] = field(default_factory=list)
    _manual: dict[str, int] = field(default_factory=dict)
    _revealed: dict[str, str] = field(default_factory=dict)
    _evidence: dict[str, str] = field(default_factory=dict)
    _state: object = None
    _prev_phase: str | None = None

    def start(self) -> dict:
        msg = hello_message(self.session_id, self.scenario)
        self.log.append({"out": msg})
        return msg

    def handle(self, msg: Mapping) -> list[dict]:
        """Apply one inbound message; returns the outbound messages it causes."""
        self.log.append({"in": dict(msg)})
        kind = msg.get("type")
        if kind == "tick":
            out = self._step_frame()
        elif kind == "action":
            out = self._apply_action(msg)
        elif kind == "expand":
            out = self._apply_expand(msg)
        else:
            out = [self._ack(ok=False, err=f"unknown message type {kind!r}")]
        self.log.extend({"out": m} for m in out)
        return out

    # -- inbound handlers ---------------------------------------------------

    def _ack(self, ok: bool, err: str | None = None, n: int | None = None) -> dict:
        msg: dict = {"type": "ack", "n": self.frame if n is None else n, "ok": ok}
        if err is not None:
            msg["err"] = err
        return msg

    def _step_frame(self) -> list[dict]:
        if self.done:
            return [self._ack(ok=False, err="session over")]
        self.frame += 1
        scenario = self.scenario
        if self.frame >= scenario.horizon:
            return [self._finish(scenario.null_action, float(scenario.horizon))]
        prev_levels = dict(self._state.levels) if self._state is not None else None
        ctx = scenario.context_at(self.frame)
        self._evidence = dict(step(scenario, self.frame).evidence)
        state, revealed = self.policy.apply(
            scenario, self._evidence, ctx, prev_levels, self._prev_phase
        )
        self._state, self._revealed = state, revealed
        self._prev_phase = ctx.phase
        dist = dict(state.ranked_faults)
        return [
            {"type": "frame", "n": self.frame},
            {"type": "inference", "n": self.frame, "posterior": dist},
            self._directive(),
        ]

    def _apply_action(self, msg: Mapping) -> list[dict]:
        if self.done:
            return [self._ack(ok=False, err="session over", n=msg.get("n"))]
        n = msg.get("n")
        if n != self.frame:
            return [self._ack(ok=False, err=f"stale frame {n}, current {self.frame}")]
        action = msg.get("id")
        if action not in self.scenario.model.action_ids:
            return [self._ack(ok=False, err=f"unknown action {action!r}")]
        if action == self.scenario.null_action:
            return [self._ack(ok=True)]
        return [self._ack(ok=True), self._finish(action, float(self.frame))]

    def _apply_expand(self, msg: Mapping) -> list[dict]:
        if self._state is None or self.done:
            return [self._ack(ok=False, err="no live frame to expand")]
        subsystem = msg.get("subsystem")
        template = next(
            (t for t in self.scenario.templates if t.subsystem == subsystem), None
        )
        if template is None:
            return [self._ack(ok=False, err=f"unknown subsystem {subsystem!r}")]
        level = int(msg.get("level", -1))
        if level < 0:
            self._manual.pop(subsystem, None)
        else:
            self._manual[subsystem] = min(level, len(template.levels) - 1)
        return [self._directive()]

    # -- outbound builders --------------------------------------------------

    def _finish(self, action: str | None, at: float) -> dict:
        self.done = True
        scenario = self.scenario
        delay = max(0.0, at - scenario.onset)
        if action is None:
            utility = 0.0
        else:
            utility = scenario.model.utility.value(
                action, scenario.ground_truth, delay
            )
        return {
            "type": "end",
            "n": min(self.frame, scenario.horizon),
            "action": action,
            "delay": delay,
            "utility": utility,
        }

    def _directive(self) -> dict:
        state = self._state
        levels = dict(state.levels)
        shown = dict(self._revealed)
        for subsystem, manual_level in self._manual.items():
            template = next(
                t for t in self.scenario.templates if t.subsystem == subsystem
            )
            if manual_level > levels.get(subsystem, 0):
                levels[subsystem] = manual_level
            for var in template.levels[levels[subsystem]]:
                if var in self._evidence:
                    shown[var] = self._evidence[var]
        return {
            "type": "directive",
            "n": self.frame,
            "levels": levels,
            "aux": list(state.aux),
            "highlights": [{"id": i, "intensity": v} for i, v in state.highlights],
            "faults": [{"state": s, "p": p} for s, p in state.ranked_faults],
            "actions": [{"id": a, "eu": eu} for a, eu in state.ranked_actions],
            "values": {k: shown[k] for k in sorted(shown)},
        }


_session_counter = itertools.count(1)


def next_session_id() -> str:
    return f"s{next(_session_counter)}"


def run_script(
    scenario: Scenario, policy: PolicyConfig, inbound: list[Mapping]
) -> list[dict]:
    """Run a whole session against a list of inbound messages (no sockets)."""
    engine = SessionEngine(scenario, policy, session_id="replay")
    out = [engine.start()]
    for msg in inbound:
        out.extend(engine.handle(msg))
        if engine.done:
            break
    return out


def outbound_lines(log: list[Mapping]) -> list[str]:
    return [canonical_json(r["out"]) for r in log if "out" in r]


def inbound_messages(log: list[Mapping]) -> list[dict]:
    return [dict(r["in"]) for r in log if "in" in r]


def replay_log(
    scenario: Scenario, policy: PolicyConfig, log: list[Mapping]
) -> tuple[list[str], list[str]]:
    """Re-run a logged session; returns (original, replayed) outbound lines.

    The hello message's session id is the only intentionally unstable field,
    so replays run under the id recorded in the log.
    """
    recorded = [r for r in log if "in" in r or "out" in r]
    original = outbound_lines(recorded)
    hello = next((r["out"] for r in recorded if "out" in r), None)
    session_id = hello.get("session", "replay") if hello else "replay"
    engine = SessionEngine(scenario, policy, session_id=session_id)
    replayed = [canonical_json(engine.start())]
    for msg in inbound_messages(recorded):
        replayed.extend(canonical_json(m) for m in engine.handle(msg))
    return original, replayed
